#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace longadapt {

enum class Errc {
  parse_error,
  missing_session,
  schema_error,
  non_monotonic_timestamps,
  column_mismatch,
  empty_window_set,
  empty_training_set,
  dimension_mismatch,
  single_class_data,
  empty_data,
  non_finite_feature,
  invalid_split,
  empty_both_domains,
  too_few_target_instances,
  single_class_target,
  unweightable_model_kind,
  degenerate_covariance,
  single_class,
  all_zero_differences,
  row_sum_mismatch,
  degenerate_agreement,
  config_error,
  empty_results,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline bool is_missing(double v) { return std::isnan(v); }
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Deterministic splitmix64 stream. std::random distributions are
// implementation-defined, so all sampling goes through this.
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  // Box-Muller; one value per call, cached pair discarded for simplicity.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }
};

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 12) + (a >> 4);
  return a;
}

uint64_t hash_string(const std::string& s);

}  // namespace longadapt
