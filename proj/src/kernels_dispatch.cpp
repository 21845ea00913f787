#include <atomic>

#include "longadapt/common.hpp"
#include "longadapt/kernels.hpp"

namespace longadapt {

uint64_t hash_string(const std::string& s) {
  // FNV-1a
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::parse_error: return "ParseError";
    case Errc::missing_session: return "MissingSession";
    case Errc::schema_error: return "SchemaError";
    case Errc::non_monotonic_timestamps: return "NonMonotonicTimestamps";
    case Errc::column_mismatch: return "ColumnMismatch";
    case Errc::empty_window_set: return "EmptyWindowSet";
    case Errc::empty_training_set: return "EmptyTrainingSet";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::single_class_data: return "SingleClassData";
    case Errc::empty_data: return "EmptyData";
    case Errc::non_finite_feature: return "NonFiniteFeature";
    case Errc::invalid_split: return "InvalidSplit";
    case Errc::empty_both_domains: return "EmptyBothDomains";
    case Errc::too_few_target_instances: return "TooFewTargetInstances";
    case Errc::single_class_target: return "SingleClassTarget";
    case Errc::unweightable_model_kind: return "UnweightableModelKind";
    case Errc::degenerate_covariance: return "DegenerateCovariance";
    case Errc::single_class: return "SingleClass";
    case Errc::all_zero_differences: return "AllZeroDifferences";
    case Errc::row_sum_mismatch: return "RowSumMismatch";
    case Errc::degenerate_agreement: return "DegenerateAgreement";
    case Errc::config_error: return "ConfigError";
    case Errc::empty_results: return "EmptyResults";
  }
  return "Error";
}

}  // namespace longadapt

namespace longadapt::kernels {

namespace {

std::atomic<bool> g_force_scalar{false};

bool avx2_supported() {
#if defined(LONGADAPT_AVX2_BUILT) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const bool g_has_avx2 = avx2_supported();

inline bool use_avx2() {
#ifdef LONGADAPT_AVX2_BUILT
  return g_has_avx2 && !g_force_scalar.load(std::memory_order_relaxed);
#else
  return false;
#endif
}

}  // namespace

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

const char* active_backend() { return use_avx2() ? "avx2" : "scalar"; }

#ifdef LONGADAPT_AVX2_BUILT
#define LONGADAPT_DISPATCH(fn, ...) \
  return use_avx2() ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#define LONGADAPT_DISPATCH_VOID(fn, ...)   \
  if (use_avx2()) avx2::fn(__VA_ARGS__);   \
  else scalar::fn(__VA_ARGS__)
#else
#define LONGADAPT_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#define LONGADAPT_DISPATCH_VOID(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) {
  LONGADAPT_DISPATCH(dot, a, b, n);
}
double sum(const double* a, std::size_t n) { LONGADAPT_DISPATCH(sum, a, n); }
double sumsq(const double* a, std::size_t n) { LONGADAPT_DISPATCH(sumsq, a, n); }
double weighted_sum(const double* w, const double* x, std::size_t n) {
  LONGADAPT_DISPATCH(weighted_sum, w, x, n);
}
double squared_distance(const double* a, const double* b, std::size_t n) {
  LONGADAPT_DISPATCH(squared_distance, a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  LONGADAPT_DISPATCH_VOID(axpy, alpha, x, y, n);
}
void standardize(const double* x, const double* mean, const double* inv_sd,
                 const std::uint8_t* mask, double* out, std::size_t n) {
  LONGADAPT_DISPATCH_VOID(standardize, x, mean, inv_sd, mask, out, n);
}

}  // namespace longadapt::kernels
