#include <doctest.h>

#include <cmath>
#include <vector>

#include "longadapt/common.hpp"
#include "longadapt/kernels.hpp"

using namespace longadapt;
namespace k = longadapt::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-3.0, 3.0);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 13u, 64u, 101u}) {
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);
    double dot = 0, sum = 0, sumsq = 0, wsum = 0, sqd = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      sum += a[i];
      sumsq += a[i] * a[i];
      wsum += a[i] * b[i];
      const double d = a[i] - b[i];
      sqd += d * d;
    }
    CHECK(k::scalar::dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-12));
    CHECK(k::scalar::sum(a.data(), n) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(k::scalar::sumsq(a.data(), n) == doctest::Approx(sumsq).epsilon(1e-12));
    CHECK(k::scalar::weighted_sum(a.data(), b.data(), n) ==
          doctest::Approx(wsum).epsilon(1e-12));
    CHECK(k::scalar::squared_distance(a.data(), b.data(), n) ==
          doctest::Approx(sqd).epsilon(1e-12));
  }
}

TEST_CASE("dispatched backend is equivalent to scalar") {
  Rng rng(2);
  INFO("active backend: ", k::active_backend());
  for (std::size_t n : {1u, 2u, 4u, 5u, 8u, 9u, 16u, 31u, 32u, 33u, 200u}) {
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);
    CHECK(k::dot(a.data(), b.data(), n) ==
          doctest::Approx(k::scalar::dot(a.data(), b.data(), n)).epsilon(1e-12));
    CHECK(k::sum(a.data(), n) ==
          doctest::Approx(k::scalar::sum(a.data(), n)).epsilon(1e-12));
    CHECK(k::sumsq(a.data(), n) ==
          doctest::Approx(k::scalar::sumsq(a.data(), n)).epsilon(1e-12));
    CHECK(k::weighted_sum(a.data(), b.data(), n) ==
          doctest::Approx(k::scalar::weighted_sum(a.data(), b.data(), n))
              .epsilon(1e-12));
    CHECK(k::squared_distance(a.data(), b.data(), n) ==
          doctest::Approx(k::scalar::squared_distance(a.data(), b.data(), n))
              .epsilon(1e-12));

    auto y1 = b, y2 = b;
    k::axpy(0.75, a.data(), y1.data(), n);
    k::scalar::axpy(0.75, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
  }
}

TEST_CASE("standardize kernel honors the mask in every lane") {
  Rng rng(3);
  for (std::size_t n : {1u, 4u, 6u, 8u, 17u}) {
    auto x = random_vec(rng, n);
    auto mean = random_vec(rng, n);
    std::vector<double> inv_sd(n), out_a(n), out_b(n);
    std::vector<std::uint8_t> mask(n);
    for (std::size_t i = 0; i < n; ++i) {
      inv_sd[i] = rng.uniform(0.1, 2.0);
      mask[i] = rng.uniform() < 0.4 ? 1 : 0;
    }
    k::standardize(x.data(), mean.data(), inv_sd.data(), mask.data(),
                   out_a.data(), n);
    k::scalar::standardize(x.data(), mean.data(), inv_sd.data(), mask.data(),
                           out_b.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(out_a[i] == doctest::Approx(out_b[i]).epsilon(1e-12));
      if (mask[i]) CHECK(out_a[i] == 0.0);
    }
  }
}

TEST_CASE("force_scalar pins the scalar backend") {
  k::force_scalar(true);
  CHECK(std::string(k::active_backend()) == "scalar");
  std::vector<double> a = {1, 2, 3, 4, 5};
  CHECK(k::sum(a.data(), a.size()) == 15.0);
  k::force_scalar(false);
}
