#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by preprocessing and training. Scalar
// reference implementations always exist; an AVX2 variant is selected at
// runtime when the CPU supports it. Equivalence between backends is
// covered by tests/test_kernels.cpp.
namespace longadapt::kernels {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double weighted_sum(const double* w, const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// out[i] = mask[i] ? 0 : (x[i] - mean[i]) * inv_sd[i]
void standardize(const double* x, const double* mean, const double* inv_sd,
                 const std::uint8_t* mask, double* out, std::size_t n);

const char* active_backend();
// Test hook: pin the scalar backend regardless of CPU support.
void force_scalar(bool on);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double weighted_sum(const double* w, const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void standardize(const double* x, const double* mean, const double* inv_sd,
                 const std::uint8_t* mask, double* out, std::size_t n);
}  // namespace scalar

#ifdef LONGADAPT_AVX2_BUILT
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double weighted_sum(const double* w, const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void standardize(const double* x, const double* mean, const double* inv_sd,
                 const std::uint8_t* mask, double* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace longadapt::kernels
