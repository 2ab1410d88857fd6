#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense arithmetic kernels used by the simplex inner loops and the batch
// statistics. A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. The environment
// variable NETVOL_KERNELS=scalar|avx2 forces a backend (before first use).

namespace netvol::kern {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
std::string_view backend_name();
bool avx2_supported();

/// sum_i x[i] * y[i]
double dot(std::span<const double> x, std::span<const double> y);

/// y[i] += a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

/// sum_i |x[i] - y[i]|
double sum_abs_diff(std::span<const double> x, std::span<const double> y);

/// min_i x[i]; +inf for an empty span
double min_value(std::span<const double> x);

/// y[i] = a * x[i]
void scale_to(double a, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum_abs_diff(const double* x, const double* y, std::size_t n);
double min_value(const double* x, std::size_t n);
void scale_to(double a, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum_abs_diff(const double* x, const double* y, std::size_t n);
double min_value(const double* x, std::size_t n);
void scale_to(double a, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace netvol::kern
