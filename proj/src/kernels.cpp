#include "netvol/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace netvol::kern {

namespace {

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sum_abs_diff)(const double*, const double*, std::size_t);
    double (*min_value)(const double*, std::size_t);
    void (*scale_to)(double, const double*, double*, std::size_t);
    Backend backend;
};

constexpr Vtable kScalar{scalar::dot, scalar::axpy, scalar::sum_abs_diff,
                         scalar::min_value, scalar::scale_to, Backend::Scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2{avx2::dot, avx2::axpy, avx2::sum_abs_diff,
                       avx2::min_value, avx2::scale_to, Backend::Avx2};
#endif

const Vtable& select_backend() {
    static const Vtable* chosen = [] {
        const char* env = std::getenv("NETVOL_KERNELS");
#if defined(__x86_64__) || defined(_M_X64)
        bool want_avx2 = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
        if (env != nullptr) {
            if (std::strcmp(env, "scalar") == 0) want_avx2 = false;
            // "avx2" keeps the CPU check; requesting it on unsupported
            // hardware silently falls back to scalar.
        }
        if (want_avx2) return &kAvx2;
#else
        (void)env;
#endif
        return &kScalar;
    }();
    return *chosen;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return select_backend().backend; }

std::string_view backend_name() {
    return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> x, std::span<const double> y) {
    return select_backend().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    select_backend().axpy(a, x.data(), y.data(), x.size());
}

double sum_abs_diff(std::span<const double> x, std::span<const double> y) {
    return select_backend().sum_abs_diff(x.data(), y.data(), x.size());
}

double min_value(std::span<const double> x) {
    return select_backend().min_value(x.data(), x.size());
}

void scale_to(double a, std::span<const double> x, std::span<double> y) {
    select_backend().scale_to(a, x.data(), y.data(), x.size());
}

}  // namespace netvol::kern
