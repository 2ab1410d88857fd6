#include <doctest.h>

#include <cmath>
#include <vector>

#include "netvol/kernels.hpp"
#include "netvol/rng.hpp"

using namespace netvol;

namespace {
std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
    RngStream rng(99, stream);
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_symmetric() * 3.0;
    return v;
}
}  // namespace

TEST_CASE("dot and axpy basics") {
    std::vector<double> x{1, 2, 3}, y{4, 5, 6};
    CHECK(kern::dot(x, y) == doctest::Approx(32.0));
    kern::axpy(2.0, x, y);
    CHECK(y[0] == doctest::Approx(6.0));
    CHECK(y[2] == doctest::Approx(12.0));
}

TEST_CASE("sum_abs_diff and min_value") {
    std::vector<double> x{0.5, -1.0, 2.0}, y{0.0, 1.0, 2.0};
    CHECK(kern::sum_abs_diff(x, y) == doctest::Approx(2.5));
    CHECK(kern::min_value(x) == doctest::Approx(-1.0));
    CHECK(std::isinf(kern::min_value({})));
}

TEST_CASE("active backend matches the scalar reference on random data") {
    // Equivalence across lengths including non-multiples of the vector width.
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 64, 257, 1000}) {
        auto x = random_vec(n, 2 * n);
        auto y = random_vec(n, 2 * n + 1);
        double tol = 1e-12 * (static_cast<double>(n) + 1.0);

        CHECK(kern::dot(x, y) ==
              doctest::Approx(kern::scalar::dot(x.data(), y.data(), n)).epsilon(tol));
        CHECK(kern::sum_abs_diff(x, y) ==
              doctest::Approx(kern::scalar::sum_abs_diff(x.data(), y.data(), n)).epsilon(tol));
        if (n > 0)
            CHECK(kern::min_value(x) == kern::scalar::min_value(x.data(), n));

        auto y1 = y, y2 = y;
        kern::axpy(0.7, x, y1);
        kern::scalar::axpy(0.7, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));

        auto s1 = y, s2 = y;
        kern::scale_to(1.3, x, s1);
        kern::scalar::scale_to(1.3, x.data(), s2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variant agrees with scalar when available") {
    if (!kern::avx2_supported()) return;
    for (std::size_t n : {5, 16, 33, 128, 1001}) {
        auto x = random_vec(n, 7 * n);
        auto y = random_vec(n, 7 * n + 3);
        CHECK(kern::avx2::dot(x.data(), y.data(), n) ==
              doctest::Approx(kern::scalar::dot(x.data(), y.data(), n)).epsilon(1e-12));
        CHECK(kern::avx2::sum_abs_diff(x.data(), y.data(), n) ==
              doctest::Approx(kern::scalar::sum_abs_diff(x.data(), y.data(), n)).epsilon(1e-12));
        CHECK(kern::avx2::min_value(x.data(), n) == kern::scalar::min_value(x.data(), n));
        auto y1 = y, y2 = y;
        kern::avx2::axpy(-0.3, x.data(), y1.data(), n);
        kern::scalar::axpy(-0.3, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
    }
}
#endif
