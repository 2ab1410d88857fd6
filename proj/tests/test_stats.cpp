#include <doctest.h>

#include <cmath>

#include "netvol/rng.hpp"
#include "netvol/stats.hpp"

using namespace netvol;
using stats::VerdictCount;

TEST_CASE("wilson interval for 50 of 100 at 99%") {
    auto [lo, hi] = stats::wilson_interval(50, 100);
    CHECK(lo == doctest::Approx(0.37530).epsilon(5e-4));
    CHECK(hi == doctest::Approx(0.62470).epsilon(5e-4));
}

TEST_CASE("estimate_volume basics") {
    {
        std::vector<VerdictCount::Kind> v(100, VerdictCount::Inside);
        auto e = stats::estimate_volume(v, "x");
        CHECK(e.fraction == 0.0);
        CHECK(e.ci_low == 0.0);
        CHECK(e.ci_high < 0.08);
    }
    {
        std::vector<VerdictCount::Kind> v;
        for (int i = 0; i < 20; ++i) v.push_back(VerdictCount::Outside);
        for (int i = 0; i < 70; ++i) v.push_back(VerdictCount::Inside);
        for (int i = 0; i < 10; ++i) v.push_back(VerdictCount::Indeterminate);
        auto e = stats::estimate_volume(v, "x");
        CHECK(e.n_indeterminate == 10);
        CHECK(e.fraction == doctest::Approx(0.2));
        // Widened: low from 20/100, high from 30/100.
        CHECK(e.ci_low == doctest::Approx(stats::wilson_interval(20, 100).first));
        CHECK(e.ci_high == doctest::Approx(stats::wilson_interval(30, 100).second));
        CHECK(e.ci_low <= e.fraction);
        CHECK(e.ci_high >= e.fraction);
    }
    CHECK_THROWS(stats::estimate_volume({}, "empty"));
}

TEST_CASE("interval width shrinks like 1/sqrt(n)") {
    auto w = [](long n) {
        auto [lo, hi] = stats::wilson_interval(n / 2, n);
        return hi - lo;
    };
    CHECK(w(400) < w(100));
    CHECK(w(400) == doctest::Approx(0.5 * w(100)).epsilon(0.08));
}

TEST_CASE("wilson coverage over 10^3 synthetic experiments is at least 98%") {
    for (double q : {0.3, 0.02}) {
        int covered = 0;
        const int runs = 1000, n = 500;
        for (int r = 0; r < runs; ++r) {
            RngStream rng(5150 + static_cast<std::uint64_t>(q * 1000), static_cast<std::uint64_t>(r));
            long k = 0;
            for (int i = 0; i < n; ++i)
                if (rng.next_unit() < q) ++k;
            auto [lo, hi] = stats::wilson_interval(k, n);
            if (q >= lo && q <= hi) ++covered;
        }
        CHECK(covered >= 980);
    }
}

TEST_CASE("histogram of all-zero distances has a single occupied bin") {
    auto h = stats::distance_histogram(std::vector<double>(25, 0.0), 10);
    CHECK(h.mode_bin == 0);
    long total = 0;
    for (long c : h.counts) total += c;
    CHECK(total == 25);
    CHECK(h.counts[0] == 25);
    CHECK_FALSE(h.tail_rate.has_value());
}

TEST_CASE("histogram mass conservation and monotone edges") {
    std::vector<double> d{0.1, 0.2, 0.2, 0.5, 0.9};
    auto h = stats::distance_histogram(d, 4);
    long total = 0;
    for (long c : h.counts) total += c;
    CHECK(total == 5);
    for (size_t i = 0; i + 1 < h.bin_edges.size(); ++i) CHECK(h.bin_edges[i] < h.bin_edges[i + 1]);
    CHECK_THROWS(stats::distance_histogram({0.5, 1.5}, 4));
}

TEST_CASE("fewer than 10 positive distances: no tail fit") {
    std::vector<double> d(30, 0.0);
    for (int i = 0; i < 9; ++i) d[static_cast<size_t>(i)] = 0.05 * (i + 1);
    auto h = stats::distance_histogram(d, 8);
    CHECK_FALSE(h.tail_rate.has_value());
}

TEST_CASE("synthetic exponential sample refits its rate") {
    // Rate-5 exponentials truncated to [0,1]; at n = 1e4 the fitted decay
    // rate lands within 0.5 of the truth.
    std::vector<double> d;
    RngStream rng(616161, 0);
    while (d.size() < 10000) {
        double x = rng.next_exponential() / 5.0;
        if (x <= 1.0) d.push_back(x);
    }
    auto h = stats::distance_histogram(d, 24);
    REQUIRE(h.tail_rate.has_value());
    CHECK(*h.tail_rate == doctest::Approx(5.0).epsilon(0.1));
    REQUIRE(h.tail_fit_r2.has_value());
    CHECK(*h.tail_fit_r2 > 0.9);
}
