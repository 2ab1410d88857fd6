#include <doctest.h>

#include <cmath>

#include "netvol/membership.hpp"
#include "netvol/rng.hpp"
#include "netvol/sampler.hpp"

using namespace netvol;

TEST_CASE("required_sample_size") {
    CHECK(required_sample_size(1) == 3);
    CHECK(required_sample_size(8) == 379);
    // 2.1^13 = 15447.237..., so the ceiling is 15448.
    CHECK(required_sample_size(13) == 15448);
    CHECK_THROWS(required_sample_size(0));
}

TEST_CASE("ns-bilocal sampler: determinism and validity") {
    auto a = sample_ns_bilocal(20, 7);
    auto b = sample_ns_bilocal(20, 7);
    REQUIRE(a.points.size() == 20);
    CHECK(a.attempts == b.attempts);
    CHECK(a.attempts >= a.points.size());
    for (int i = 0; i < 13; ++i) CHECK(a.points[0].v[i] == b.points[0].v[i]);

    for (const auto& v : a.points) {
        Behavior beh = behavior_from_correlators(v);
        CHECK(beh.is_valid(1e-12));
    }

    auto c = sample_ns_bilocal(20, 8);
    bool differs = false;
    for (int i = 0; i < 13; ++i) differs |= a.points[0].v[i] != c.points[0].v[i];
    CHECK(differs);
}

TEST_CASE("ns-bilocal acceptance rate regression") {
    // Frozen from the first large run: 20000 acceptances over 477065529
    // draws, rate 4.192e-5. This is the volume of N(B) in the 13-cube.
    auto batch = sample_ns_bilocal(2000, 424242);
    double rate = batch.acceptance_rate();
    CHECK(rate > 3.55e-5);
    CHECK(rate < 4.85e-5);
}

TEST_CASE("simplex sampler: symmetry of coordinate means") {
    {
        auto pts = simplex_points(2, 100000, 5);
        double mean = 0.0;
        for (const auto& p : pts) mean += p[0];
        mean /= static_cast<double>(pts.size());
        CHECK(std::fabs(mean - 0.5) < 0.005);
    }
    {
        auto pts = simplex_points(8, 100000, 6);
        for (int j = 0; j < 8; ++j) {
            double mean = 0.0;
            for (const auto& p : pts) mean += p[static_cast<size_t>(j)];
            mean /= static_cast<double>(pts.size());
            CHECK(std::fabs(mean - 1.0 / 8) < 0.003);
        }
    }
}

TEST_CASE("simplex sampler matches the flat-Dirichlet covariance") {
    const int d = 8, n = 100000;
    auto pts = simplex_points(d, n, 11);
    // Flat Dirichlet: Cov(p_i,p_j) = -1/(d^2 (d+1)) off the diagonal.
    double expect = -1.0 / (d * d * (d + 1.0));
    for (auto [i, j] : {std::pair{0, 1}, {2, 5}, {6, 7}}) {
        double mi = 0, mj = 0;
        for (const auto& p : pts) {
            mi += p[static_cast<size_t>(i)];
            mj += p[static_cast<size_t>(j)];
        }
        mi /= n;
        mj /= n;
        double cov = 0, var_of_prod = 0;
        for (const auto& p : pts) {
            double t = (p[static_cast<size_t>(i)] - mi) * (p[static_cast<size_t>(j)] - mj);
            cov += t;
            var_of_prod += t * t;
        }
        cov /= n;
        var_of_prod = var_of_prod / n - cov * cov;
        double sigma = std::sqrt(var_of_prod / n);
        CHECK(std::fabs(cov - expect) < 3.0 * sigma);
    }
}

TEST_CASE("chi-square uniformity of the raw draws at alpha=0.001") {
    // 13-cube coordinates before rejection: bin the first three coordinates
    // of the raw attempt stream into 4 bins each (64 cells).
    const int n = 100000;
    std::vector<long> cells(64, 0);
    for (int k = 0; k < n; ++k) {
        RngStream rng(909, static_cast<std::uint64_t>(k));
        int c = 0;
        for (int j = 0; j < 3; ++j) {
            double u = rng.next_unit();
            c = c * 4 + std::min(3, static_cast<int>(u * 4));
        }
        ++cells[static_cast<size_t>(c)];
    }
    double expect = n / 64.0, chi2 = 0.0;
    for (long c : cells) chi2 += (c - expect) * (c - expect) / expect;
    // chi^2_{63} 0.999-quantile by Wilson-Hilferty.
    double k = 63.0, z = 3.0902;
    double thresh = k * std::pow(1.0 - 2.0 / (9 * k) + z * std::sqrt(2.0 / (9 * k)), 3.0);
    CHECK(chi2 < thresh);

    // Simplex sampler: the first coordinate has P(p1 > t) = (1-t)^(d-1);
    // its CDF transform must be uniform. 16 equiprobable cells.
    const int d = 8;
    auto pts = simplex_points(d, n, 910);
    std::vector<long> bins(16, 0);
    for (const auto& p : pts) {
        double u = 1.0 - std::pow(1.0 - p[0], d - 1.0);
        ++bins[std::min<size_t>(15, static_cast<size_t>(u * 16))];
    }
    expect = n / 16.0;
    chi2 = 0.0;
    for (long c : bins) chi2 += (c - expect) * (c - expect) / expect;
    k = 15.0;
    thresh = k * std::pow(1.0 - 2.0 / (9 * k) + z * std::sqrt(2.0 / (9 * k)), 3.0);
    CHECK(chi2 < thresh);
}

TEST_CASE("hybrid tables from the zero correlator vector are uniform") {
    CorrelatorVector v{};
    HybridDataTable h = hybrid_from_ns_bilocal(v);
    h.validate();
    for (double p : h.observational.table) CHECK(p == doctest::Approx(1.0 / 8));
    for (double p : h.do_a) CHECK(p == doctest::Approx(0.5));
    for (double p : h.do_c) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("hybrid table of the deterministic point a=x, b=0, c=z") {
    Behavior pb{ScenarioSpec::bilocality(), std::vector<double>(32, 0.0)};
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) pb.at(x, 0, z, x, z) = 1.0;
    CorrelatorVector v = correlators_from_behavior(pb);
    HybridDataTable h = hybrid_from_ns_bilocal(v);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                double want = (b == 0 && a == b && c == b) ? 1.0 : 0.0;
                CHECK(h.observational.at(a, b, c) == doctest::Approx(want).epsilon(1e-12));
            }
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a)
            CHECK(h.pa_do(a, b) == doctest::Approx(a == b ? 1.0 : 0.0));
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
            CHECK(h.pc_do(c, b) == doctest::Approx(c == b ? 1.0 : 0.0));
}

TEST_CASE("hybrid marginal consistency on sampled points") {
    auto batch = sample_hybrid_tables(25, 31);
    REQUIRE(batch.points.size() == 25);
    auto corr = sample_ns_bilocal(25, 31);
    for (size_t i = 0; i < batch.points.size(); ++i) {
        const auto& h = batch.points[i];
        h.validate();
        Behavior pb = behavior_from_correlators(corr.points[i]);
        // sum_{a,c} p(a,b,c) = pB(b | x=z=b).
        for (int b = 0; b < 2; ++b) {
            double lhs = 0.0, rhs = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) {
                    lhs += h.observational.at(a, b, c);
                    rhs += pb.at(a, b, c, b, b);
                }
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("evans nsi sampler emits only NSI-compatible points") {
    NsiSamplerOptions so;
    so.jobs = 2;
    auto r = sample_evans_nsi(ScenarioSpec::evans(), 25, 17, so);
    REQUIRE(r.batch.points.size() == 25);
    CHECK(r.batch.attempts >= 25);
    sets::OracleOptions oo;
    for (const auto& p : r.batch.points) {
        CHECK(p.is_valid(1e-9));
        CHECK(sets::test_evans_nsi(p, oo).status == sets::Status::Inside);
    }
    // Determinism across runs.
    auto r2 = sample_evans_nsi(ScenarioSpec::evans(), 25, 17, so);
    CHECK(r2.batch.attempts == r.batch.attempts);
    for (size_t i = 0; i < 8; ++i)
        CHECK(r2.batch.points[0].table[i] == r.batch.points[0].table[i]);
}
