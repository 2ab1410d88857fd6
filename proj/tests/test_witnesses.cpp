#include <doctest.h>

#include <array>
#include <cmath>

#include "netvol/rng.hpp"
#include "netvol/sampler.hpp"
#include "netvol/witnesses.hpp"

using namespace netvol;
using witness::covariance_check;
using witness::entropic_check;
using witness::finner_check;

namespace {

Behavior ghz() {
    Behavior p{ScenarioSpec::triangle(), std::vector<double>(8, 0.0)};
    p.at(0, 0, 0) = 0.5;
    p.at(1, 1, 1) = 0.5;
    return p;
}

// Explicit classical triangle model: latents with finite support and random
// stochastic response tables.
Behavior random_triangle_model(std::uint64_t stream, int support = 3) {
    RngStream rng(616, stream);
    auto simplex = [&](int d) {
        std::vector<double> w(static_cast<size_t>(d));
        double s = 0;
        for (double& x : w) {
            x = rng.next_exponential();
            s += x;
        }
        for (double& x : w) x /= s;
        return w;
    };
    auto lam = simplex(support), gam = simplex(support), mu = simplex(support);
    // response[a | l, m] etc. as Bernoulli parameters.
    std::vector<double> ra(static_cast<size_t>(support * support));
    std::vector<double> rb(static_cast<size_t>(support * support));
    std::vector<double> rc(static_cast<size_t>(support * support));
    for (auto* t : {&ra, &rb, &rc})
        for (double& x : *t) x = rng.next_unit();
    Behavior p{ScenarioSpec::triangle(), std::vector<double>(8, 0.0)};
    for (int l = 0; l < support; ++l)
        for (int g = 0; g < support; ++g)
            for (int m = 0; m < support; ++m) {
                double w = lam[static_cast<size_t>(l)] * gam[static_cast<size_t>(g)] * mu[static_cast<size_t>(m)];
                double pa1 = ra[static_cast<size_t>(l * support + m)];
                double pb1 = rb[static_cast<size_t>(l * support + g)];
                double pc1 = rc[static_cast<size_t>(g * support + m)];
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c)
                            p.at(a, b, c) += w * (a ? pa1 : 1 - pa1) * (b ? pb1 : 1 - pb1) *
                                             (c ? pc1 : 1 - pc1);
            }
    return p;
}

Behavior relabel_parties(const Behavior& p, int perm) {
    // perm indexes the 6 permutations of (A,B,C).
    static const int table[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Behavior q{p.spec, std::vector<double>(8, 0.0)};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                int o[3] = {a, b, c};
                q.at(o[table[perm][0]], o[table[perm][1]], o[table[perm][2]]) += p.at(a, b, c);
            }
    return q;
}

// Brute-force grid feasibility of the covariance split over
// (xL, yL, zG) at the given resolution.
bool covariance_grid_feasible(const Behavior& p, int steps) {
    double ea = 0, eb = 0, ec = 0, eab = 0, ebc = 0, eac = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                double w = p.at(a, b, c);
                double sa = a ? -1 : 1, sb = b ? -1 : 1, sc = c ? -1 : 1;
                ea += sa * w;
                eb += sb * w;
                ec += sc * w;
                eab += sa * sb * w;
                ebc += sb * sc * w;
                eac += sa * sc * w;
            }
    double va = 1 - ea * ea, vb = 1 - eb * eb, vc = 1 - ec * ec;
    double cab2 = (eab - ea * eb) * (eab - ea * eb);
    double cbc2 = (ebc - eb * ec) * (ebc - eb * ec);
    double cac2 = (eac - ea * ec) * (eac - ea * ec);
    for (int i = 0; i <= steps; ++i) {
        double xl = va * i / steps;
        double xm = va - xl;
        for (int j = 0; j <= steps; ++j) {
            double yl = vb * j / steps;
            if (xl * yl < cab2) continue;
            double yg = vb - yl;
            for (int k = 0; k <= steps; ++k) {
                double zg = vc * k / steps;
                if (yg * zg < cbc2) continue;
                double zm = vc - zg;
                if (xm * zm >= cac2) return true;
            }
        }
    }
    return false;
}

}  // namespace

TEST_CASE("finner: uniform ok, GHZ violated with margin 1/2 - sqrt(1/8)") {
    auto r = finner_check(Behavior::uniform(ScenarioSpec::triangle()));
    CHECK_FALSE(r.violated);
    CHECK(r.margin == doctest::Approx(1.0 / 8 - std::sqrt(1.0 / 8)));

    auto g = finner_check(ghz());
    CHECK(g.violated);
    CHECK(g.margin == doctest::Approx(0.5 - std::sqrt(1.0 / 8)).epsilon(1e-12));
    CHECK(g.margin == doctest::Approx(0.14644660940672627).epsilon(1e-9));
}

TEST_CASE("entropic: uniform ok, GHZ violated with margin 1") {
    auto r = entropic_check(Behavior::uniform(ScenarioSpec::triangle()));
    CHECK_FALSE(r.violated);
    CHECK(r.margin == doctest::Approx(-1.0));  // I = 0 and H = 1 per pivot

    auto g = entropic_check(ghz());
    CHECK(g.violated);
    CHECK(g.margin == doctest::Approx(1.0));
}

TEST_CASE("covariance: product ok, GHZ violated") {
    Behavior prod{ScenarioSpec::triangle(), std::vector<double>(8, 0.0)};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                prod.at(a, b, c) = 0.3 * (a ? 0.4 : 0.6) * (b ? 0.7 : 0.3) * (c ? 0.5 : 0.5) /
                                   0.3;  // any product
    auto r = covariance_check(prod);
    CHECK_FALSE(r.violated);

    auto g = covariance_check(ghz());
    CHECK(g.violated);
    CHECK(g.margin > 0.5);
}

TEST_CASE("all witnesses accept 10^4 explicit classical models") {
    for (int k = 0; k < 10000; ++k) {
        Behavior p = random_triangle_model(static_cast<std::uint64_t>(k));
        CHECK_FALSE(finner_check(p).violated);
        CHECK_FALSE(entropic_check(p).violated);
        CHECK_FALSE(covariance_check(p).violated);
    }
}

TEST_CASE("finner margin is invariant under outcome relabelings") {
    auto batch = sample_simplex(ScenarioSpec::triangle(), 50, 41);
    for (const auto& p : batch.points) {
        double m = finner_check(p).margin;
        // Flip each party's outcome bit.
        Behavior q{p.spec, std::vector<double>(8, 0.0)};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) q.at(1 - a, 1 - b, c) = p.at(a, b, c);
        CHECK(finner_check(q).margin == doctest::Approx(m).epsilon(1e-12));
    }
}

TEST_CASE("entropic and covariance margins are invariant under party relabelings") {
    auto batch = sample_simplex(ScenarioSpec::triangle(), 30, 42);
    for (const auto& p : batch.points) {
        double me = entropic_check(p).margin;
        double mc = covariance_check(p).margin;
        for (int perm = 0; perm < 6; ++perm) {
            Behavior q = relabel_parties(p, perm);
            CHECK(entropic_check(q).margin == doctest::Approx(me).epsilon(1e-9));
            // The covariance test is symmetric in (A,C) by the split
            // structure, and relabeling consistently permutes the sources.
            CHECK(covariance_check(q).violated == covariance_check(p).violated);
        }
        (void)mc;
    }
}

TEST_CASE("covariance interval reasoning agrees with a 3-split grid on 10^3 points") {
    auto batch = sample_simplex(ScenarioSpec::triangle(), 1000, 43);
    int violated = 0;
    for (const auto& p : batch.points) {
        auto r = covariance_check(p);
        if (r.violated) ++violated;
        // Skip the resolution-limited boundary band.
        if (std::fabs(r.margin) < 5e-3) continue;
        bool grid = covariance_grid_feasible(p, 1000);
        CHECK_MESSAGE(grid == !r.violated, "margin ", r.margin);
    }
    CHECK(violated > 5);  // around 3.7% of the simplex
}
