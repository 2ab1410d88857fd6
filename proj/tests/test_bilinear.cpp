#include <doctest.h>

#include <cmath>
#include <vector>

#include "netvol/bilinear.hpp"
#include "netvol/rng.hpp"

#include "grid_oracle.hpp"

using namespace netvol;
using lp::Sense;
using qp::BilinearProgram;
using qp::BnbOptions;
using qp::BnbStatus;

namespace {
using gridtest::GridInstance;
using gridtest::grid_min_slack;
using gridtest::random_instance;
using gridtest::to_program;
}  // namespace

TEST_CASE("minimize w = u*v with u+v = 1 attains 0 at the boundary") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.0, 1.0);
    int v = bp.base.add_var(0.0, 1.0);
    int w = bp.base.add_var(0.0, 1.0, 1.0);
    bp.base.add_row(Sense::Eq, 1.0, {{u, 1.0}, {v, 1.0}});
    bp.products.push_back({w, u, v});
    auto sol = qp::solve_bilinear(bp, BnbOptions{.target_gap = 1e-7, .node_budget = 10000});
    REQUIRE(sol.status == BnbStatus::Feasible);
    CHECK(sol.upper_bound == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::min(sol.incumbent[static_cast<size_t>(u)], sol.incumbent[static_cast<size_t>(v)]) ==
          doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("maximize w = u*v with u+v = 1 attains 1/4 at u=v=1/2") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.0, 1.0);
    int v = bp.base.add_var(0.0, 1.0);
    int w = bp.base.add_var(0.0, 1.0, -1.0);  // maximize w
    bp.base.add_row(Sense::Eq, 1.0, {{u, 1.0}, {v, 1.0}});
    bp.products.push_back({w, u, v});
    auto sol = qp::solve_bilinear(bp, BnbOptions{.target_gap = 1e-6, .node_budget = 20000});
    REQUIRE(sol.status == BnbStatus::Feasible);
    CHECK(sol.upper_bound == doctest::Approx(-0.25).epsilon(1e-4));
    CHECK(sol.incumbent[static_cast<size_t>(u)] == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(sol.incumbent[static_cast<size_t>(v)] == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("u*v = 0.3 with u = v in [0,0.5] is infeasible (sqrt(0.3) > 0.5)") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.0, 0.5);
    int v = bp.base.add_var(0.0, 0.5);
    int w = bp.base.add_var(0.0, 1.0);
    int t = bp.base.add_var(0.0, 2.0, 1.0);
    bp.base.add_row(Sense::Eq, 0.0, {{u, 1.0}, {v, -1.0}});
    bp.base.add_row(Sense::Le, 0.3, {{w, 1.0}, {t, -1.0}});
    bp.base.add_row(Sense::Ge, 0.3, {{w, 1.0}, {t, 1.0}});
    bp.products.push_back({w, u, v});
    auto sol = qp::solve_bilinear(
        bp, BnbOptions{.target_gap = 1e-6, .node_budget = 50000, .feasibility_mode = true});
    REQUIRE(sol.status == BnbStatus::Infeasible);
    // u = v in [0,0.5] caps the product at 0.25, so the slack is >= 0.05.
    CHECK(sol.lower_bound > 1e-9);
    CHECK(sol.certificates_verified);

    // Enlarging the box makes it feasible at u = v = sqrt(0.3).
    bp.base.lo[0] = bp.base.lo[1] = 0.0;
    bp.base.hi[0] = bp.base.hi[1] = 0.6;
    auto sol2 = qp::solve_bilinear(
        bp, BnbOptions{.target_gap = 1e-6, .node_budget = 50000, .feasibility_mode = true});
    REQUIRE(sol2.status == BnbStatus::Feasible);
    CHECK(sol2.incumbent[0] == doctest::Approx(std::sqrt(0.3)).epsilon(1e-3));
}

TEST_CASE("mccormick envelope at the unit box") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.0, 1.0);
    int v = bp.base.add_var(0.0, 1.0);
    int w = bp.base.add_var(-10.0, 10.0);
    bp.products.push_back({w, u, v});
    (void)u;
    (void)v;
    lp::LinearProgram rel = qp::mccormick_relax(bp, bp.base.lo, bp.base.hi);
    REQUIRE(rel.rows.size() == 4);
    // w >= 0, w >= u+v-1, w <= u, w <= v, and the w box tightens to [0,1].
    CHECK(rel.lo[static_cast<size_t>(w)] == doctest::Approx(0.0));
    CHECK(rel.hi[static_cast<size_t>(w)] == doctest::Approx(1.0));
    CHECK(rel.rows[0].sense == Sense::Ge);
    CHECK(rel.rows[0].rhs == doctest::Approx(0.0));
    CHECK(rel.rows[1].rhs == doctest::Approx(-1.0));  // w - u - v >= -1
}

TEST_CASE("mccormick is exact on a degenerate box") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.5, 0.5);
    int v = bp.base.add_var(0.0, 1.0, -1.0);
    int w = bp.base.add_var(0.0, 1.0, 2.0);
    bp.products.push_back({w, u, v});
    (void)u;
    lp::LinearProgram rel = qp::mccormick_relax(bp, bp.base.lo, bp.base.hi);
    // With u pinned at 0.5 the envelope forces w = 0.5 v: minimizing
    // 2w - v = v(2*0.5 - 1) = 0 for every v.
    auto sol = lp::solve_lp(rel);
    REQUIRE(sol.status == lp::LpStatus::Optimal);
    CHECK(sol.x[static_cast<size_t>(w)] ==
          doctest::Approx(0.5 * sol.x[static_cast<size_t>(v)]).epsilon(1e-9));
}

TEST_CASE("true products lie inside the envelope for 100 random boxes") {
    for (int k = 0; k < 100; ++k) {
        RngStream rng(2024, static_cast<std::uint64_t>(k));
        double lu = rng.next_symmetric(), hu = lu + rng.next_unit() + 1e-3;
        double lv = rng.next_symmetric(), hv = lv + rng.next_unit() + 1e-3;
        double u = lu + (hu - lu) * rng.next_unit();
        double v = lv + (hv - lv) * rng.next_unit();
        double w = u * v;
        // All four envelope inequalities hold at (u, v, uv).
        CHECK(w >= lv * u + lu * v - lu * lv - 1e-12);
        CHECK(w >= hv * u + hu * v - hu * hv - 1e-12);
        CHECK(w <= hv * u + lu * v - lu * hv + 1e-12);
        CHECK(w <= lv * u + hu * v - hu * lv + 1e-12);
    }
}

TEST_CASE("branch splits at the relaxation value with a 10% clamp") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.0, 1.0);
    int v = bp.base.add_var(0.0, 1.0);
    int w = bp.base.add_var(0.0, 1.0);
    bp.products.push_back({w, u, v});
    std::vector<double> lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};

    std::vector<double> x{0.5, 0.9, 0.1};  // w=0.1 vs u*v=0.45: violated
    auto c = qp::choose_branch(bp, x, lo, hi);
    REQUIRE(c.var >= 0);
    if (c.var == u) CHECK(c.split == doctest::Approx(0.5));

    // Relaxation value near the edge clamps to the middle 10-90%.
    x = {0.01, 0.9, 0.5};
    c = qp::choose_branch(bp, x, lo, hi);
    REQUIRE(c.var >= 0);
    CHECK(c.split >= 0.1 - 1e-12);
    CHECK(c.split <= 0.9 + 1e-12);

    // Children partition the parent box.
    double mid = c.split;
    CHECK(mid > lo[static_cast<size_t>(c.var)]);
    CHECK(mid < hi[static_cast<size_t>(c.var)]);
}

TEST_CASE("qp status agrees with a dense grid oracle on 500 instances") {
    int feasible = 0, infeasible = 0;
    for (int k = 0; k < 500; ++k) {
        GridInstance g = random_instance(static_cast<std::uint64_t>(k));
        BilinearProgram bp = to_program(g);
        auto sol = qp::solve_bilinear(
            bp, BnbOptions{.target_gap = 1e-6, .node_budget = 100000, .feasibility_mode = true});
        REQUIRE_MESSAGE(sol.status != BnbStatus::Indeterminate, "instance #", k,
                        " did not converge");
        double gslack = grid_min_slack(g);
        if (sol.status == BnbStatus::Feasible) {
            ++feasible;
            CHECK_MESSAGE(gslack <= 0.05, "solver feasible but grid slack ", gslack, " on #", k);
            CHECK(qp::max_product_violation(bp, sol.incumbent) <= 1e-9);
        } else {
            ++infeasible;
            // No grid point within 1e-3 slack.
            CHECK_MESSAGE(gslack > 1e-3, "solver infeasible but grid slack ", gslack, " on #", k);
            CHECK(sol.lower_bound > 1e-9);
            CHECK(sol.certificates_verified);
        }
        // Grid-feasible implies solver-feasible.
        if (gslack <= 1e-9) CHECK(sol.status == BnbStatus::Feasible);
    }
    CHECK(feasible > 100);
    CHECK(infeasible > 50);
}

TEST_CASE("bound monotonicity along the node trace") {
    BilinearProgram bp;
    int u = bp.base.add_var(0.0, 1.0);
    int v = bp.base.add_var(0.0, 1.0);
    int w = bp.base.add_var(0.0, 1.0, -1.0);
    bp.base.add_row(Sense::Eq, 1.0, {{u, 1.0}, {v, 1.0}});
    bp.products.push_back({w, u, v});
    std::vector<qp::NodeTraceEntry> trace;
    BnbOptions opts{.target_gap = 1e-6, .node_budget = 20000};
    opts.trace = &trace;
    auto sol = qp::solve_bilinear(bp, opts);
    REQUIRE(sol.status == BnbStatus::Feasible);
    // The global bound is non-decreasing over the node sequence, and every
    // node's refined bound stays at or above it.
    double prev = -1e100;
    for (const auto& e : trace) {
        if (std::isfinite(e.global_lower)) {
            CHECK(e.global_lower >= prev - 1e-9);
            prev = std::max(prev, e.global_lower);
        }
        if ((e.kind == 'b' || e.kind == 'p') && std::isfinite(e.global_lower))
            CHECK(e.lower >= e.global_lower - 1e-9);
    }
}
