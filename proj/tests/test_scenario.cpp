#include <doctest.h>

#include <cmath>

#include "netvol/jsonio.hpp"
#include "netvol/rng.hpp"
#include "netvol/sampler.hpp"
#include "netvol/scenario.hpp"

using namespace netvol;

namespace {

CorrelatorVector random_valid_correlators(std::uint64_t stream) {
    // Rejection off the sampler path, small and local to the tests.
    for (std::uint64_t k = 0;; ++k) {
        RngStream rng(4242 + stream, k);
        CorrelatorVector v;
        for (double& c : v.v) c = rng.next_symmetric();
        Behavior b = behavior_from_correlators(v);
        bool ok = true;
        for (double p : b.table)
            if (p < 0) ok = false;
        if (ok) return v;
    }
}

std::vector<double> random_distribution(int d, std::uint64_t stream) {
    RngStream rng(777, stream);
    std::vector<double> p(static_cast<size_t>(d));
    double s = 0.0;
    for (double& x : p) {
        x = rng.next_exponential();
        s += x;
    }
    for (double& x : p) x /= s;
    return p;
}

}  // namespace

TEST_CASE("scenario invariants") {
    CHECK_NOTHROW(ScenarioSpec::bilocality().validate());
    CHECK_NOTHROW(ScenarioSpec::triangle().validate());
    CHECK_NOTHROW(ScenarioSpec::evans(2, 3, 2).validate());
    ScenarioSpec bad = ScenarioSpec::triangle();
    bad.card_x = 2;
    CHECK_THROWS(bad.validate());
    bad = ScenarioSpec::bilocality();
    bad.card_a = 1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("behavior_from_correlators: zero vector gives the uniform table") {
    CorrelatorVector v{};
    Behavior b = behavior_from_correlators(v);
    for (double p : b.table) CHECK(p == doctest::Approx(1.0 / 8).epsilon(1e-15));
    CHECK(b.is_valid());
}

TEST_CASE("behavior_from_correlators: <B>=1 forces b=0") {
    CorrelatorVector v{};
    v.b() = 1.0;
    Behavior b = behavior_from_correlators(v);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            for (int x = 0; x < 2; ++x)
                for (int z = 0; z < 2; ++z) {
                    CHECK(b.at(a, 0, c, x, z) == doctest::Approx(0.25).epsilon(1e-15));
                    CHECK(b.at(a, 1, c, x, z) == doctest::Approx(0.0));
                }
}

TEST_CASE("behavior_from_correlators: A0=C0=1 with A0BC0=-1 is invalid") {
    // Expanding by hand: the (a,b,c)=(1,0,1) cell at x=z=0 collects
    // 1 - <A0> - <C0> + <A0><C0> - <A0BC0> = 1 - 1 - 1 + 1 + 1... with the
    // signs (-1)^a=-1, (-1)^c=-1, (-1)^{a+c}=+1, (-1)^{a+b+c}=+1, giving
    // (1 - 1 + 0 - 1 + 0 + 0 + 1 - 1)/8 = -1/8.
    CorrelatorVector v{};
    v.a(0) = 1.0;
    v.c(0) = 1.0;
    v.abc(0, 0) = -1.0;
    Behavior b = behavior_from_correlators(v);
    CHECK(b.at(1, 0, 1, 0, 0) == doctest::Approx(-1.0 / 8));
    CHECK(b.at(0, 0, 0, 0, 0) == doctest::Approx(3.0 / 8));
    CHECK_FALSE(b.is_valid());
    CHECK_THROWS_AS(Behavior::checked(b.spec, b.table), std::domain_error);
}

TEST_CASE("correlator out of range is a domain error") {
    CorrelatorVector v{};
    v.a(1) = 1.0 + 1e-9;
    CHECK_THROWS_AS(behavior_from_correlators(v), std::domain_error);
}

TEST_CASE("correlators_from_behavior: uniform gives the zero vector") {
    CorrelatorVector v = correlators_from_behavior(Behavior::uniform(ScenarioSpec::bilocality()));
    for (double c : v.v) CHECK(c == doctest::Approx(0.0));
}

TEST_CASE("correlator round-trip on 1000 random valid vectors") {
    for (int k = 0; k < 1000; ++k) {
        CorrelatorVector v = random_valid_correlators(static_cast<std::uint64_t>(k));
        CorrelatorVector w = correlators_from_behavior(behavior_from_correlators(v));
        for (int i = 0; i < 13; ++i) CHECK(std::fabs(v.v[i] - w.v[i]) <= 1e-12);
    }
}

TEST_CASE("correlators of the deterministic point a=x, b=0, c=z") {
    Behavior b{ScenarioSpec::bilocality(), std::vector<double>(32, 0.0)};
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) b.at(x, 0, z, x, z) = 1.0;
    CorrelatorVector v = correlators_from_behavior(b);
    CHECK(v.a(0) == doctest::Approx(1.0));
    CHECK(v.a(1) == doctest::Approx(-1.0));
    CHECK(v.b() == doctest::Approx(1.0));
    CHECK(v.c(0) == doctest::Approx(1.0));
    CHECK(v.c(1) == doctest::Approx(-1.0));
    CHECK(v.ab(0) == doctest::Approx(1.0));
    CHECK(v.ab(1) == doctest::Approx(-1.0));
    CHECK(v.bc(0) == doctest::Approx(1.0));
    CHECK(v.bc(1) == doctest::Approx(-1.0));
    CHECK(v.abc(0, 0) == doctest::Approx(1.0));
    CHECK(v.abc(0, 1) == doctest::Approx(-1.0));
    CHECK(v.abc(1, 0) == doctest::Approx(-1.0));
    CHECK(v.abc(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("signaling behaviors are rejected with a named constraint") {
    Behavior b = Behavior::uniform(ScenarioSpec::bilocality());
    // Make <A0> depend on z.
    b.at(0, 0, 0, 0, 0) += 0.05;
    b.at(1, 0, 0, 0, 0) -= 0.05;
    try {
        correlators_from_behavior(b);
        FAIL("expected a domain error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("signaling") != std::string::npos);
    }
}

TEST_CASE("non-factorizing AC marginal is rejected") {
    // A perfectly correlated A-C pair is non-signaling but not a product.
    Behavior b{ScenarioSpec::bilocality(), std::vector<double>(32, 0.0)};
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z)
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) b.at(a, bb, a, x, z) = 0.25;
    try {
        correlators_from_behavior(b);
        FAIL("expected a domain error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("independence") != std::string::npos);
    }
}

TEST_CASE("trace distance basics") {
    std::vector<double> p{1, 0, 0, 0, 0, 0, 0, 0};
    std::vector<double> u(8, 1.0 / 8);
    CHECK(trace_distance(p, p) == doctest::Approx(0.0));
    CHECK(trace_distance(p, u) == doctest::Approx(7.0 / 8));
    CHECK(trace_distance(u, p) == doctest::Approx(7.0 / 8));
    CHECK_THROWS_AS(trace_distance(p, std::vector<double>(4, 0.25)), std::domain_error);
}

TEST_CASE("trace distance is a metric on 1000 random triples") {
    for (int k = 0; k < 1000; ++k) {
        auto p = random_distribution(8, 3 * static_cast<std::uint64_t>(k));
        auto q = random_distribution(8, 3 * static_cast<std::uint64_t>(k) + 1);
        auto r = random_distribution(8, 3 * static_cast<std::uint64_t>(k) + 2);
        double dpq = trace_distance(p, q), dpr = trace_distance(p, r), drq = trace_distance(r, q);
        CHECK(dpq >= 0.0);
        CHECK(dpq <= 1.0 + 1e-15);
        CHECK(dpq == doctest::Approx(trace_distance(q, p)));
        CHECK(dpq <= dpr + drq + 1e-12);
        CHECK(trace_distance(p, p) <= 1e-12);
    }
}

TEST_CASE("marginals") {
    Behavior u = Behavior::uniform(ScenarioSpec::bilocality());
    auto ma = marginal(u, PartyA, 0, 0);
    REQUIRE(ma.size() == 2);
    CHECK(ma[0] == doctest::Approx(0.5));
    CHECK(ma[1] == doctest::Approx(0.5));

    // Product behavior: the AC marginal factorizes.
    CorrelatorVector v{};
    v.a(0) = 0.3;
    v.c(0) = -0.2;
    v.b() = 0.1;
    v.ab(0) = 0.3 * 0.1;
    v.ab(1) = 0.0;
    v.bc(0) = 0.1 * -0.2;
    v.abc(0, 0) = 0.3 * 0.1 * -0.2;
    Behavior prod = behavior_from_correlators(v);
    auto mac = marginal(prod, PartyA | PartyC, 0, 0);
    auto pa = marginal(prod, PartyA, 0, 0);
    auto pc = marginal(prod, PartyC, 0, 0);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            CHECK(mac[static_cast<size_t>(a * 2 + c)] ==
                  doctest::Approx(pa[static_cast<size_t>(a)] * pc[static_cast<size_t>(c)]));

    // GHZ-like distribution: the B marginal is uniform.
    Behavior ghz{ScenarioSpec::triangle(), std::vector<double>(8, 0.0)};
    ghz.at(0, 0, 0) = 0.5;
    ghz.at(1, 1, 1) = 0.5;
    auto mb = marginal(ghz, PartyB);
    CHECK(mb[0] == doctest::Approx(0.5));
    CHECK(mb[1] == doctest::Approx(0.5));

    CHECK_THROWS_AS(marginal(u, 0u), std::domain_error);
}

TEST_CASE("behavior json round trip") {
    Behavior b = behavior_from_correlators(random_valid_correlators(5));
    auto j = io::to_json(b);
    Behavior b2 = io::behavior_from_json(j);
    CHECK(b2.spec == b.spec);
    for (size_t i = 0; i < b.table.size(); ++i)
        CHECK(b2.table[i] == doctest::Approx(b.table[i]).epsilon(1e-15));

    CorrelatorVector v = random_valid_correlators(6);
    CorrelatorVector v2 = io::correlators_from_json(io::to_json(v));
    for (int i = 0; i < 13; ++i) CHECK(v.v[i] == v2.v[i]);
}

TEST_CASE("checked clamps float noise and rejects real negatives") {
    ScenarioSpec s = ScenarioSpec::evans();
    std::vector<double> t(8, 1.0 / 8);
    t[0] = 1.0 / 8 - 5e-13;
    t[1] = 1.0 / 8 + 5e-13;
    t[2] = -5e-13;
    t[3] = 1.0 / 8 + (1.0 / 8 + 5e-13 - 5e-13);  // keep the sum at 1
    t[3] = 1.0 / 8;
    double sum = 0;
    for (double x : t) sum += x;
    t[4] += 1.0 - sum;  // renormalize exactly
    Behavior b = Behavior::checked(s, t);
    CHECK(b.at(0, 1, 0) == 0.0);  // index 2 decodes to (0,1,0)
    CHECK(b.is_valid());
}
