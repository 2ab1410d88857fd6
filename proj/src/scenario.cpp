#include "netvol/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "netvol/kernels.hpp"

namespace netvol {

std::string to_string(Network n) {
    switch (n) {
        case Network::Bilocality: return "bilocality";
        case Network::Triangle: return "triangle";
        case Network::Evans: return "evans";
    }
    return "?";
}

Network network_from_string(const std::string& s) {
    if (s == "bilocality") return Network::Bilocality;
    if (s == "triangle") return Network::Triangle;
    if (s == "evans") return Network::Evans;
    throw std::invalid_argument("unknown network: " + s);
}

ScenarioSpec ScenarioSpec::bilocality() {
    return ScenarioSpec{Network::Bilocality, 2, 2, 2, 2, 2};
}

ScenarioSpec ScenarioSpec::triangle(int a, int b, int c) {
    return ScenarioSpec{Network::Triangle, a, b, c, 1, 1};
}

ScenarioSpec ScenarioSpec::evans(int a, int b, int c) {
    return ScenarioSpec{Network::Evans, a, b, c, 1, 1};
}

void ScenarioSpec::validate() const {
    if (card_a < 2 || card_b < 2 || card_c < 2)
        throw std::invalid_argument("outcome cardinalities must be >= 2");
    if (card_x < 1 || card_z < 1)
        throw std::invalid_argument("setting cardinalities must be >= 1");
    if (network != Network::Bilocality && (card_x != 1 || card_z != 1))
        throw std::invalid_argument("triangle and Evans scenarios carry no external settings");
}

Behavior Behavior::uniform(const ScenarioSpec& s) {
    Behavior b{s, std::vector<double>(static_cast<size_t>(s.table_size()),
                                      1.0 / s.outcome_count())};
    return b;
}

Behavior Behavior::checked(ScenarioSpec s, std::vector<double> t) {
    s.validate();
    if (static_cast<int>(t.size()) != s.table_size())
        throw std::domain_error("behavior table has wrong size");
    for (double& p : t) {
        if (p < -1e-12) throw std::domain_error("behavior entry below -1e-12");
        if (p < 0.0) p = 0.0;
    }
    Behavior b{s, std::move(t)};
    // Renormalize each setting block; the pre-clamp sums must already be
    // within 1e-12 of one.
    for (int x = 0; x < s.card_x; ++x)
        for (int z = 0; z < s.card_z; ++z) {
            double sum = 0.0;
            for (int a = 0; a < s.card_a; ++a)
                for (int bb = 0; bb < s.card_b; ++bb)
                    for (int c = 0; c < s.card_c; ++c) sum += b.at(a, bb, c, x, z);
            if (std::fabs(sum - 1.0) > 1e-12)
                throw std::domain_error("setting block not normalized");
            for (int a = 0; a < s.card_a; ++a)
                for (int bb = 0; bb < s.card_b; ++bb)
                    for (int c = 0; c < s.card_c; ++c) b.at(a, bb, c, x, z) /= sum;
        }
    return b;
}

bool Behavior::is_valid(double tol) const {
    if (static_cast<int>(table.size()) != spec.table_size()) return false;
    for (double p : table)
        if (p < -tol) return false;
    for (int x = 0; x < spec.card_x; ++x)
        for (int z = 0; z < spec.card_z; ++z) {
            double sum = 0.0;
            for (int a = 0; a < spec.card_a; ++a)
                for (int b = 0; b < spec.card_b; ++b)
                    for (int c = 0; c < spec.card_c; ++c) sum += at(a, b, c, x, z);
            if (std::fabs(sum - 1.0) > tol) return false;
        }
    return true;
}

void Behavior::validate(double tol) const {
    if (!is_valid(tol)) throw std::domain_error("invalid behavior table");
}

void HybridDataTable::validate(double tol) const {
    observational.validate(1e-9);
    const auto& s = observational.spec;
    if (static_cast<int>(do_a.size()) != s.card_a * s.card_b ||
        static_cast<int>(do_c.size()) != s.card_c * s.card_b)
        throw std::domain_error("hybrid do-conditional tables have wrong size");
    for (int b = 0; b < s.card_b; ++b) {
        double sa = 0.0, sc = 0.0;
        for (int a = 0; a < s.card_a; ++a) {
            if (pa_do(a, b) < -tol) throw std::domain_error("negative do-conditional");
            sa += pa_do(a, b);
        }
        for (int c = 0; c < s.card_c; ++c) {
            if (pc_do(c, b) < -tol) throw std::domain_error("negative do-conditional");
            sc += pc_do(c, b);
        }
        if (std::fabs(sa - 1.0) > tol || std::fabs(sc - 1.0) > tol)
            throw std::domain_error("do-conditional column not normalized");
    }
}

namespace {
inline int sign_pow(int k) { return (k & 1) ? -1 : 1; }
}

Behavior behavior_from_correlators(const CorrelatorVector& v) {
    for (double c : v.v)
        if (!(c >= -1.0 && c <= 1.0))
            throw std::domain_error("correlator coordinate outside [-1,1]");
    Behavior b{ScenarioSpec::bilocality(), std::vector<double>(32, 0.0)};
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) {
            const double ac = v.a(x) * v.c(z);
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb)
                    for (int c = 0; c < 2; ++c) {
                        double t = 1.0;
                        t += sign_pow(a) * v.a(x);
                        t += sign_pow(bb) * v.b();
                        t += sign_pow(c) * v.c(z);
                        t += sign_pow(a + bb) * v.ab(x);
                        t += sign_pow(bb + c) * v.bc(z);
                        t += sign_pow(a + c) * ac;
                        t += sign_pow(a + bb + c) * v.abc(x, z);
                        b.at(a, bb, c, x, z) = t / 8.0;
                    }
        }
    return b;
}

CorrelatorVector correlators_from_behavior(const Behavior& b) {
    const auto& s = b.spec;
    if (s.network != Network::Bilocality || s.card_a != 2 || s.card_b != 2 ||
        s.card_c != 2 || s.card_x != 2 || s.card_z != 2)
        throw std::domain_error("correlators need a binary bilocality behavior");
    b.validate(1e-9);

    constexpr double tol = 1e-9;
    auto corr = [&](int x, int z, bool wa, bool wb, bool wc) {
        double t = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb)
                for (int c = 0; c < 2; ++c) {
                    int k = (wa ? a : 0) + (wb ? bb : 0) + (wc ? c : 0);
                    t += sign_pow(k) * b.at(a, bb, c, x, z);
                }
        return t;
    };

    CorrelatorVector v;
    // Single- and two-party correlators must not depend on the far setting.
    for (int x = 0; x < 2; ++x) {
        double a0 = corr(x, 0, true, false, false), a1 = corr(x, 1, true, false, false);
        if (std::fabs(a0 - a1) > tol)
            throw std::domain_error("signaling: <Ax> depends on z");
        v.a(x) = 0.5 * (a0 + a1);
        double ab0 = corr(x, 0, true, true, false), ab1 = corr(x, 1, true, true, false);
        if (std::fabs(ab0 - ab1) > tol)
            throw std::domain_error("signaling: <AxB> depends on z");
        v.ab(x) = 0.5 * (ab0 + ab1);
    }
    for (int z = 0; z < 2; ++z) {
        double c0 = corr(0, z, false, false, true), c1 = corr(1, z, false, false, true);
        if (std::fabs(c0 - c1) > tol)
            throw std::domain_error("signaling: <Cz> depends on x");
        v.c(z) = 0.5 * (c0 + c1);
        double bc0 = corr(0, z, false, true, true), bc1 = corr(1, z, false, true, true);
        if (std::fabs(bc0 - bc1) > tol)
            throw std::domain_error("signaling: <BCz> depends on x");
        v.bc(z) = 0.5 * (bc0 + bc1);
    }
    {
        double b00 = corr(0, 0, false, true, false), b01 = corr(0, 1, false, true, false);
        double b10 = corr(1, 0, false, true, false), b11 = corr(1, 1, false, true, false);
        if (std::fabs(b00 - b01) > tol || std::fabs(b00 - b10) > tol ||
            std::fabs(b00 - b11) > tol)
            throw std::domain_error("signaling: <B> depends on settings");
        v.b() = 0.25 * (b00 + b01 + b10 + b11);
    }
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) {
            double ac = corr(x, z, true, false, true);
            if (std::fabs(ac - v.a(x) * v.c(z)) > tol)
                throw std::domain_error("source independence: <AxCz> != <Ax><Cz>");
            v.abc(x, z) = corr(x, z, true, true, true);
        }
    return v;
}

double trace_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::domain_error("trace distance: shape mismatch");
    return 0.5 * kern::sum_abs_diff(p, q);
}

std::vector<double> marginal(const Behavior& b, unsigned parties, int x, int z) {
    if (parties == 0) throw std::domain_error("marginal over empty party set");
    const auto& s = b.spec;
    int na = (parties & PartyA) ? s.card_a : 1;
    int nb = (parties & PartyB) ? s.card_b : 1;
    int nc = (parties & PartyC) ? s.card_c : 1;
    std::vector<double> out(static_cast<size_t>(na) * nb * nc, 0.0);
    for (int a = 0; a < s.card_a; ++a)
        for (int bb = 0; bb < s.card_b; ++bb)
            for (int c = 0; c < s.card_c; ++c) {
                int ia = (parties & PartyA) ? a : 0;
                int ib = (parties & PartyB) ? bb : 0;
                int ic = (parties & PartyC) ? c : 0;
                out[(ia * nb + ib) * nc + ic] += b.at(a, bb, c, x, z);
            }
    return out;
}

}  // namespace netvol
