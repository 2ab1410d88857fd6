#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Data model shared by every oracle: behaviors p(a,b,c|x,z) stored as dense
// tensors, the 13-correlator parametrization of non-signaling bilocal
// behaviors, marginalization and trace distances. All types are immutable in
// use; every operation here is a pure function.

namespace netvol {

enum class Network { Bilocality, Triangle, Evans };

std::string to_string(Network n);
Network network_from_string(const std::string& s);

struct ScenarioSpec {
    Network network = Network::Bilocality;
    int card_a = 2, card_b = 2, card_c = 2;  // outcome cardinalities, >= 2
    int card_x = 2, card_z = 2;              // setting cardinalities, 1 if absent

    static ScenarioSpec bilocality();
    static ScenarioSpec triangle(int a = 2, int b = 2, int c = 2);
    static ScenarioSpec evans(int a = 2, int b = 2, int c = 2);

    int outcome_count() const { return card_a * card_b * card_c; }
    int setting_count() const { return card_x * card_z; }
    int table_size() const { return outcome_count() * setting_count(); }

    /// Throws std::invalid_argument on violated cardinality invariants.
    void validate() const;

    bool operator==(const ScenarioSpec&) const = default;
};

// Dense tensor of p(a,b,c|x,z), row-major in index order (a,b,c,x,z).
// The struct itself is an open data holder; `validate` enforces the
// per-setting normalization (tolerance 1e-12) and non-negativity, and
// `checked` clamps float-noise negatives in [-1e-12, 0) before validating.
struct Behavior {
    ScenarioSpec spec;
    std::vector<double> table;

    Behavior() = default;
    Behavior(ScenarioSpec s, std::vector<double> t) : spec(s), table(std::move(t)) {}

    static Behavior uniform(const ScenarioSpec& s);
    /// Clamps entries in [-1e-12, 0) to zero, renormalizes each setting
    /// block, then validates. Throws std::domain_error on real violations.
    static Behavior checked(ScenarioSpec s, std::vector<double> t);

    int index(int a, int b, int c, int x, int z) const {
        return (((a * spec.card_b + b) * spec.card_c + c) * spec.card_x + x) * spec.card_z + z;
    }
    double at(int a, int b, int c, int x = 0, int z = 0) const {
        return table[index(a, b, c, x, z)];
    }
    double& at(int a, int b, int c, int x = 0, int z = 0) {
        return table[index(a, b, c, x, z)];
    }

    bool is_valid(double tol = 1e-12) const;
    void validate(double tol = 1e-12) const;  // throws std::domain_error
};

// The 13 free expectation values of a non-signaling bilocal behavior, each
// in [-1,1], in the fixed order
//   <A0>,<A1>,<B>,<C0>,<C1>,<A0B>,<A1B>,<BC0>,<BC1>,
//   <A0BC0>,<A0BC1>,<A1BC0>,<A1BC1>.
// <AxCz> is not stored: source independence fixes it to <Ax><Cz>.
struct CorrelatorVector {
    std::array<double, 13> v{};

    double a(int x) const { return v[x]; }
    double b() const { return v[2]; }
    double c(int z) const { return v[3 + z]; }
    double ab(int x) const { return v[5 + x]; }
    double bc(int z) const { return v[7 + z]; }
    double abc(int x, int z) const { return v[9 + 2 * x + z]; }

    double& a(int x) { return v[x]; }
    double& b() { return v[2]; }
    double& c(int z) { return v[3 + z]; }
    double& ab(int x) { return v[5 + x]; }
    double& bc(int z) { return v[7 + z]; }
    double& abc(int x, int z) { return v[9 + 2 * x + z]; }
};

// Observational distribution plus interventional do-conditionals for the
// Evans scenario. do_a is indexed [b * card_a + a] = p(a|do(b)), likewise
// do_c; each fixed-b column is a normalized distribution.
struct HybridDataTable {
    Behavior observational;  // Evans spec (trivial settings)
    std::vector<double> do_a;
    std::vector<double> do_c;

    double pa_do(int a, int b) const { return do_a[b * observational.spec.card_a + a]; }
    double pc_do(int c, int b) const { return do_c[b * observational.spec.card_c + c]; }

    void validate(double tol = 1e-9) const;
};

/// Expands the correlator parametrization into the 8x4 table
///   p(a,b,c|x,z) = (1/8)[1 + (-1)^a<Ax> + ... + (-1)^(a+b+c)<AxBCz>]
/// with <AxCz> := <Ax><Cz>. Entries may come out negative; callers filter.
/// Throws std::domain_error when a coordinate leaves [-1,1].
Behavior behavior_from_correlators(const CorrelatorVector& v);

/// Inverse of behavior_from_correlators on valid binary bilocality
/// behaviors. Throws std::domain_error naming the violated constraint when
/// the behavior signals or its AC marginal does not factorize (tol 1e-9).
CorrelatorVector correlators_from_behavior(const Behavior& b);

/// (1/2) sum_i |p[i] - q[i]|; throws std::domain_error on shape mismatch.
double trace_distance(std::span<const double> p, std::span<const double> q);

enum Party : unsigned { PartyA = 1u, PartyB = 2u, PartyC = 4u };

/// Sums out the parties not in `parties` at settings (x,z). The result is
/// ordered with a varying slowest (for the parties present).
std::vector<double> marginal(const Behavior& b, unsigned parties, int x = 0, int z = 0);

}  // namespace netvol
