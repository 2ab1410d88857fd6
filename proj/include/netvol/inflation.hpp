#pragma once

#include <memory>
#include <string>
#include <vector>

#include "netvol/lp.hpp"
#include "netvol/membership.hpp"
#include "netvol/scenario.hpp"

// Classical inflation feasibility tests (orders 1-2) for the bilocality and
// triangle networks. The inflated model is the joint distribution over all
// party copies' counterfactual outcomes (one outcome slot per setting value;
// classical sources broadcast, so order 1 of the bilocality network is
// exactly the Fine/local test). Constraints: normalization, symmetry under
// independent permutations of each source's copies, injectable-set marginals
// equal to data, and product constraints for families of copy-disjoint
// injectable sets. Infeasible is a sound rejection of the classical set;
// Feasible is necessary-only and is flagged relaxation_only.

namespace netvol::inflate {

struct InflationSpec {
    Network network = Network::Bilocality;  // Bilocality | Triangle
    int order = 1;                          // copies per source, 1 or 2

    void validate(const ScenarioSpec& scenario) const;
};

struct InflatedParty {
    int orig = 0;                // 0=A, 1=B, 2=C
    std::vector<int> copies;     // copy index per source the party reads
    std::string label;           // e.g. "A1", "B12"
};

// Immutable per-spec structure: party layout, symmetry orbits, and the row
// generators of the quotient LP (terms fixed, rhs recomputed per point).
class InflationStructure;

class InflationOracle {
  public:
    InflationOracle(const InflationSpec& spec, const ScenarioSpec& scenario);

    /// Classifies one observed behavior; reuses the solver basis across
    /// calls (only the rhs changes). Not safe for concurrent use; copy the
    /// oracle per worker (the structure is shared, the solver is not).
    sets::MembershipVerdict classify(const Behavior& observed);

    int joint_size() const;
    int orbit_count() const;
    int row_count() const;
    int party_count() const;
    int maximal_family_count() const;
    const std::vector<InflatedParty>& parties() const;

    /// Lifts a quotient-LP solution vector to the full inflated joint.
    std::vector<double> lift(const std::vector<double>& quotient_q) const;

    /// Quotient primal of the last Feasible classify (empty otherwise).
    const std::vector<double>& last_primal() const { return last_primal_; }

  private:
    std::shared_ptr<const InflationStructure> structure_;
    lp::LinearProgram quotient_lp_;
    lp::SimplexSolver solver_;
    std::vector<double> last_primal_;
    bool solved_once_ = false;
};

/// The explicit (un-quotiented) inflation LP: normalization, symmetry rows
/// for each source-copy transposition, every injectable-set marginal row,
/// and the product rows of every maximal ai-expressible family. Suitable
/// for export and audit; test_inflation solves the symmetry-quotiented
/// equivalent.
lp::LinearProgram build_inflation_lp(const InflationSpec& spec, const Behavior& observed);

sets::MembershipVerdict test_inflation(const Behavior& observed, const InflationSpec& spec);

}  // namespace netvol::inflate
