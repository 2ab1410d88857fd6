#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netvol/bilinear.hpp"
#include "netvol/scenario.hpp"

// Membership oracles for the correlation sets probed by LP/QP: the
// tripartite local set (deterministic-strategy LP), the bilocal set and the
// Evans classical/NSI/interventional sets (bilinear feasibility through
// spatial branch-and-bound). Every Outside verdict carries a certificate
// that was re-verified by direct arithmetic; Inside verdicts attach a primal
// model that reproduces the data within 1e-9.

namespace netvol::sets {

enum class SetId { Local3, Bilocal, EvansClassical, EvansNSI, EvansClassicalWithDo };
enum class Status { Inside, Outside, Indeterminate };

std::string to_string(SetId s);
std::string to_string(Status s);

struct Certificate {
    std::string kind;            // "farkas", "primal-model", "bnb-bounds", "none"
    std::vector<double> values;  // row multipliers or model weights
    double violation = 0.0;      // re-verified margin for farkas certificates
};

struct MembershipVerdict {
    SetId set_id = SetId::Local3;
    std::string set_label;  // overrides to_string(set_id) when non-empty
    Status status = Status::Indeterminate;
    std::optional<double> distance;  // trace-distance quantifier, when requested
    double margin = 0.0;             // feasibility slack; for Outside a proven lower bound
    double solver_gap = 0.0;
    long nodes = 0;
    bool relaxation_only = false;  // Inside via a necessary condition only
    bool certificate_verified = true;
    Certificate certificate;
};

struct OracleOptions {
    double gap = 1e-6;           // feasibility target gap
    long node_budget = 1'000'000;
    bool compute_distance = false;
    double distance_gap = 0.1;   // relative primal/dual gap for distance mode
};

/// Tripartite local set: LP feasibility over the deterministic strategies
/// (32 of them for binary bilocality). Distance mode is an exact LP.
MembershipVerdict test_local(const Behavior& b, const OracleOptions& opts = {});

/// Bilocal set: bilinear feasibility over q(lambda,b,gamma) with the source
/// independence q(lambda,gamma)=q(lambda)q(gamma) as product constraints.
MembershipVerdict test_bilocal(const Behavior& b, const OracleOptions& opts = {});

/// Evans classical set: the bilocal program with data constraints only at
/// x = z = b.
MembershipVerdict test_evans_classical(const Behavior& p, const OracleOptions& opts = {});

/// Evans NSI set: existence of a non-signaling source-independent bilocal
/// behavior pB with pB(a,b,c|x=z=b) = p(a,b,c). Conclusive both ways.
MembershipVerdict test_evans_nsi(const Behavior& p, const OracleOptions& opts = {});

/// Evans classical set with interventional data: adds the do-conditional
/// constraints on the source marginals.
MembershipVerdict test_evans_interventional(const HybridDataTable& h,
                                            const OracleOptions& opts = {});

// Program builders behind the oracles, exposed so stored certificates can be
// re-verified against a reconstructed program.
lp::LinearProgram build_local_lp(const Behavior& b);
qp::BilinearProgram build_bilocal_program(const Behavior& b);
qp::BilinearProgram build_evans_classical_program(const Behavior& p);
qp::BilinearProgram build_evans_nsi_program(const Behavior& p);
qp::BilinearProgram build_evans_interventional_program(const HybridDataTable& h);

/// W(p) = sum_{abc} (p(abc) - P_NS(abc))^2.
double witness_value(const Behavior& p);

/// The paper's candidate NSI-compatible, classically-infeasible point.
const Behavior& pns_distribution();

/// Certified global minimum of the witness over the Evans classical set
/// (epigraph squares + branch-and-bound). Returns the solution with
/// lower/upper bounds on min W.
qp::BnbSolution minimize_witness_over_classical(double target_gap = 1e-4,
                                                long node_budget = 2'000'000);

}  // namespace netvol::sets
