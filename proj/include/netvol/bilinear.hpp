#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "netvol/lp.hpp"

// Global solution of small bilinear programs (linear base plus w = u*v
// product equalities over boxed variables) by spatial branch-and-bound over
// McCormick LP relaxations. Feasibility questions are phrased as
// minimization of a nonnegative violation slack; Infeasible means the slack
// provably exceeds the threshold on every leaf, with each leaf certificate
// re-verified by direct arithmetic.

namespace netvol::qp {

struct ProductTriple {
    int w, u, v;  // w = u * v; u == v encodes a square
};

struct BilinearProgram {
    lp::LinearProgram base;
    std::vector<ProductTriple> products;

    void validate() const;  // finite boxes on u,v; distinct w
    std::vector<int> branch_vars() const;
};

enum class BnbStatus { Feasible, Infeasible, Indeterminate };

struct NodeTraceEntry {
    long id = 0;
    int depth = 0;
    double lower = 0.0;         // refined bound of this node
    double global_lower = 0.0;  // best bound over the whole tree at pop time
    double upper = 0.0;
    char kind = '?';  // 'b' branched, 'f' farkas leaf, 'p' bound-pruned leaf, 'i' incumbent
};

struct BnbOptions {
    double target_gap = 1e-6;      // relative to max(|upper|, 1e-9)
    long node_budget = 1'000'000;
    double feas_threshold = 1e-9;  // slack threshold in feasibility mode
    bool feasibility_mode = false;
    std::vector<NodeTraceEntry>* trace = nullptr;
};

struct BnbSolution {
    BnbStatus status = BnbStatus::Indeterminate;
    double lower_bound = -lp::kInf;
    double upper_bound = lp::kInf;
    std::vector<double> incumbent;  // full variable vector when one exists
    double gap = lp::kInf;          // (upper-lower)/max(1,|upper|)
    long nodes_explored = 0;
    bool certificates_verified = true;
    double incumbent_product_error = 0.0;
    std::vector<double> root_farkas;  // set when the root relaxation is already infeasible
};

/// Replaces every product with its McCormick envelope over the given boxes
/// (full-length bound vectors for all base variables). Exact when a box is
/// degenerate.
lp::LinearProgram mccormick_relax(const BilinearProgram& bp, const std::vector<double>& lo,
                                  const std::vector<double>& hi);

struct BranchChoice {
    int var = -1;
    double split = 0.0;
};

/// Variable with maximal product-violation contribution, split at its
/// relaxation value clamped to the middle 10-90% of the box.
BranchChoice choose_branch(const BilinearProgram& bp, const std::vector<double>& x,
                           const std::vector<double>& lo, const std::vector<double>& hi,
                           double min_violation = 1e-9);

BnbSolution solve_bilinear(const BilinearProgram& bp, const BnbOptions& opts = {});

/// Largest |w - u*v| over the products at x.
double max_product_violation(const BilinearProgram& bp, const std::vector<double>& x);

}  // namespace netvol::qp
