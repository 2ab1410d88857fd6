#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Bounded-variable linear programming by revised simplex with explicit
// inverse, phase I on artificials, Dantzig pricing with a Bland fallback
// after a degeneracy streak, and a dual-simplex re-optimization path for
// warm starts. Infeasibility always comes with an independently re-verified
// Farkas certificate; a numerical stall raises LpStallError rather than
// reporting a wrong status.

namespace netvol::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : char { Le = '<', Eq = '=', Ge = '>' };

struct Row {
    std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
    Sense sense = Sense::Eq;
    double rhs = 0.0;
};

struct LinearProgram {
    int num_vars = 0;
    std::vector<double> lo, hi;
    std::vector<double> objective;  // minimized unless `maximize`
    bool maximize = false;
    std::vector<Row> rows;
    std::vector<std::string> var_names;  // optional; generated on export if absent

    int add_var(double lo_, double hi_, double obj = 0.0, std::string name = {});
    void add_row(Sense sense, double rhs, std::vector<std::pair<int, double>> terms);
    void validate() const;  // throws std::invalid_argument
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x;  // structural values (Optimal)
    double objective = 0.0;
    std::vector<double> row_duals;  // per original row (Optimal)
    std::vector<double> farkas;     // per original row (Infeasible)
    double farkas_violation = 0.0;  // re-verified y'b - sup y'Ax
    int iterations = 0;
};

/// Raised when the simplex exceeds its iteration budget or cannot recover
/// numerically; callers map this to an explicit Indeterminate outcome.
struct LpStallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimplexOptions {
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-10;
    int refactor_every = 192;
    int degeneracy_threshold = 120;
    long max_iters = 0;  // 0 = automatic from problem size
};

/// Checks a Farkas certificate by direct multiplication: returns
/// y'b - sup_{lo<=x<=hi} y'Ax (positive proves infeasibility; -inf when a
/// needed bound is infinite).
double farkas_violation(const LinearProgram& lp, const std::vector<double>& y);

class SimplexSolver {
  public:
    explicit SimplexSolver(SimplexOptions opts = {});
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    /// Cold solve; discards any previous basis.
    LpSolution solve(const LinearProgram& lp);

    /// Re-solve after changes to bounds/rhs/coefficients of a program with
    /// the same shape (variable count, row count and senses). Falls back to
    /// a cold solve whenever the stored basis does not help. Pass
    /// `same_matrix = true` when only rhs/bounds changed, so the stored
    /// factorization can be reused directly.
    LpSolution resolve(const LinearProgram& lp, bool same_matrix = false);

    void reset();

  private:
    struct Impl;
    Impl* impl_;
};

/// One-shot convenience wrapper.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {});

/// Export in the fixed LP text format for cross-checking with external
/// solvers.
std::string lp_to_text(const LinearProgram& lp);

}  // namespace netvol::lp
