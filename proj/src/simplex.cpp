#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <map>
#include <span>

#include "netvol/kernels.hpp"
#include "netvol/lp.hpp"

namespace netvol::lp {

int LinearProgram::add_var(double lo_, double hi_, double obj, std::string name) {
    lo.push_back(lo_);
    hi.push_back(hi_);
    objective.push_back(obj);
    if (!name.empty() || !var_names.empty()) {
        var_names.resize(static_cast<size_t>(num_vars), "");
        var_names.push_back(std::move(name));
    }
    return num_vars++;
}

void LinearProgram::add_row(Sense sense, double rhs, std::vector<std::pair<int, double>> terms) {
    rows.push_back(Row{std::move(terms), sense, rhs});
}

void LinearProgram::validate() const {
    if (static_cast<int>(lo.size()) != num_vars || static_cast<int>(hi.size()) != num_vars ||
        static_cast<int>(objective.size()) != num_vars)
        throw std::invalid_argument("lp: inconsistent variable arrays");
    for (int j = 0; j < num_vars; ++j) {
        if (std::isnan(lo[j]) || std::isnan(hi[j]) || lo[j] > hi[j])
            throw std::invalid_argument("lp: bad bounds on variable " + std::to_string(j));
    }
    for (const auto& r : rows)
        for (auto [j, v] : r.terms) {
            if (j < 0 || j >= num_vars)
                throw std::invalid_argument("lp: row references unknown variable");
            if (std::isnan(v)) throw std::invalid_argument("lp: NaN coefficient");
        }
}

double farkas_violation(const LinearProgram& lp, const std::vector<double>& y) {
    if (y.size() != lp.rows.size()) return -kInf;
    // Multipliers with the wrong sign for their row sense within 1e-9 are
    // clamped to zero (the clamped vector is itself the certificate being
    // evaluated); larger sign violations invalidate the certificate.
    constexpr double sign_tol = 1e-9;
    std::vector<double> d(static_cast<size_t>(lp.num_vars), 0.0);
    double yb = 0.0;
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        const Row& r = lp.rows[i];
        double yi = y[i];
        if (r.sense == Sense::Le) {
            if (yi > sign_tol) return -kInf;
            yi = std::min(yi, 0.0);
        } else if (r.sense == Sense::Ge) {
            if (yi < -sign_tol) return -kInf;
            yi = std::max(yi, 0.0);
        }
        yb += yi * r.rhs;
        for (auto [j, v] : r.terms) d[static_cast<size_t>(j)] += yi * v;
    }
    double sup = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
        double dj = d[static_cast<size_t>(j)];
        if (dj == 0.0) continue;
        double bound = dj > 0 ? lp.hi[static_cast<size_t>(j)] : lp.lo[static_cast<size_t>(j)];
        if (!std::isfinite(bound)) {
            // A tiny residual coefficient toward an infinite bound is noise
            // left by the clamping; anything larger kills the certificate.
            if (std::fabs(dj) > sign_tol) return -kInf;
            continue;
        }
        sup += dj * bound;
    }
    return yb - sup;
}

namespace {

enum VStat : signed char { kAtLo = 0, kAtHi = 1, kFree = 2, kBasic = 3 };

constexpr double kTinyStep = 1e-12;

}  // namespace

struct SimplexSolver::Impl {
    SimplexOptions opts;

    // Standard form: structural columns, one slack per inequality row, one
    // artificial per row. All rows are equalities.
    int m = 0, n_struct = 0, n_slack = 0, n_real = 0, n_total = 0;
    std::vector<int> col_start, col_row;
    std::vector<double> col_val;
    std::vector<double> lob, hib;       // bounds per column
    std::vector<double> cost;           // phase II cost (internal minimize)
    std::vector<double> rhs;
    std::vector<int> slack_row;         // per slack column
    std::vector<int> orig_row;          // std row -> original row index
    std::vector<char> senses;           // per std row, for shape matching
    bool flip_obj = false;

    // Basis state
    std::vector<int> basis;             // size m
    std::vector<int> in_basis_pos;      // per column, -1 if nonbasic
    std::vector<signed char> vstat;     // per column
    std::vector<double> x;              // per column
    std::vector<double> binv;           // column-major: binv[i*m + k] = (B^-1)[k][i]
    bool has_basis = false;
    int pivots_since_refactor = 0;

    // scratch
    std::vector<double> w, y, resid, dense;
    long iters = 0;
    long max_iters = 0;

    std::span<double> binv_col(int i) { return {binv.data() + static_cast<size_t>(i) * m, static_cast<size_t>(m)}; }

    // ---- construction of the standard form ----------------------------

    // Returns false if the shape differs from what is loaded (resolve path).
    bool load(const LinearProgram& lp, bool reuse_shape) {
        // Presolve: drop exact duplicate rows (same terms, sense, rhs).
        std::vector<int> keep;
        keep.reserve(lp.rows.size());
        {
            std::map<std::string, int> seen;
            for (size_t i = 0; i < lp.rows.size(); ++i) {
                const Row& r = lp.rows[i];
                std::vector<std::pair<int, double>> t(r.terms);
                std::sort(t.begin(), t.end());
                std::string key(1, static_cast<char>(r.sense));
                key.append(reinterpret_cast<const char*>(&r.rhs), sizeof(double));
                for (auto& [j, v] : t) {
                    key.append(reinterpret_cast<const char*>(&j), sizeof(int));
                    key.append(reinterpret_cast<const char*>(&v), sizeof(double));
                }
                if (seen.emplace(std::move(key), static_cast<int>(i)).second)
                    keep.push_back(static_cast<int>(i));
            }
        }

        std::vector<char> new_senses(keep.size());
        for (size_t k = 0; k < keep.size(); ++k)
            new_senses[k] = static_cast<char>(lp.rows[static_cast<size_t>(keep[k])].sense);
        bool same_shape = reuse_shape && has_basis && lp.num_vars == n_struct &&
                          static_cast<int>(keep.size()) == m && new_senses == senses;

        m = static_cast<int>(keep.size());
        n_struct = lp.num_vars;
        senses = std::move(new_senses);

        // Column-wise structural matrix over the kept rows.
        std::vector<int> count(static_cast<size_t>(n_struct), 0);
        size_t nnz = 0;
        for (int i : keep) {
            const Row& r = lp.rows[static_cast<size_t>(i)];
            nnz += r.terms.size();
            for (auto [j, v] : r.terms) {
                (void)v;
                ++count[static_cast<size_t>(j)];
            }
        }
        col_start.assign(static_cast<size_t>(n_struct) + 1, 0);
        for (int j = 0; j < n_struct; ++j) col_start[static_cast<size_t>(j) + 1] = col_start[static_cast<size_t>(j)] + count[static_cast<size_t>(j)];
        col_row.resize(nnz);
        col_val.resize(nnz);
        std::vector<int> fill(col_start.begin(), col_start.end() - 1);
        for (int i = 0; i < m; ++i)
            for (auto [j, v] : lp.rows[static_cast<size_t>(keep[static_cast<size_t>(i)])].terms) {
                int p = fill[static_cast<size_t>(j)]++;
                col_row[static_cast<size_t>(p)] = i;
                col_val[static_cast<size_t>(p)] = v;
            }

        n_slack = 0;
        slack_row.clear();
        for (int i = 0; i < m; ++i)
            if (lp.rows[static_cast<size_t>(keep[static_cast<size_t>(i)])].sense != Sense::Eq) {
                slack_row.push_back(i);
                ++n_slack;
            }
        n_real = n_struct + n_slack;
        n_total = n_real + m;

        lob.assign(static_cast<size_t>(n_total), 0.0);
        hib.assign(static_cast<size_t>(n_total), 0.0);
        cost.assign(static_cast<size_t>(n_total), 0.0);
        flip_obj = lp.maximize;
        for (int j = 0; j < n_struct; ++j) {
            lob[static_cast<size_t>(j)] = lp.lo[static_cast<size_t>(j)];
            hib[static_cast<size_t>(j)] = lp.hi[static_cast<size_t>(j)];
            cost[static_cast<size_t>(j)] = flip_obj ? -lp.objective[static_cast<size_t>(j)] : lp.objective[static_cast<size_t>(j)];
        }
        for (int s = 0; s < n_slack; ++s) {
            int j = n_struct + s;
            if (senses[static_cast<size_t>(slack_row[static_cast<size_t>(s)])] == static_cast<char>(Sense::Le)) {
                lob[static_cast<size_t>(j)] = 0.0;
                hib[static_cast<size_t>(j)] = kInf;
            } else {
                lob[static_cast<size_t>(j)] = -kInf;
                hib[static_cast<size_t>(j)] = 0.0;
            }
        }
        // Artificials are pinned in phase II; phase I opens them.
        rhs.resize(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) rhs[static_cast<size_t>(i)] = lp.rows[static_cast<size_t>(keep[static_cast<size_t>(i)])].rhs;

        orig_row.assign(keep.begin(), keep.end());

        w.assign(static_cast<size_t>(m), 0.0);
        y.assign(static_cast<size_t>(m), 0.0);
        resid.assign(static_cast<size_t>(m), 0.0);

        max_iters = opts.max_iters > 0 ? opts.max_iters : 600 + 30L * (m + n_real);
        iters = 0;
        return same_shape;
    }

    int art_col(int row) const { return n_real + row; }
    bool is_art(int j) const { return j >= n_real; }

    // Column access helpers (artificial/slack columns are implicit units).
    template <typename F>
    void for_col(int j, F&& f) const {
        if (j < n_struct) {
            for (int p = col_start[static_cast<size_t>(j)]; p < col_start[static_cast<size_t>(j) + 1]; ++p)
                f(col_row[static_cast<size_t>(p)], col_val[static_cast<size_t>(p)]);
        } else if (j < n_real) {
            f(slack_row[static_cast<size_t>(j - n_struct)], 1.0);
        } else {
            f(j - n_real, 1.0);
        }
    }

    void ftran(int j, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for_col(j, [&](int i, double v) { kern::axpy(v, binv_col(i), out); });
    }

    // y = (B^-1)' c for a dense cost-on-basis vector.
    void btran(const std::vector<double>& cb, std::vector<double>& out) {
        for (int i = 0; i < m; ++i) out[static_cast<size_t>(i)] = kern::dot(cb, binv_col(i));
    }

    double col_dot(int j, const std::vector<double>& vec) const {
        double s = 0.0;
        for_col(j, [&](int i, double v) { s += v * vec[static_cast<size_t>(i)]; });
        return s;
    }

    // ---- factorization -------------------------------------------------

    bool refactor() {
        // Dense Gauss-Jordan on the basis matrix; on a singular pivot the
        // offending basis slot is replaced by the row's artificial.
        std::vector<double> a(static_cast<size_t>(m) * m, 0.0);  // row-major
        for (int k = 0; k < m; ++k)
            for_col(basis[static_cast<size_t>(k)], [&](int i, double v) { a[static_cast<size_t>(i) * m + k] = v; });
        std::vector<double> inv(static_cast<size_t>(m) * m, 0.0);  // row-major
        for (int i = 0; i < m; ++i) inv[static_cast<size_t>(i) * m + i] = 1.0;
        std::vector<int> perm(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) perm[static_cast<size_t>(i)] = i;

        bool repaired = false;
        for (int c = 0; c < m; ++c) {
            int p = -1;
            double best = 1e-11;
            for (int r = c; r < m; ++r) {
                double v = std::fabs(a[static_cast<size_t>(r) * m + c]);
                if (v > best) {
                    best = v;
                    p = r;
                }
            }
            if (p < 0) {
                // Singular: swap in the artificial of the first unpivoted row.
                int row = perm[static_cast<size_t>(c)];
                int old = basis[static_cast<size_t>(c)];
                in_basis_pos[static_cast<size_t>(old)] = -1;
                vstat[static_cast<size_t>(old)] = nearest_bound_stat(old);
                x[static_cast<size_t>(old)] = nonbasic_value(old);
                basis[static_cast<size_t>(c)] = art_col(row);
                in_basis_pos[static_cast<size_t>(art_col(row))] = c;
                vstat[static_cast<size_t>(art_col(row))] = kBasic;
                repaired = true;
                // Restart factorization from scratch with the repaired basis.
                return refactor();
            }
            if (p != c) {
                for (int j = 0; j < m; ++j) std::swap(a[static_cast<size_t>(p) * m + j], a[static_cast<size_t>(c) * m + j]);
                for (int j = 0; j < m; ++j) std::swap(inv[static_cast<size_t>(p) * m + j], inv[static_cast<size_t>(c) * m + j]);
                std::swap(perm[static_cast<size_t>(p)], perm[static_cast<size_t>(c)]);
            }
            double piv = a[static_cast<size_t>(c) * m + c];
            double f = 1.0 / piv;
            for (int j = 0; j < m; ++j) a[static_cast<size_t>(c) * m + j] *= f;
            for (int j = 0; j < m; ++j) inv[static_cast<size_t>(c) * m + j] *= f;
            for (int r = 0; r < m; ++r) {
                if (r == c) continue;
                double g = a[static_cast<size_t>(r) * m + c];
                if (g == 0.0) continue;
                kern::axpy(-g, {&a[static_cast<size_t>(c) * m], static_cast<size_t>(m)}, {&a[static_cast<size_t>(r) * m], static_cast<size_t>(m)});
                kern::axpy(-g, {&inv[static_cast<size_t>(c) * m], static_cast<size_t>(m)}, {&inv[static_cast<size_t>(r) * m], static_cast<size_t>(m)});
            }
        }
        // inv currently maps assembled rows; undo the row permutation and
        // transpose into column-major binv. After the forward sweep the
        // variable order matches basis order: row k of inv corresponds to
        // basis position k, column j to std row j.
        binv.assign(static_cast<size_t>(m) * m, 0.0);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                binv[static_cast<size_t>(i) * m + k] = inv[static_cast<size_t>(k) * m + i];
        pivots_since_refactor = 0;
        return !repaired;
    }

    signed char nearest_bound_stat(int j) const {
        bool lo_fin = std::isfinite(lob[static_cast<size_t>(j)]);
        bool hi_fin = std::isfinite(hib[static_cast<size_t>(j)]);
        if (!lo_fin && !hi_fin) return kFree;
        if (!hi_fin) return kAtLo;
        if (!lo_fin) return kAtHi;
        return std::fabs(lob[static_cast<size_t>(j)]) <= std::fabs(hib[static_cast<size_t>(j)]) ? kAtLo : kAtHi;
    }

    double nonbasic_value(int j) const {
        switch (vstat[static_cast<size_t>(j)]) {
            case kAtLo: return lob[static_cast<size_t>(j)];
            case kAtHi: return hib[static_cast<size_t>(j)];
            default: return 0.0;
        }
    }

    // Recomputes basic values from nonbasic ones: x_B = B^-1 (b - N x_N).
    void compute_basics() {
        for (int i = 0; i < m; ++i) resid[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)];
        for (int j = 0; j < n_total; ++j) {
            if (vstat[static_cast<size_t>(j)] == kBasic) continue;
            double v = nonbasic_value(j);
            x[static_cast<size_t>(j)] = v;
            if (v != 0.0) for_col(j, [&](int i, double a) { resid[static_cast<size_t>(i)] -= a * v; });
        }
        dense.assign(static_cast<size_t>(m), 0.0);
        for (int i = 0; i < m; ++i)
            if (resid[static_cast<size_t>(i)] != 0.0) kern::axpy(resid[static_cast<size_t>(i)], binv_col(i), dense);
        for (int k = 0; k < m; ++k) x[static_cast<size_t>(basis[static_cast<size_t>(k)])] = dense[static_cast<size_t>(k)];
    }

    // ---- pivoting ------------------------------------------------------

    void update_binv(int leave_pos, const std::vector<double>& wcol) {
        double piv = wcol[static_cast<size_t>(leave_pos)];
        double inv_piv = 1.0 / piv;
        for (int i = 0; i < m; ++i) {
            auto col = binv_col(i);
            double t = col[static_cast<size_t>(leave_pos)] * inv_piv;
            if (t == 0.0) continue;
            kern::axpy(-t, wcol, col);
            col[static_cast<size_t>(leave_pos)] = t;
        }
        ++pivots_since_refactor;
    }

    struct Pricing {
        int j = -1;
        double d = 0.0;
        int dir = +1;
    };

    // Most-violating nonbasic column under costs `c`; Bland = smallest index.
    Pricing price(const std::vector<double>& cvec, bool bland, bool allow_art) {
        btran_costs(cvec);
        Pricing best;
        double best_mag = opts.opt_tol;
        for (int j = 0; j < n_total; ++j) {
            signed char st = vstat[static_cast<size_t>(j)];
            if (st == kBasic) continue;
            if (is_art(j) && !allow_art) continue;
            if (lob[static_cast<size_t>(j)] == hib[static_cast<size_t>(j)] && st != kFree) continue;  // immovable
            double dj = cvec[static_cast<size_t>(j)] - col_dot(j, y);
            int dir = 0;
            if (st == kAtLo && dj < -opts.opt_tol) dir = +1;
            else if (st == kAtHi && dj > opts.opt_tol) dir = -1;
            else if (st == kFree && std::fabs(dj) > opts.opt_tol) dir = dj < 0 ? +1 : -1;
            if (dir == 0) continue;
            if (bland) return {j, dj, dir};
            if (std::fabs(dj) > best_mag) {
                best_mag = std::fabs(dj);
                best = {j, dj, dir};
            }
        }
        return best;
    }

    void btran_costs(const std::vector<double>& cvec) {
        dense.assign(static_cast<size_t>(m), 0.0);
        for (int k = 0; k < m; ++k) dense[static_cast<size_t>(k)] = cvec[static_cast<size_t>(basis[static_cast<size_t>(k)])];
        btran(dense, y);
    }

    enum class StepResult { Pivoted, Flipped, Unbounded };

    StepResult step(const Pricing& pr, bool bland) {
        int j = pr.j;
        int sigma = pr.dir;
        ftran(j, w);

        double span = hib[static_cast<size_t>(j)] - lob[static_cast<size_t>(j)];
        double t_limit = std::isfinite(span) && vstat[static_cast<size_t>(j)] != kFree ? span : kInf;
        double t_best = t_limit;
        int leave = -1;
        double best_piv = 0.0;
        for (int k = 0; k < m; ++k) {
            double wk = w[static_cast<size_t>(k)];
            if (std::fabs(wk) <= opts.pivot_tol) continue;
            int bj = basis[static_cast<size_t>(k)];
            double xb = x[static_cast<size_t>(bj)];
            double delta = -sigma * wk;  // x_B[k] moves by delta * t
            double tk;
            if (delta < 0) {
                double lo_k = lob[static_cast<size_t>(bj)];
                if (!std::isfinite(lo_k)) continue;
                tk = (xb - lo_k) / (-delta);
            } else {
                double hi_k = hib[static_cast<size_t>(bj)];
                if (!std::isfinite(hi_k)) continue;
                tk = (hi_k - xb) / delta;
            }
            if (tk < 0.0) tk = 0.0;
            if (tk > t_best + 1e-9) continue;  // the current choice blocks first
            bool take;
            if (leave < 0 || tk < t_best - 1e-9) {
                take = true;
            } else {
                // Tie within tolerance: stability by largest pivot, or
                // smallest basic index under Bland's rule.
                take = bland ? bj < basis[static_cast<size_t>(leave)] : std::fabs(wk) > best_piv;
            }
            if (take) {
                t_best = std::min(tk, t_best);
                leave = k;
                best_piv = std::fabs(wk);
            }
        }

        if (leave < 0) {
            if (!std::isfinite(t_limit)) return StepResult::Unbounded;
            // Bound flip: j travels to its opposite bound.
            double t = t_limit;
            for (int k = 0; k < m; ++k) {
                double wk = w[static_cast<size_t>(k)];
                if (wk == 0.0) continue;
                x[static_cast<size_t>(basis[static_cast<size_t>(k)])] += -sigma * wk * t;
            }
            x[static_cast<size_t>(j)] = sigma > 0 ? hib[static_cast<size_t>(j)] : lob[static_cast<size_t>(j)];
            vstat[static_cast<size_t>(j)] = sigma > 0 ? kAtHi : kAtLo;
            return StepResult::Flipped;
        }

        double t = std::max(t_best, 0.0);
        for (int k = 0; k < m; ++k) {
            double wk = w[static_cast<size_t>(k)];
            if (wk == 0.0) continue;
            x[static_cast<size_t>(basis[static_cast<size_t>(k)])] += -sigma * wk * t;
        }
        x[static_cast<size_t>(j)] += sigma * t;

        int out = basis[static_cast<size_t>(leave)];
        // Snap the leaving variable to its blocking bound.
        double delta_out = -sigma * w[static_cast<size_t>(leave)];
        if (delta_out < 0) {
            x[static_cast<size_t>(out)] = lob[static_cast<size_t>(out)];
            vstat[static_cast<size_t>(out)] = kAtLo;
        } else {
            x[static_cast<size_t>(out)] = hib[static_cast<size_t>(out)];
            vstat[static_cast<size_t>(out)] = kAtHi;
        }
        in_basis_pos[static_cast<size_t>(out)] = -1;
        basis[static_cast<size_t>(leave)] = j;
        in_basis_pos[static_cast<size_t>(j)] = leave;
        vstat[static_cast<size_t>(j)] = kBasic;
        update_binv(leave, w);
        if (is_art(out)) {
            lob[static_cast<size_t>(out)] = hib[static_cast<size_t>(out)] = 0.0;
            x[static_cast<size_t>(out)] = 0.0;
            vstat[static_cast<size_t>(out)] = kAtLo;
        }
        return StepResult::Pivoted;
    }

    // Minimizes `cvec` from the current feasible basis. Returns false on
    // unboundedness.
    bool optimize(const std::vector<double>& cvec, bool allow_art) {
        int degen_streak = 0;
        bool bland = false;
        for (;;) {
            if (++iters > max_iters) throw LpStallError("simplex iteration budget exhausted");
            if (pivots_since_refactor >= opts.refactor_every) {
                refactor();
                compute_basics();
            }
            Pricing pr = price(cvec, bland, allow_art);
            if (pr.j < 0) return true;
            double before = pr.j >= 0 ? x[static_cast<size_t>(pr.j)] : 0.0;
            StepResult res = step(pr, bland);
            if (res == StepResult::Unbounded) return false;
            double moved = std::fabs(x[static_cast<size_t>(pr.j)] - before);
            if (res == StepResult::Pivoted && moved <= kTinyStep) {
                if (++degen_streak > opts.degeneracy_threshold) bland = true;
            } else {
                degen_streak = 0;
                bland = false;
            }
        }
    }

    double objective_value(const std::vector<double>& cvec) const {
        double s = 0.0;
        for (int j = 0; j < n_total; ++j)
            if (cvec[static_cast<size_t>(j)] != 0.0) s += cvec[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
        return s;
    }

    // ---- phase I -------------------------------------------------------

    void cold_start() {
        basis.resize(static_cast<size_t>(m));
        in_basis_pos.assign(static_cast<size_t>(n_total), -1);
        vstat.assign(static_cast<size_t>(n_total), kAtLo);
        x.assign(static_cast<size_t>(n_total), 0.0);
        for (int j = 0; j < n_real; ++j) {
            vstat[static_cast<size_t>(j)] = nearest_bound_stat(j);
            x[static_cast<size_t>(j)] = nonbasic_value(j);
        }
        for (int i = 0; i < m; ++i) {
            int a = art_col(i);
            basis[static_cast<size_t>(i)] = a;
            in_basis_pos[static_cast<size_t>(a)] = i;
            vstat[static_cast<size_t>(a)] = kBasic;
        }
        binv.assign(static_cast<size_t>(m) * m, 0.0);
        for (int i = 0; i < m; ++i) binv[static_cast<size_t>(i) * m + i] = 1.0;
        pivots_since_refactor = 0;

        // Open artificial bounds to absorb the residual sign.
        for (int i = 0; i < m; ++i) resid[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)];
        for (int j = 0; j < n_real; ++j) {
            double v = x[static_cast<size_t>(j)];
            if (v != 0.0) for_col(j, [&](int i, double a) { resid[static_cast<size_t>(i)] -= a * v; });
        }
        for (int i = 0; i < m; ++i) {
            int a = art_col(i);
            if (resid[static_cast<size_t>(i)] >= 0.0) {
                lob[static_cast<size_t>(a)] = 0.0;
                hib[static_cast<size_t>(a)] = kInf;
            } else {
                lob[static_cast<size_t>(a)] = -kInf;
                hib[static_cast<size_t>(a)] = 0.0;
            }
            x[static_cast<size_t>(a)] = resid[static_cast<size_t>(i)];
        }
        has_basis = true;
    }

    std::vector<double> phase1_costs() const {
        std::vector<double> c(static_cast<size_t>(n_total), 0.0);
        for (int i = 0; i < m; ++i) {
            int a = art_col(i);
            c[static_cast<size_t>(a)] = hib[static_cast<size_t>(a)] > 0 ? 1.0 : -1.0;
            if (lob[static_cast<size_t>(a)] == 0.0 && hib[static_cast<size_t>(a)] == 0.0) c[static_cast<size_t>(a)] = 1.0;
        }
        return c;
    }

    double infeasibility() const {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += std::fabs(x[static_cast<size_t>(art_col(i))]);
        return s;
    }

    // Fixes all artificials to zero for phase II.
    void pin_artificials() {
        for (int i = 0; i < m; ++i) {
            int a = art_col(i);
            lob[static_cast<size_t>(a)] = hib[static_cast<size_t>(a)] = 0.0;
            if (vstat[static_cast<size_t>(a)] != kBasic) {
                vstat[static_cast<size_t>(a)] = kAtLo;
                x[static_cast<size_t>(a)] = 0.0;
            } else if (std::fabs(x[static_cast<size_t>(a)]) < 1e-7) {
                x[static_cast<size_t>(a)] = 0.0;
            }
        }
    }

    // ---- result extraction ----------------------------------------------

    LpSolution extract_optimal(const LinearProgram& lp, const std::vector<double>& cvec) {
        LpSolution sol;
        sol.status = LpStatus::Optimal;
        sol.x.assign(lp.lo.size(), 0.0);
        for (int j = 0; j < n_struct; ++j) sol.x[static_cast<size_t>(j)] = x[static_cast<size_t>(j)];
        double obj = 0.0;
        for (int j = 0; j < n_struct; ++j) obj += lp.objective[static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];
        sol.objective = obj;
        btran_costs(cvec);
        sol.row_duals.assign(lp.rows.size(), 0.0);
        for (int i = 0; i < m; ++i)
            sol.row_duals[static_cast<size_t>(orig_row[static_cast<size_t>(i)])] = flip_obj ? -y[static_cast<size_t>(i)] : y[static_cast<size_t>(i)];
        sol.iterations = static_cast<int>(iters);
        return sol;
    }

    LpSolution extract_infeasible(const LinearProgram& lp, const std::vector<double>& yraw) {
        LpSolution sol;
        sol.status = LpStatus::Infeasible;
        sol.iterations = static_cast<int>(iters);
        std::vector<double> cand(lp.rows.size(), 0.0);
        for (int i = 0; i < m; ++i) cand[static_cast<size_t>(orig_row[static_cast<size_t>(i)])] = yraw[static_cast<size_t>(i)];
        double v = farkas_violation(lp, cand);
        if (v <= 0) {
            for (auto& t : cand) t = -t;
            v = farkas_violation(lp, cand);
        }
        if (!(v > 0)) throw LpStallError("infeasibility certificate failed re-verification");
        sol.farkas = std::move(cand);
        sol.farkas_violation = v;
        return sol;
    }

    LpSolution run(const LinearProgram& lp, bool warm, bool same_matrix) {
        lp.validate();
        bool shape_ok = load(lp, warm);
        double bscale = 1.0;
        for (int i = 0; i < m; ++i) bscale = std::max(bscale, std::fabs(rhs[static_cast<size_t>(i)]));
        std::vector<double> c2(cost);

        if (shape_ok && same_matrix && pivots_since_refactor > 4 * opts.refactor_every)
            same_matrix = false;  // stale eta chain; refactor below
        if (shape_ok) {
            // Re-pin artificials and refactor against (possibly) new
            // coefficients, then try to continue from the stored basis.
            for (int i = 0; i < m; ++i) {
                int a = art_col(i);
                lob[static_cast<size_t>(a)] = hib[static_cast<size_t>(a)] = 0.0;
            }
            for (int j = 0; j < n_real; ++j) {
                if (vstat[static_cast<size_t>(j)] == kBasic) continue;
                signed char st = vstat[static_cast<size_t>(j)];
                if (st == kAtLo && !std::isfinite(lob[static_cast<size_t>(j)])) st = nearest_bound_stat(j);
                if (st == kAtHi && !std::isfinite(hib[static_cast<size_t>(j)])) st = nearest_bound_stat(j);
                vstat[static_cast<size_t>(j)] = st;
            }
            bool ok = same_matrix ? true : refactor();
            if (ok) {
                compute_basics();
                double viol = primal_infeasibility();
                if (viol <= opts.feas_tol * bscale) {
                    if (!optimize(c2, false)) return unbounded_solution();
                    return verified_optimal(lp, c2, bscale);
                }
                LpSolution dual_sol;
                if (dual_reoptimize(lp, c2, bscale, dual_sol)) return dual_sol;
            }
        }

        // Cold path: phase I on artificials.
        cold_start();
        auto c1 = phase1_costs();
        if (!optimize(c1, true)) throw LpStallError("phase I reported unbounded");
        refactor();
        compute_basics();
        double p1 = infeasibility();
        if (p1 > opts.feas_tol * std::max(1.0, bscale)) {
            btran_costs(c1);
            std::vector<double> yv(y.begin(), y.end());
            return extract_infeasible(lp, yv);
        }
        drive_out_artificials();
        pin_artificials();
        if (!optimize(c2, false)) return unbounded_solution();
        return verified_optimal(lp, c2, bscale);
    }

    LpSolution unbounded_solution() {
        LpSolution sol;
        sol.status = LpStatus::Unbounded;
        sol.iterations = static_cast<int>(iters);
        return sol;
    }

    double primal_infeasibility() {
        double v = 0.0;
        for (int k = 0; k < m; ++k) {
            int j = basis[static_cast<size_t>(k)];
            double xv = x[static_cast<size_t>(j)];
            if (xv < lob[static_cast<size_t>(j)]) v = std::max(v, lob[static_cast<size_t>(j)] - xv);
            if (xv > hib[static_cast<size_t>(j)]) v = std::max(v, xv - hib[static_cast<size_t>(j)]);
        }
        return v;
    }

    void drive_out_artificials() {
        for (int k = 0; k < m; ++k) {
            int j = basis[static_cast<size_t>(k)];
            if (!is_art(j) || std::fabs(x[static_cast<size_t>(j)]) > opts.feas_tol) continue;
            // Row of B^-1 for this position.
            for (int cand = 0; cand < n_real; ++cand) {
                if (vstat[static_cast<size_t>(cand)] == kBasic) continue;
                if (lob[static_cast<size_t>(cand)] == hib[static_cast<size_t>(cand)]) continue;
                double alpha = 0.0;
                for_col(cand, [&](int i, double v) { alpha += v * binv[static_cast<size_t>(i) * m + k]; });
                if (std::fabs(alpha) < 1e-7) continue;
                ftran(cand, w);
                // Degenerate swap: basic value stays at (near) zero.
                int out = j;
                basis[static_cast<size_t>(k)] = cand;
                in_basis_pos[static_cast<size_t>(cand)] = k;
                in_basis_pos[static_cast<size_t>(out)] = -1;
                vstat[static_cast<size_t>(cand)] = kBasic;
                vstat[static_cast<size_t>(out)] = kAtLo;
                lob[static_cast<size_t>(out)] = hib[static_cast<size_t>(out)] = 0.0;
                x[static_cast<size_t>(out)] = 0.0;
                update_binv(k, w);
                compute_basics();
                break;
            }
        }
    }

    LpSolution verified_optimal(const LinearProgram& lp, const std::vector<double>& c2, double bscale) {
        refactor();
        compute_basics();
        double viol = primal_infeasibility();
        if (viol > 1e-7 * bscale) {
            // One recovery attempt through phase I.
            cold_start();
            auto c1 = phase1_costs();
            if (!optimize(c1, true)) throw LpStallError("recovery phase I unbounded");
            refactor();
            compute_basics();
            if (infeasibility() > opts.feas_tol * std::max(1.0, bscale)) {
                btran_costs(c1);
                std::vector<double> yv(y.begin(), y.end());
                return extract_infeasible(lp, yv);
            }
            drive_out_artificials();
            pin_artificials();
            if (!optimize(c2, false)) return unbounded_solution();
            refactor();
            compute_basics();
            if (primal_infeasibility() > 1e-7 * bscale)
                throw LpStallError("optimal basis failed residual check");
        }
        return extract_optimal(lp, c2);
    }

    // ---- dual simplex re-optimization -----------------------------------

    // Runs from the current (primal-infeasible, dual-feasible) basis.
    // Returns true with `out` filled when it reaches a conclusion; false
    // to fall back to the cold path.
    bool dual_reoptimize(const LinearProgram& lp, const std::vector<double>& c2, double bscale,
                         LpSolution& out) {
        // Dual feasibility check.
        btran_costs(c2);
        for (int j = 0; j < n_real; ++j) {
            if (vstat[static_cast<size_t>(j)] == kBasic) continue;
            if (lob[static_cast<size_t>(j)] == hib[static_cast<size_t>(j)]) continue;
            double dj = c2[static_cast<size_t>(j)] - col_dot(j, y);
            signed char st = vstat[static_cast<size_t>(j)];
            if (st == kAtLo && dj < -1e-7) return false;
            if (st == kAtHi && dj > 1e-7) return false;
            if (st == kFree && std::fabs(dj) > 1e-7) return false;
        }

        long cap = 400 + 6L * (m + n_real);
        std::vector<double> rho(static_cast<size_t>(m));
        for (long it = 0; it < cap; ++it) {
            if (++iters > max_iters) throw LpStallError("simplex iteration budget exhausted");
            // Leaving: most violated basic.
            int leave = -1;
            double worst = opts.feas_tol * bscale;
            bool to_lo = true;
            for (int k = 0; k < m; ++k) {
                int j = basis[static_cast<size_t>(k)];
                double xv = x[static_cast<size_t>(j)];
                double v1 = lob[static_cast<size_t>(j)] - xv;
                double v2 = xv - hib[static_cast<size_t>(j)];
                if (v1 > worst) {
                    worst = v1;
                    leave = k;
                    to_lo = true;
                }
                if (v2 > worst) {
                    worst = v2;
                    leave = k;
                    to_lo = false;
                }
            }
            if (leave < 0) {
                if (!optimize(c2, false)) {
                    out = unbounded_solution();
                    return true;
                }
                out = verified_optimal(lp, c2, bscale);
                return true;
            }

            for (int i = 0; i < m; ++i) rho[static_cast<size_t>(i)] = binv[static_cast<size_t>(i) * m + leave];
            int out_var = basis[static_cast<size_t>(leave)];
            // x_out must move toward the violated bound: increase iff to_lo.
            int enter = -1, enter_dir = 0;
            double best_alpha = 1e-9;
            for (int j = 0; j < n_real; ++j) {
                signed char st = vstat[static_cast<size_t>(j)];
                if (st == kBasic) continue;
                if (lob[static_cast<size_t>(j)] == hib[static_cast<size_t>(j)] && st != kFree) continue;
                double alpha = col_dot(j, rho);
                if (std::fabs(alpha) <= 1e-9) continue;
                // Entering moves by sigma*t (t>=0); x_out changes by -sigma*alpha*t.
                for (int sigma : {+1, -1}) {
                    if (st == kAtLo && sigma < 0) continue;
                    if (st == kAtHi && sigma > 0) continue;
                    double change = -sigma * alpha;
                    if (to_lo ? change <= 0 : change >= 0) continue;
                    if (std::fabs(alpha) > best_alpha) {
                        best_alpha = std::fabs(alpha);
                        enter = j;
                        enter_dir = sigma;
                    }
                }
            }
            if (enter < 0) {
                // No entering candidate: the row proves infeasibility.
                std::vector<double> yv(rho.begin(), rho.end());
                out = extract_infeasible(lp, yv);
                return true;
            }

            ftran(enter, w);
            double alpha = w[static_cast<size_t>(leave)];
            double target = to_lo ? lob[static_cast<size_t>(out_var)] : hib[static_cast<size_t>(out_var)];
            double t = (x[static_cast<size_t>(out_var)] - target) / (enter_dir * alpha);
            if (!(t >= 0)) t = 0.0;
            double span = hib[static_cast<size_t>(enter)] - lob[static_cast<size_t>(enter)];
            if (std::isfinite(span) && t > span + 1e-12 && vstat[static_cast<size_t>(enter)] != kFree) {
                // Bound flip on the entering candidate; violation shrinks.
                double tf = span;
                for (int k = 0; k < m; ++k) {
                    double wk = w[static_cast<size_t>(k)];
                    if (wk == 0.0) continue;
                    x[static_cast<size_t>(basis[static_cast<size_t>(k)])] += -enter_dir * wk * tf;
                }
                x[static_cast<size_t>(enter)] = enter_dir > 0 ? hib[static_cast<size_t>(enter)] : lob[static_cast<size_t>(enter)];
                vstat[static_cast<size_t>(enter)] = enter_dir > 0 ? kAtHi : kAtLo;
                continue;
            }
            for (int k = 0; k < m; ++k) {
                double wk = w[static_cast<size_t>(k)];
                if (wk == 0.0) continue;
                x[static_cast<size_t>(basis[static_cast<size_t>(k)])] += -enter_dir * wk * t;
            }
            x[static_cast<size_t>(enter)] += enter_dir * t;
            x[static_cast<size_t>(out_var)] = target;
            vstat[static_cast<size_t>(out_var)] = to_lo ? kAtLo : kAtHi;
            in_basis_pos[static_cast<size_t>(out_var)] = -1;
            basis[static_cast<size_t>(leave)] = enter;
            in_basis_pos[static_cast<size_t>(enter)] = leave;
            vstat[static_cast<size_t>(enter)] = kBasic;
            update_binv(leave, w);
            if (is_art(out_var)) {
                lob[static_cast<size_t>(out_var)] = hib[static_cast<size_t>(out_var)] = 0.0;
                x[static_cast<size_t>(out_var)] = 0.0;
                vstat[static_cast<size_t>(out_var)] = kAtLo;
            }
            if (pivots_since_refactor >= opts.refactor_every) {
                refactor();
                compute_basics();
            }
        }
        return false;  // cap hit; cold restart decides
    }
};

SimplexSolver::SimplexSolver(SimplexOptions opts) : impl_(new Impl) { impl_->opts = opts; }
SimplexSolver::~SimplexSolver() { delete impl_; }
SimplexSolver::SimplexSolver(SimplexSolver&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
SimplexSolver& SimplexSolver::operator=(SimplexSolver&& o) noexcept {
    std::swap(impl_, o.impl_);
    return *this;
}

LpSolution SimplexSolver::solve(const LinearProgram& lp) {
    impl_->has_basis = false;
    return impl_->run(lp, false, false);
}

LpSolution SimplexSolver::resolve(const LinearProgram& lp, bool same_matrix) {
    return impl_->run(lp, true, same_matrix);
}

void SimplexSolver::reset() { impl_->has_basis = false; }

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts) {
    SimplexSolver s(opts);
    return s.solve(lp);
}

std::string lp_to_text(const LinearProgram& lp) {
    auto name = [&](int j) {
        if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[static_cast<size_t>(j)].empty())
            return lp.var_names[static_cast<size_t>(j)];
        return std::string("x") + std::to_string(j);
    };
    std::string s;
    s += lp.maximize ? "Maximize\n obj:" : "Minimize\n obj:";
    bool any = false;
    for (int j = 0; j < lp.num_vars; ++j) {
        double c = lp.objective[static_cast<size_t>(j)];
        if (c == 0.0) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, " %+.17g ", c);
        s += buf;
        s += name(j);
        any = true;
    }
    if (!any) s += " 0 x0";
    s += "\nSubject To\n";
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        s += " r" + std::to_string(i) + ":";
        for (auto [j, v] : lp.rows[i].terms) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " %+.17g ", v);
            s += buf;
            s += name(j);
        }
        const char* op = lp.rows[i].sense == Sense::Le ? " <= " : lp.rows[i].sense == Sense::Ge ? " >= " : " = ";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.17g\n", op, lp.rows[i].rhs);
        s += buf;
    }
    s += "Bounds\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        double lo = lp.lo[static_cast<size_t>(j)], hi = lp.hi[static_cast<size_t>(j)];
        char buf[160];
        if (!std::isfinite(lo) && !std::isfinite(hi))
            std::snprintf(buf, sizeof buf, " %s free\n", name(j).c_str());
        else if (!std::isfinite(hi))
            std::snprintf(buf, sizeof buf, " %.17g <= %s\n", lo, name(j).c_str());
        else if (!std::isfinite(lo))
            std::snprintf(buf, sizeof buf, " %s <= %.17g\n", name(j).c_str(), hi);
        else
            std::snprintf(buf, sizeof buf, " %.17g <= %s <= %.17g\n", lo, name(j).c_str(), hi);
        s += buf;
    }
    s += "End\n";
    return s;
}

}  // namespace netvol::lp
