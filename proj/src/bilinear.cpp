#include "netvol/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace netvol::qp {

void BilinearProgram::validate() const {
    base.validate();
    for (const auto& p : products) {
        if (p.w < 0 || p.w >= base.num_vars || p.u < 0 || p.u >= base.num_vars || p.v < 0 ||
            p.v >= base.num_vars)
            throw std::invalid_argument("product references unknown variable");
        if (p.w == p.u || p.w == p.v)
            throw std::invalid_argument("product output must be a distinct variable");
        for (int j : {p.u, p.v})
            if (!std::isfinite(base.lo[static_cast<size_t>(j)]) ||
                !std::isfinite(base.hi[static_cast<size_t>(j)]))
                throw std::invalid_argument("product factors need finite boxes");
    }
}

std::vector<int> BilinearProgram::branch_vars() const {
    std::set<int> s;
    for (const auto& p : products) {
        s.insert(p.u);
        s.insert(p.v);
    }
    return {s.begin(), s.end()};
}

double max_product_violation(const BilinearProgram& bp, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& p : bp.products)
        worst = std::max(worst, std::fabs(x[static_cast<size_t>(p.w)] -
                                          x[static_cast<size_t>(p.u)] * x[static_cast<size_t>(p.v)]));
    return worst;
}

lp::LinearProgram mccormick_relax(const BilinearProgram& bp, const std::vector<double>& lo,
                                  const std::vector<double>& hi) {
    lp::LinearProgram out = bp.base;
    for (int j = 0; j < out.num_vars; ++j) {
        out.lo[static_cast<size_t>(j)] = std::max(out.lo[static_cast<size_t>(j)], lo[static_cast<size_t>(j)]);
        out.hi[static_cast<size_t>(j)] = std::min(out.hi[static_cast<size_t>(j)], hi[static_cast<size_t>(j)]);
    }
    for (const auto& p : bp.products) {
        double lu = out.lo[static_cast<size_t>(p.u)], hu = out.hi[static_cast<size_t>(p.u)];
        double lv = out.lo[static_cast<size_t>(p.v)], hv = out.hi[static_cast<size_t>(p.v)];
        if (p.u == p.v) {
            // Square: tangents from below, secant from above.
            out.add_row(lp::Sense::Ge, -lu * lu, {{p.w, 1.0}, {p.u, -2.0 * lu}});
            out.add_row(lp::Sense::Ge, -hu * hu, {{p.w, 1.0}, {p.u, -2.0 * hu}});
            out.add_row(lp::Sense::Le, -lu * hu, {{p.w, 1.0}, {p.u, -(lu + hu)}});
            double wlo = (lu <= 0.0 && hu >= 0.0) ? 0.0 : std::min(lu * lu, hu * hu);
            double whi = std::max(lu * lu, hu * hu);
            out.lo[static_cast<size_t>(p.w)] = std::max(out.lo[static_cast<size_t>(p.w)], wlo);
            out.hi[static_cast<size_t>(p.w)] = std::min(out.hi[static_cast<size_t>(p.w)], whi);
        } else {
            out.add_row(lp::Sense::Ge, -lu * lv, {{p.w, 1.0}, {p.u, -lv}, {p.v, -lu}});
            out.add_row(lp::Sense::Ge, -hu * hv, {{p.w, 1.0}, {p.u, -hv}, {p.v, -hu}});
            out.add_row(lp::Sense::Le, -lu * hv, {{p.w, 1.0}, {p.u, -hv}, {p.v, -lu}});
            out.add_row(lp::Sense::Le, -hu * lv, {{p.w, 1.0}, {p.u, -lv}, {p.v, -hu}});
            double c1 = lu * lv, c2 = lu * hv, c3 = hu * lv, c4 = hu * hv;
            out.lo[static_cast<size_t>(p.w)] =
                std::max(out.lo[static_cast<size_t>(p.w)], std::min(std::min(c1, c2), std::min(c3, c4)));
            out.hi[static_cast<size_t>(p.w)] =
                std::min(out.hi[static_cast<size_t>(p.w)], std::max(std::max(c1, c2), std::max(c3, c4)));
        }
    }
    return out;
}

BranchChoice choose_branch(const BilinearProgram& bp, const std::vector<double>& x,
                           const std::vector<double>& lo, const std::vector<double>& hi,
                           double min_violation) {
    std::vector<double> score(static_cast<size_t>(bp.base.num_vars), 0.0);
    for (const auto& p : bp.products) {
        double viol = std::fabs(x[static_cast<size_t>(p.w)] -
                                x[static_cast<size_t>(p.u)] * x[static_cast<size_t>(p.v)]);
        if (viol <= min_violation) continue;
        score[static_cast<size_t>(p.u)] += viol;
        score[static_cast<size_t>(p.v)] += viol;
    }
    BranchChoice choice;
    double best = 0.0;
    for (int j = 0; j < bp.base.num_vars; ++j) {
        double width = hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)];
        if (score[static_cast<size_t>(j)] <= 0.0 || width < 1e-7) continue;
        // Weight by width so a nearly-point box is not split over and over.
        double s = score[static_cast<size_t>(j)] * width;
        if (s > best) {
            best = s;
            choice.var = j;
        }
    }
    if (choice.var < 0) return choice;
    double l = lo[static_cast<size_t>(choice.var)], h = hi[static_cast<size_t>(choice.var)];
    double width = h - l;
    double split = x[static_cast<size_t>(choice.var)];
    split = std::max(l + 0.1 * width, std::min(h - 0.1 * width, split));
    choice.split = split;
    return choice;
}

namespace {

struct Node {
    double lb;
    int depth;
    long id;
    std::vector<double> blo, bhi;  // bounds of branch vars only
};

struct NodeOrder {
    // Best bound first; ties broken by depth (deeper first), then id.
    bool operator()(const Node& a, const Node& b) const {
        if (a.lb != b.lb) return a.lb > b.lb;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
    }
};

// Independent arithmetic check of a dual lower bound for the node LP:
//   lb(y) = y'b + sum_j min over [lo,hi] of (c_j - y'A_j) x_j.
double dual_bound(const lp::LinearProgram& node_lp, const std::vector<double>& y) {
    if (y.size() != node_lp.rows.size()) return -lp::kInf;
    std::vector<double> d(static_cast<size_t>(node_lp.num_vars), 0.0);
    double yb = 0.0;
    for (size_t i = 0; i < node_lp.rows.size(); ++i) {
        const auto& r = node_lp.rows[i];
        if (r.sense == lp::Sense::Le && y[i] > 1e-11) return -lp::kInf;
        if (r.sense == lp::Sense::Ge && y[i] < -1e-11) return -lp::kInf;
        yb += y[i] * r.rhs;
        for (auto [j, v] : r.terms) d[static_cast<size_t>(j)] += y[i] * v;
    }
    double extra = 0.0;
    for (int j = 0; j < node_lp.num_vars; ++j) {
        double red = node_lp.objective[static_cast<size_t>(j)] - d[static_cast<size_t>(j)];
        if (std::fabs(red) < 1e-13) continue;
        double term = red > 0 ? red * node_lp.lo[static_cast<size_t>(j)] : red * node_lp.hi[static_cast<size_t>(j)];
        if (!std::isfinite(term)) return -lp::kInf;
        extra += term;
    }
    return yb + extra;
}

bool incumbent_ok(const BilinearProgram& bp, const std::vector<double>& x, double tol) {
    for (size_t i = 0; i < bp.base.rows.size(); ++i) {
        const auto& r = bp.base.rows[i];
        double s = 0.0;
        for (auto [j, v] : r.terms) s += v * x[static_cast<size_t>(j)];
        double err = r.sense == lp::Sense::Eq   ? std::fabs(s - r.rhs)
                     : r.sense == lp::Sense::Le ? s - r.rhs
                                                : r.rhs - s;
        if (err > tol) return false;
    }
    for (int j = 0; j < bp.base.num_vars; ++j)
        if (x[static_cast<size_t>(j)] < bp.base.lo[static_cast<size_t>(j)] - tol ||
            x[static_cast<size_t>(j)] > bp.base.hi[static_cast<size_t>(j)] + tol)
            return false;
    return true;
}

double eval_obj(const lp::LinearProgram& base, const std::vector<double>& x) {
    double s = 0.0;
    for (int j = 0; j < base.num_vars; ++j)
        if (base.objective[static_cast<size_t>(j)] != 0.0)
            s += base.objective[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    return base.maximize ? -s : s;  // internal bounds always track minimization
}

}  // namespace

BnbSolution solve_bilinear(const BilinearProgram& bp, const BnbOptions& opts) {
    bp.validate();
    if (bp.base.maximize)
        throw std::invalid_argument("solve_bilinear expects a minimization (or feasibility) program");

    const std::vector<int> bvars = bp.branch_vars();
    const int nb = static_cast<int>(bvars.size());
    std::vector<int> bpos(static_cast<size_t>(bp.base.num_vars), -1);
    for (int k = 0; k < nb; ++k) bpos[static_cast<size_t>(bvars[static_cast<size_t>(k)])] = k;

    BnbSolution sol;
    sol.lower_bound = -lp::kInf;

    auto gap_abs = [&](double upper) { return opts.target_gap * std::max(std::fabs(upper), 1e-9); };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    {
        Node root;
        root.lb = -lp::kInf;
        root.depth = 0;
        root.id = 0;
        root.blo.resize(static_cast<size_t>(nb));
        root.bhi.resize(static_cast<size_t>(nb));
        for (int k = 0; k < nb; ++k) {
            root.blo[static_cast<size_t>(k)] = bp.base.lo[static_cast<size_t>(bvars[static_cast<size_t>(k)])];
            root.bhi[static_cast<size_t>(k)] = bp.base.hi[static_cast<size_t>(bvars[static_cast<size_t>(k)])];
        }
        open.push(std::move(root));
    }

    long next_id = 1;
    double min_leaf_lb = lp::kInf;  // over pruned/infeasible leaves
    lp::SimplexSolver solver;
    lp::SimplexSolver aux_solver;
    std::vector<double> full_lo(bp.base.lo), full_hi(bp.base.hi);

    auto push_trace = [&](long id, int depth, double lb, char kind) {
        if (opts.trace != nullptr)
            opts.trace->push_back({id, depth, lb, sol.lower_bound, sol.upper_bound, kind});
    };

    auto try_incumbent = [&](const std::vector<double>& cand) {
        std::vector<double> x = cand;
        for (const auto& p : bp.products)
            x[static_cast<size_t>(p.w)] = x[static_cast<size_t>(p.u)] * x[static_cast<size_t>(p.v)];
        if (!incumbent_ok(bp, x, 1e-8)) return;
        double obj = eval_obj(bp.base, x);
        if (obj < sol.upper_bound) {
            sol.upper_bound = obj;
            sol.incumbent = std::move(x);
            sol.incumbent_product_error = max_product_violation(bp, sol.incumbent);
        }
    };

    const double feas_thr = opts.feas_threshold;
    bool budget_hit = false;

    while (!open.empty()) {
        if (sol.nodes_explored >= opts.node_budget) {
            budget_hit = true;
            break;
        }
        Node node = open.top();
        open.pop();

        // Global lower bound: this node is the best remaining.
        double global_lb = std::isfinite(node.lb) ? node.lb : sol.lower_bound;
        if (std::isfinite(node.lb)) sol.lower_bound = std::max(sol.lower_bound, std::min(node.lb, sol.upper_bound));
        (void)global_lb;

        // Termination on bounds.
        if (opts.feasibility_mode) {
            if (sol.upper_bound <= feas_thr) break;
            if (std::isfinite(node.lb) && node.lb > feas_thr) {
                min_leaf_lb = std::min(min_leaf_lb, node.lb);
                push_trace(node.id, node.depth, node.lb, 'p');
                continue;  // cannot affect the feasibility question
            }
        } else if (std::isfinite(node.lb) && sol.upper_bound < lp::kInf &&
                   node.lb >= sol.upper_bound - gap_abs(sol.upper_bound)) {
            min_leaf_lb = std::min(min_leaf_lb, node.lb);
            push_trace(node.id, node.depth, node.lb, 'p');
            // Everything left is within the gap; stop.
            sol.lower_bound = std::max(sol.lower_bound, node.lb);
            break;
        }

        ++sol.nodes_explored;

        for (int k = 0; k < nb; ++k) {
            full_lo[static_cast<size_t>(bvars[static_cast<size_t>(k)])] = node.blo[static_cast<size_t>(k)];
            full_hi[static_cast<size_t>(bvars[static_cast<size_t>(k)])] = node.bhi[static_cast<size_t>(k)];
        }
        lp::LinearProgram node_lp = mccormick_relax(bp, full_lo, full_hi);

        lp::LpSolution rel;
        try {
            rel = solver.resolve(node_lp);
        } catch (const lp::LpStallError&) {
            // Conservative: drop the node's bound contribution but keep going.
            sol.certificates_verified = false;
            push_trace(node.id, node.depth, node.lb, 'p');
            min_leaf_lb = std::min(min_leaf_lb, node.lb);
            continue;
        }

        if (rel.status == lp::LpStatus::Infeasible) {
            if (!(rel.farkas_violation > 1e-9)) sol.certificates_verified = false;
            if (node.depth == 0) sol.root_farkas = rel.farkas;
            push_trace(node.id, node.depth, lp::kInf, 'f');
            continue;  // leaf: no feasible point in this box at all
        }
        if (rel.status == lp::LpStatus::Unbounded) {
            sol.lower_bound = -lp::kInf;
            sol.status = BnbStatus::Indeterminate;
            return sol;
        }

        double node_bound = rel.objective;
        // Independent re-check of the relaxation bound through its duals.
        double certified = dual_bound(node_lp, rel.row_duals);
        if (certified > -lp::kInf)
            node_bound = std::min(node_bound, certified + 1e-12);
        else
            sol.certificates_verified = false;
        node_bound = std::max(node_bound, node.lb);  // monotone within the tree

        if (opts.feasibility_mode && node_bound > feas_thr) {
            min_leaf_lb = std::min(min_leaf_lb, node_bound);
            push_trace(node.id, node.depth, node_bound, 'p');
            continue;
        }
        if (!opts.feasibility_mode && sol.upper_bound < lp::kInf &&
            node_bound >= sol.upper_bound - gap_abs(sol.upper_bound)) {
            min_leaf_lb = std::min(min_leaf_lb, node_bound);
            push_trace(node.id, node.depth, node_bound, 'p');
            continue;
        }

        // Incumbent heuristics: the relaxation point itself, then an LP with
        // the branch variables pinned at their relaxation values.
        if (max_product_violation(bp, rel.x) <= 1e-9) {
            try_incumbent(rel.x);
        } else {
            lp::LinearProgram fixed = node_lp;
            bool pinned = false;
            for (int k = 0; k < nb; ++k) {
                int j = bvars[static_cast<size_t>(k)];
                double v = std::clamp(rel.x[static_cast<size_t>(j)], node.blo[static_cast<size_t>(k)],
                                      node.bhi[static_cast<size_t>(k)]);
                full_lo[static_cast<size_t>(j)] = full_hi[static_cast<size_t>(j)] = v;
                pinned = true;
            }
            if (pinned) {
                lp::LinearProgram heur = mccormick_relax(bp, full_lo, full_hi);
                try {
                    lp::LpSolution hsol = aux_solver.resolve(heur);
                    if (hsol.status == lp::LpStatus::Optimal) try_incumbent(hsol.x);
                } catch (const lp::LpStallError&) {
                }
                for (int k = 0; k < nb; ++k) {
                    int j = bvars[static_cast<size_t>(k)];
                    full_lo[static_cast<size_t>(j)] = node.blo[static_cast<size_t>(k)];
                    full_hi[static_cast<size_t>(j)] = node.bhi[static_cast<size_t>(k)];
                }
            }
        }

        if (opts.feasibility_mode && sol.upper_bound <= feas_thr) {
            sol.lower_bound = std::max(sol.lower_bound, std::min(node_bound, sol.upper_bound));
            push_trace(node.id, node.depth, node_bound, 'i');
            break;
        }

        BranchChoice br = choose_branch(bp, rel.x, full_lo, full_hi);
        if (br.var < 0) {
            // No violated splittable product: the relaxation value is as good
            // as this box gets.
            min_leaf_lb = std::min(min_leaf_lb, node_bound);
            push_trace(node.id, node.depth, node_bound, 'p');
            continue;
        }
        int k = bpos[static_cast<size_t>(br.var)];
        Node left{node_bound, node.depth + 1, next_id++, node.blo, node.bhi};
        Node right{node_bound, node.depth + 1, next_id++, node.blo, node.bhi};
        left.bhi[static_cast<size_t>(k)] = br.split;
        right.blo[static_cast<size_t>(k)] = br.split;
        push_trace(node.id, node.depth, node_bound, 'b');
        open.push(std::move(left));
        open.push(std::move(right));
    }

    // Final bounds. The best open node (if any) limits the certified lower
    // bound; otherwise every leaf was pruned at min_leaf_lb or higher.
    double open_lb = lp::kInf;
    if (!open.empty()) open_lb = std::isfinite(open.top().lb) ? open.top().lb : -lp::kInf;
    double lb = std::min(open_lb, min_leaf_lb);
    if (sol.upper_bound < lp::kInf) lb = std::min(lb, sol.upper_bound);
    if (std::isfinite(lb)) sol.lower_bound = lb;
    sol.gap = sol.upper_bound < lp::kInf && std::isfinite(sol.lower_bound)
                  ? (sol.upper_bound - sol.lower_bound) / std::max(1.0, std::fabs(sol.upper_bound))
                  : lp::kInf;

    if (opts.feasibility_mode) {
        if (sol.upper_bound <= feas_thr)
            sol.status = BnbStatus::Feasible;
        else if (!budget_hit && sol.lower_bound > feas_thr)
            sol.status = BnbStatus::Infeasible;
        else
            sol.status = BnbStatus::Indeterminate;
    } else {
        if (budget_hit)
            sol.status = BnbStatus::Indeterminate;
        else if (sol.upper_bound < lp::kInf)
            sol.status = BnbStatus::Feasible;
        else
            sol.status = BnbStatus::Infeasible;
    }
    return sol;
}

}  // namespace netvol::qp
