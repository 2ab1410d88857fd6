#include "netvol/membership.hpp"

#include <cmath>
#include <stdexcept>

namespace netvol::sets {

std::string to_string(SetId s) {
    switch (s) {
        case SetId::Local3: return "local3";
        case SetId::Bilocal: return "bilocal";
        case SetId::EvansClassical: return "evans-classical";
        case SetId::EvansNSI: return "evans-nsi";
        case SetId::EvansClassicalWithDo: return "evans-classical-do";
    }
    return "?";
}

std::string to_string(Status s) {
    switch (s) {
        case Status::Inside: return "inside";
        case Status::Outside: return "outside";
        case Status::Indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

int ipow(int b, int e) {
    int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Deterministic response digit: strategy `s` maps setting x to outcome
// (s / card^x) % card.
inline int digit(int s, int x, int card) {
    while (x-- > 0) s /= card;
    return s % card;
}

// ---- local set --------------------------------------------------------

struct LocalStrategies {
    int n = 0;
    std::vector<int8_t> table;  // [strategy][a,b,c,x,z] -> 0/1
};

LocalStrategies build_local_strategies(const ScenarioSpec& s) {
    LocalStrategies out;
    int nfa = ipow(s.card_a, s.card_x);
    int nfc = ipow(s.card_c, s.card_z);
    out.n = nfa * s.card_b * nfc;
    out.table.assign(static_cast<size_t>(out.n) * s.table_size(), 0);
    Behavior probe{s, std::vector<double>(static_cast<size_t>(s.table_size()), 0.0)};
    int idx = 0;
    for (int fa = 0; fa < nfa; ++fa)
        for (int b0 = 0; b0 < s.card_b; ++b0)
            for (int fc = 0; fc < nfc; ++fc, ++idx)
                for (int x = 0; x < s.card_x; ++x)
                    for (int z = 0; z < s.card_z; ++z) {
                        int a = digit(fa, x, s.card_a);
                        int c = digit(fc, z, s.card_c);
                        out.table[static_cast<size_t>(idx) * s.table_size() +
                                  probe.index(a, b0, c, x, z)] = 1;
                    }
    return out;
}

Certificate farkas_certificate(const lp::LpSolution& sol) {
    Certificate c;
    c.kind = "farkas";
    c.values = sol.farkas;
    c.violation = sol.farkas_violation;
    return c;
}

}  // namespace

lp::LinearProgram build_local_lp(const Behavior& b) {
    b.validate(1e-9);
    const auto& s = b.spec;
    if (s.network != Network::Bilocality)
        throw std::domain_error("test_local expects a bilocality-shaped behavior");
    LocalStrategies strat = build_local_strategies(s);

    lp::LinearProgram prog;
    for (int k = 0; k < strat.n; ++k) prog.add_var(0.0, 1.0);
    for (int cell = 0; cell < s.table_size(); ++cell) {
        std::vector<std::pair<int, double>> terms;
        for (int k = 0; k < strat.n; ++k)
            if (strat.table[static_cast<size_t>(k) * s.table_size() + cell] != 0)
                terms.emplace_back(k, 1.0);
        prog.add_row(lp::Sense::Eq, b.table[static_cast<size_t>(cell)], std::move(terms));
    }
    {
        std::vector<std::pair<int, double>> norm;
        for (int k = 0; k < strat.n; ++k) norm.emplace_back(k, 1.0);
        prog.add_row(lp::Sense::Eq, 1.0, std::move(norm));
    }
    return prog;
}

MembershipVerdict test_local(const Behavior& b, const OracleOptions& opts) {
    const auto& s = b.spec;
    LocalStrategies strat = build_local_strategies(s);
    lp::LinearProgram prog = build_local_lp(b);

    MembershipVerdict v;
    v.set_id = SetId::Local3;
    lp::LpSolution sol;
    try {
        sol = lp::solve_lp(prog);
    } catch (const lp::LpStallError&) {
        v.status = Status::Indeterminate;
        v.certificate.kind = "none";
        return v;
    }

    if (sol.status == lp::LpStatus::Optimal) {
        v.status = Status::Inside;
        v.margin = 0.0;
        v.certificate.kind = "primal-model";
        v.certificate.values = sol.x;
        // Re-verify the decomposition by direct evaluation.
        double err = 0.0;
        for (int cell = 0; cell < s.table_size(); ++cell) {
            double m = 0.0;
            for (int k = 0; k < strat.n; ++k)
                if (strat.table[static_cast<size_t>(k) * s.table_size() + cell] != 0)
                    m += sol.x[static_cast<size_t>(k)];
            err = std::max(err, std::fabs(m - b.table[static_cast<size_t>(cell)]));
        }
        v.certificate_verified = err <= 1e-9;
        v.certificate.violation = err;
        if (opts.compute_distance) v.distance = 0.0;
    } else {
        v.status = Status::Outside;
        v.certificate = farkas_certificate(sol);
        v.margin = sol.farkas_violation;
        v.certificate_verified = sol.farkas_violation > 1e-9;
    }

    if (opts.compute_distance && v.status == Status::Outside) {
        // Exact LP: minimize the trace-distance quantifier to the local
        // polytope, deviations split into positive parts.
        lp::LinearProgram d;
        for (int k = 0; k < strat.n; ++k) d.add_var(0.0, 1.0);
        int dev0 = d.num_vars;
        double coef = 0.5 / (s.card_x * s.card_z);
        for (int cell = 0; cell < 2 * s.table_size(); ++cell) d.add_var(0.0, 1.0, coef);
        for (int cell = 0; cell < s.table_size(); ++cell) {
            std::vector<std::pair<int, double>> terms;
            for (int k = 0; k < strat.n; ++k)
                if (strat.table[static_cast<size_t>(k) * s.table_size() + cell] != 0)
                    terms.emplace_back(k, 1.0);
            terms.emplace_back(dev0 + 2 * cell, -1.0);
            terms.emplace_back(dev0 + 2 * cell + 1, 1.0);
            d.add_row(lp::Sense::Eq, b.table[static_cast<size_t>(cell)], std::move(terms));
        }
        {
            std::vector<std::pair<int, double>> norm;
            for (int k = 0; k < strat.n; ++k) norm.emplace_back(k, 1.0);
            d.add_row(lp::Sense::Eq, 1.0, std::move(norm));
        }
        try {
            lp::LpSolution ds = lp::solve_lp(d);
            if (ds.status == lp::LpStatus::Optimal) v.distance = ds.objective;
        } catch (const lp::LpStallError&) {
        }
    }
    return v;
}

// ---- shared bilocal-shaped bilinear core --------------------------------

namespace {

struct BilocalCore {
    int ca = 2, cb = 2, cc = 2, cx = 2, cz = 2;
    int n_lambda = 4, n_gamma = 4;
    int q0 = 0, u0 = 0, v0 = 0, w0 = 0, t = -1;
    qp::BilinearProgram bp;

    int q(int lam, int b, int gam) const { return q0 + (lam * cb + b) * n_gamma + gam; }
    int w(int lam, int gam) const { return w0 + lam * n_gamma + gam; }
};

// Variables and structural rows shared by the bilocal / Evans-classical /
// interventional programs; data rows are added by the caller.
BilocalCore build_bilocal_core(int ca, int cx, int cb, int cc, int cz, bool with_slack) {
    BilocalCore m;
    m.ca = ca;
    m.cb = cb;
    m.cc = cc;
    m.cx = cx;
    m.cz = cz;
    m.n_lambda = ipow(ca, cx);
    m.n_gamma = ipow(cc, cz);
    auto& bp = m.bp;
    m.q0 = bp.base.num_vars;
    for (int i = 0; i < m.n_lambda * cb * m.n_gamma; ++i) bp.base.add_var(0.0, 1.0);
    m.u0 = bp.base.num_vars;
    for (int i = 0; i < m.n_lambda; ++i) bp.base.add_var(0.0, 1.0);
    m.v0 = bp.base.num_vars;
    for (int i = 0; i < m.n_gamma; ++i) bp.base.add_var(0.0, 1.0);
    m.w0 = bp.base.num_vars;
    for (int i = 0; i < m.n_lambda * m.n_gamma; ++i) bp.base.add_var(0.0, 1.0);
    if (with_slack) m.t = bp.base.add_var(0.0, 2.0, 1.0);

    // Normalization of q.
    {
        std::vector<std::pair<int, double>> norm;
        for (int i = 0; i < m.n_lambda * cb * m.n_gamma; ++i) norm.emplace_back(m.q0 + i, 1.0);
        bp.base.add_row(lp::Sense::Eq, 1.0, std::move(norm));
    }
    // u and v are the source marginals of q.
    for (int lam = 0; lam < m.n_lambda; ++lam) {
        std::vector<std::pair<int, double>> row{{m.u0 + lam, 1.0}};
        for (int b = 0; b < cb; ++b)
            for (int gam = 0; gam < m.n_gamma; ++gam) row.emplace_back(m.q(lam, b, gam), -1.0);
        bp.base.add_row(lp::Sense::Eq, 0.0, std::move(row));
    }
    for (int gam = 0; gam < m.n_gamma; ++gam) {
        std::vector<std::pair<int, double>> row{{m.v0 + gam, 1.0}};
        for (int b = 0; b < cb; ++b)
            for (int lam = 0; lam < m.n_lambda; ++lam) row.emplace_back(m.q(lam, b, gam), -1.0);
        bp.base.add_row(lp::Sense::Eq, 0.0, std::move(row));
    }
    // w(lam,gam) = sum_b q(lam,b,gam), constrained to u*v by the products.
    for (int lam = 0; lam < m.n_lambda; ++lam)
        for (int gam = 0; gam < m.n_gamma; ++gam) {
            std::vector<std::pair<int, double>> row{{m.w(lam, gam), 1.0}};
            for (int b = 0; b < cb; ++b) row.emplace_back(m.q(lam, b, gam), -1.0);
            bp.base.add_row(lp::Sense::Eq, 0.0, std::move(row));
            bp.products.push_back({m.w(lam, gam), m.u0 + lam, m.v0 + gam});
        }
    // Simplex rows for the marginals (implied, but they tighten the root).
    {
        std::vector<std::pair<int, double>> su, sv;
        for (int lam = 0; lam < m.n_lambda; ++lam) su.emplace_back(m.u0 + lam, 1.0);
        for (int gam = 0; gam < m.n_gamma; ++gam) sv.emplace_back(m.v0 + gam, 1.0);
        bp.base.add_row(lp::Sense::Eq, 1.0, std::move(su));
        bp.base.add_row(lp::Sense::Eq, 1.0, std::move(sv));
    }
    return m;
}

// Adds |expr - rhs| <= t rows for a data constraint.
void add_data_row(qp::BilinearProgram& bp, std::vector<std::pair<int, double>> terms, double rhs,
                  int t) {
    auto le = terms;
    le.emplace_back(t, -1.0);
    bp.base.add_row(lp::Sense::Le, rhs, std::move(le));
    terms.emplace_back(t, 1.0);
    bp.base.add_row(lp::Sense::Ge, rhs, std::move(terms));
}

MembershipVerdict run_feasibility(const qp::BilinearProgram& bp, SetId id,
                                  const OracleOptions& opts) {
    qp::BnbOptions bo;
    bo.feasibility_mode = true;
    bo.target_gap = opts.gap;
    bo.node_budget = opts.node_budget;
    qp::BnbSolution sol = qp::solve_bilinear(bp, bo);

    MembershipVerdict v;
    v.set_id = id;
    v.nodes = sol.nodes_explored;
    v.solver_gap = sol.gap;
    switch (sol.status) {
        case qp::BnbStatus::Feasible:
            v.status = Status::Inside;
            v.margin = sol.upper_bound;
            v.certificate.kind = "primal-model";
            v.certificate.values = sol.incumbent;
            v.certificate.violation = std::max(sol.incumbent_product_error, sol.upper_bound);
            v.certificate_verified = sol.incumbent_product_error <= 1e-9;
            break;
        case qp::BnbStatus::Infeasible:
            v.status = Status::Outside;
            v.margin = sol.lower_bound;
            if (!sol.root_farkas.empty()) {
                v.certificate.kind = "farkas";
                v.certificate.values = sol.root_farkas;
                v.certificate.violation = sol.lower_bound;
            } else {
                v.certificate.kind = "bnb-bounds";
                v.certificate.values = {sol.lower_bound, static_cast<double>(sol.nodes_explored)};
                v.certificate.violation = sol.lower_bound;
            }
            v.certificate_verified = sol.certificates_verified && sol.lower_bound > 1e-9;
            break;
        default:
            v.status = Status::Indeterminate;
            v.margin = std::isfinite(sol.lower_bound) ? sol.lower_bound : 0.0;
            v.certificate.kind = "none";
            break;
    }
    return v;
}

// Distance mode for the bilocal-shaped sets: replace data rows by deviation
// splits and minimize the trace-distance quantifier.
void run_distance(MembershipVerdict& v, const BilocalCore& core_no_slack,
                  const std::vector<std::pair<std::vector<std::pair<int, double>>, double>>& data,
                  double norm_factor, const OracleOptions& opts) {
    qp::BilinearProgram bp = core_no_slack.bp;
    double coef = 0.5 * norm_factor;
    for (const auto& [terms, rhs] : data) {
        int dp = bp.base.add_var(0.0, 1.0, coef);
        int dm = bp.base.add_var(0.0, 1.0, coef);
        auto row = terms;
        row.emplace_back(dp, -1.0);
        row.emplace_back(dm, 1.0);
        bp.base.add_row(lp::Sense::Eq, rhs, std::move(row));
    }
    qp::BnbOptions bo;
    bo.feasibility_mode = false;
    bo.target_gap = opts.distance_gap;
    bo.node_budget = opts.node_budget;
    qp::BnbSolution sol = qp::solve_bilinear(bp, bo);
    if (sol.status == qp::BnbStatus::Feasible || sol.upper_bound < lp::kInf) {
        v.distance = sol.upper_bound;
        v.solver_gap = sol.gap;
        v.nodes += sol.nodes_explored;
    }
}

}  // namespace

qp::BilinearProgram build_bilocal_program(const Behavior& b) {
    b.validate(1e-9);
    const auto& s = b.spec;
    if (s.network != Network::Bilocality)
        throw std::domain_error("test_bilocal expects a bilocality-shaped behavior");

    BilocalCore core = build_bilocal_core(s.card_a, s.card_x, s.card_b, s.card_c, s.card_z, true);
    auto data_terms = [&](int a, int bb, int c, int x, int z) {
        std::vector<std::pair<int, double>> terms;
        for (int lam = 0; lam < core.n_lambda; ++lam) {
            if (digit(lam, x, s.card_a) != a) continue;
            for (int gam = 0; gam < core.n_gamma; ++gam)
                if (digit(gam, z, s.card_c) == c) terms.emplace_back(core.q(lam, bb, gam), 1.0);
        }
        return terms;
    };
    for (int a = 0; a < s.card_a; ++a)
        for (int bb = 0; bb < s.card_b; ++bb)
            for (int c = 0; c < s.card_c; ++c)
                for (int x = 0; x < s.card_x; ++x)
                    for (int z = 0; z < s.card_z; ++z)
                        add_data_row(core.bp, data_terms(a, bb, c, x, z), b.at(a, bb, c, x, z),
                                     core.t);
    return core.bp;
}

MembershipVerdict test_bilocal(const Behavior& b, const OracleOptions& opts) {
    const auto& s = b.spec;
    MembershipVerdict v = run_feasibility(build_bilocal_program(b), SetId::Bilocal, opts);
    if (opts.compute_distance) {
        if (v.status == Status::Inside) {
            v.distance = 0.0;
        } else if (v.status == Status::Outside) {
            BilocalCore plain =
                build_bilocal_core(s.card_a, s.card_x, s.card_b, s.card_c, s.card_z, false);
            std::vector<std::pair<std::vector<std::pair<int, double>>, double>> data;
            for (int a = 0; a < s.card_a; ++a)
                for (int bb = 0; bb < s.card_b; ++bb)
                    for (int c = 0; c < s.card_c; ++c)
                        for (int x = 0; x < s.card_x; ++x)
                            for (int z = 0; z < s.card_z; ++z) {
                                std::vector<std::pair<int, double>> terms;
                                for (int lam = 0; lam < plain.n_lambda; ++lam) {
                                    if (digit(lam, x, s.card_a) != a) continue;
                                    for (int gam = 0; gam < plain.n_gamma; ++gam)
                                        if (digit(gam, z, s.card_c) == c)
                                            terms.emplace_back(plain.q(lam, bb, gam), 1.0);
                                }
                                data.emplace_back(std::move(terms), b.at(a, bb, c, x, z));
                            }
            run_distance(v, plain, data, 1.0 / (s.card_x * s.card_z), opts);
        }
    }
    return v;
}

namespace {

void check_evans_shape(const Behavior& p) {
    p.validate(1e-9);
    if (p.spec.network != Network::Evans || p.spec.card_x != 1 || p.spec.card_z != 1)
        throw std::domain_error("expected an Evans-shaped distribution (no settings)");
}

// Evans classical program: bilocal core with |X| = |Z| = card_b and data
// rows only at x = z = b; optionally with do-conditional rows.
qp::BilinearProgram build_evans_classical(const Behavior& p, const HybridDataTable* hybrid,
                                          BilocalCore* out_core) {
    const auto& s = p.spec;
    BilocalCore core = build_bilocal_core(s.card_a, s.card_b, s.card_b, s.card_c, s.card_b, true);
    for (int a = 0; a < s.card_a; ++a)
        for (int bb = 0; bb < s.card_b; ++bb)
            for (int c = 0; c < s.card_c; ++c) {
                std::vector<std::pair<int, double>> terms;
                for (int lam = 0; lam < core.n_lambda; ++lam) {
                    if (digit(lam, bb, s.card_a) != a) continue;
                    for (int gam = 0; gam < core.n_gamma; ++gam)
                        if (digit(gam, bb, s.card_c) == c)
                            terms.emplace_back(core.q(lam, bb, gam), 1.0);
                }
                add_data_row(core.bp, std::move(terms), p.at(a, bb, c), core.t);
            }
    if (hybrid != nullptr) {
        for (int bb = 0; bb < s.card_b; ++bb) {
            for (int a = 0; a < s.card_a; ++a) {
                std::vector<std::pair<int, double>> terms;
                for (int lam = 0; lam < core.n_lambda; ++lam)
                    if (digit(lam, bb, s.card_a) == a) terms.emplace_back(core.u0 + lam, 1.0);
                add_data_row(core.bp, std::move(terms), hybrid->pa_do(a, bb), core.t);
            }
            for (int c = 0; c < s.card_c; ++c) {
                std::vector<std::pair<int, double>> terms;
                for (int gam = 0; gam < core.n_gamma; ++gam)
                    if (digit(gam, bb, s.card_c) == c) terms.emplace_back(core.v0 + gam, 1.0);
                add_data_row(core.bp, std::move(terms), hybrid->pc_do(c, bb), core.t);
            }
        }
    }
    if (out_core != nullptr) *out_core = core;
    return core.bp;
}

}  // namespace

qp::BilinearProgram build_evans_classical_program(const Behavior& p) {
    check_evans_shape(p);
    return build_evans_classical(p, nullptr, nullptr);
}

qp::BilinearProgram build_evans_interventional_program(const HybridDataTable& h) {
    h.validate();
    check_evans_shape(h.observational);
    return build_evans_classical(h.observational, &h, nullptr);
}

MembershipVerdict test_evans_classical(const Behavior& p, const OracleOptions& opts) {
    check_evans_shape(p);
    qp::BilinearProgram bp = build_evans_classical(p, nullptr, nullptr);
    MembershipVerdict v = run_feasibility(bp, SetId::EvansClassical, opts);
    if (opts.compute_distance) {
        if (v.status == Status::Inside) {
            v.distance = 0.0;
        } else if (v.status == Status::Outside) {
            const auto& s = p.spec;
            BilocalCore plain =
                build_bilocal_core(s.card_a, s.card_b, s.card_b, s.card_c, s.card_b, false);
            std::vector<std::pair<std::vector<std::pair<int, double>>, double>> data;
            for (int a = 0; a < s.card_a; ++a)
                for (int bb = 0; bb < s.card_b; ++bb)
                    for (int c = 0; c < s.card_c; ++c) {
                        std::vector<std::pair<int, double>> terms;
                        for (int lam = 0; lam < plain.n_lambda; ++lam) {
                            if (digit(lam, bb, s.card_a) != a) continue;
                            for (int gam = 0; gam < plain.n_gamma; ++gam)
                                if (digit(gam, bb, s.card_c) == c)
                                    terms.emplace_back(plain.q(lam, bb, gam), 1.0);
                        }
                        data.emplace_back(std::move(terms), p.at(a, bb, c));
                    }
            run_distance(v, plain, data, 1.0, opts);
        }
    }
    return v;
}

MembershipVerdict test_evans_interventional(const HybridDataTable& h, const OracleOptions& opts) {
    qp::BilinearProgram bp = build_evans_interventional_program(h);
    return run_feasibility(bp, SetId::EvansClassicalWithDo, opts);
}

qp::BilinearProgram build_evans_nsi_program(const Behavior& p) {
    check_evans_shape(p);
    const auto& s = p.spec;
    const int ca = s.card_a, cb = s.card_b, cc = s.card_c;
    // The bilocal lift: x and z range over B's outcomes.
    const int cx = cb, cz = cb;

    qp::BilinearProgram bp;
    auto& base = bp.base;
    // pB(a,b,c|x,z)
    auto pb = [&](int a, int b, int c, int x, int z) {
        return (((a * cb + b) * cc + c) * cx + x) * cz + z;
    };
    for (int i = 0; i < ca * cb * cc * cx * cz; ++i) base.add_var(0.0, 1.0);
    int u0 = base.num_vars;  // u(a|x)
    for (int i = 0; i < ca * cx; ++i) base.add_var(0.0, 1.0);
    int v0 = base.num_vars;  // v(c|z)
    for (int i = 0; i < cc * cz; ++i) base.add_var(0.0, 1.0);
    int w0 = base.num_vars;  // w(a,c,x,z) = u(a|x) v(c|z)
    for (int i = 0; i < ca * cc * cx * cz; ++i) base.add_var(0.0, 1.0);
    int t = base.add_var(0.0, 2.0, 1.0);
    auto uu = [&](int a, int x) { return u0 + a * cx + x; };
    auto vv = [&](int c, int z) { return v0 + c * cz + z; };
    auto ww = [&](int a, int c, int x, int z) { return w0 + ((a * cc + c) * cx + x) * cz + z; };

    // Normalization per setting block.
    for (int x = 0; x < cx; ++x)
        for (int z = 0; z < cz; ++z) {
            std::vector<std::pair<int, double>> row;
            for (int a = 0; a < ca; ++a)
                for (int b = 0; b < cb; ++b)
                    for (int c = 0; c < cc; ++c) row.emplace_back(pb(a, b, c, x, z), 1.0);
            base.add_row(lp::Sense::Eq, 1.0, std::move(row));
        }
    // No-signaling: p(a,b|x,z) independent of z; p(b,c|x,z) independent of x.
    for (int a = 0; a < ca; ++a)
        for (int b = 0; b < cb; ++b)
            for (int x = 0; x < cx; ++x)
                for (int z = 1; z < cz; ++z) {
                    std::vector<std::pair<int, double>> row;
                    for (int c = 0; c < cc; ++c) {
                        row.emplace_back(pb(a, b, c, x, z), 1.0);
                        row.emplace_back(pb(a, b, c, x, 0), -1.0);
                    }
                    base.add_row(lp::Sense::Eq, 0.0, std::move(row));
                }
    for (int b = 0; b < cb; ++b)
        for (int c = 0; c < cc; ++c)
            for (int z = 0; z < cz; ++z)
                for (int x = 1; x < cx; ++x) {
                    std::vector<std::pair<int, double>> row;
                    for (int a = 0; a < ca; ++a) {
                        row.emplace_back(pb(a, b, c, x, z), 1.0);
                        row.emplace_back(pb(a, b, c, 0, z), -1.0);
                    }
                    base.add_row(lp::Sense::Eq, 0.0, std::move(row));
                }
    // Marginal definitions (z=0 and x=0 anchors; no-signaling spreads them).
    for (int a = 0; a < ca; ++a)
        for (int x = 0; x < cx; ++x) {
            std::vector<std::pair<int, double>> row{{uu(a, x), 1.0}};
            for (int b = 0; b < cb; ++b)
                for (int c = 0; c < cc; ++c) row.emplace_back(pb(a, b, c, x, 0), -1.0);
            base.add_row(lp::Sense::Eq, 0.0, std::move(row));
        }
    for (int c = 0; c < cc; ++c)
        for (int z = 0; z < cz; ++z) {
            std::vector<std::pair<int, double>> row{{vv(c, z), 1.0}};
            for (int a = 0; a < ca; ++a)
                for (int b = 0; b < cb; ++b) row.emplace_back(pb(a, b, c, 0, z), -1.0);
            base.add_row(lp::Sense::Eq, 0.0, std::move(row));
        }
    // Source independence: sum_b pB(a,b,c|x,z) = u(a|x) v(c|z).
    for (int a = 0; a < ca; ++a)
        for (int c = 0; c < cc; ++c)
            for (int x = 0; x < cx; ++x)
                for (int z = 0; z < cz; ++z) {
                    std::vector<std::pair<int, double>> row{{ww(a, c, x, z), 1.0}};
                    for (int b = 0; b < cb; ++b) row.emplace_back(pb(a, b, c, x, z), -1.0);
                    base.add_row(lp::Sense::Eq, 0.0, std::move(row));
                    bp.products.push_back({ww(a, c, x, z), uu(a, x), vv(c, z)});
                }
    // Anchoring to the observed distribution, with the feasibility slack.
    for (int a = 0; a < ca; ++a)
        for (int b = 0; b < cb; ++b)
            for (int c = 0; c < cc; ++c)
                add_data_row(bp, {{pb(a, b, c, b, b), 1.0}}, p.at(a, b, c), t);
    return bp;
}

MembershipVerdict test_evans_nsi(const Behavior& p, const OracleOptions& opts) {
    return run_feasibility(build_evans_nsi_program(p), SetId::EvansNSI, opts);
}

// ---- witness -----------------------------------------------------------

const Behavior& pns_distribution() {
    static const Behavior pns = [] {
        ScenarioSpec s = ScenarioSpec::evans();
        Behavior b{s, std::vector<double>(8, 0.0)};
        b.at(1, 0, 0) = 2.0 / 81.0;
        b.at(0, 0, 1) = 1.0 / 55.0;
        b.at(0, 1, 0) = 1.0 / 11.0;
        b.at(1, 0, 1) = 1.0 / 5.0;
        b.at(1, 1, 0) = 1.0 / 81.0;
        b.at(0, 1, 1) = 1.0 / 81.0;
        b.at(1, 1, 1) = 0.5 / std::sqrt(2.0);
        double rest = 0.0;
        for (double x : b.table) rest += x;
        b.at(0, 0, 0) = 1.0 - rest;
        return b;
    }();
    return pns;
}

double witness_value(const Behavior& p) {
    check_evans_shape(p);
    const Behavior& pns = pns_distribution();
    if (p.table.size() != pns.table.size())
        throw std::domain_error("witness expects the binary Evans scenario");
    double w = 0.0;
    for (size_t i = 0; i < p.table.size(); ++i) {
        double d = p.table[i] - pns.table[i];
        w += d * d;
    }
    return w;
}

qp::BnbSolution minimize_witness_over_classical(double target_gap, long node_budget) {
    const Behavior& pns = pns_distribution();
    const auto& s = pns.spec;
    BilocalCore core = build_bilocal_core(s.card_a, s.card_b, s.card_b, s.card_c, s.card_b, false);
    auto& bp = core.bp;
    // Free behavior p(abc) determined by the model, e = p - P_NS, and the
    // epigraph squares t_abc = e^2 minimized.
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
            for (int c = 0; c < 2; ++c) {
                double ref = pns.at(a, bb, c);
                int e = bp.base.add_var(-ref, 1.0 - ref);
                int sq = bp.base.add_var(0.0, 1.0, 1.0);
                std::vector<std::pair<int, double>> row{{e, 1.0}};
                for (int lam = 0; lam < core.n_lambda; ++lam) {
                    if (digit(lam, bb, 2) != a) continue;
                    for (int gam = 0; gam < core.n_gamma; ++gam)
                        if (digit(gam, bb, 2) == c) row.emplace_back(core.q(lam, bb, gam), -1.0);
                }
                bp.base.add_row(lp::Sense::Eq, -ref, std::move(row));
                bp.products.push_back({sq, e, e});
            }
    qp::BnbOptions bo;
    bo.feasibility_mode = false;
    bo.target_gap = target_gap;
    bo.node_budget = node_budget;
    return qp::solve_bilinear(bp, bo);
}

}  // namespace netvol::sets
