#pragma once

// Shared between the qp unit tests and the acceptance suite: a family of
// random 4-variable bilinear feasibility instances and a dense (u,v) grid
// oracle at resolution 1e-3 that decides them independently of the solver.

#include <cmath>
#include <vector>

#include "netvol/bilinear.hpp"
#include "netvol/rng.hpp"

namespace netvol::gridtest {

struct GridInstance {
    double ulo, uhi, vlo, vhi, slo, shi;
    struct IneqRow {
        double cu, cv, cw, cs, rhs;  // cu*u+cv*v+cw*w+cs*s <= rhs
    };
    std::vector<IneqRow> rows;
};

inline GridInstance random_instance(std::uint64_t stream) {
    RngStream rng(31337, stream);
    GridInstance g;
    g.ulo = -1.0 + rng.next_unit();
    g.uhi = g.ulo + 0.4 + rng.next_unit();
    g.vlo = -1.0 + rng.next_unit();
    g.vhi = g.vlo + 0.4 + rng.next_unit();
    g.slo = 0.0;
    g.shi = 1.0;
    int m = 2 + static_cast<int>(rng.next_u64() % 3);
    for (int i = 0; i < m; ++i) {
        GridInstance::IneqRow r;
        r.cu = std::round(4.0 * rng.next_symmetric()) / 2.0;
        r.cv = std::round(4.0 * rng.next_symmetric()) / 2.0;
        r.cw = std::round(4.0 * rng.next_symmetric()) / 2.0;
        r.cs = std::round(2.0 * rng.next_symmetric()) / 2.0;
        r.rhs = 0.6 * rng.next_symmetric();
        g.rows.push_back(r);
    }
    return g;
}

inline qp::BilinearProgram to_program(const GridInstance& g) {
    qp::BilinearProgram bp;
    int u = bp.base.add_var(g.ulo, g.uhi);
    int v = bp.base.add_var(g.vlo, g.vhi);
    double wl = std::min(std::min(g.ulo * g.vlo, g.ulo * g.vhi), std::min(g.uhi * g.vlo, g.uhi * g.vhi));
    double wh = std::max(std::max(g.ulo * g.vlo, g.ulo * g.vhi), std::max(g.uhi * g.vlo, g.uhi * g.vhi));
    int w = bp.base.add_var(wl, wh);
    int s = bp.base.add_var(g.slo, g.shi);
    int t = bp.base.add_var(0.0, 16.0, 1.0);
    for (const auto& r : g.rows)
        bp.base.add_row(lp::Sense::Le, r.rhs, {{u, r.cu}, {v, r.cv}, {w, r.cw}, {s, r.cs}, {t, -1.0}});
    bp.products.push_back({w, u, v});
    return bp;
}

inline double grid_min_slack(const GridInstance& g) {
    const double step = 1e-3;
    double best = 1e100;
    for (double u = g.ulo; u <= g.uhi + 1e-12; u += step) {
        for (double v = g.vlo; v <= g.vhi + 1e-12; v += step) {
            double w = u * v;
            double local = 1e100;
            for (int k = 0; k <= 20; ++k) {
                double s = g.slo + (g.shi - g.slo) * k / 20.0;
                double viol = 0.0;
                for (const auto& r : g.rows)
                    viol = std::max(viol, r.cu * u + r.cv * v + r.cw * w + r.cs * s - r.rhs);
                local = std::min(local, viol);
            }
            best = std::min(best, local);
            if (best <= 0.0) return best;
        }
    }
    return best;
}

}  // namespace netvol::gridtest
