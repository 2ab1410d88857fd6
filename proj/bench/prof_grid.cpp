#include <chrono>
#include <cstdio>
#include <array>
#include <vector>
#include <algorithm>
#include <cmath>
#include "netvol/membership.hpp"
#include "netvol/sampler.hpp"
#include "netvol/lp.hpp"
using namespace netvol;
using Clock = std::chrono::steady_clock;

int main() {
    auto batch = sample_ns_bilocal(3, 1001);
    Behavior p = behavior_from_correlators(batch.points[0]);
    const int N = 64;
    lp::SimplexSolver solver;
    auto t0 = Clock::now();
    long cells = 0;
    double best = 1e100;
    for (int k0 = 0; k0 <= N && cells < 3000; ++k0)
    for (int k1 = 0; k0 + k1 <= N && cells < 3000; ++k1)
    for (int k2 = 0; k0 + k1 + k2 <= N && cells < 3000; ++k2) {
        ++cells;
        std::array<double,4> u{k0/double(N), k1/double(N), k2/double(N), (N-k0-k1-k2)/double(N)};
        lp::LinearProgram prog;
        auto q = [&](int lam, int b, int gam) { return (lam*2+b)*4+gam; };
        for (int i = 0; i < 32; ++i) prog.add_var(0.0, 1.0);
        int v0 = prog.num_vars;
        for (int i = 0; i < 4; ++i) prog.add_var(0.0, 1.0);
        int t = prog.add_var(0.0, 2.0, 1.0);
        for (int lam = 0; lam < 4; ++lam) {
            std::vector<std::pair<int,double>> row;
            for (int b = 0; b < 2; ++b) for (int gam = 0; gam < 4; ++gam) row.emplace_back(q(lam,b,gam), 1.0);
            prog.add_row(lp::Sense::Eq, u[lam], std::move(row));
        }
        for (int gam = 0; gam < 4; ++gam) {
            std::vector<std::pair<int,double>> row{{v0+gam,-1.0}};
            for (int b = 0; b < 2; ++b) for (int lam = 0; lam < 4; ++lam) row.emplace_back(q(lam,b,gam), 1.0);
            prog.add_row(lp::Sense::Eq, 0.0, std::move(row));
        }
        { std::vector<std::pair<int,double>> row; for (int g = 0; g < 4; ++g) row.emplace_back(v0+g, 1.0); prog.add_row(lp::Sense::Eq, 1.0, std::move(row)); }
        for (int lam = 0; lam < 4; ++lam) for (int gam = 0; gam < 4; ++gam)
            prog.add_row(lp::Sense::Eq, 0.0, {{q(lam,0,gam),1.0},{q(lam,1,gam),1.0},{v0+gam,-u[lam]}});
        for (int a = 0; a < 2; ++a) for (int b = 0; b < 2; ++b) for (int c = 0; c < 2; ++c)
        for (int x = 0; x < 2; ++x) for (int z = 0; z < 2; ++z) {
            std::vector<std::pair<int,double>> row;
            for (int lam = 0; lam < 4; ++lam) { if (((lam>>x)&1)!=a) continue;
                for (int gam = 0; gam < 4; ++gam) if (((gam>>z)&1)==c) row.emplace_back(q(lam,b,gam),1.0); }
            auto le = row; le.emplace_back(t,-1.0);
            prog.add_row(lp::Sense::Le, p.at(a,b,c,x,z), std::move(le));
            row.emplace_back(t,1.0);
            prog.add_row(lp::Sense::Ge, p.at(a,b,c,x,z), std::move(row));
        }
        try { auto sol = solver.resolve(prog); if (sol.status == lp::LpStatus::Optimal) best = std::min(best, sol.objective); }
        catch (const lp::LpStallError&) {}
    }
    auto t1 = Clock::now();
    double dt = std::chrono::duration<double>(t1-t0).count();
    printf("%ld cells in %.2fs -> %.3f ms/cell; full scan of 47905 would be %.0fs\n",
           cells, dt, dt/cells*1000, dt/cells*47905);
    return 0;
}
