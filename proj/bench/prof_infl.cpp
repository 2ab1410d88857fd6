#include <chrono>
#include <cstdio>
#include "netvol/inflation.hpp"
#include "netvol/membership.hpp"
#include "netvol/sampler.hpp"
using namespace netvol;
using Clock = std::chrono::steady_clock;
static double secs(Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b-a).count(); }
int main() {
    auto batch = sample_ns_bilocal(60, 555);
    {
        inflate::InflationOracle o(inflate::InflationSpec{Network::Bilocality, 2}, ScenarioSpec::bilocality());
        printf("biloc-2: orbits=%d rows=%d\n", o.orbit_count(), o.row_count());
        auto t0 = Clock::now();
        int out = 0;
        for (auto& cv : batch.points) {
            Behavior b = behavior_from_correlators(cv);
            if (o.classify(b).status == sets::Status::Outside) ++out;
        }
        auto t1 = Clock::now();
        printf("biloc-2 x60: %.2fs (%.0f ms/pt) out=%d\n", secs(t0,t1), secs(t0,t1)/60*1000, out);
    }
    {
        auto tri = sample_simplex(ScenarioSpec::triangle(), 100, 556);
        inflate::InflationOracle o(inflate::InflationSpec{Network::Triangle, 2}, ScenarioSpec::triangle());
        printf("tri-2: orbits=%d rows=%d\n", o.orbit_count(), o.row_count());
        auto t0 = Clock::now();
        int out = 0;
        for (auto& p : tri.points) if (o.classify(p).status == sets::Status::Outside) ++out;
        auto t1 = Clock::now();
        printf("tri-2 x100: %.2fs (%.1f ms/pt) out=%d\n", secs(t0,t1), secs(t0,t1)*10, out);
    }
    {
        sets::OracleOptions oo;
        oo.compute_distance = true;
        auto t0 = Clock::now();
        int out = 0; double dsum = 0; long nodes = 0;
        for (int i = 0; i < 30; ++i) {
            Behavior b = behavior_from_correlators(batch.points[i]);
            auto v = sets::test_bilocal(b, oo);
            nodes += v.nodes;
            if (v.status == sets::Status::Outside) { ++out; dsum += *v.distance; }
        }
        auto t1 = Clock::now();
        printf("biloc+dist x30: %.2fs (%.0f ms/pt) out=%d nodes=%ld avg_dist=%.4f\n",
               secs(t0,t1), secs(t0,t1)/30*1000, out, nodes, out ? dsum/out : 0.0);
    }
    return 0;
}
