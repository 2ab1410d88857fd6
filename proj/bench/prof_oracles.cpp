#include <chrono>
#include <cstdio>
#include "netvol/membership.hpp"
#include "netvol/sampler.hpp"
using namespace netvol;
using Clock = std::chrono::steady_clock;
static double secs(Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b-a).count(); }
int main() {
    auto batch = sample_ns_bilocal(40, 1001);
    sets::OracleOptions oo;
    auto t0 = Clock::now();
    long nodes = 0; int in=0, out=0, ind=0;
    for (auto& cv : batch.points) {
        Behavior b = behavior_from_correlators(cv);
        auto v = sets::test_bilocal(b, oo);
        nodes += v.nodes;
        if (v.status == sets::Status::Inside) ++in; else if (v.status == sets::Status::Outside) ++out; else ++ind;
    }
    auto t1 = Clock::now();
    printf("bilocal x40: %.2fs (%.1f ms/pt) nodes=%ld in=%d out=%d ind=%d\n", secs(t0,t1), secs(t0,t1)*25, nodes, in, out, ind);

    auto sp = sample_simplex(ScenarioSpec::evans(), 40, 88);
    t0 = Clock::now();
    nodes = 0; in=out=ind=0;
    for (auto& p : sp.points) {
        auto v = sets::test_evans_nsi(p, oo);
        nodes += v.nodes;
        if (v.status == sets::Status::Inside) ++in; else if (v.status == sets::Status::Outside) ++out; else ++ind;
    }
    t1 = Clock::now();
    printf("evans-nsi x40: %.2fs (%.1f ms/pt) nodes=%ld in=%d out=%d ind=%d\n", secs(t0,t1), secs(t0,t1)*25, nodes, in, out, ind);

    t0 = Clock::now();
    nodes = 0; in=out=ind=0;
    for (auto& p : sp.points) {
        auto v = sets::test_evans_classical(p, oo);
        nodes += v.nodes;
        if (v.status == sets::Status::Inside) ++in; else if (v.status == sets::Status::Outside) ++out; else ++ind;
    }
    t1 = Clock::now();
    printf("evans-cls x40: %.2fs (%.1f ms/pt) nodes=%ld in=%d out=%d ind=%d\n", secs(t0,t1), secs(t0,t1)*25, nodes, in, out, ind);

    t0 = Clock::now();
    for (auto& cv : batch.points) { Behavior b = behavior_from_correlators(cv); sets::test_local(b, oo); }
    t1 = Clock::now();
    printf("local x40: %.3fs (%.2f ms/pt)\n", secs(t0,t1), secs(t0,t1)*25);
    return 0;
}
