#pragma once

#include <cstdint>
#include <vector>

#include "netvol/scenario.hpp"

// Uniform generation of candidate points in each scenario's ambient set.
// Every sampler is deterministic in (seed, spec, count): point draws are
// keyed by attempt index, so batches are identical no matter how many
// workers produced them. The acceptance rate of a rejection sampler is
// recorded in the batch; it is itself a volume estimate.

namespace netvol {

template <typename Point>
struct SampleBatch {
    ScenarioSpec spec;
    std::uint64_t seed = 0;
    std::vector<Point> points;
    std::uint64_t attempts = 0;  // raw draws before rejection filtering

    double acceptance_rate() const {
        return attempts == 0 ? 0.0 : static_cast<double>(points.size()) / attempts;
    }
};

/// Uniform points of [-1,1]^13 kept iff all 32 entries of the induced
/// behavior are non-negative, i.e. uniform points of N(B).
SampleBatch<CorrelatorVector> sample_ns_bilocal(int count, std::uint64_t seed);

/// Uniform points of the (d-1)-simplex over the scenario's joint outcomes,
/// by normalized i.i.d. standard exponentials. No rejection.
SampleBatch<Behavior> sample_simplex(const ScenarioSpec& spec, int count, std::uint64_t seed);

/// The same construction over a bare d-outcome simplex.
std::vector<std::vector<double>> simplex_points(int d, int count, std::uint64_t seed);

struct NsiSamplerOptions {
    double gap = 1e-6;
    long node_budget = 1'000'000;
    int jobs = 1;
};

/// Simplex samples filtered by the Evans NSI oracle; uniform on N(E).
/// Indeterminate oracle outcomes are recorded as skipped attempts in
/// `diagnostics` (never silently counted either way).
struct EvansNsiBatch {
    SampleBatch<Behavior> batch;
    std::vector<std::uint64_t> indeterminate_attempts;
};
EvansNsiBatch sample_evans_nsi(const ScenarioSpec& spec, int count, std::uint64_t seed,
                               const NsiSamplerOptions& opts = {});

/// Maps accepted N(B) points to hybrid data tables via the interruption
/// identification p(a,b,c)=pB(a,b,c|x=z=b), p(a|do(b))=pB(a|x=b),
/// p(c|do(b))=pB(c|z=b).
SampleBatch<HybridDataTable> sample_hybrid_tables(int count, std::uint64_t seed);

HybridDataTable hybrid_from_ns_bilocal(const CorrelatorVector& v);

/// ceil(2.1^d): how many uniform hypercube points are needed before volume
/// fractions in dimension d become meaningful.
long required_sample_size(int dimension);

}  // namespace netvol
