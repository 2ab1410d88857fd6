#include "netvol/sampler.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "netvol/membership.hpp"
#include "netvol/parallel.hpp"
#include "netvol/rng.hpp"

namespace netvol {

namespace {

CorrelatorVector draw_correlators(std::uint64_t seed, std::uint64_t attempt) {
    RngStream rng(seed, attempt);
    CorrelatorVector v;
    for (double& c : v.v) c = rng.next_symmetric();
    return v;
}

// Non-negativity of the induced table, evaluated in a fixed scalar order so
// acceptance is bit-reproducible.
bool correlators_valid(const CorrelatorVector& v) {
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) {
            double ac = v.a(x) * v.c(z);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c) {
                        double t = 1.0;
                        t += ((a & 1) ? -1.0 : 1.0) * v.a(x);
                        t += ((b & 1) ? -1.0 : 1.0) * v.b();
                        t += ((c & 1) ? -1.0 : 1.0) * v.c(z);
                        t += (((a + b) & 1) ? -1.0 : 1.0) * v.ab(x);
                        t += (((b + c) & 1) ? -1.0 : 1.0) * v.bc(z);
                        t += (((a + c) & 1) ? -1.0 : 1.0) * ac;
                        t += (((a + b + c) & 1) ? -1.0 : 1.0) * v.abc(x, z);
                        if (t < 0.0) return false;
                    }
        }
    return true;
}

}  // namespace

SampleBatch<CorrelatorVector> sample_ns_bilocal(int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    SampleBatch<CorrelatorVector> batch;
    batch.spec = ScenarioSpec::bilocality();
    batch.seed = seed;
    batch.points.reserve(static_cast<size_t>(count));
    std::uint64_t attempt = 0;
    while (static_cast<int>(batch.points.size()) < count) {
        CorrelatorVector v = draw_correlators(seed, attempt);
        ++attempt;
        if (correlators_valid(v)) batch.points.push_back(v);
    }
    batch.attempts = attempt;
    return batch;
}

std::vector<std::vector<double>> simplex_points(int d, int count, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("simplex dimension must be >= 2");
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k) {
        RngStream rng(seed, static_cast<std::uint64_t>(k));
        std::vector<double> p(static_cast<size_t>(d));
        double sum = 0.0;
        for (double& x : p) {
            x = rng.next_exponential();
            sum += x;
        }
        if (sum < 1e-300) {
            p.assign(static_cast<size_t>(d), 1.0 / d);
        } else {
            for (double& x : p) x /= sum;
        }
        out.push_back(std::move(p));
    }
    return out;
}

SampleBatch<Behavior> sample_simplex(const ScenarioSpec& spec, int count, std::uint64_t seed) {
    spec.validate();
    if (spec.setting_count() != 1)
        throw std::invalid_argument("simplex sampling draws unconditional distributions");
    SampleBatch<Behavior> batch;
    batch.spec = spec;
    batch.seed = seed;
    batch.points.reserve(static_cast<size_t>(count));
    for (auto& p : simplex_points(spec.outcome_count(), count, seed))
        batch.points.emplace_back(spec, std::move(p));
    batch.attempts = static_cast<std::uint64_t>(count);
    return batch;
}

EvansNsiBatch sample_evans_nsi(const ScenarioSpec& spec, int count, std::uint64_t seed,
                               const NsiSamplerOptions& opts) {
    if (spec.network != Network::Evans) throw std::invalid_argument("expected an Evans spec");
    EvansNsiBatch out;
    out.batch.spec = spec;
    out.batch.seed = seed;
    out.batch.points.reserve(static_cast<size_t>(count));

    sets::OracleOptions oo;
    oo.gap = opts.gap;
    oo.node_budget = opts.node_budget;

    const int chunk = std::max(64, 8 * opts.jobs);
    std::uint64_t attempt_base = 0;
    while (static_cast<int>(out.batch.points.size()) < count) {
        // Draw a block of candidates (the simplex stream keyed by attempt
        // index), classify them in parallel, commit in attempt order.
        SampleBatch<Behavior> cands;
        cands.points.reserve(static_cast<size_t>(chunk));
        for (int k = 0; k < chunk; ++k) {
            RngStream rng(seed, attempt_base + static_cast<std::uint64_t>(k));
            std::vector<double> p(static_cast<size_t>(spec.outcome_count()));
            double sum = 0.0;
            for (double& x : p) {
                x = rng.next_exponential();
                sum += x;
            }
            for (double& x : p) x /= sum;
            cands.points.emplace_back(spec, std::move(p));
        }
        std::vector<sets::Status> status(static_cast<size_t>(chunk));
        parallel_for(static_cast<size_t>(chunk), opts.jobs, [&](std::size_t i) {
            status[i] = sets::test_evans_nsi(cands.points[i], oo).status;
        });
        for (int k = 0; k < chunk && static_cast<int>(out.batch.points.size()) < count; ++k) {
            out.batch.attempts = attempt_base + static_cast<std::uint64_t>(k) + 1;
            if (status[static_cast<size_t>(k)] == sets::Status::Inside)
                out.batch.points.push_back(std::move(cands.points[static_cast<size_t>(k)]));
            else if (status[static_cast<size_t>(k)] == sets::Status::Indeterminate)
                out.indeterminate_attempts.push_back(attempt_base + static_cast<std::uint64_t>(k));
        }
        attempt_base += static_cast<std::uint64_t>(chunk);
    }
    return out;
}

HybridDataTable hybrid_from_ns_bilocal(const CorrelatorVector& v) {
    Behavior pb = behavior_from_correlators(v);
    ScenarioSpec es = ScenarioSpec::evans();
    HybridDataTable h;
    h.observational = Behavior{es, std::vector<double>(8, 0.0)};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) h.observational.at(a, b, c) = pb.at(a, b, c, b, b);
    h.do_a.assign(4, 0.0);
    h.do_c.assign(4, 0.0);
    for (int b = 0; b < 2; ++b) {
        for (int a = 0; a < 2; ++a) {
            double s = 0.0;
            for (int bb = 0; bb < 2; ++bb)
                for (int c = 0; c < 2; ++c) s += pb.at(a, bb, c, b, 0);
            h.do_a[static_cast<size_t>(b * 2 + a)] = s;
        }
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) s += pb.at(a, bb, c, 0, b);
            h.do_c[static_cast<size_t>(b * 2 + c)] = s;
        }
    }
    return h;
}

SampleBatch<HybridDataTable> sample_hybrid_tables(int count, std::uint64_t seed) {
    SampleBatch<CorrelatorVector> base = sample_ns_bilocal(count, seed);
    SampleBatch<HybridDataTable> out;
    out.spec = ScenarioSpec::evans();
    out.seed = seed;
    out.attempts = base.attempts;
    out.points.reserve(base.points.size());
    for (const auto& v : base.points) out.points.push_back(hybrid_from_ns_bilocal(v));
    return out;
}

long required_sample_size(int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    long double v = std::pow(2.1L, static_cast<long double>(dimension));
    return static_cast<long>(std::ceil(v));
}

}  // namespace netvol
