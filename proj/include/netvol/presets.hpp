#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netvol/jsonio.hpp"
#include "netvol/membership.hpp"
#include "netvol/sampler.hpp"
#include "netvol/stats.hpp"

// Reproduction presets: each runs one of the paper-scale experiments end to
// end (sample, classify, summarize) with pinned seeds and counts, writing
// batch/verdict/report files when given an output directory. The
// acceptance suite asserts on the returned summaries; `netvol repro` calls
// the same runners.

namespace netvol::presets {

struct PresetOptions {
    std::string out_dir;  // empty = keep everything in memory
    int jobs = 1;
    std::uint64_t seed = 20240808;
    double qp_gap = 1e-6;
    long node_budget = 1'000'000;
    bool resume = false;
    long count_override = 0;  // 0 = the spec-pinned count
    std::function<void(const std::string&)> log;
};

struct SetSummary {
    std::string set;
    long n = 0, inside = 0, outside = 0, indeterminate = 0;
    double fraction = 0.0, ci_low = 0.0, ci_high = 0.0;
    long outside_cert_failures = 0;  // Outside verdicts whose certificate failed re-verification
};

SetSummary summarize_records(const std::string& set, const std::vector<io::VerdictRecord>& recs,
                             bool count_inside = false);

SetSummary summarize(const std::string& set, const std::vector<sets::Status>& statuses,
                     bool count_inside = false);

// Resumable parallel classification: runs classify(i) for each point not
// already present in <out_dir>/<file_tag>.verdicts.jsonl, writes records in
// point-id order, and returns them all.
std::vector<io::VerdictRecord> classify_points(
    const PresetOptions& opts, const std::string& file_tag, std::size_t n,
    const std::function<sets::MembershipVerdict(std::size_t)>& classify);

// Table I: non-local (n=2e4), non-bilocal (n=1e4, distances for the
// concentration histogram), inflation orders 1 and 2 (n=5e3, prefix of the
// same point stream, soundness-checked against the exact bilocal verdicts).
struct Table1Summary {
    SetSummary local, bilocal, inflation1, inflation2;
    std::vector<double> nonbilocal_distances;
    long inflation_soundness_violations = 0;
    double ns_acceptance_rate = 0.0;
    long bilocal_nodes_total = 0;
};
Table1Summary run_table1(const PresetOptions& opts);

// Table III(a): triangle witnesses over n>=1e5 simplex samples.
struct Table3aSummary {
    SetSummary covariance, finner, entropic;
};
Table3aSummary run_table3a(const PresetOptions& opts);

// Table III(b), order-2 row: triangle inflation over n=5e3 simplex samples.
struct Table3bSummary {
    SetSummary inflation2;
};
Table3bSummary run_table3b_order2(const PresetOptions& opts);

// Table IV: Evans NSI acceptance fractions for (2,2,2), (2,3,2), (3,2,3).
struct Table4Summary {
    std::vector<SetSummary> rows;  // inside-fractions
};
Table4Summary run_table4(const PresetOptions& opts);

// Evans classical gap: fraction of NSI points outside the classical set.
struct EvansGapSummary {
    SetSummary classical;
    long nsi_tested = 0;
};
EvansGapSummary run_evans_gap(const PresetOptions& opts);

// Interventional volume: hybrid tables outside the classical-with-do set.
struct InterventionSummary {
    SetSummary with_do;
};
InterventionSummary run_evans_interventions(const PresetOptions& opts);

// P_NS pipeline: NSI-inside, classically-outside, witness minimum bound.
struct PnsSummary {
    sets::Status nsi_status = sets::Status::Indeterminate;
    sets::Status classical_status = sets::Status::Indeterminate;
    double witness_lower = 0.0, witness_upper = 0.0, witness_gap = 0.0;
    long witness_nodes = 0;
};
PnsSummary run_pns_witness(const PresetOptions& opts);

}  // namespace netvol::presets
