#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "netvol/membership.hpp"
#include "netvol/sampler.hpp"
#include "netvol/scenario.hpp"
#include "netvol/stats.hpp"

// Serialization: behaviors as {"spec":{...},"table":[...],"index_order":
// "a,b,c,x,z"}, correlator vectors as the fixed 13-element array, batches
// and verdicts as JSON-lines files with a header line.

namespace netvol::io {

using nlohmann::json;

json to_json(const ScenarioSpec& s);
ScenarioSpec spec_from_json(const json& j);

json to_json(const Behavior& b);
Behavior behavior_from_json(const json& j);

json to_json(const CorrelatorVector& v);
CorrelatorVector correlators_from_json(const json& j);

json to_json(const HybridDataTable& h);
HybridDataTable hybrid_from_json(const json& j);

json verdict_to_json(long point_id, const sets::MembershipVerdict& v);

struct VerdictRecord {
    long point_id = 0;
    std::string set_id;
    sets::Status status = sets::Status::Indeterminate;
    std::optional<double> distance;
    double margin = 0.0;
    double solver_gap = 0.0;
    long nodes = 0;
    bool relaxation_only = false;
    bool certificate_verified = true;
    std::string cert_kind;
    std::vector<double> cert_values;
};
VerdictRecord verdict_from_json(const json& j);

template <typename Point>
json batch_header(const SampleBatch<Point>& b, const std::string& kind) {
    return json{{"kind", kind},
                {"spec", to_json(b.spec)},
                {"seed", b.seed},
                {"count", b.points.size()},
                {"attempts", b.attempts},
                {"acceptance_rate", b.acceptance_rate()}};
}

/// FNV-1a over the canonical dump; used as the config hash in reports.
std::uint64_t json_hash(const json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace netvol::io
