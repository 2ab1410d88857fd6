#include "netvol/presets.hpp"

#include <array>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "netvol/inflation.hpp"
#include "netvol/jsonio.hpp"
#include "netvol/parallel.hpp"
#include "netvol/witnesses.hpp"

namespace netvol::presets {

namespace fs = std::filesystem;

SetSummary summarize(const std::string& set, const std::vector<sets::Status>& statuses,
                     bool count_inside) {
    std::vector<stats::VerdictCount::Kind> kinds;
    kinds.reserve(statuses.size());
    for (auto s : statuses)
        kinds.push_back(s == sets::Status::Inside    ? stats::VerdictCount::Inside
                        : s == sets::Status::Outside ? stats::VerdictCount::Outside
                                                     : stats::VerdictCount::Indeterminate);
    auto e = stats::estimate_volume(kinds, set, count_inside);
    return SetSummary{set,          e.n_total, e.n_inside,    e.n_outside,
                      e.n_indeterminate, e.fraction, e.ci_low, e.ci_high, 0};
}

SetSummary summarize_records(const std::string& set, const std::vector<io::VerdictRecord>& recs,
                             bool count_inside) {
    std::vector<sets::Status> st;
    st.reserve(recs.size());
    long cert_failures = 0;
    for (const auto& r : recs) {
        st.push_back(r.status);
        if (r.status == sets::Status::Outside && !r.certificate_verified) ++cert_failures;
    }
    SetSummary s = summarize(set, st, count_inside);
    s.outside_cert_failures = cert_failures;
    return s;
}

namespace {

void log_msg(const PresetOptions& o, const std::string& msg) {
    if (o.log) o.log(msg);
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

// Loads already-classified (point_id -> record) entries of a verdict file.
std::map<long, io::VerdictRecord> load_existing(const std::string& path) {
    std::map<long, io::VerdictRecord> out;
    std::ifstream f(path);
    if (!f) return out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        try {
            auto rec = io::verdict_from_json(io::json::parse(line));
            out.emplace(rec.point_id, std::move(rec));
        } catch (...) {
            // Corrupt line (e.g. a crash mid-write): recompute that point.
        }
    }
    return out;
}

}  // namespace

// Generic resumable classify loop: runs `classify(i)` for every point not
// already in the verdict file, committing records in point-id order.
std::vector<io::VerdictRecord> classify_points(
    const PresetOptions& opts, const std::string& file_tag, std::size_t n,
    const std::function<sets::MembershipVerdict(std::size_t)>& classify) {
    std::string path =
        opts.out_dir.empty() ? std::string{} : opts.out_dir + "/" + file_tag + ".verdicts.jsonl";
    std::map<long, io::VerdictRecord> existing;
    if (opts.resume && !path.empty()) existing = load_existing(path);

    std::vector<io::VerdictRecord> records(n);
    std::vector<char> have(n, 0);
    for (auto& [id, rec] : existing)
        if (id >= 0 && static_cast<std::size_t>(id) < n) {
            records[static_cast<std::size_t>(id)] = rec;
            have[static_cast<std::size_t>(id)] = 1;
        }

    std::mutex log_mu;
    std::atomic<long> done{0};
    parallel_for(n, opts.jobs, [&](std::size_t i) {
        if (have[i]) return;
        sets::MembershipVerdict v = classify(i);
        io::json j = io::verdict_to_json(static_cast<long>(i), v);
        records[i] = io::verdict_from_json(j);
        long d = ++done;
        if (d % 500 == 0) {
            std::lock_guard<std::mutex> lk(log_mu);
            log_msg(opts, file_tag + ": " + std::to_string(d) + " classified");
        }
    });

    if (!path.empty()) {
        std::ostringstream out;
        for (std::size_t i = 0; i < n; ++i) {
            io::json j{{"point_id", records[i].point_id},
                       {"set_id", records[i].set_id},
                       {"status", sets::to_string(records[i].status)},
                       {"margin", records[i].margin},
                       {"solver_gap", records[i].solver_gap},
                       {"nodes", records[i].nodes},
                       {"cert_kind", records[i].cert_kind},
                       {"cert_verified", records[i].certificate_verified}};
            if (records[i].distance) j["distance"] = *records[i].distance;
            if (records[i].relaxation_only) j["relaxation_only"] = true;
            if (!records[i].cert_values.empty()) j["certificate"] = records[i].cert_values;
            out << j.dump() << "\n";
        }
        io::write_text_file(path, out.str());
    }
    return records;
}

namespace {

std::vector<sets::Status> statuses_of(const std::vector<io::VerdictRecord>& recs) {
    std::vector<sets::Status> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back(r.status);
    return out;
}

void write_report(const PresetOptions& opts, const std::string& name,
                  const std::vector<SetSummary>& rows, const io::json& config) {
    if (opts.out_dir.empty()) return;
    std::ostringstream csv;
    csv << "set,n_total,n_inside,n_outside,n_indeterminate,fraction,ci_low,ci_high\n";
    io::json jrows = io::json::array();
    for (const auto& r : rows) {
        csv << r.set << ',' << r.n << ',' << r.inside << ',' << r.outside << ','
            << r.indeterminate << ',' << r.fraction << ',' << r.ci_low << ',' << r.ci_high
            << "\n";
        jrows.push_back({{"set", r.set},
                         {"n_total", r.n},
                         {"n_inside", r.inside},
                         {"n_outside", r.outside},
                         {"n_indeterminate", r.indeterminate},
                         {"fraction", r.fraction},
                         {"ci_low", r.ci_low},
                         {"ci_high", r.ci_high}});
    }
    io::write_text_file(opts.out_dir + "/" + name + ".report.csv", csv.str());
    io::json rep{{"rows", jrows}, {"config", config}, {"config_hash", io::json_hash(config)}};
    io::write_text_file(opts.out_dir + "/" + name + ".report.json", rep.dump(2));
    io::write_text_file(opts.out_dir + "/run_config.json", config.dump(2));
}

io::json config_json(const PresetOptions& o, const std::string& preset, long count) {
    return io::json{{"preset", preset},     {"seed", o.seed},
                    {"count", count},       {"qp_gap", o.qp_gap},
                    {"node_budget", o.node_budget}, {"jobs", o.jobs}};
}

void write_histogram_csv(const std::string& path, const stats::DistanceHistogram& h) {
    std::ostringstream out;
    out << "bin_low,bin_high,count\n";
    for (size_t b = 0; b < h.counts.size(); ++b)
        out << h.bin_edges[b] << ',' << h.bin_edges[b + 1] << ',' << h.counts[b] << "\n";
    io::write_text_file(path, out.str());
}

}  // namespace

Table1Summary run_table1(const PresetOptions& opts) {
    const long n_local = opts.count_override > 0 ? opts.count_override : 20000;
    const long n_bilocal = opts.count_override > 0 ? std::min<long>(opts.count_override, 10000) : 10000;
    const long n_inflation = opts.count_override > 0 ? std::min<long>(opts.count_override, 5000) : 5000;
    ensure_dir(opts.out_dir);

    log_msg(opts, "sampling " + std::to_string(n_local) + " N(B) points");
    auto batch = sample_ns_bilocal(static_cast<int>(n_local), opts.seed);
    Table1Summary out;
    out.ns_acceptance_rate = batch.acceptance_rate();

    if (!opts.out_dir.empty()) {
        std::ostringstream f;
        f << io::batch_header(batch, "ns-bilocal").dump() << "\n";
        for (size_t i = 0; i < batch.points.size(); ++i)
            f << io::json{{"point_id", i}, {"correlators", io::to_json(batch.points[i])}}.dump()
              << "\n";
        io::write_text_file(opts.out_dir + "/table1.batch.jsonl", f.str());
    }

    std::vector<Behavior> behaviors(batch.points.size());
    for (size_t i = 0; i < batch.points.size(); ++i)
        behaviors[i] = behavior_from_correlators(batch.points[i]);

    // Local test on the full batch.
    auto local_recs = classify_points(opts, "table1.local", static_cast<size_t>(n_local),
                                         [&](std::size_t i) {
                                             sets::OracleOptions oo;
                                             return sets::test_local(behaviors[i], oo);
                                         });
    out.local = summarize_records("local3", local_recs);

    // Bilocal QP with distances on the first n_bilocal points.
    auto bilocal_recs = classify_points(
        opts, "table1.bilocal", static_cast<size_t>(n_bilocal), [&](std::size_t i) {
            sets::OracleOptions oo;
            oo.gap = opts.qp_gap;
            oo.node_budget = opts.node_budget;
            oo.compute_distance = true;
            return sets::test_bilocal(behaviors[i], oo);
        });
    out.bilocal = summarize_records("bilocal", bilocal_recs);
    for (const auto& r : bilocal_recs) {
        out.bilocal_nodes_total += r.nodes;
        if (r.status == sets::Status::Outside && r.distance)
            out.nonbilocal_distances.push_back(*r.distance);
    }

    // Inflation orders 1 and 2 on the first n_inflation points.
    for (int order = 1; order <= 2; ++order) {
        std::vector<inflate::InflationOracle> oracles;
        for (int w = 0; w < std::max(1, opts.jobs); ++w)
            oracles.emplace_back(inflate::InflationSpec{Network::Bilocality, order},
                                 ScenarioSpec::bilocality());
        std::atomic<int> next_worker{0};
        // Round-robin oracle assignment; classify is not reentrant per oracle.
        std::mutex assign_mu;
        std::map<std::thread::id, int> assignment;
        auto recs = classify_points(
            opts, "table1.inflation" + std::to_string(order), static_cast<size_t>(n_inflation),
            [&](std::size_t i) {
                int w;
                {
                    std::lock_guard<std::mutex> lk(assign_mu);
                    auto it = assignment.find(std::this_thread::get_id());
                    if (it == assignment.end())
                        it = assignment.emplace(std::this_thread::get_id(),
                                                next_worker++ % static_cast<int>(oracles.size()))
                                 .first;
                    w = it->second;
                }
                return oracles[static_cast<size_t>(w)].classify(behaviors[i]);
            });
        auto sum = summarize_records("inflation-bilocality-" + std::to_string(order), recs);
        if (order == 1)
            out.inflation1 = sum;
        else
            out.inflation2 = sum;
        // Soundness: inflation may never reject a point the exact oracle
        // accepts.
        for (size_t i = 0; i < recs.size(); ++i)
            if (i < bilocal_recs.size() && recs[i].status == sets::Status::Outside &&
                bilocal_recs[i].status == sets::Status::Inside)
                ++out.inflation_soundness_violations;
    }

    if (!opts.out_dir.empty()) {
        write_report(opts, "table1",
                     {out.local, out.bilocal, out.inflation1, out.inflation2},
                     config_json(opts, "table1", n_local));
        if (!out.nonbilocal_distances.empty())
            write_histogram_csv(opts.out_dir + "/table1.nonbilocal_distances.csv",
                                stats::distance_histogram(out.nonbilocal_distances, 10));
    }
    return out;
}

Table3aSummary run_table3a(const PresetOptions& opts) {
    const long n = opts.count_override > 0 ? opts.count_override : 100000;
    ensure_dir(opts.out_dir);
    auto batch = sample_simplex(ScenarioSpec::triangle(), static_cast<int>(n), opts.seed);
    std::vector<sets::Status> cov(batch.points.size()), fin(batch.points.size()),
        ent(batch.points.size());
    parallel_for(batch.points.size(), opts.jobs, [&](std::size_t i) {
        cov[i] = witness::covariance_check(batch.points[i]).violated ? sets::Status::Outside
                                                                     : sets::Status::Inside;
        fin[i] = witness::finner_check(batch.points[i]).violated ? sets::Status::Outside
                                                                 : sets::Status::Inside;
        ent[i] = witness::entropic_check(batch.points[i]).violated ? sets::Status::Outside
                                                                   : sets::Status::Inside;
    });
    Table3aSummary out;
    out.covariance = summarize("covariance", cov);
    out.finner = summarize("finner", fin);
    out.entropic = summarize("entropic", ent);
    write_report(opts, "table3a", {out.covariance, out.finner, out.entropic},
                 config_json(opts, "table3a", n));
    return out;
}

Table3bSummary run_table3b_order2(const PresetOptions& opts) {
    const long n = opts.count_override > 0 ? opts.count_override : 5000;
    ensure_dir(opts.out_dir);
    auto batch = sample_simplex(ScenarioSpec::triangle(), static_cast<int>(n), opts.seed);
    std::vector<inflate::InflationOracle> oracles;
    for (int w = 0; w < std::max(1, opts.jobs); ++w)
        oracles.emplace_back(inflate::InflationSpec{Network::Triangle, 2},
                             ScenarioSpec::triangle());
    std::atomic<int> next_worker{0};
    std::mutex assign_mu;
    std::map<std::thread::id, int> assignment;
    auto recs = classify_points(opts, "table3b.inflation2", batch.points.size(),
                                   [&](std::size_t i) {
                                       int w;
                                       {
                                           std::lock_guard<std::mutex> lk(assign_mu);
                                           auto it = assignment.find(std::this_thread::get_id());
                                           if (it == assignment.end())
                                               it = assignment
                                                        .emplace(std::this_thread::get_id(),
                                                                 next_worker++ %
                                                                     static_cast<int>(oracles.size()))
                                                        .first;
                                           w = it->second;
                                       }
                                       return oracles[static_cast<size_t>(w)].classify(
                                           batch.points[i]);
                                   });
    Table3bSummary out;
    out.inflation2 = summarize_records("inflation-triangle-2", recs);
    write_report(opts, "table3b", {out.inflation2}, config_json(opts, "table3b-order2", n));
    return out;
}

Table4Summary run_table4(const PresetOptions& opts) {
    const long n = opts.count_override > 0 ? opts.count_override : 10000;
    ensure_dir(opts.out_dir);
    Table4Summary out;
    const std::vector<std::array<int, 3>> cards{{2, 2, 2}, {2, 3, 2}, {3, 2, 3}};
    for (const auto& c : cards) {
        ScenarioSpec spec = ScenarioSpec::evans(c[0], c[1], c[2]);
        auto batch = sample_simplex(spec, static_cast<int>(n), opts.seed);
        std::string tag = "table4." + std::to_string(c[0]) + std::to_string(c[1]) +
                          std::to_string(c[2]);
        auto recs = classify_points(opts, tag, batch.points.size(), [&](std::size_t i) {
            sets::OracleOptions oo;
            oo.gap = opts.qp_gap;
            oo.node_budget = opts.node_budget;
            return sets::test_evans_nsi(batch.points[i], oo);
        });
        out.rows.push_back(summarize_records("evans-nsi-" + std::to_string(c[0]) +
                                                 std::to_string(c[1]) + std::to_string(c[2]),
                                             recs, /*count_inside=*/true));
        log_msg(opts, tag + " acceptance " + std::to_string(out.rows.back().fraction));
    }
    write_report(opts, "table4", out.rows, config_json(opts, "table4", n));
    return out;
}

EvansGapSummary run_evans_gap(const PresetOptions& opts) {
    const long n = opts.count_override > 0 ? opts.count_override : 50000;
    ensure_dir(opts.out_dir);
    NsiSamplerOptions so;
    so.gap = opts.qp_gap;
    so.node_budget = opts.node_budget;
    so.jobs = opts.jobs;
    log_msg(opts, "sampling " + std::to_string(n) + " Evans NSI points");
    auto nsib = sample_evans_nsi(ScenarioSpec::evans(), static_cast<int>(n), opts.seed, so);
    EvansGapSummary out;
    out.nsi_tested = static_cast<long>(nsib.batch.attempts);
    auto recs = classify_points(opts, "evans-gap.classical", nsib.batch.points.size(),
                                   [&](std::size_t i) {
                                       sets::OracleOptions oo;
                                       oo.gap = opts.qp_gap;
                                       oo.node_budget = opts.node_budget;
                                       return sets::test_evans_classical(nsib.batch.points[i], oo);
                                   });
    out.classical = summarize_records("evans-classical", recs);
    write_report(opts, "evans-gap", {out.classical}, config_json(opts, "evans-gap", n));
    return out;
}

InterventionSummary run_evans_interventions(const PresetOptions& opts) {
    const long n = opts.count_override > 0 ? opts.count_override : 5000;
    ensure_dir(opts.out_dir);
    auto batch = sample_hybrid_tables(static_cast<int>(n), opts.seed);
    auto recs = classify_points(opts, "evans-do", batch.points.size(), [&](std::size_t i) {
        sets::OracleOptions oo;
        oo.gap = opts.qp_gap;
        oo.node_budget = opts.node_budget;
        return sets::test_evans_interventional(batch.points[i], oo);
    });
    InterventionSummary out;
    out.with_do = summarize_records("evans-classical-do", recs);
    write_report(opts, "evans-interventions", {out.with_do},
                 config_json(opts, "evans-interventions", n));
    return out;
}

PnsSummary run_pns_witness(const PresetOptions& opts) {
    ensure_dir(opts.out_dir);
    const Behavior& pns = sets::pns_distribution();
    sets::OracleOptions oo;
    oo.gap = opts.qp_gap;
    oo.node_budget = opts.node_budget;
    PnsSummary out;
    out.nsi_status = sets::test_evans_nsi(pns, oo).status;
    out.classical_status = sets::test_evans_classical(pns, oo).status;
    log_msg(opts, "minimizing the witness over the classical set");
    auto sol = sets::minimize_witness_over_classical(1e-4, opts.node_budget);
    out.witness_lower = sol.lower_bound;
    out.witness_upper = sol.upper_bound;
    out.witness_gap = sol.gap;
    out.witness_nodes = sol.nodes_explored;
    if (!opts.out_dir.empty()) {
        io::json j{{"nsi_status", to_string(out.nsi_status)},
                   {"classical_status", to_string(out.classical_status)},
                   {"witness_lower", out.witness_lower},
                   {"witness_upper", out.witness_upper},
                   {"witness_gap", out.witness_gap},
                   {"witness_nodes", out.witness_nodes}};
        io::write_text_file(opts.out_dir + "/pns-witness.report.json", j.dump(2));
    }
    return out;
}

}  // namespace netvol::presets
