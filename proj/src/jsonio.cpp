#include "netvol/jsonio.hpp"

#include <fstream>
#include <stdexcept>

namespace netvol::io {

json to_json(const ScenarioSpec& s) {
    return json{{"network", to_string(s.network)}, {"card_a", s.card_a}, {"card_b", s.card_b},
                {"card_c", s.card_c},              {"card_x", s.card_x}, {"card_z", s.card_z}};
}

ScenarioSpec spec_from_json(const json& j) {
    ScenarioSpec s;
    s.network = network_from_string(j.at("network").get<std::string>());
    s.card_a = j.at("card_a").get<int>();
    s.card_b = j.at("card_b").get<int>();
    s.card_c = j.at("card_c").get<int>();
    s.card_x = j.at("card_x").get<int>();
    s.card_z = j.at("card_z").get<int>();
    s.validate();
    return s;
}

json to_json(const Behavior& b) {
    return json{{"spec", to_json(b.spec)}, {"table", b.table}, {"index_order", "a,b,c,x,z"}};
}

Behavior behavior_from_json(const json& j) {
    ScenarioSpec s = spec_from_json(j.at("spec"));
    if (j.contains("index_order") && j.at("index_order").get<std::string>() != "a,b,c,x,z")
        throw std::domain_error("unsupported behavior index order");
    return Behavior::checked(s, j.at("table").get<std::vector<double>>());
}

json to_json(const CorrelatorVector& v) {
    return json(std::vector<double>(v.v.begin(), v.v.end()));
}

CorrelatorVector correlators_from_json(const json& j) {
    auto arr = j.get<std::vector<double>>();
    if (arr.size() != 13) throw std::domain_error("correlator vector must have 13 entries");
    CorrelatorVector v;
    std::copy(arr.begin(), arr.end(), v.v.begin());
    return v;
}

json to_json(const HybridDataTable& h) {
    return json{{"observational", to_json(h.observational)}, {"do_a", h.do_a}, {"do_c", h.do_c}};
}

HybridDataTable hybrid_from_json(const json& j) {
    HybridDataTable h;
    h.observational = behavior_from_json(j.at("observational"));
    h.do_a = j.at("do_a").get<std::vector<double>>();
    h.do_c = j.at("do_c").get<std::vector<double>>();
    h.validate();
    return h;
}

json verdict_to_json(long point_id, const sets::MembershipVerdict& v) {
    json j{{"point_id", point_id},
           {"set_id", v.set_label.empty() ? to_string(v.set_id) : v.set_label},
           {"status", to_string(v.status)},
           {"margin", v.margin},
           {"solver_gap", v.solver_gap},
           {"nodes", v.nodes},
           {"cert_kind", v.certificate.kind},
           {"cert_verified", v.certificate_verified}};
    if (v.distance) j["distance"] = *v.distance;
    if (v.relaxation_only) j["relaxation_only"] = true;
    if (!v.certificate.values.empty()) j["certificate"] = v.certificate.values;
    return j;
}

VerdictRecord verdict_from_json(const json& j) {
    VerdictRecord r;
    r.point_id = j.at("point_id").get<long>();
    r.set_id = j.at("set_id").get<std::string>();
    std::string st = j.at("status").get<std::string>();
    r.status = st == "inside"    ? sets::Status::Inside
               : st == "outside" ? sets::Status::Outside
                                 : sets::Status::Indeterminate;
    if (j.contains("distance")) r.distance = j.at("distance").get<double>();
    r.margin = j.value("margin", 0.0);
    r.solver_gap = j.value("solver_gap", 0.0);
    r.nodes = j.value("nodes", 0L);
    r.relaxation_only = j.value("relaxation_only", false);
    r.certificate_verified = j.value("cert_verified", true);
    r.cert_kind = j.value("cert_kind", std::string{});
    if (j.contains("certificate")) r.cert_values = j.at("certificate").get<std::vector<double>>();
    return r;
}

std::uint64_t json_hash(const json& j) {
    std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return s;
}

}  // namespace netvol::io
