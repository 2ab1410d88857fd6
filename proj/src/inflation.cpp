#include "netvol/inflation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace netvol::inflate {

namespace {

struct OrigParty {
    std::vector<int> reads;  // source ids
    int card = 2;
    int setcard = 1;
};

struct NetworkDef {
    int n_sources = 0;
    std::vector<OrigParty> parties;  // A, B, C
};

NetworkDef network_def(Network n, const ScenarioSpec& sc) {
    NetworkDef d;
    if (n == Network::Bilocality) {
        d.n_sources = 2;
        d.parties = {{{0}, sc.card_a, sc.card_x}, {{0, 1}, sc.card_b, 1}, {{1}, sc.card_c, sc.card_z}};
    } else if (n == Network::Triangle) {
        // A reads (Lambda, Mu), B reads (Lambda, Gamma), C reads (Gamma, Mu).
        d.n_sources = 3;
        d.parties = {{{0, 2}, sc.card_a, 1}, {{0, 1}, sc.card_b, 1}, {{1, 2}, sc.card_c, 1}};
    } else {
        throw std::invalid_argument("inflation supports bilocality and triangle networks");
    }
    return d;
}

int ipow(int b, int e) {
    int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

void InflationSpec::validate(const ScenarioSpec& scenario) const {
    if (order < 1 || order > 2) throw std::invalid_argument("inflation order must be 1 or 2");
    NetworkDef def = network_def(network, scenario);
    long joint = 1;
    for (const auto& p : def.parties) {
        int copies = ipow(order, static_cast<int>(p.reads.size()));
        for (int k = 0; k < copies * p.setcard; ++k) {
            joint *= p.card;
            if (joint > (1L << 16)) throw std::invalid_argument("inflated outcome space exceeds 2^16");
        }
    }
}

// ------------------------------------------------------------------------

class InflationStructure {
  public:
    InflationSpec spec;
    ScenarioSpec scenario;
    NetworkDef def;

    std::vector<InflatedParty> parties;
    // Slot layout: per inflated party, `setcard` consecutive slots, each of
    // cardinality card(orig). Little-endian mixed radix.
    std::vector<int> slot_party;   // slot -> inflated party
    std::vector<int> slot_setting; // slot -> setting value
    std::vector<int> slot_card;
    std::vector<long> slot_stride;
    long joint = 1;

    // Symmetry quotient.
    std::vector<int> orbit_of;     // joint index -> orbit id
    std::vector<long> orbit_rep;   // orbit id -> representative index
    int n_orbits = 0;

    // Injectable sets and maximal families.
    struct Injectable {
        std::vector<int> members;  // inflated party ids, ascending
        unsigned footprint = 0;    // bit (source*order + copy)
        unsigned orig_mask = 0;    // bit per original party
    };
    std::vector<Injectable> injectables;
    std::vector<std::vector<int>> maximal_families;  // indices into injectables

    // Quotient rows: fixed terms, rhs descriptors re-evaluated per point.
    struct MarginalKey {
        unsigned mask = 0;  // original parties present
        int x = 0, z = 0;   // settings (0 when the party is absent)
        auto operator<=>(const MarginalKey&) const = default;
    };
    struct RhsFactor {
        int key_id = 0;  // into marginal_keys
        int outcome = 0; // row-major index over present parties (A,B,C order)
    };
    struct QuotientRow {
        std::vector<std::pair<int, double>> terms;  // (orbit, coeff)
        std::vector<RhsFactor> rhs;                 // product of marginals
        double constant = -1.0;                     // used instead when >= 0
    };
    std::vector<MarginalKey> marginal_keys;
    std::vector<QuotientRow> rows;

    explicit InflationStructure(const InflationSpec& sp, const ScenarioSpec& sc)
        : spec(sp), scenario(sc), def(network_def(sp.network, sc)) {
        sp.validate(sc);
        build_layout();
        build_orbits();
        enumerate_injectables();
        enumerate_families();
        build_rows();
    }

    // ---- layout ----------------------------------------------------------

    void build_layout() {
        const int n = spec.order;
        for (int o = 0; o < 3; ++o) {
            const auto& op = def.parties[static_cast<size_t>(o)];
            int k = static_cast<int>(op.reads.size());
            for (int tup = 0; tup < ipow(n, k); ++tup) {
                InflatedParty p;
                p.orig = o;
                int t = tup;
                for (int s = 0; s < k; ++s) {
                    p.copies.push_back(t % n + 1);
                    t /= n;
                }
                p.label = std::string(1, static_cast<char>('A' + o));
                for (int c : p.copies) p.label += static_cast<char>('0' + c);
                parties.push_back(std::move(p));
            }
        }
        for (size_t pi = 0; pi < parties.size(); ++pi) {
            const auto& op = def.parties[static_cast<size_t>(parties[pi].orig)];
            for (int s = 0; s < op.setcard; ++s) {
                slot_party.push_back(static_cast<int>(pi));
                slot_setting.push_back(s);
                slot_card.push_back(op.card);
            }
        }
        slot_stride.resize(slot_card.size());
        for (size_t k = 0; k < slot_card.size(); ++k) {
            slot_stride[k] = joint;
            joint *= slot_card[k];
        }
    }

    int slot_of(int party, int setting) const {
        // Slots are laid out by party blocks in order.
        int s = 0;
        for (size_t k = 0; k < slot_party.size(); ++k)
            if (slot_party[k] == party && slot_setting[k] == setting) {
                s = static_cast<int>(k);
                return s;
            }
        throw std::logic_error("slot lookup failed");
    }

    // ---- symmetry orbits ---------------------------------------------------

    // Group element = copy permutation per source; only transpositions are
    // needed at order 2 (they generate the group).
    std::vector<long> generator_perm(int source) const {
        std::vector<int> party_image(parties.size());
        for (size_t pi = 0; pi < parties.size(); ++pi) {
            InflatedParty p = parties[pi];
            const auto& op = def.parties[static_cast<size_t>(p.orig)];
            for (size_t r = 0; r < op.reads.size(); ++r)
                if (op.reads[r] == source) p.copies[r] = p.copies[r] == 1 ? 2 : 1;
            // find the image party
            int img = -1;
            for (size_t qi = 0; qi < parties.size(); ++qi)
                if (parties[qi].orig == p.orig && parties[qi].copies == p.copies) {
                    img = static_cast<int>(qi);
                    break;
                }
            party_image[pi] = img;
        }
        std::vector<int> slot_image(slot_party.size());
        for (size_t k = 0; k < slot_party.size(); ++k) {
            int img_party = party_image[static_cast<size_t>(slot_party[k])];
            slot_image[k] = slot_of(img_party, slot_setting[k]);
        }
        std::vector<long> perm(static_cast<size_t>(joint));
        std::vector<int> digits(slot_card.size());
        for (long idx = 0; idx < joint; ++idx) {
            long t = idx;
            for (size_t k = 0; k < slot_card.size(); ++k) {
                digits[k] = static_cast<int>(t % slot_card[k]);
                t /= slot_card[k];
            }
            long out = 0;
            for (size_t k = 0; k < slot_card.size(); ++k)
                out += static_cast<long>(digits[k]) * slot_stride[static_cast<size_t>(slot_image[k])];
            perm[static_cast<size_t>(idx)] = out;
        }
        return perm;
    }

    void build_orbits() {
        std::vector<int> parent(static_cast<size_t>(joint));
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int a) {
            while (parent[static_cast<size_t>(a)] != a) {
                parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
                a = parent[static_cast<size_t>(a)];
            }
            return a;
        };
        if (spec.order == 2) {
            for (int s = 0; s < def.n_sources; ++s) {
                auto perm = generator_perm(s);
                for (long i = 0; i < joint; ++i) {
                    int a = find(static_cast<int>(i)), b = find(static_cast<int>(perm[static_cast<size_t>(i)]));
                    if (a != b) parent[static_cast<size_t>(a)] = b;
                }
            }
        }
        orbit_of.assign(static_cast<size_t>(joint), -1);
        for (long i = 0; i < joint; ++i) {
            int r = find(static_cast<int>(i));
            if (orbit_of[static_cast<size_t>(r)] < 0) {
                orbit_of[static_cast<size_t>(r)] = n_orbits++;
                orbit_rep.push_back(r);
            }
            orbit_of[static_cast<size_t>(i)] = orbit_of[static_cast<size_t>(r)];
        }
    }

    // ---- injectable sets and families --------------------------------------

    void enumerate_injectables() {
        const int np = static_cast<int>(parties.size());
        for (unsigned sub = 1; sub < (1u << np); ++sub) {
            unsigned orig_mask = 0;
            bool ok = true;
            std::vector<int> chosen(static_cast<size_t>(def.n_sources), 0);
            std::vector<int> members;
            for (int pi = 0; pi < np && ok; ++pi) {
                if (!(sub >> pi & 1u)) continue;
                const auto& p = parties[static_cast<size_t>(pi)];
                unsigned ob = 1u << p.orig;
                if (orig_mask & ob) ok = false;  // two copies of one party
                orig_mask |= ob;
                const auto& op = def.parties[static_cast<size_t>(p.orig)];
                for (size_t r = 0; r < op.reads.size() && ok; ++r) {
                    int s = op.reads[r];
                    if (chosen[static_cast<size_t>(s)] == 0)
                        chosen[static_cast<size_t>(s)] = p.copies[r];
                    else if (chosen[static_cast<size_t>(s)] != p.copies[r])
                        ok = false;  // two copies of one source inside a set
                }
                members.push_back(pi);
            }
            if (!ok) continue;
            Injectable inj;
            inj.members = std::move(members);
            inj.orig_mask = orig_mask;
            for (int pi : inj.members) {
                const auto& p = parties[static_cast<size_t>(pi)];
                const auto& op = def.parties[static_cast<size_t>(p.orig)];
                for (size_t r = 0; r < op.reads.size(); ++r)
                    inj.footprint |= 1u << (op.reads[r] * spec.order + (p.copies[r] - 1));
            }
            injectables.push_back(std::move(inj));
        }
    }

    // F is implied by G when an injection maps every member of F into a
    // distinct member of G as a subset; such rows are marginals of G's rows.
    bool implied_by(const std::vector<int>& f, const std::vector<int>& g) const {
        if (f == g) return false;
        std::vector<int> assign(f.size(), -1);
        std::vector<bool> used(g.size(), false);
        std::function<bool(size_t)> rec = [&](size_t i) {
            if (i == f.size()) return true;
            const auto& fm = injectables[static_cast<size_t>(f[i])].members;
            for (size_t j = 0; j < g.size(); ++j) {
                if (used[j]) continue;
                const auto& gm = injectables[static_cast<size_t>(g[j])].members;
                if (std::includes(gm.begin(), gm.end(), fm.begin(), fm.end())) {
                    used[j] = true;
                    if (rec(i + 1)) return true;
                    used[j] = false;
                }
            }
            return false;
        };
        return rec(0);
    }

    void enumerate_families() {
        // All collections of pairwise footprint-disjoint injectable sets.
        std::vector<std::vector<int>> families;
        std::vector<int> cur;
        std::function<void(size_t, unsigned)> rec = [&](size_t start, unsigned fp) {
            if (!cur.empty()) families.push_back(cur);
            for (size_t i = start; i < injectables.size(); ++i) {
                if (injectables[i].footprint & fp) continue;
                cur.push_back(static_cast<int>(i));
                rec(i + 1, fp | injectables[i].footprint);
                cur.pop_back();
            }
        };
        rec(0, 0u);
        for (const auto& f : families) {
            bool maximal = true;
            for (const auto& g : families)
                if (f.size() <= g.size() && implied_by(f, g)) {
                    maximal = false;
                    break;
                }
            if (maximal) maximal_families.push_back(f);
        }
    }

    // ---- rows ----------------------------------------------------------------

    int marginal_key_id(const MarginalKey& k) {
        for (size_t i = 0; i < marginal_keys.size(); ++i)
            if (marginal_keys[i] == k) return static_cast<int>(i);
        marginal_keys.push_back(k);
        return static_cast<int>(marginal_keys.size()) - 1;
    }

    void build_rows() {
        std::map<std::vector<std::pair<int, double>>, int> seen;
        // Normalization: sum over all joint states = 1.
        {
            QuotientRow norm;
            std::map<int, double> acc;
            for (long i = 0; i < joint; ++i) acc[orbit_of[static_cast<size_t>(i)]] += 1.0;
            norm.terms.assign(acc.begin(), acc.end());
            norm.constant = 1.0;
            seen.emplace(norm.terms, static_cast<int>(rows.size()));
            rows.push_back(std::move(norm));
        }

        std::vector<int> digits(slot_card.size());
        for (const auto& fam : maximal_families) {
            // Parties of the family, in member order.
            std::vector<int> fam_parties;
            std::vector<int> member_of;  // parallel: member index
            for (size_t mi = 0; mi < fam.size(); ++mi)
                for (int pi : injectables[static_cast<size_t>(fam[mi])].members) {
                    fam_parties.push_back(pi);
                    member_of.push_back(static_cast<int>(mi));
                }
            const int fp = static_cast<int>(fam_parties.size());
            // Setting assignment per party (cardinality of its setting).
            std::vector<int> setcards(static_cast<size_t>(fp));
            long n_settings = 1;
            for (int i = 0; i < fp; ++i) {
                setcards[static_cast<size_t>(i)] =
                    def.parties[static_cast<size_t>(parties[static_cast<size_t>(fam_parties[static_cast<size_t>(i)])].orig)].setcard;
                n_settings *= setcards[static_cast<size_t>(i)];
            }
            for (long sa = 0; sa < n_settings; ++sa) {
                std::vector<int> setting(static_cast<size_t>(fp));
                {
                    long t = sa;
                    for (int i = 0; i < fp; ++i) {
                        setting[static_cast<size_t>(i)] = static_cast<int>(t % setcards[static_cast<size_t>(i)]);
                        t /= setcards[static_cast<size_t>(i)];
                    }
                }
                std::vector<int> slots(static_cast<size_t>(fp));
                std::vector<int> cards(static_cast<size_t>(fp));
                long n_out = 1;
                for (int i = 0; i < fp; ++i) {
                    slots[static_cast<size_t>(i)] = slot_of(fam_parties[static_cast<size_t>(i)], setting[static_cast<size_t>(i)]);
                    cards[static_cast<size_t>(i)] = slot_card[static_cast<size_t>(slots[static_cast<size_t>(i)])];
                    n_out *= cards[static_cast<size_t>(i)];
                }
                // Accumulate joint indices into outcome buckets.
                std::vector<std::map<int, double>> buckets(static_cast<size_t>(n_out));
                for (long idx = 0; idx < joint; ++idx) {
                    long t = idx;
                    for (size_t k = 0; k < slot_card.size(); ++k) {
                        digits[k] = static_cast<int>(t % slot_card[k]);
                        t /= slot_card[k];
                    }
                    long o = 0;
                    for (int i = fp - 1; i >= 0; --i) o = o * cards[static_cast<size_t>(i)] + digits[static_cast<size_t>(slots[static_cast<size_t>(i)])];
                    buckets[static_cast<size_t>(o)][orbit_of[static_cast<size_t>(idx)]] += 1.0;
                }
                for (long o = 0; o < n_out; ++o) {
                    QuotientRow row;
                    row.terms.assign(buckets[static_cast<size_t>(o)].begin(), buckets[static_cast<size_t>(o)].end());
                    // Outcome digits per party, in fam_parties order.
                    std::vector<int> outs(static_cast<size_t>(fp));
                    {
                        long t = o;
                        for (int i = 0; i < fp; ++i) {
                            outs[static_cast<size_t>(i)] = static_cast<int>(t % cards[static_cast<size_t>(i)]);
                            t /= cards[static_cast<size_t>(i)];
                        }
                    }
                    for (size_t mi = 0; mi < fam.size(); ++mi) {
                        MarginalKey key;
                        int a_out = 0, b_out = 0, c_out = 0;
                        for (int i = 0; i < fp; ++i) {
                            if (member_of[static_cast<size_t>(i)] != static_cast<int>(mi)) continue;
                            int orig = parties[static_cast<size_t>(fam_parties[static_cast<size_t>(i)])].orig;
                            key.mask |= 1u << orig;
                            if (orig == 0) {
                                key.x = setting[static_cast<size_t>(i)];
                                a_out = outs[static_cast<size_t>(i)];
                            } else if (orig == 1) {
                                b_out = outs[static_cast<size_t>(i)];
                            } else {
                                key.z = setting[static_cast<size_t>(i)];
                                c_out = outs[static_cast<size_t>(i)];
                            }
                        }
                        int na = (key.mask & 1u) ? scenario.card_a : 1;
                        int nb = (key.mask & 2u) ? scenario.card_b : 1;
                        int nc = (key.mask & 4u) ? scenario.card_c : 1;
                        (void)na;
                        int out_idx = (a_out * nb + b_out) * nc + c_out;
                        row.rhs.push_back({marginal_key_id(key), out_idx});
                    }
                    auto it = seen.find(row.terms);
                    if (it == seen.end()) {
                        seen.emplace(row.terms, static_cast<int>(rows.size()));
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }

    // Evaluates the marginal tables of one observed behavior.
    std::vector<std::vector<double>> marginal_tables(const Behavior& b) const {
        std::vector<std::vector<double>> out;
        out.reserve(marginal_keys.size());
        for (const auto& key : marginal_keys) out.push_back(marginal(b, key.mask, key.x, key.z));
        return out;
    }

    double row_rhs(const QuotientRow& row, const std::vector<std::vector<double>>& margs) const {
        if (row.constant >= 0.0) return row.constant;
        double v = 1.0;
        for (const auto& f : row.rhs) v *= margs[static_cast<size_t>(f.key_id)][static_cast<size_t>(f.outcome)];
        return v;
    }
};

// ------------------------------------------------------------------------

InflationOracle::InflationOracle(const InflationSpec& spec, const ScenarioSpec& scenario)
    : structure_(std::make_shared<InflationStructure>(spec, scenario)) {
    const auto& st = *structure_;
    quotient_lp_.num_vars = 0;
    for (int i = 0; i < st.n_orbits; ++i) quotient_lp_.add_var(0.0, 1.0);
    for (const auto& row : st.rows) {
        std::vector<std::pair<int, double>> terms(row.terms.begin(), row.terms.end());
        quotient_lp_.add_row(lp::Sense::Eq, 0.0, std::move(terms));
    }
}

int InflationOracle::joint_size() const { return static_cast<int>(structure_->joint); }
int InflationOracle::orbit_count() const { return structure_->n_orbits; }
int InflationOracle::row_count() const { return static_cast<int>(structure_->rows.size()); }
int InflationOracle::party_count() const { return static_cast<int>(structure_->parties.size()); }
int InflationOracle::maximal_family_count() const {
    return static_cast<int>(structure_->maximal_families.size());
}
const std::vector<InflatedParty>& InflationOracle::parties() const { return structure_->parties; }

std::vector<double> InflationOracle::lift(const std::vector<double>& quotient_q) const {
    const auto& st = *structure_;
    std::vector<double> full(static_cast<size_t>(st.joint));
    for (long i = 0; i < st.joint; ++i)
        full[static_cast<size_t>(i)] = quotient_q[static_cast<size_t>(st.orbit_of[static_cast<size_t>(i)])];
    return full;
}

sets::MembershipVerdict InflationOracle::classify(const Behavior& observed) {
    const auto& st = *structure_;
    observed.validate(1e-9);
    auto margs = st.marginal_tables(observed);
    for (size_t r = 0; r < st.rows.size(); ++r)
        quotient_lp_.rows[r].rhs = st.row_rhs(st.rows[r], margs);

    sets::MembershipVerdict v;
    v.set_id = sets::SetId::Bilocal;
    v.set_label = "inflation-" + to_string(st.spec.network) + "-" + std::to_string(st.spec.order);
    lp::LpSolution sol;
    try {
        sol = solved_once_ ? solver_.resolve(quotient_lp_, /*same_matrix=*/true)
                           : solver_.solve(quotient_lp_);
        solved_once_ = true;
    } catch (const lp::LpStallError&) {
        solver_.reset();
        solved_once_ = false;
        v.status = sets::Status::Indeterminate;
        v.certificate.kind = "none";
        return v;
    }

    if (sol.status == lp::LpStatus::Optimal) {
        v.status = sets::Status::Inside;
        v.relaxation_only = true;
        v.certificate.kind = "lp-feasible";
        last_primal_ = sol.x;
        // Re-verify the feasible point against every quotient row.
        double err = 0.0;
        for (size_t r = 0; r < st.rows.size(); ++r) {
            double s = 0.0;
            for (auto [orb, coef] : st.rows[r].terms) s += coef * sol.x[static_cast<size_t>(orb)];
            err = std::max(err, std::fabs(s - quotient_lp_.rows[r].rhs));
        }
        v.certificate.violation = err;
        v.certificate_verified = err <= 1e-8;
        v.margin = 0.0;
    } else if (sol.status == lp::LpStatus::Infeasible) {
        v.status = sets::Status::Outside;
        v.certificate.kind = "farkas";
        v.certificate.values = sol.farkas;
        v.certificate.violation = sol.farkas_violation;
        v.margin = sol.farkas_violation;
        v.certificate_verified = sol.farkas_violation > 1e-9;
    } else {
        v.status = sets::Status::Indeterminate;
        v.certificate.kind = "none";
    }
    return v;
}

// ------------------------------------------------------------------------

lp::LinearProgram build_inflation_lp(const InflationSpec& spec, const Behavior& observed) {
    observed.validate(1e-9);
    InflationStructure st(spec, observed.spec);
    auto margs = st.marginal_tables(observed);

    lp::LinearProgram out;
    for (long i = 0; i < st.joint; ++i) out.add_var(0.0, 1.0);

    // Normalization.
    {
        std::vector<std::pair<int, double>> row;
        for (long i = 0; i < st.joint; ++i) row.emplace_back(static_cast<int>(i), 1.0);
        out.add_row(lp::Sense::Eq, 1.0, std::move(row));
    }
    // Symmetry rows per source transposition (order 2 only).
    if (spec.order == 2) {
        for (int s = 0; s < st.def.n_sources; ++s) {
            auto perm = st.generator_perm(s);
            for (long i = 0; i < st.joint; ++i) {
                long j = perm[static_cast<size_t>(i)];
                if (j <= i) continue;
                out.add_row(lp::Sense::Eq, 0.0,
                            {{static_cast<int>(i), 1.0}, {static_cast<int>(j), -1.0}});
            }
        }
    }

    // Marginal rows: every injectable set (spec iii) and every maximal
    // ai-expressible family (spec iv; smaller families are marginals of
    // these and therefore implied).
    std::vector<std::vector<int>> groups;
    for (size_t i = 0; i < st.injectables.size(); ++i) groups.push_back({static_cast<int>(i)});
    for (const auto& f : st.maximal_families)
        if (f.size() > 1) groups.push_back(f);

    std::vector<int> digits(st.slot_card.size());
    for (const auto& fam : groups) {
        std::vector<int> fam_parties;
        std::vector<int> member_of;
        for (size_t mi = 0; mi < fam.size(); ++mi)
            for (int pi : st.injectables[static_cast<size_t>(fam[mi])].members) {
                fam_parties.push_back(pi);
                member_of.push_back(static_cast<int>(mi));
            }
        const int fp = static_cast<int>(fam_parties.size());
        std::vector<int> setcards(static_cast<size_t>(fp));
        long n_settings = 1;
        for (int i = 0; i < fp; ++i) {
            setcards[static_cast<size_t>(i)] =
                st.def.parties[static_cast<size_t>(st.parties[static_cast<size_t>(fam_parties[static_cast<size_t>(i)])].orig)].setcard;
            n_settings *= setcards[static_cast<size_t>(i)];
        }
        for (long sa = 0; sa < n_settings; ++sa) {
            std::vector<int> setting(static_cast<size_t>(fp));
            {
                long t = sa;
                for (int i = 0; i < fp; ++i) {
                    setting[static_cast<size_t>(i)] = static_cast<int>(t % setcards[static_cast<size_t>(i)]);
                    t /= setcards[static_cast<size_t>(i)];
                }
            }
            std::vector<int> slots(static_cast<size_t>(fp));
            std::vector<int> cards(static_cast<size_t>(fp));
            long n_out = 1;
            for (int i = 0; i < fp; ++i) {
                slots[static_cast<size_t>(i)] = st.slot_of(fam_parties[static_cast<size_t>(i)], setting[static_cast<size_t>(i)]);
                cards[static_cast<size_t>(i)] = st.slot_card[static_cast<size_t>(slots[static_cast<size_t>(i)])];
                n_out *= cards[static_cast<size_t>(i)];
            }
            std::vector<std::vector<std::pair<int, double>>> buckets(static_cast<size_t>(n_out));
            for (long idx = 0; idx < st.joint; ++idx) {
                long t = idx;
                for (size_t k = 0; k < st.slot_card.size(); ++k) {
                    digits[k] = static_cast<int>(t % st.slot_card[k]);
                    t /= st.slot_card[k];
                }
                long o = 0;
                for (int i = fp - 1; i >= 0; --i) o = o * cards[static_cast<size_t>(i)] + digits[static_cast<size_t>(slots[static_cast<size_t>(i)])];
                buckets[static_cast<size_t>(o)].emplace_back(static_cast<int>(idx), 1.0);
            }
            for (long o = 0; o < n_out; ++o) {
                std::vector<int> outs(static_cast<size_t>(fp));
                {
                    long t = o;
                    for (int i = 0; i < fp; ++i) {
                        outs[static_cast<size_t>(i)] = static_cast<int>(t % cards[static_cast<size_t>(i)]);
                        t /= cards[static_cast<size_t>(i)];
                    }
                }
                double rhs = 1.0;
                for (size_t mi = 0; mi < fam.size(); ++mi) {
                    InflationStructure::MarginalKey key;
                    int a_out = 0, b_out = 0, c_out = 0;
                    for (int i = 0; i < fp; ++i) {
                        if (member_of[static_cast<size_t>(i)] != static_cast<int>(mi)) continue;
                        int orig = st.parties[static_cast<size_t>(fam_parties[static_cast<size_t>(i)])].orig;
                        key.mask |= 1u << orig;
                        if (orig == 0) {
                            key.x = setting[static_cast<size_t>(i)];
                            a_out = outs[static_cast<size_t>(i)];
                        } else if (orig == 1) {
                            b_out = outs[static_cast<size_t>(i)];
                        } else {
                            key.z = setting[static_cast<size_t>(i)];
                            c_out = outs[static_cast<size_t>(i)];
                        }
                    }
                    int nb = (key.mask & 2u) ? observed.spec.card_b : 1;
                    int nc = (key.mask & 4u) ? observed.spec.card_c : 1;
                    int out_idx = (a_out * nb + b_out) * nc + c_out;
                    std::vector<double> marg = marginal(observed, key.mask, key.x, key.z);
                    rhs *= marg[static_cast<size_t>(out_idx)];
                }
                out.add_row(lp::Sense::Eq, rhs, buckets[static_cast<size_t>(o)]);
            }
        }
    }
    return out;
}

sets::MembershipVerdict test_inflation(const Behavior& observed, const InflationSpec& spec) {
    InflationOracle oracle(spec, observed.spec);
    return oracle.classify(observed);
}

}  // namespace netvol::inflate
