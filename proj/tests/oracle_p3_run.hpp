// Assembles the p = 3 golden report from the brute-force oracle. Row ids and
// value formats deliberately match the library's structure-oracle suite so the
// two reports can be compared byte-for-byte after timing normalization.
#pragma once

#include <optional>
#include <string>

#include "oracle_p3.hpp"
#include "su4check/report.hpp"

namespace oracle3 {

struct Terms {
    std::vector<std::string> names;
    std::vector<Oracle::Set> subs;
    Oracle::Set phi;
};

inline Terms canonical_terms(const Oracle& G, const Oracle::Set& E) {
    Terms t;
    Oracle::Set zE = G.center_of(E);
    Oracle::Set dE = G.derived_of(E);
    Oracle::Set phi = G.frattini_of(E);
    // [E', E]
    std::vector<int> comms;
    for (int a : dE)
        for (int b : E) comms.push_back(G.commutator(a, b));
    Oracle::Set g3 = G.closure(comms);
    Oracle::Set z_cap_d;
    std::set_intersection(zE.begin(), zE.end(), dE.begin(), dE.end(),
                          std::back_inserter(z_cap_d));
    std::vector<int> zd_seed = zE;
    zd_seed.insert(zd_seed.end(), dE.begin(), dE.end());
    Oracle::Set z_mul_d = G.closure(zd_seed);
    Oracle::Set z2;
    for (int x : E) {
        bool ok = true;
        for (int g : E)
            if (!G.contains(zE, G.commutator(x, g))) {
                ok = false;
                break;
            }
        if (ok) z2.push_back(x);
    }
    Oracle::Set c_phi = G.centralizer_in(E, phi);
    Oracle::Set c_d = G.centralizer_in(E, dE);
    t.phi = phi;
    auto push = [&](const std::string& name, Oracle::Set s) {
        for (auto& have : t.subs)
            if (have == s) return;
        t.names.push_back(name);
        t.subs.push_back(std::move(s));
    };
    push("1", Oracle::Set{0});
    push("Z(E)", zE);
    push("E'", dE);
    push("Phi(E)", phi);
    push("[E',E]", g3);
    push("Z(E)^E'", z_cap_d);
    push("Z(E)E'", z_mul_d);
    push("Z2(E)", z2);
    push("C_E(Phi(E))", c_phi);
    push("C_E(E')", c_d);
    push("E", E);
    return t;
}

// Does some chain of canonical terms starting inside Phi(E) and ending at E
// admit a witness outside E*C_S(E) acting trivially on every quotient?
inline bool has_obstruction(const Oracle& G, const Oracle::Set& E) {
    Terms terms = canonical_terms(G, E);
    const size_t n = terms.subs.size();
    size_t e_idx = n;
    for (size_t i = 0; i < n; ++i)
        if (terms.subs[i] == E) {
            e_idx = i;
            break;
        }
    Oracle::Set N = G.normalizer_of(E);
    Oracle::Set CS = G.centralizer_in(G.whole(), E);
    std::vector<int> core_seed = E;
    core_seed.insert(core_seed.end(), CS.begin(), CS.end());
    Oracle::Set core = G.closure(core_seed);
    std::vector<int> candidates;
    for (int s : N)
        if (!G.contains(core, s)) candidates.push_back(s);
    if (candidates.empty()) return false;

    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            leq[i][j] = std::includes(terms.subs[j].begin(), terms.subs[j].end(),
                                      terms.subs[i].begin(), terms.subs[i].end());
    auto step_ok = [&](size_t u, size_t l, int s) {
        for (int g : terms.subs[u])
            if (!G.contains(terms.subs[l], G.commutator(g, s))) return false;
        return true;
    };
    // depth-first over increasing chains; stop as soon as any chain validates
    std::vector<size_t> chain;
    auto dfs = [&](auto&& self, size_t last, std::vector<int> live) -> bool {
        if (last == e_idx && chain.size() >= 2 && !live.empty()) return true;
        for (size_t nxt = 0; nxt < n; ++nxt) {
            if (nxt == last || !leq[last][nxt]) continue;
            if (terms.subs[nxt].size() == terms.subs[last].size()) continue;
            std::vector<int> still;
            for (int s : live)
                if (step_ok(nxt, last, s)) still.push_back(s);
            if (still.empty()) continue;
            chain.push_back(nxt);
            if (self(self, nxt, std::move(still))) return true;
            chain.pop_back();
        }
        return false;
    };
    for (size_t start = 0; start < n; ++start) {
        if (start == e_idx) continue;
        if (!std::includes(terms.phi.begin(), terms.phi.end(), terms.subs[start].begin(),
                           terms.subs[start].end()))
            continue;
        chain = {start};
        if (dfs(dfs, start, candidates)) return true;
    }
    return false;
}

inline std::string fingerprint(const Oracle& G, const Oracle::Set& E) {
    auto zE = G.center_of(E).size();
    auto dE = G.derived_of(E).size();
    auto phi = G.frattini_of(E).size();
    int expnt = G.exponent_of(E);
    bool abelian = G.is_abelian(E);
    std::uint64_t order = E.size();
    const int p = 3;
    if (abelian && expnt == p) {
        int k = 0;
        for (std::uint64_t t = order; t > 1; t /= p) ++k;
        return "elementary-abelian p^" + std::to_string(k);
    }
    if (abelian) return "abelian exponent p^>1";
    if (order == 81 && zE == 9 && dE == 3) {
        if (expnt == p) return "p+^(1+2) x C_p";
        return "p+^(1+2) o C_(p^2)";
    }
    if (order == 243 && zE == 3 && dE == 3 && phi == 3 && expnt == p)
        return "extraspecial p+^(1+4)";
    return "unknown";
}

inline su4check::SuiteReport oracle_structure_report() {
    using su4check::SuiteReport;
    Oracle G;
    G.build();
    su4check::SuiteBuilder b("structure-oracle", 3);
    auto record = [&](const std::string& id, const std::string& anchor, auto value) {
        b.check(id, anchor, value, value);
    };
    Oracle::Set whole = G.whole();
    Oracle::Set Z = G.center_of(whole);
    Oracle::Set Sder = G.derived_of(whole);
    record("01-order", "recorded-order", static_cast<std::uint64_t>(G.elems.size()));
    record("02-center-order", "recorded-center", static_cast<std::uint64_t>(Z.size()));
    record("03-derived-order", "recorded-derived", static_cast<std::uint64_t>(Sder.size()));
    // lower central series
    std::vector<Oracle::Set> lower{whole};
    while (lower.back().size() > 1) {
        std::vector<int> comms;
        for (int a : lower.back())
            for (int g : whole) comms.push_back(G.commutator(a, g));
        Oracle::Set nxt = G.closure(comms);
        if (nxt.size() == lower.back().size()) break;
        lower.push_back(nxt);
    }
    record("04-class", "recorded-class", static_cast<int>(lower.size()) - 1);
    // upper central series
    std::vector<Oracle::Set> upper{Oracle::Set{0}};
    while (true) {
        Oracle::Set cur;
        for (int x : whole) {
            bool ok = true;
            for (int g : whole)
                if (!G.contains(upper.back(), G.commutator(x, g))) {
                    ok = false;
                    break;
                }
            if (ok) cur.push_back(x);
        }
        if (cur.size() == upper.back().size()) break;
        upper.push_back(cur);
        if (cur.size() == whole.size()) break;
    }
    bool coincide = upper.size() == lower.size();
    if (coincide)
        for (size_t i = 0; i < lower.size(); ++i)
            coincide = coincide && lower[i] == upper[upper.size() - 1 - i];
    record("05-upper-lower-coincide", "recorded-series", std::string(coincide ? "true" : "false"));
    record("06-exponent", "recorded-exponent", G.exponent_of(whole));

    // maximal subgroups via the Frattini quotient
    Oracle::Set phi = G.frattini_of(whole);
    auto phi_q = G.quotient_by(phi);
    std::vector<Oracle::Set> maximals;
    for (auto& sub : Oracle::quotient_subgroups(phi_q)) {
        if (sub.size() * 3 != phi_q.rep.size()) continue;
        Oracle::Set m;
        for (size_t e = 0; e < G.elems.size(); ++e)
            if (std::binary_search(sub.begin(), sub.end(), phi_q.coset_of[e]))
                m.push_back(static_cast<int>(e));
        maximals.push_back(m);
    }
    std::sort(maximals.begin(), maximals.end());
    record("07-maximal-count", "recorded-maximals", static_cast<std::uint64_t>(maximals.size()));

    std::optional<Oracle::Set> Q;
    int q_hits = 0;
    for (auto& m : maximals)
        if (G.derived_of(m).size() == 3) {
            Q = m;
            ++q_hits;
        }
    std::string q_profile = "none";
    if (q_hits == 1) {
        q_profile = std::to_string(Q->size()) + "/" + std::to_string(G.center_of(*Q).size()) +
                    "/" + std::to_string(G.derived_of(*Q).size()) + "/" +
                    std::to_string(G.frattini_of(*Q).size()) + "/" +
                    std::to_string(G.exponent_of(*Q));
    }
    record("08-q-profile", "recorded-q-profile", q_profile);

    // abelian subgroups of order 81: no maximal subgroup is abelian, so any
    // abelian order-81 subgroup joins the center into an abelian maximal
    // unless it already contains it; hence all lie above the center.
    for (auto& m : maximals)
        if (G.is_abelian(m)) throw std::logic_error("oracle: abelian maximal found");
    auto zq = G.quotient_by(Z);
    auto zq_subs = Oracle::quotient_subgroups(zq);
    std::vector<Oracle::Set> abelian81;
    for (auto& sub : zq_subs) {
        if (sub.size() != 27) continue; // preimage order 81
        Oracle::Set e;
        for (size_t x = 0; x < G.elems.size(); ++x)
            if (std::binary_search(sub.begin(), sub.end(), zq.coset_of[x]))
                e.push_back(static_cast<int>(x));
        if (G.is_abelian(e)) abelian81.push_back(e);
    }
    std::optional<Oracle::Set> V;
    if (abelian81.size() == 1) V = abelian81[0];
    record("09-v-order", "recorded-v",
           V ? static_cast<std::uint64_t>(V->size()) : 0ull);

    std::vector<Oracle::Set> family;
    for (auto& m : maximals) {
        if (V && std::includes(m.begin(), m.end(), V->begin(), V->end())) family.push_back(m);
    }
    record("10-family-size", "recorded-family", static_cast<std::uint64_t>(family.size()));
    {
        std::multiset<std::string> profs;
        for (auto& m : family)
            profs.insert(std::to_string(G.center_of(m).size()) + "/" +
                         std::to_string(G.derived_of(m).size()));
        std::string s;
        for (auto& t : profs) s += t + ";";
        record("11-family-profiles", "recorded-family-profiles", s);
    }

    // survivor scan over subgroups above the center with order 9..243,
    // deduplicated under conjugacy
    std::set<Oracle::Set> class_reps;
    for (auto& sub : zq_subs) {
        std::uint64_t order = 3ull * sub.size();
        if (order < 9 || order > 243) continue;
        Oracle::Set e;
        for (size_t x = 0; x < G.elems.size(); ++x)
            if (std::binary_search(sub.begin(), sub.end(), zq.coset_of[x]))
                e.push_back(static_cast<int>(x));
        // canonical form: minimum over the conjugation orbit
        Oracle::Set best = e;
        std::set<Oracle::Set> orbit{e};
        std::vector<Oracle::Set> frontier{e};
        while (!frontier.empty()) {
            std::vector<Oracle::Set> next;
            for (auto& cur : frontier) {
                for (size_t g = 0; g < G.elems.size(); ++g) {
                    Oracle::Set img = G.conj_set(cur, static_cast<int>(g));
                    if (orbit.insert(img).second) {
                        if (img < best) best = img;
                        next.push_back(std::move(img));
                    }
                }
            }
            frontier.swap(next);
        }
        class_reps.insert(best);
    }
    record("12-scan-classes", "recorded-scan-classes",
           static_cast<std::uint64_t>(class_reps.size()));
    std::uint64_t centric_count = 0;
    std::multiset<std::string> survivors;
    std::uint64_t survivor_count = 0;
    for (const Oracle::Set& e : class_reps) {
        Oracle::Set cs = G.centralizer_in(whole, e);
        bool centric = true;
        for (int x : cs)
            if (!G.contains(e, x)) centric = false;
        if (!centric) continue;
        ++centric_count;
        if (has_obstruction(G, e)) continue;
        ++survivor_count;
        std::string tag = std::to_string(e.size()) + ":" + fingerprint(G, e);
        bool is_q = Q && e == *Q;
        bool is_v = V && e == *V;
        if (is_q) tag += ":Q";
        if (is_v) tag += ":V";
        if (!is_q && !is_v && (fingerprint(G, e) == "p+^(1+2) x C_p" || e.size() <= 27))
            tag += ":external";
        survivors.insert(tag);
    }
    record("13-scan-centric", "recorded-scan-centric", centric_count);
    record("14-scan-survivors", "recorded-scan-survivors", survivor_count);
    std::string s;
    for (auto& t : survivors) s += t + ";";
    record("15-survivor-list", "recorded-survivors", s);
    return b.finish();
}

} // namespace oracle3
