// Abstract model of the outer-automorphism bookkeeping: the group
// C_{m1} x (C_{m2} : C_2) on triples (i, j, eps) with the reflection inverting
// the C_{m2} part, subgroup-uniqueness counts inside it, the image of the
// diagonal torus in the automorphism group of S, and the final counts of
// subgroup classes in the small quotient models.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "su4check/essential.hpp"
#include "su4check/field.hpp"
#include "su4check/groupkit.hpp"
#include "su4check/su4.hpp"

namespace su4check {

struct ModelElem {
    std::uint16_t i = 0, j = 0, e = 0;
    bool operator==(const ModelElem& o) const { return i == o.i && j == o.j && e == o.e; }
};

struct DihedralProductTraits {
    int m1 = 1, m2 = 1;
    using Elem = ModelElem;
    using Key = std::uint32_t;
    struct KeyHash {
        size_t operator()(std::uint32_t k) const {
            k ^= k >> 16;
            k *= 0x45d9f3bu;
            k ^= k >> 16;
            return k;
        }
    };

    Elem identity() const { return {}; }
    Elem mul(const Elem& a, const Elem& b) const {
        Elem r;
        r.i = static_cast<std::uint16_t>((a.i + b.i) % m1);
        int ja = b.e ? (m2 - a.j) % m2 : a.j;
        r.j = static_cast<std::uint16_t>((ja + b.j) % m2);
        r.e = static_cast<std::uint16_t>((a.e + b.e) % 2);
        return r;
    }
    // (i,j,0)^-1 = (-i,-j,0); (i,j,1)^-1 = (-i,j,1)
    Elem inv(const Elem& a) const {
        Elem r;
        r.e = a.e;
        r.i = static_cast<std::uint16_t>((m1 - a.i) % m1);
        r.j = a.e ? a.j : static_cast<std::uint16_t>((m2 - a.j) % m2);
        return r;
    }
    Key key(const Elem& a) const {
        return static_cast<Key>(a.i) | (static_cast<Key>(a.j) << 8) | (static_cast<Key>(a.e) << 24);
    }
};

using ModelTable = GroupTable<DihedralProductTraits>;

struct OuterModel {
    int p;
    int m1, m2;
    DihedralProductTraits ops;
    std::unique_ptr<ModelTable> table;
};

inline OuterModel build_outer_model(int p) {
    OuterModel m;
    m.p = p;
    m.m1 = p - 1;
    m.m2 = p * p - 1;
    m.ops = DihedralProductTraits{m.m1, m.m2};
    std::vector<ModelElem> gens{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.table = std::make_unique<ModelTable>(m.ops, gens);
    std::uint64_t expect = 2ull * m.m1 * m.m2;
    if (m.table->size() != expect) throw ModelMismatch("outer model order mismatch");
    // presentation relations
    const auto& T = *m.table;
    std::uint32_t x = T.gen_index(0), y = T.gen_index(1), z = T.gen_index(2);
    if (T.order_of(x) != m.m1 || T.order_of(y) != m.m2 || T.order_of(z) != 2)
        throw ModelMismatch("outer model generator orders");
    if (T.conj(y, z) != T.inv(y)) throw ModelMismatch("outer model reflection relation");
    if (T.mul(x, y) != T.mul(y, x) || T.mul(x, z) != T.mul(z, x))
        throw ModelMismatch("outer model direct factor relation");
    return m;
}

// exhaustive for small models, else a fixed-stride sample of the triples
inline bool model_associative(const OuterModel& m, std::uint64_t max_triples = 10'000'000) {
    const auto& T = *m.table;
    std::uint64_t n = T.size();
    std::uint64_t total = n * n * n;
    std::uint64_t stride = total <= max_triples ? 1 : total / max_triples + 1;
    for (std::uint64_t idx = 0; idx < total; idx += stride) {
        std::uint32_t a = static_cast<std::uint32_t>(idx / (n * n));
        std::uint32_t b = static_cast<std::uint32_t>(idx / n % n);
        std::uint32_t c = static_cast<std::uint32_t>(idx % n);
        ModelElem lhs = m.ops.mul(m.ops.mul(T.elem(a), T.elem(b)), T.elem(c));
        ModelElem rhs = m.ops.mul(T.elem(a), m.ops.mul(T.elem(b), T.elem(c)));
        if (!(lhs == rhs)) return false;
    }
    return true;
}

inline std::vector<int> prime_divisors(std::uint64_t n) {
    std::vector<int> out;
    for (std::uint64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            out.push_back(static_cast<int>(q));
            while (n % q == 0) n /= q;
        }
    if (n > 1) out.push_back(static_cast<int>(n));
    return out;
}

// all subgroups (not just classes) of the given order, as element-index sets
inline std::vector<Subgroup> all_subgroups_of_order(const ModelTable& T, std::uint64_t order) {
    auto classes = subgroup_classes(T, order, order, trivial_subgroup(), prime_divisors(T.size()));
    std::vector<Subgroup> out;
    for (const auto& cls : classes) {
        // expand the conjugacy orbit
        std::set<std::vector<std::uint32_t>> orbit;
        std::vector<std::vector<std::uint32_t>> frontier{cls.rep.elems};
        orbit.insert(cls.rep.elems);
        while (!frontier.empty()) {
            std::vector<std::vector<std::uint32_t>> next;
            for (const auto& cur : frontier) {
                for (size_t s = 0; s < T.gen_count(); ++s) {
                    std::vector<std::uint32_t> img(cur.size());
                    for (size_t t = 0; t < cur.size(); ++t)
                        img[t] = T.conj_by_gen(cur[t], static_cast<std::uint8_t>(s));
                    std::sort(img.begin(), img.end());
                    if (orbit.insert(img).second) next.push_back(std::move(img));
                }
            }
            frontier.swap(next);
        }
        if (orbit.size() != cls.orbit_size) throw ModelMismatch("orbit expansion mismatch");
        for (auto& e : orbit) {
            Subgroup H;
            H.elems = e;
            out.push_back(std::move(H));
        }
    }
    return out;
}

struct UniqueHReport {
    int type_matches = 0;          // subgroups isomorphic to C_{p-1} x C_{(p^2-1)/2}
    Subgroup unique_h;             // the unique one (when type_matches == 1)
    int k_type_matches = 0;        // subgroups of H of half order and type C_{(p-1)/2} x C_{(p^2-1)/2}
    int k_with_property = 0;       // ... containing an order-(p^2-1)/2 element with full S/Q-label order
};

inline UniqueHReport unique_h_check(const OuterModel& m) {
    const auto& T = *m.table;
    int p = m.p;
    UniqueHReport rep;
    std::uint64_t h_order = static_cast<std::uint64_t>(p - 1) * (p * p - 1) / 2;
    std::vector<std::uint64_t> h_type{static_cast<std::uint64_t>(p - 1),
                                      static_cast<std::uint64_t>(p * p - 1) / 2};
    for (Subgroup& H : all_subgroups_of_order(T, h_order)) {
        Subgroup Hg = with_generators(T, H);
        if (!is_abelian(T, Hg)) continue;
        if (abelian_invariant_factors(T, Hg) != h_type) continue;
        ++rep.type_matches;
        rep.unique_h = Hg;
    }
    if (rep.type_matches != 1) return rep;

    std::uint64_t k_order = h_order / 2;
    std::vector<std::uint64_t> k_type{static_cast<std::uint64_t>(p - 1) / 2,
                                      static_cast<std::uint64_t>(p * p - 1) / 2};
    const Subgroup& H = rep.unique_h;
    for (Subgroup& K : all_subgroups_of_order(T, k_order)) {
        bool inside = std::includes(H.elems.begin(), H.elems.end(), K.elems.begin(), K.elems.end());
        if (!inside) continue;
        Subgroup Kg = with_generators(T, K);
        if (!is_abelian(T, Kg)) continue;
        if (abelian_invariant_factors(T, Kg) != k_type) continue;
        ++rep.k_type_matches;
        bool property = false;
        for (std::uint32_t e : K.elems) {
            if (T.order_of(e) != (p * p - 1) / 2) continue;
            const ModelElem& el = T.elem(e);
            int label_order = (p - 1) / std::gcd<int>(el.i, p - 1);
            if (label_order == p - 1) property = true;
        }
        if (property) ++rep.k_with_property;
    }
    return rep;
}

// --- torus image in the automorphism group ------------------------------------------

struct TorusImageReport {
    std::uint64_t image_order = 0;           // |D0| / kernel
    std::uint64_t delta_order = 0;           // |<tau-action> meet <theta-action>|
    bool invariant_factors_match = false;    // against C_{p-1} o_Delta C_{(p^2-1)/2}
    bool inner_intersection_trivial = false; // diagonal acting as c_s forces scalar
    bool labels_match = false;               // x-hat / y-hat action labels
};

// order histogram of the abstract central product C_{m1} o C_{m2} with the
// unique involutions identified when delta == 2 (direct product when delta == 1)
inline std::map<int, std::uint64_t> central_product_order_histogram(int m1, int m2, int delta) {
    std::map<int, std::uint64_t> hist;
    auto ord = [](int k, int m) { return m / std::gcd(k, m); };
    if (delta == 1) {
        for (int i = 0; i < m1; ++i)
            for (int j = 0; j < m2; ++j) hist[std::lcm(ord(i, m1), ord(j, m2))]++;
        return hist;
    }
    // quotient of C_{m1} x C_{m2} by <(m1/2, m2/2)>; count orders of cosets
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < m1; ++i) {
        for (int j = 0; j < m2; ++j) {
            std::pair<int, int> a{i, j};
            std::pair<int, int> b{(i + m1 / 2) % m1, (j + m2 / 2) % m2};
            if (seen.count(a) || seen.count(b)) continue;
            seen.insert(a);
            // order of the coset: smallest k with k*(i,j) in the kernel pair set
            int k = 1;
            int ci = i % m1, cj = j % m2;
            while (!((ci == 0 && cj == 0) || (ci == m1 / 2 && cj == m2 / 2))) {
                ci = (ci + i) % m1;
                cj = (cj + j) % m2;
                ++k;
            }
            hist[k]++;
        }
    }
    return hist;
}

inline TorusImageReport torus_out_image(const Su4System& sys, const TorusData& td) {
    const QuadExtField& fld = sys.fld;
    int p = sys.p;
    TorusImageReport rep;

    // order of each torus member's action = least k with t^k acting trivially
    auto action_order = [&](const Mat& t) {
        Mat cur = t;
        int k = 1;
        while (!acts_trivially(sys, cur)) {
            cur = mat_mul(fld, cur, t);
            ++k;
        }
        return k;
    };
    std::map<int, std::uint64_t> hist;
    for (const Mat& t : td.d0) hist[action_order(t)]++;
    std::uint64_t image = 0;
    for (auto& [o, c] : hist) image += c;
    image /= td.d; // each action realized by exactly |kernel| members
    rep.image_order = image;
    std::map<int, std::uint64_t> img_hist;
    for (auto& [o, c] : hist) img_hist[o] += c / td.d;
    rep.invariant_factors_match =
        img_hist == central_product_order_histogram(p - 1, (p * p - 1) / 2, td.d / 2 == 0 ? 1 : td.d / 2);

    // Delta: intersection of the cyclic action groups of tau and theta, as
    // generator-image tuples
    auto action_tuple = [&](const Mat& t) { return conj_gen_images(sys, t); };
    std::set<GenImageTuple> tau_pow, theta_pow;
    {
        Mat cur = td.tau;
        do {
            tau_pow.insert(action_tuple(cur));
            cur = mat_mul(fld, cur, td.tau);
        } while (!acts_trivially(sys, cur));
        tau_pow.insert(action_tuple(cur)); // identity tuple
        cur = td.theta;
        do {
            theta_pow.insert(action_tuple(cur));
            cur = mat_mul(fld, cur, td.theta);
        } while (!acts_trivially(sys, cur));
        theta_pow.insert(action_tuple(cur));
    }
    std::uint64_t delta = 0;
    for (auto& t : tau_pow)
        if (theta_pow.count(t)) ++delta;
    rep.delta_order = delta;

    // a diagonal acting as an inner automorphism must act trivially (scalars):
    // verified inside outer_order_check; record the direct statement here for
    // the members of D0 by reusing the bucket idea on the first generator.
    rep.inner_intersection_trivial = true;
    {
        const auto& S = sys.S;
        std::uint32_t g0 = S.gen_index(0);
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> bucket;
        for (std::uint32_t s = 0; s < S.size(); ++s) bucket[S.conj(g0, s)].push_back(s);
        std::vector<std::uint32_t> gen_idx;
        for (const Mat& g : sys.sylow_gens) gen_idx.push_back(S.index_of(g));
        for (const Mat& t : td.d0) {
            if (acts_trivially(sys, t)) continue;
            auto img = action_tuple(t);
            auto it = bucket.find(img[0]);
            if (it == bucket.end()) continue;
            for (std::uint32_t s : it->second) {
                bool match = true;
                for (size_t i = 1; i < gen_idx.size(); ++i)
                    if (S.conj(gen_idx[i], s) != img[i]) {
                        match = false;
                        break;
                    }
                if (match) rep.inner_intersection_trivial = false;
            }
        }
    }

    // action labels: x-hat acts on S/Q with order p-1 and trivially on Q/Phi(S);
    // y-hat the other way around, with a Singer action on Q/Phi(S).
    fel eta = find_primitive(fld);
    Mat xhat = diag4(fld, eta, eta, fld.inv(fld.frobenius(eta)), fld.inv(fld.frobenius(eta)));
    const Mat& yhat = td.singer;
    PrimeField fp(p);
    Mat x_on_top = section_action(sys, sys.whole, sys.Q, xhat);
    Mat x_on_qphi = section_action(sys, sys.Q, sys.Sder, xhat);
    Mat y_on_top = section_action(sys, sys.whole, sys.Q, yhat);
    Mat y_on_qphi = section_action(sys, sys.Q, sys.Sder, yhat);
    auto cp = char_poly(fp, y_on_qphi);
    bool has_root = false;
    for (int x = 0; x < p; ++x)
        if (poly_eval(fp, cp, static_cast<fel>(x)) == 0) has_root = true;
    rep.labels_match = matrix_order(fp, x_on_top, 4 * p) == p - 1 &&
                       x_on_qphi == mat_id(2) && y_on_top == mat_id(1) &&
                       matrix_order(fp, y_on_qphi, 4 * p * p) == p * p - 1 && !has_root;
    return rep;
}

// --- final counts ---------------------------------------------------------------------

// The quotient model of the full automorphism group by the inner simple part:
// C_2 x C_2 when p = 1 (mod 4), dihedral of order 8 when p = 3 (mod 4).
inline OuterModel build_quotient_model(int p) {
    OuterModel m;
    m.p = p;
    if (p % 4 == 1) {
        m.m1 = 2;
        m.m2 = 1;
    } else {
        m.m1 = 1;
        m.m2 = 4;
    }
    m.ops = DihedralProductTraits{m.m1, m.m2};
    std::vector<ModelElem> gens;
    if (m.m1 > 1) gens.push_back({1, 0, 0});
    if (m.m2 > 1) gens.push_back({0, 1, 0});
    gens.push_back({0, 0, 1});
    m.table = std::make_unique<ModelTable>(m.ops, gens);
    if (m.table->size() != (p % 4 == 1 ? 4u : 8u))
        throw ModelMismatch("quotient model order mismatch");
    return m;
}

struct FusionCountReport {
    int class_count = 0;     // conjugacy classes of subgroups of the quotient model
    int subgroup_count = 0;  // total subgroups
};

inline FusionCountReport fusion_count(int p) {
    OuterModel m = build_quotient_model(p);
    auto classes = subgroup_classes(*m.table, 1, m.table->size(), trivial_subgroup(),
                                    prime_divisors(m.table->size()));
    FusionCountReport rep;
    rep.class_count = static_cast<int>(classes.size());
    for (auto& c : classes) rep.subgroup_count += static_cast<int>(c.orbit_size);
    return rep;
}

} // namespace su4check
