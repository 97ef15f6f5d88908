// Enumerated finite-group machinery: BFS closure from generators with word
// tables, subgroup arithmetic (centers, derived and central series, Frattini
// subgroups), quotient views with elementary-abelian coordinates, subgroup
// enumeration up to conjugacy by cyclic extension, and isomorphism-type
// fingerprints for the small p-groups that occur here.
//
// Element order is deterministic: BFS by word length over the generator list,
// generators in their given order. All downstream element and subgroup
// indices are therefore reproducible bit-for-bit.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "su4check/field.hpp"
#include "su4check/linalg.hpp"

namespace su4check {

struct BudgetExceeded : std::runtime_error {
    std::uint64_t partial_count;
    BudgetExceeded(const std::string& what, std::uint64_t partial)
        : std::runtime_error(what), partial_count(partial) {}
};
struct NotNormalizing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstructionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultElementBudget = 20'000'000;

// --- element traits ----------------------------------------------------------

struct ByteKeyHash {
    template <size_t N>
    size_t operator()(const std::array<std::uint8_t, N>& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto b : k) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

// n x n matrices over GF(p^2), n <= 4; entry codes < 169 fit in a byte.
struct UnitaryMatTraits {
    const QuadExtField* fld = nullptr;
    int n = 4;
    using Elem = Mat;
    using Key = std::array<std::uint8_t, 16>;
    using KeyHash = ByteKeyHash;

    Elem identity() const { return mat_id(n); }
    Elem mul(const Elem& a, const Elem& b) const { return mat_mul(*fld, a, b); }
    Elem inv(const Elem& a) const { return mat_inv(*fld, a); }
    Key key(const Elem& a) const {
        Key k{};
        for (int i = 0; i < n * n; ++i) k[i] = static_cast<std::uint8_t>(a.e[i]);
        return k;
    }
};

// n x n matrices over GF(p), n <= 4; packed base-p into a u64.
struct PrimeMatTraits {
    const PrimeField* fld = nullptr;
    int n = 4;
    using Elem = Mat;
    using Key = std::uint64_t;
    struct KeyHash {
        size_t operator()(std::uint64_t k) const {
            k ^= k >> 33;
            k *= 0xff51afd7ed558ccdull;
            k ^= k >> 33;
            k *= 0xc4ceb9fe1a85ec53ull;
            k ^= k >> 33;
            return static_cast<size_t>(k);
        }
    };

    Elem identity() const { return mat_id(n); }
    Elem mul(const Elem& a, const Elem& b) const { return mat_mul(*fld, a, b); }
    Elem inv(const Elem& a) const { return mat_inv(*fld, a); }
    Key key(const Elem& a) const {
        std::uint64_t k = 0;
        for (int i = 0; i < n * n; ++i) k = k * fld->p + a.e[i];
        return k;
    }
};

// --- group table -------------------------------------------------------------

template <class Tr>
class GroupTable {
  public:
    using Elem = typename Tr::Elem;
    using Key = typename Tr::Key;

    GroupTable(Tr ops, std::vector<Elem> generators,
               std::uint64_t budget = kDefaultElementBudget)
        : ops_(std::move(ops)) {
        const Elem id = ops_.identity();
        push_elem(id, 0, 0);
        for (const Elem& g : generators) {
            gen_elems_.push_back(g);
            gen_inv_elems_.push_back(ops_.inv(g));
        }
        // BFS closure
        size_t head = 0;
        while (head < elems_.size()) {
            const Elem cur = elems_[head];
            for (size_t s = 0; s < gen_elems_.size(); ++s) {
                Elem nxt = ops_.mul(cur, gen_elems_[s]);
                Key k = ops_.key(nxt);
                auto it = index_.find(k);
                if (it == index_.end()) {
                    if (elems_.size() >= budget)
                        throw BudgetExceeded("closure budget exceeded", elems_.size());
                    push_elem(nxt, static_cast<std::uint32_t>(head),
                              static_cast<std::uint8_t>(s));
                }
            }
            ++head;
        }
        build_tables();
    }

    std::uint32_t size() const { return static_cast<std::uint32_t>(elems_.size()); }
    const Elem& elem(std::uint32_t i) const { return elems_[i]; }
    const Tr& ops() const { return ops_; }
    size_t gen_count() const { return gen_elems_.size(); }
    std::uint32_t gen_index(size_t s) const { return gen_idx_[s]; }

    std::uint32_t index_of(const Elem& e) const {
        auto it = index_.find(ops_.key(e));
        if (it == index_.end()) throw std::out_of_range("GroupTable: element not in group");
        return it->second;
    }
    std::optional<std::uint32_t> try_index_of(const Elem& e) const {
        auto it = index_.find(ops_.key(e));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // generator word of elem(i), reconstructed from the BFS parent links
    std::vector<std::uint8_t> word(std::uint32_t i) const {
        std::vector<std::uint8_t> w;
        while (i != 0) {
            w.push_back(via_[i]);
            i = parent_[i];
        }
        std::reverse(w.begin(), w.end());
        return w;
    }

    // x * elem(j), via the word of j
    std::uint32_t mul(std::uint32_t x, std::uint32_t j) const {
        std::uint8_t stack[kMaxWord];
        int len = word_into(j, stack);
        for (int k = 0; k < len; ++k) x = rmul_[stack[k]][x];
        return x;
    }
    std::uint32_t inv(std::uint32_t x) const { return inv_idx_[x]; }

    // elem(g)^-1 * x * elem(g)
    std::uint32_t conj(std::uint32_t x, std::uint32_t g) const {
        std::uint8_t stack[kMaxWord];
        int len = word_into(g, stack);
        for (int k = 0; k < len; ++k) x = linv_[stack[k]][rmul_[stack[k]][x]];
        return x;
    }
    std::uint32_t conj_by_gen(std::uint32_t x, std::uint8_t s) const {
        return linv_[s][rmul_[s][x]];
    }

    std::uint32_t pow(std::uint32_t x, long long e) const {
        if (e < 0) return pow(inv(x), -e);
        std::uint32_t r = 0;
        std::uint32_t b = x;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    int order_of(std::uint32_t x) const {
        int n = 1;
        std::uint32_t y = x;
        while (y != 0) {
            y = mul(y, x);
            ++n;
        }
        return n;
    }

    // a^-1 b^-1 a b
    std::uint32_t commutator(std::uint32_t a, std::uint32_t b) const {
        return mul(mul(mul(inv(a), inv(b)), a), b);
    }

  private:
    static constexpr int kMaxWord = 256;

    int word_into(std::uint32_t i, std::uint8_t* out) const {
        int len = 0;
        while (i != 0) {
            out[len++] = via_[i];
            i = parent_[i];
        }
        std::reverse(out, out + len);
        return len;
    }

    void push_elem(const Elem& e, std::uint32_t parent, std::uint8_t via) {
        std::uint32_t idx = static_cast<std::uint32_t>(elems_.size());
        elems_.push_back(e);
        index_.emplace(ops_.key(e), idx);
        parent_.push_back(parent);
        via_.push_back(via);
        if (idx != 0 && word_len_[parent] + 1 > kMaxWord)
            throw BudgetExceeded("closure word-length cap exceeded", idx);
        word_len_.push_back(idx == 0 ? 0 : word_len_[parent] + 1);
    }

    void build_tables() {
        const size_t n = elems_.size();
        const size_t ng = gen_elems_.size();
        rmul_.assign(ng, {});
        linv_.assign(ng, {});
        for (size_t s = 0; s < ng; ++s) {
            rmul_[s].resize(n);
            linv_[s].resize(n);
            for (size_t i = 0; i < n; ++i) {
                rmul_[s][i] = index_.at(ops_.key(ops_.mul(elems_[i], gen_elems_[s])));
                linv_[s][i] = index_.at(ops_.key(ops_.mul(gen_inv_elems_[s], elems_[i])));
            }
        }
        inv_idx_.resize(n);
        for (size_t i = 0; i < n; ++i) inv_idx_[i] = index_.at(ops_.key(ops_.inv(elems_[i])));
        gen_idx_.resize(ng);
        for (size_t s = 0; s < ng; ++s) gen_idx_[s] = index_.at(ops_.key(gen_elems_[s]));
    }

    Tr ops_;
    std::vector<Elem> elems_;
    std::unordered_map<Key, std::uint32_t, typename Tr::KeyHash> index_;
    std::vector<Elem> gen_elems_, gen_inv_elems_;
    std::vector<std::uint32_t> gen_idx_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> via_;
    std::vector<std::uint16_t> word_len_;
    std::vector<std::vector<std::uint32_t>> rmul_, linv_;
    std::vector<std::uint32_t> inv_idx_;
};

// --- subgroups ----------------------------------------------------------------

struct Subgroup {
    std::vector<std::uint32_t> elems; // sorted element indices
    std::vector<std::uint32_t> gens;  // generating element indices (not minimal in general)

    std::uint64_t order() const { return elems.size(); }
    bool contains(std::uint32_t x) const {
        return std::binary_search(elems.begin(), elems.end(), x);
    }
    bool operator==(const Subgroup& o) const { return elems == o.elems; }
};

template <class Tr>
Subgroup closure_within(const GroupTable<Tr>& G, std::vector<std::uint32_t> seed) {
    std::vector<std::uint32_t> frontier{0};
    std::unordered_set<std::uint32_t> seen{0};
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    for (std::uint32_t s : seed) {
        if (seen.insert(s).second) frontier.push_back(s);
    }
    size_t head = 0;
    while (head < frontier.size()) {
        std::uint32_t cur = frontier[head++];
        for (std::uint32_t s : seed) {
            std::uint32_t nxt = G.mul(cur, s);
            if (seen.insert(nxt).second) frontier.push_back(nxt);
        }
    }
    Subgroup H;
    H.elems.assign(seen.begin(), seen.end());
    std::sort(H.elems.begin(), H.elems.end());
    H.gens = seed;
    return H;
}

template <class Tr>
Subgroup whole_group(const GroupTable<Tr>& G) {
    Subgroup H;
    H.elems.resize(G.size());
    for (std::uint32_t i = 0; i < G.size(); ++i) H.elems[i] = i;
    for (size_t s = 0; s < G.gen_count(); ++s) H.gens.push_back(G.gen_index(s));
    return H;
}

inline Subgroup trivial_subgroup() {
    Subgroup H;
    H.elems = {0};
    return H;
}

// Greedy generating set (small, not guaranteed minimal).
template <class Tr>
std::vector<std::uint32_t> extract_generators(const GroupTable<Tr>& G, const Subgroup& H) {
    std::vector<std::uint32_t> gens;
    std::unordered_set<std::uint32_t> span{0};
    std::vector<std::uint32_t> frontier{0};
    for (std::uint32_t x : H.elems) {
        if (span.count(x)) continue;
        gens.push_back(x);
        // re-close
        span.clear();
        span.insert(0);
        frontier.assign(1, 0);
        size_t head = 0;
        while (head < frontier.size()) {
            std::uint32_t cur = frontier[head++];
            for (std::uint32_t g : gens) {
                std::uint32_t nxt = G.mul(cur, g);
                if (span.insert(nxt).second) frontier.push_back(nxt);
            }
        }
        if (span.size() == H.elems.size()) break;
    }
    return gens;
}

template <class Tr>
Subgroup with_generators(const GroupTable<Tr>& G, Subgroup H) {
    if (H.gens.empty() && H.elems.size() > 1) H.gens = extract_generators(G, H);
    return H;
}

// Elements of `domain` commuting with every element of `target` (via target's gens).
template <class Tr>
Subgroup centralizer_in(const GroupTable<Tr>& G, const Subgroup& domain, const Subgroup& target) {
    std::vector<std::uint32_t> tg = target.gens;
    if (tg.empty()) tg = extract_generators(G, target);
    std::vector<std::uint32_t> cur = domain.elems;
    for (std::uint32_t g : tg) {
        std::vector<std::uint32_t> nxt;
        nxt.reserve(cur.size());
        for (std::uint32_t x : cur) {
            if (G.mul(x, g) == G.mul(g, x)) nxt.push_back(x);
        }
        cur.swap(nxt);
    }
    Subgroup C;
    C.elems = std::move(cur);
    return with_generators(G, C);
}

template <class Tr>
Subgroup center(const GroupTable<Tr>& G, const Subgroup& H) {
    return centralizer_in(G, H, H);
}

template <class Tr>
bool is_abelian(const GroupTable<Tr>& G, const Subgroup& H) {
    std::vector<std::uint32_t> gens = H.gens.empty() ? extract_generators(G, H) : H.gens;
    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = i + 1; j < gens.size(); ++j)
            if (G.mul(gens[i], gens[j]) != G.mul(gens[j], gens[i])) return false;
    return true;
}

// Normal closure of <seed> in H.
template <class Tr>
Subgroup normal_closure(const GroupTable<Tr>& G, const Subgroup& H, std::vector<std::uint32_t> seed) {
    std::vector<std::uint32_t> hgens = H.gens.empty() ? extract_generators(G, H) : H.gens;
    std::unordered_set<std::uint32_t> gen_set(seed.begin(), seed.end());
    gen_set.erase(0);
    while (true) {
        Subgroup K = closure_within(G, {gen_set.begin(), gen_set.end()});
        bool grew = false;
        for (std::uint32_t k : K.gens) {
            for (std::uint32_t h : hgens) {
                std::uint32_t c = G.conj(k, h); // h^-1 k h
                if (!K.contains(c) && gen_set.insert(c).second) grew = true;
            }
        }
        if (!grew) return K;
    }
}

template <class Tr>
Subgroup derived_subgroup(const GroupTable<Tr>& G, const Subgroup& H) {
    std::vector<std::uint32_t> gens = H.gens.empty() ? extract_generators(G, H) : H.gens;
    std::vector<std::uint32_t> comms;
    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = 0; j < gens.size(); ++j)
            if (i != j) comms.push_back(G.commutator(gens[i], gens[j]));
    return normal_closure(G, H, comms);
}

// [A, H] as a subgroup of H (normal closure of generator commutators).
template <class Tr>
Subgroup commutator_subgroup(const GroupTable<Tr>& G, const Subgroup& H, const Subgroup& A) {
    std::vector<std::uint32_t> ag = A.gens.empty() ? extract_generators(G, A) : A.gens;
    std::vector<std::uint32_t> hg = H.gens.empty() ? extract_generators(G, H) : H.gens;
    std::vector<std::uint32_t> comms;
    for (std::uint32_t a : ag)
        for (std::uint32_t h : hg) comms.push_back(G.commutator(a, h));
    return normal_closure(G, H, comms);
}

template <class Tr>
int exponent_of(const GroupTable<Tr>& G, const Subgroup& H) {
    int e = 1;
    for (std::uint32_t x : H.elems) e = std::lcm(e, G.order_of(x));
    return e;
}

// Frattini subgroup of a p-group: derived subgroup together with p-th powers.
template <class Tr>
Subgroup frattini(const GroupTable<Tr>& G, const Subgroup& H, int p) {
    Subgroup D = derived_subgroup(G, H);
    std::vector<std::uint32_t> seed = D.gens;
    std::vector<std::uint32_t> hg = H.gens.empty() ? extract_generators(G, H) : H.gens;
    for (std::uint32_t g : hg) seed.push_back(G.pow(g, p));
    Subgroup F = closure_within(G, seed);
    // H/D is abelian, so D plus generator p-th powers already closes
    for (std::uint32_t d : D.elems)
        if (!F.contains(d)) throw ConstructionMismatch("frattini: derived not contained");
    return F;
}

template <class Tr>
std::vector<Subgroup> lower_central_series(const GroupTable<Tr>& G, const Subgroup& H) {
    std::vector<Subgroup> series{with_generators(G, H)};
    while (series.back().order() > 1) {
        Subgroup nxt = commutator_subgroup(G, H, series.back());
        if (nxt.order() == series.back().order()) break; // stabilized above 1
        series.push_back(std::move(nxt));
    }
    return series;
}

// Preimage in H of the center of H/B. B must be normal in H.
template <class Tr>
Subgroup center_preimage(const GroupTable<Tr>& G, const Subgroup& H, const Subgroup& B) {
    std::vector<std::uint32_t> hg = H.gens.empty() ? extract_generators(G, H) : H.gens;
    std::vector<std::uint32_t> sel;
    for (std::uint32_t x : H.elems) {
        bool central = true;
        for (std::uint32_t g : hg) {
            if (!B.contains(G.commutator(x, g))) {
                central = false;
                break;
            }
        }
        if (central) sel.push_back(x);
    }
    Subgroup Z2;
    Z2.elems = std::move(sel);
    return with_generators(G, Z2);
}

template <class Tr>
std::vector<Subgroup> upper_central_series(const GroupTable<Tr>& G, const Subgroup& H) {
    std::vector<Subgroup> series;
    Subgroup cur = trivial_subgroup();
    series.push_back(cur);
    while (true) {
        Subgroup nxt = center_preimage(G, H, series.back());
        if (nxt.order() == series.back().order()) break;
        series.push_back(nxt);
        if (series.back().order() == H.order()) break;
    }
    return series;
}

// Product AB as a subgroup (valid when one factor normalizes the other).
template <class Tr>
Subgroup subgroup_product(const GroupTable<Tr>& G, const Subgroup& A, const Subgroup& B) {
    std::vector<std::uint32_t> seed = A.gens.empty() ? extract_generators(G, A) : A.gens;
    std::vector<std::uint32_t> bg = B.gens.empty() ? extract_generators(G, B) : B.gens;
    seed.insert(seed.end(), bg.begin(), bg.end());
    Subgroup P = closure_within(G, seed);
    std::uint64_t inter = 0;
    for (std::uint32_t x : A.elems) inter += B.contains(x) ? 1 : 0;
    if (P.order() * inter != A.order() * B.order())
        throw ConstructionMismatch("subgroup_product: factors do not permute");
    return P;
}

template <class Tr>
Subgroup subgroup_intersection(const GroupTable<Tr>& G, const Subgroup& A, const Subgroup& B) {
    Subgroup I;
    for (std::uint32_t x : A.elems)
        if (B.contains(x)) I.elems.push_back(x);
    return with_generators(G, I);
}

template <class Tr>
Subgroup conjugate_subgroup(const GroupTable<Tr>& G, const Subgroup& H, std::uint32_t g) {
    Subgroup C;
    C.elems.reserve(H.elems.size());
    for (std::uint32_t x : H.elems) C.elems.push_back(G.conj(x, g));
    std::sort(C.elems.begin(), C.elems.end());
    for (std::uint32_t x : H.gens) C.gens.push_back(G.conj(x, g));
    return C;
}

// --- quotient views ------------------------------------------------------------

// Right-coset decomposition of A by a normal subgroup B, with deterministic
// coset numbering (coset reps are minimal element indices, increasing).
template <class Tr>
struct QuotientView {
    const GroupTable<Tr>* G = nullptr;
    const Subgroup* A = nullptr;
    std::vector<std::uint32_t> reps;
    std::unordered_map<std::uint32_t, std::uint32_t> coset_of;

    std::uint32_t size() const { return static_cast<std::uint32_t>(reps.size()); }
    std::uint32_t coset(std::uint32_t elem_idx) const { return coset_of.at(elem_idx); }
    std::uint32_t mult(std::uint32_t c1, std::uint32_t c2) const {
        return coset_of.at(G->mul(reps[c1], reps[c2]));
    }
    std::uint32_t inv(std::uint32_t c) const { return coset_of.at(G->inv(reps[c])); }
    int coset_order(std::uint32_t c) const {
        int n = 1;
        std::uint32_t x = c;
        while (x != 0) {
            x = mult(x, c);
            ++n;
        }
        return n;
    }
};

template <class Tr>
QuotientView<Tr> quotient_view(const GroupTable<Tr>& G, const Subgroup& A, const Subgroup& B) {
    // verify B normal in A
    std::vector<std::uint32_t> ag = A.gens.empty() ? extract_generators(G, A) : A.gens;
    std::vector<std::uint32_t> bg = B.gens.empty() ? extract_generators(G, B) : B.gens;
    for (std::uint32_t g : ag)
        for (std::uint32_t b : bg)
            if (!B.contains(G.conj(b, g)))
                throw NotNormalizing("quotient_view: subgroup not normal");
    QuotientView<Tr> Q;
    Q.G = &G;
    Q.A = &A;
    for (std::uint32_t e : A.elems) {
        if (Q.coset_of.count(e)) continue;
        std::uint32_t cid = static_cast<std::uint32_t>(Q.reps.size());
        Q.reps.push_back(e);
        for (std::uint32_t b : B.elems) Q.coset_of.emplace(G.mul(b, e), cid);
    }
    return Q;
}

// Coordinates on an elementary abelian quotient (a GF(p)-vector space).
template <class Tr>
struct ElemAbCoords {
    int p = 0;
    int dim = 0;
    std::vector<std::uint32_t> basis_cosets;
    std::vector<std::array<std::uint8_t, kMaxDim>> coord_of_coset;
};

template <class Tr>
ElemAbCoords<Tr> elementary_coordinates(const QuotientView<Tr>& Q, int p) {
    ElemAbCoords<Tr> C;
    C.p = p;
    std::uint32_t m = Q.size();
    for (std::uint32_t c = 0; c < m; ++c) {
        if (Q.coset_order(c) > p || (c != 0 && Q.coset_order(c) == 1))
            throw ConstructionMismatch("elementary_coordinates: not exponent p");
    }
    C.coord_of_coset.assign(m, {});
    std::vector<bool> in_span(m, false);
    in_span[0] = true;
    std::vector<std::uint32_t> span{0};
    for (std::uint32_t c = 0; c < m; ++c) {
        if (in_span[c]) continue;
        if (C.dim >= kMaxDim) throw ConstructionMismatch("elementary_coordinates: dim > 6");
        int d = C.dim++;
        C.basis_cosets.push_back(c);
        std::vector<std::uint32_t> fresh;
        for (std::uint32_t s : span) {
            std::uint32_t cur = s;
            for (int k = 1; k < p; ++k) {
                cur = Q.mult(cur, c);
                if (in_span[cur]) throw ConstructionMismatch("elementary_coordinates: not abelian/free");
                in_span[cur] = true;
                C.coord_of_coset[cur] = C.coord_of_coset[s];
                C.coord_of_coset[cur][d] = static_cast<std::uint8_t>(k);
                fresh.push_back(cur);
            }
        }
        span.insert(span.end(), fresh.begin(), fresh.end());
    }
    if (span.size() != m) throw ConstructionMismatch("elementary_coordinates: span mismatch");
    for (size_t i = 0; i < C.basis_cosets.size(); ++i)
        for (size_t j = i + 1; j < C.basis_cosets.size(); ++j)
            if (Q.mult(C.basis_cosets[i], C.basis_cosets[j]) !=
                Q.mult(C.basis_cosets[j], C.basis_cosets[i]))
                throw ConstructionMismatch("elementary_coordinates: quotient not abelian");
    return C;
}

// Matrix (over GF(p), acting on row vectors) of an index-map on the quotient.
// `f` maps element indices and must preserve A and B setwise.
template <class Tr, class IndexMap>
Mat quotient_action_matrix(const QuotientView<Tr>& Q, const ElemAbCoords<Tr>& C, IndexMap&& f) {
    Mat m = mat_zero(C.dim);
    for (int i = 0; i < C.dim; ++i) {
        std::uint32_t rep = Q.reps[C.basis_cosets[i]];
        std::uint32_t img = f(rep);
        auto it = Q.coset_of.find(img);
        if (it == Q.coset_of.end()) throw NotNormalizing("quotient_action_matrix: image leaves subgroup");
        auto coords = C.coord_of_coset[it->second];
        for (int j = 0; j < C.dim; ++j) m.at(i, j) = coords[j];
    }
    return m;
}

// Convenience: action of conjugation by group element g on A/B, as a matrix.
// Throws NotNormalizing if g does not normalize A and B.
template <class Tr>
Mat conjugation_action_matrix(const GroupTable<Tr>& G, const QuotientView<Tr>& Q,
                              const ElemAbCoords<Tr>& C, const Subgroup& A, const Subgroup& B,
                              std::uint32_t g) {
    for (std::uint32_t x : A.gens)
        if (!A.contains(G.conj(x, g))) throw NotNormalizing("conjugation does not normalize subgroup");
    for (std::uint32_t x : B.gens)
        if (!B.contains(G.conj(x, g))) throw NotNormalizing("conjugation does not normalize kernel");
    return quotient_action_matrix(Q, C, [&](std::uint32_t x) { return G.conj(x, g); });
}

template <class F>
int matrix_order(const F& fld, const Mat& m, int cap = 1 << 20) {
    Mat id = mat_id(m.n);
    Mat x = m;
    int n = 1;
    while (x != id) {
        x = mat_mul(fld, x, m);
        ++n;
        if (n > cap) throw ConstructionMismatch("matrix_order: cap exceeded");
    }
    return n;
}

// --- subgroup classes ----------------------------------------------------------

inline std::pair<std::uint64_t, std::uint64_t> subgroup_hash128(const std::vector<std::uint32_t>& v) {
    std::uint64_t h1 = 1469598103934665603ull, h2 = 0x9e3779b97f4a7c15ull;
    for (std::uint32_t x : v) {
        h1 = (h1 ^ x) * 1099511628211ull;
        h2 ^= x + 0x9e3779b97f4a7c15ull + (h2 << 6) + (h2 >> 2);
    }
    return {h1, h2};
}

struct Hash128Hasher {
    size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
        return static_cast<size_t>(k.first ^ (k.second * 0x9e3779b97f4a7c15ull));
    }
};

struct SubgroupClass {
    Subgroup rep;                 // canonical representative (orbit-minimal element set)
    std::uint64_t order = 0;
    std::uint64_t orbit_size = 0; // index of the normalizer
    std::uint64_t normalizer_order = 0;
};

// Canonical form of the conjugacy class of H: the lexicographically least
// sorted element vector over the orbit, plus the orbit itself (as hashes).
template <class Tr>
struct CanonicalClass {
    std::vector<std::uint32_t> canonical;
    std::uint32_t to_canonical = 0; // group element conjugating the input onto `canonical`
    std::uint64_t orbit_size = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> orbit_hashes;
};

template <class Tr>
CanonicalClass<Tr> canonicalize_class(const GroupTable<Tr>& G, const std::vector<std::uint32_t>& elems) {
    CanonicalClass<Tr> out;
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t, Hash128Hasher> seen;
    std::vector<std::vector<std::uint32_t>> orbit{elems};
    std::vector<std::uint32_t> conjugator{0}; // orbit[i] = elems ^ conjugator[i]
    seen.emplace(subgroup_hash128(elems), 0);
    out.canonical = elems;
    out.to_canonical = 0;
    size_t head = 0;
    while (head < orbit.size()) {
        std::vector<std::uint32_t> cur = orbit[head];
        std::uint32_t t = conjugator[head];
        ++head;
        for (size_t s = 0; s < G.gen_count(); ++s) {
            std::vector<std::uint32_t> img(cur.size());
            for (size_t i = 0; i < cur.size(); ++i)
                img[i] = G.conj_by_gen(cur[i], static_cast<std::uint8_t>(s));
            std::sort(img.begin(), img.end());
            auto h = subgroup_hash128(img);
            if (seen.emplace(h, 1).second) {
                std::uint32_t tg = G.mul(t, G.gen_index(s));
                if (img < out.canonical) {
                    out.canonical = img;
                    out.to_canonical = tg;
                }
                orbit.push_back(std::move(img));
                conjugator.push_back(tg);
            }
        }
    }
    out.orbit_size = orbit.size();
    out.orbit_hashes.reserve(seen.size());
    for (auto& [h, _] : seen) out.orbit_hashes.push_back(h);
    return out;
}

// Normalizer via orbit-stabilizer with Schreier generators.
template <class Tr>
Subgroup normalizer_of(const GroupTable<Tr>& G, const Subgroup& H) {
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t, Hash128Hasher> member;
    std::vector<std::vector<std::uint32_t>> orbit{H.elems};
    std::vector<std::uint32_t> transversal{0};
    member.emplace(subgroup_hash128(H.elems), 0);
    std::vector<std::uint32_t> schreier;
    size_t head = 0;
    while (head < orbit.size()) {
        std::vector<std::uint32_t> cur = orbit[head];
        std::uint32_t t = transversal[head];
        ++head;
        for (size_t s = 0; s < G.gen_count(); ++s) {
            std::vector<std::uint32_t> img(cur.size());
            for (size_t i = 0; i < cur.size(); ++i)
                img[i] = G.conj_by_gen(cur[i], static_cast<std::uint8_t>(s));
            std::sort(img.begin(), img.end());
            auto h = subgroup_hash128(img);
            auto it = member.find(h);
            std::uint32_t tg = G.mul(t, G.gen_index(s));
            if (it == member.end()) {
                member.emplace(h, static_cast<std::uint32_t>(orbit.size()));
                orbit.push_back(std::move(img));
                transversal.push_back(tg);
            } else {
                // schreier generator: t * g * transversal[it]^-1
                std::uint32_t sg = G.mul(tg, G.inv(transversal[it->second]));
                if (sg != 0) schreier.push_back(sg);
            }
        }
    }
    std::uint64_t target = G.size() / orbit.size();
    std::vector<std::uint32_t> gens;
    Subgroup N = H; // H <= N_G(H)
    for (std::uint32_t sg : schreier) {
        if (N.order() >= target) break;
        if (N.contains(sg)) continue;
        gens = N.gens;
        gens.push_back(sg);
        N = closure_within(G, gens);
    }
    if (N.order() != target)
        throw ConstructionMismatch("normalizer_of: schreier closure mismatch");
    return N;
}

// All subgroup classes with order in [min_order, max_order] containing
// `must_contain` (a normal subgroup of G), by upward cyclic extension over the
// prime divisors in `primes`, deduplicated under G-conjugacy.
template <class Tr>
std::vector<SubgroupClass> subgroup_classes(const GroupTable<Tr>& G,
                                            std::uint64_t min_order, std::uint64_t max_order,
                                            const Subgroup& must_contain,
                                            const std::vector<int>& primes,
                                            std::uint64_t class_budget = 2'000'000) {
    std::vector<SubgroupClass> out;
    // canonical-key -> already seen class; exact-hash memo covers whole orbits
    std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, Hash128Hasher> seen_exact;
    struct WorkItem {
        Subgroup rep;
    };
    std::vector<WorkItem> level;
    Subgroup base = must_contain;
    if (base.elems.empty()) base = trivial_subgroup();
    base = with_generators(G, base);
    {
        auto canon = canonicalize_class(G, base.elems);
        if (canon.orbit_size != 1)
            throw NotNormalizing("subgroup_classes: must_contain is not normal");
        for (auto& h : canon.orbit_hashes) seen_exact.insert(h);
        level.push_back({base});
        if (base.order() >= min_order && base.order() <= max_order) {
            SubgroupClass c;
            c.rep = base;
            c.order = base.order();
            c.orbit_size = 1;
            c.normalizer_order = G.size();
            out.push_back(std::move(c));
        }
    }
    std::uint64_t classes_seen = 1;
    while (!level.empty()) {
        std::vector<WorkItem> next;
        for (const WorkItem& item : level) {
            const Subgroup& K = item.rep;
            bool extend = false;
            for (int q : primes)
                if (K.order() * q <= max_order) extend = true;
            if (!extend) continue;
            Subgroup N = normalizer_of(G, K);
            QuotientView<Tr> Q = quotient_view(G, N, K);
            for (int q : primes) {
                if (K.order() * q > max_order) continue;
                for (std::uint32_t c = 1; c < Q.size(); ++c) {
                    std::uint32_t r = Q.reps[c];
                    // coset of prime order q <=> r outside K with r^q inside
                    if (!K.contains(G.pow(r, q))) continue;
                    // K' = K<r>, order q*|K|
                    std::vector<std::uint32_t> ext = K.elems;
                    std::uint32_t rj = r;
                    for (int j = 1; j < q; ++j) {
                        for (std::uint32_t k : K.elems) ext.push_back(G.mul(k, rj));
                        rj = G.mul(rj, r);
                    }
                    std::sort(ext.begin(), ext.end());
                    auto h = subgroup_hash128(ext);
                    if (!seen_exact.insert(h).second) continue;
                    auto canon = canonicalize_class(G, ext);
                    bool fresh = false;
                    for (auto& oh : canon.orbit_hashes)
                        if (seen_exact.insert(oh).second) fresh = true;
                    // the rep's own hash was inserted above; class is new iff
                    // no other orbit member was seen before
                    if (canon.orbit_size > 1 && !fresh) continue;
                    if (++classes_seen > class_budget)
                        throw BudgetExceeded("subgroup_classes budget", classes_seen);
                    Subgroup rep;
                    rep.elems = std::move(canon.canonical);
                    // generators: K's generators and r, conjugated onto the rep
                    for (std::uint32_t g : K.gens)
                        rep.gens.push_back(G.conj(g, canon.to_canonical));
                    rep.gens.push_back(G.conj(r, canon.to_canonical));
                    if (rep.order() >= min_order && rep.order() <= max_order) {
                        SubgroupClass cls;
                        cls.rep = rep;
                        cls.order = rep.order();
                        cls.orbit_size = canon.orbit_size;
                        cls.normalizer_order = G.size() / canon.orbit_size;
                        out.push_back(cls);
                    }
                    next.push_back({std::move(rep)});
                }
            }
        }
        level.swap(next);
    }
    std::sort(out.begin(), out.end(), [](const SubgroupClass& a, const SubgroupClass& b) {
        if (a.order != b.order) return a.order < b.order;
        return a.rep.elems < b.rep.elems;
    });
    return out;
}

// Maximal subgroups of a p-group: preimages of the hyperplanes of H/Phi(H).
// Generators are assembled from Frattini generators plus preimages of a basis
// of each hyperplane, so no generator extraction pass is needed. Kernel
// membership is decided once per Frattini coset, then elements are copied in
// one pass, which keeps them sorted for free.
template <class Tr>
std::vector<Subgroup> maximal_subgroups(const GroupTable<Tr>& G, const Subgroup& H, int p) {
    Subgroup Phi = frattini(G, H, p);
    if (Phi.gens.empty() && Phi.order() > 1) Phi.gens = extract_generators(G, Phi);
    QuotientView<Tr> Q = quotient_view(G, H, Phi);
    ElemAbCoords<Tr> C = elementary_coordinates(Q, p);
    const int d = C.dim;
    PrimeField f(p);
    std::vector<std::uint32_t> coset_of_elem(H.elems.size());
    for (size_t t = 0; t < H.elems.size(); ++t) coset_of_elem[t] = Q.coset(H.elems[t]);
    // element realizing a given coordinate vector
    auto realize = [&](const std::array<fel, kMaxDim>& v) {
        std::uint32_t x = 0;
        for (int i = 0; i < d; ++i)
            if (v[i] != 0) x = G.mul(x, G.pow(Q.reps[C.basis_cosets[i]], v[i]));
        return x;
    };
    std::vector<Subgroup> out;
    std::vector<char> in_kernel(Q.size());
    std::vector<fel> a(d, 0);
    for (int lead = 0; lead < d; ++lead) {
        std::fill(a.begin(), a.end(), 0);
        a[lead] = 1;
        while (true) {
            for (std::uint32_t c = 0; c < Q.size(); ++c) {
                fel s = 0;
                for (int i = 0; i < d; ++i) s = f.add(s, f.mul(a[i], C.coord_of_coset[c][i]));
                in_kernel[c] = s == 0;
            }
            Subgroup M;
            M.elems.reserve(H.elems.size() / p);
            for (size_t t = 0; t < H.elems.size(); ++t)
                if (in_kernel[coset_of_elem[t]]) M.elems.push_back(H.elems[t]);
            M.gens = Phi.gens;
            // kernel basis: for each non-lead coordinate j, vector e_j - a_j * e_lead
            for (int j = 0; j < d; ++j) {
                if (j == lead) continue;
                std::array<fel, kMaxDim> v{};
                v[j] = 1;
                v[lead] = f.neg(a[j]);
                M.gens.push_back(realize(v));
            }
            out.push_back(std::move(M));
            int pos = lead + 1;
            while (pos < d) {
                int v = a[pos] + 1;
                if (v < p) {
                    a[pos] = static_cast<fel>(v);
                    break;
                }
                a[pos] = 0;
                ++pos;
            }
            if (pos >= d) break;
        }
    }
    std::sort(out.begin(), out.end(), [](const Subgroup& x, const Subgroup& y) { return x.elems < y.elems; });
    return out;
}

// Conjugacy classes of all subgroups of index p^2 (plus nothing else), found by
// descending two hyperplane levels from the whole group. Used for the scans
// that need every subgroup of order |G|/p^2.
template <class Tr>
std::vector<SubgroupClass> index_p2_classes(const GroupTable<Tr>& G, int p) {
    Subgroup whole = whole_group(G);
    std::vector<Subgroup> maxes = maximal_subgroups(G, whole, p);
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t, Hash128Hasher> uniq;
    std::vector<Subgroup> subs;
    for (const Subgroup& M : maxes) {
        for (Subgroup& K : maximal_subgroups(G, M, p)) {
            auto h = subgroup_hash128(K.elems);
            if (uniq.emplace(h, static_cast<std::uint32_t>(subs.size())).second)
                subs.push_back(std::move(K));
        }
    }
    // conjugacy classes via union-find over generator conjugation
    std::vector<std::uint32_t> parent(subs.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<std::uint32_t>(i);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (size_t i = 0; i < subs.size(); ++i) {
        for (size_t s = 0; s < G.gen_count(); ++s) {
            std::vector<std::uint32_t> img(subs[i].elems.size());
            for (size_t t = 0; t < img.size(); ++t)
                img[t] = G.conj_by_gen(subs[i].elems[t], static_cast<std::uint8_t>(s));
            std::sort(img.begin(), img.end());
            auto it = uniq.find(subgroup_hash128(img));
            if (it == uniq.end())
                throw ConstructionMismatch("index_p2_classes: conjugate escaped enumeration");
            std::uint32_t a = find(static_cast<std::uint32_t>(i)), b = find(it->second);
            if (a != b) parent[a] = b;
        }
    }
    std::map<std::uint32_t, std::vector<std::uint32_t>> comps;
    for (size_t i = 0; i < subs.size(); ++i) comps[find(static_cast<std::uint32_t>(i))].push_back(static_cast<std::uint32_t>(i));
    std::vector<SubgroupClass> out;
    for (auto& [root, members] : comps) {
        std::uint32_t best = members.front();
        for (std::uint32_t m : members)
            if (subs[m].elems < subs[best].elems) best = m;
        SubgroupClass c;
        c.rep = subs[best];
        c.order = c.rep.order();
        c.orbit_size = members.size();
        c.normalizer_order = G.size() / members.size();
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const SubgroupClass& a, const SubgroupClass& b) {
        return a.rep.elems < b.rep.elems;
    });
    return out;
}

// --- isomorphism fingerprints ----------------------------------------------------

struct GroupInvariants {
    std::uint64_t order = 0;
    int exponent = 0;
    std::uint64_t center_order = 0;
    std::uint64_t derived_order = 0;
    std::uint64_t frattini_order = 0;
    bool abelian = false;
    std::map<int, std::uint64_t> order_histogram;
};

template <class Tr>
GroupInvariants group_invariants(const GroupTable<Tr>& G, const Subgroup& H, int p) {
    GroupInvariants v;
    v.order = H.order();
    for (std::uint32_t x : H.elems) {
        int o = G.order_of(x);
        v.exponent = std::lcm(v.exponent == 0 ? 1 : v.exponent, o);
        v.order_histogram[o]++;
    }
    Subgroup Hg = with_generators(G, H);
    v.center_order = center(G, Hg).order();
    v.derived_order = derived_subgroup(G, Hg).order();
    v.frattini_order = frattini(G, Hg, p).order();
    v.abelian = v.center_order == v.order;
    return v;
}

// Labels for the isomorphism types occurring in the scans; the invariant
// vector separates all of them.
inline std::string fingerprint_label(const GroupInvariants& v, int p) {
    auto is_pow = [&](std::uint64_t x, int k) {
        std::uint64_t t = 1;
        for (int i = 0; i < k; ++i) t *= static_cast<std::uint64_t>(p);
        return x == t;
    };
    if (v.abelian && v.exponent == p) {
        int k = 0;
        std::uint64_t t = v.order;
        while (t > 1) {
            t /= static_cast<std::uint64_t>(p);
            ++k;
        }
        return "elementary-abelian p^" + std::to_string(k);
    }
    if (v.abelian) {
        // cyclic factors from the order-dividing counts in the histogram
        std::vector<std::uint64_t> cnt{1};
        std::uint64_t pk = 1;
        while (cnt.back() < v.order) {
            pk *= static_cast<std::uint64_t>(p);
            std::uint64_t c = 0;
            for (auto& [o, n] : v.order_histogram)
                if (pk % static_cast<std::uint64_t>(o) == 0) c += n;
            cnt.push_back(c);
        }
        std::vector<int> sums, lambda;
        for (auto c : cnt) {
            int e = 0;
            while (c > 1) {
                c /= p;
                ++e;
            }
            sums.push_back(e);
        }
        for (size_t k = 1; k < sums.size(); ++k) {
            int ge = sums[k] - sums[k - 1];
            while (static_cast<int>(lambda.size()) < ge) lambda.push_back(0);
            for (int t = 0; t < ge; ++t) lambda[t]++;
        }
        std::string label = "abelian";
        std::sort(lambda.rbegin(), lambda.rend());
        for (int e : lambda) {
            std::uint64_t f = 1;
            for (int t = 0; t < e; ++t) f *= static_cast<std::uint64_t>(p);
            label += " C_" + std::to_string(f);
        }
        return label;
    }
    if (is_pow(v.order, 4) && is_pow(v.center_order, 2) && v.derived_order == static_cast<std::uint64_t>(p)) {
        if (v.exponent == p) return "p+^(1+2) x C_p";
        return "p+^(1+2) o C_(p^2)";
    }
    if (is_pow(v.order, 5) && v.center_order == static_cast<std::uint64_t>(p) &&
        v.derived_order == static_cast<std::uint64_t>(p) &&
        v.frattini_order == static_cast<std::uint64_t>(p) && v.exponent == p)
        return "extraspecial p+^(1+4)";
    return "unknown";
}

// Invariant factors of an abelian subgroup (d_1 | d_2 | ...), via counts of
// elements of order dividing each prime power.
template <class Tr>
std::vector<std::uint64_t> abelian_invariant_factors(const GroupTable<Tr>& G, const Subgroup& H) {
    if (!is_abelian(G, const_cast<Subgroup&>(H)))
        throw std::invalid_argument("abelian_invariant_factors: not abelian");
    std::uint64_t n = H.order();
    std::vector<int> primes;
    {
        std::uint64_t t = n;
        for (int q = 2; static_cast<std::uint64_t>(q) * q <= t; ++q)
            if (t % q == 0) {
                primes.push_back(q);
                while (t % q == 0) t /= q;
            }
        if (t > 1) primes.push_back(static_cast<int>(t));
    }
    // per-prime partition lambda_1 >= lambda_2 >= ... from order-dividing counts
    std::map<int, std::vector<int>> partitions;
    for (int q : primes) {
        std::vector<std::uint64_t> cnt; // cnt[k] = #{x : x^(q^k) = 1} = q^(sum min(lambda_i, k))
        cnt.push_back(1);
        std::uint64_t qk = 1;
        while (true) {
            qk *= static_cast<std::uint64_t>(q);
            std::uint64_t c = 0;
            for (std::uint32_t x : H.elems) {
                std::uint64_t o = static_cast<std::uint64_t>(G.order_of(x));
                if (qk % o == 0) ++c;
            }
            cnt.push_back(c);
            if (c == cnt[cnt.size() - 2]) break;
        }
        // sum_i min(lambda_i, k) = log_q cnt[k]
        std::vector<int> sums;
        for (auto c : cnt) {
            int e = 0;
            while (c > 1) {
                c /= q;
                ++e;
            }
            sums.push_back(e);
        }
        std::vector<int> ge; // ge[k] = #{i : lambda_i >= k}
        for (size_t k = 1; k < sums.size(); ++k) ge.push_back(sums[k] - sums[k - 1]);
        std::vector<int> lambda;
        for (size_t i = 0; i < ge.size(); ++i) {
            int count_ge = ge[i];
            while (static_cast<int>(lambda.size()) < count_ge) lambda.push_back(0);
            for (int t = 0; t < count_ge; ++t) lambda[t]++;
        }
        std::sort(lambda.rbegin(), lambda.rend());
        partitions[q] = lambda;
    }
    size_t parts = 0;
    for (auto& [q, lam] : partitions) parts = std::max(parts, lam.size());
    std::vector<std::uint64_t> factors(parts, 1);
    for (auto& [q, lam] : partitions) {
        for (size_t i = 0; i < lam.size(); ++i) {
            std::uint64_t qe = 1;
            for (int t = 0; t < lam[i]; ++t) qe *= static_cast<std::uint64_t>(q);
            factors[i] *= qe; // align largest with largest
        }
    }
    std::sort(factors.begin(), factors.end());
    factors.erase(std::remove(factors.begin(), factors.end(), 1ull), factors.end());
    return factors; // increasing, d_1 | d_2 | ... by construction
}

} // namespace su4check
