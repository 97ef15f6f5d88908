// Explicit construction of a Sylow p-subgroup S of SU_4(p) and the subgroups
// attached to it: the center, the derived subgroup, the unique extraspecial
// maximal subgroup, the unique abelian subgroup of order p^4, the family of
// subgroups strictly between that abelian subgroup and S, the diagonal torus
// and its GU_4(p) extension, and the SL_2(p)-shaped Levi block.
//
// The ambient Hermitian form is the anti-diagonal identity over GF(p^2); S is
// the full group of lower unitriangular matrices preserving it, obtained by
// solving the entry constraints in closed form:
//
//   g = [[1,0,0,0],[a,1,0,0],[b,c,1,0],[d,e,f,1]]  with
//   f = -a^p,  c + c^p = 0,  e = -b^p + a^p c^p,  d + d^p = -(f e^p + e f^p).
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "su4check/field.hpp"
#include "su4check/groupkit.hpp"
#include "su4check/linalg.hpp"

namespace su4check {

inline std::uint64_t upow4(int p) {
    std::uint64_t q = p;
    return q * q * q * q;
}

inline Mat hermitian_form(int n = 4) {
    Mat f = mat_zero(n);
    for (int i = 0; i < n; ++i) f.at(i, n - 1 - i) = 1;
    return f;
}

inline bool is_unitary(const QuadExtField& fld, const Mat& m, const Mat& form) {
    Mat rhs = mat_mul(fld, m, mat_mul(fld, form, mat_transpose(mat_frobenius(fld, m))));
    return rhs == form;
}

// Lower unitriangular unitary matrix from the free parameters (a, b, c, d).
// Preconditions: trace(c) = 0 and trace(d) = -trace(f * e^p).
inline Mat unipotent_from_params(const QuadExtField& fld, fel a, fel b, fel c, fel d) {
    fel f = fld.neg(fld.frobenius(a));
    fel e = fld.add(fld.neg(fld.frobenius(b)), fld.mul(fld.frobenius(a), fld.frobenius(c)));
    Mat m = mat_id(4);
    m.at(1, 0) = a;
    m.at(2, 0) = b;
    m.at(2, 1) = c;
    m.at(3, 0) = d;
    m.at(3, 1) = e;
    m.at(3, 2) = f;
    return m;
}

// The d-parameters solving the trace constraint form the coset d0 + GF(p)*w;
// this returns d0 (prime-subfield part) for given (a, b, c).
inline fel unipotent_d_base(const QuadExtField& fld, fel a, fel b, fel c) {
    fel f = fld.neg(fld.frobenius(a));
    fel e = fld.add(fld.neg(fld.frobenius(b)), fld.mul(fld.frobenius(a), fld.frobenius(c)));
    fel tr = fld.trace(fld.mul(f, fld.frobenius(e))); // in GF(p)
    const PrimeField& fp = fld.prime;
    fel x0 = fp.mul(fp.neg(static_cast<fel>(tr % fld.p)), fp.inv(2));
    return fld.code(x0, 0);
}

inline Mat diag4(const QuadExtField& fld, fel d1, fel d2, fel d3, fel d4) {
    (void)fld;
    Mat m = mat_zero(4);
    m.at(0, 0) = d1;
    m.at(1, 1) = d2;
    m.at(2, 2) = d3;
    m.at(3, 3) = d4;
    return m;
}

// diag(a, b, b^-p, a^-p); unitary, and in SU_4(p) iff ab lies in GF(p)^x.
inline Mat torus_diag(const QuadExtField& fld, fel a, fel b) {
    return diag4(fld, a, b, fld.inv(fld.frobenius(b)), fld.inv(fld.frobenius(a)));
}

struct Su4System {
    int p;
    QuadExtField fld;
    Mat form;
    std::vector<Mat> sylow_gens;
    GroupTable<UnitaryMatTraits> S;
    Subgroup whole;
    Subgroup Z;      // center, order p
    Subgroup Sder;   // derived subgroup = Frattini = second center, order p^3
    Subgroup V;      // unique abelian subgroup of order p^4
    Subgroup Q;      // unique maximal subgroup with derived subgroup of order p
    std::vector<Subgroup> maximals;
    std::vector<Subgroup> middle; // the p+1 subgroups strictly between V and S
    int nilpotency_class = 0;
    int exponent = 0;
    bool upper_equals_lower = false;

    Su4System(int p_, std::uint64_t budget)
        : p(p_), fld(p_), form(hermitian_form()),
          sylow_gens(make_gens(fld)),
          S(UnitaryMatTraits{&fld, 4}, sylow_gens, budget) {}

    static std::vector<Mat> make_gens(const QuadExtField& fld) {
        fel w = trace_zero_generator(fld);
        return {
            unipotent_from_params(fld, 1, 0, 0, 0),
            unipotent_from_params(fld, w, 0, 0, 0),
            unipotent_from_params(fld, 0, 0, w, 0),
        };
    }
};

// Builds S by closure, cross-checks it against the constraint enumeration and
// locates every distinguished subgroup. Throws ConstructionMismatch if any
// order or uniqueness assertion fails.
//
// `exhaustive_abelian_scan` additionally sweeps every order-p^4 class to
// confirm the uniqueness of the abelian one (feasible for p <= 7); with it
// off, uniqueness is still established through the measured-deduction route.
inline std::unique_ptr<Su4System> build_sylow(int p, std::uint64_t budget = kDefaultElementBudget,
                                              bool exhaustive_abelian_scan = true) {
    auto sys = std::make_unique<Su4System>(p, budget);
    const QuadExtField& fld = sys->fld;
    auto& S = sys->S;

    std::uint64_t expected = 1;
    for (int i = 0; i < 6; ++i) expected *= static_cast<std::uint64_t>(p);
    if (S.size() != expected) throw ConstructionMismatch("sylow order != p^6");

    // generators are unitary of determinant 1
    for (const Mat& g : sys->sylow_gens) {
        if (!is_unitary(fld, g, sys->form)) throw ConstructionMismatch("generator not unitary");
        if (mat_det(fld, g) != fld.one()) throw ConstructionMismatch("generator determinant != 1");
    }

    // the closure equals the solved constraint set
    fel w = trace_zero_generator(fld);
    std::uint64_t counted = 0;
    for (int a = 0; a < fld.q; ++a) {
        for (int b = 0; b < fld.q; ++b) {
            for (int ct = 0; ct < p; ++ct) {
                fel c = fld.mul(static_cast<fel>(ct), w);
                fel d0 = unipotent_d_base(fld, static_cast<fel>(a), static_cast<fel>(b), c);
                for (int dt = 0; dt < p; ++dt) {
                    fel d = fld.add(d0, fld.mul(static_cast<fel>(dt), w));
                    Mat m = unipotent_from_params(fld, static_cast<fel>(a), static_cast<fel>(b), c, d);
                    if (!S.try_index_of(m))
                        throw ConstructionMismatch("constraint-solved unipotent missing from closure");
                    ++counted;
                }
            }
        }
    }
    if (counted != expected) throw ConstructionMismatch("constraint enumeration size mismatch");

    sys->whole = whole_group(S);
    sys->Z = center(S, sys->whole);
    sys->Sder = derived_subgroup(S, sys->whole);
    if (sys->Z.order() != static_cast<std::uint64_t>(p)) throw ConstructionMismatch("center order != p");
    if (sys->Sder.order() != static_cast<std::uint64_t>(p) * p * p)
        throw ConstructionMismatch("derived order != p^3");

    auto lower = lower_central_series(S, sys->whole);
    auto upper = upper_central_series(S, sys->whole);
    sys->nilpotency_class = static_cast<int>(lower.size()) - 1;
    // upper: 1 = Z_0 < Z_1 < ... ; lower: G = g_1 > g_2 > ...
    sys->upper_equals_lower =
        upper.size() == lower.size() &&
        [&] {
            for (size_t i = 0; i < lower.size(); ++i)
                if (!(lower[i].elems == upper[upper.size() - 1 - i].elems)) return false;
            return true;
        }();
    sys->exponent = exponent_of(S, sys->whole);

    sys->maximals = maximal_subgroups(S, sys->whole, p);
    if (sys->maximals.size() != static_cast<size_t>(p) * p + p + 1)
        throw ConstructionMismatch("maximal subgroup count != p^2+p+1");

    // Q: the unique maximal subgroup with derived subgroup of order p
    int q_hits = 0;
    for (const Subgroup& M : sys->maximals) {
        if (derived_subgroup(S, M).order() == static_cast<std::uint64_t>(p)) {
            sys->Q = M;
            ++q_hits;
        }
    }
    if (q_hits != 1) throw ConstructionMismatch("extraspecial maximal not unique");

    // V: the centralizer of the derived subgroup, abelian of order p^4
    for (const Subgroup& M : sys->maximals)
        if (is_abelian(S, M)) throw ConstructionMismatch("abelian maximal subgroup found");
    sys->V = centralizer_in(S, sys->whole, sys->Sder);
    if (sys->V.order() != upow4(p) || !is_abelian(S, sys->V))
        throw ConstructionMismatch("centralizer of the derived subgroup is not abelian p^4");

    for (const Subgroup& M : sys->maximals) {
        bool contains_v = std::includes(M.elems.begin(), M.elems.end(),
                                        sys->V.elems.begin(), sys->V.elems.end());
        if (contains_v) sys->middle.push_back(M);
    }
    if (sys->middle.size() != static_cast<size_t>(p) + 1)
        throw ConstructionMismatch("family between V and S has wrong size");

    // uniqueness of the abelian order-p^4 subgroup. For p <= 7 scanning every
    // order-p^4 class is feasible; for the large primes that scan does not fit
    // the budget. Either way uniqueness also follows from measured quantities:
    // another abelian W would force VW into the family with |V meet W| = p^3
    // central in it, while every family member has center of order only p^2.
    if (exhaustive_abelian_scan && p <= 7) {
        int v_hits = 0;
        for (const SubgroupClass& cls : index_p2_classes(S, p)) {
            if (is_abelian(S, cls.rep)) {
                if (cls.orbit_size != 1)
                    throw ConstructionMismatch("abelian order-p^4 class not characteristic");
                if (!(cls.rep.elems == sys->V.elems))
                    throw ConstructionMismatch("abelian order-p^4 class differs from C_S(S')");
                ++v_hits;
            }
        }
        if (v_hits != 1) throw ConstructionMismatch("abelian subgroup of order p^4 not unique");
    } else {
        for (const Subgroup& M : sys->middle) {
            if (center(S, M).order() != upow4(p) / (static_cast<std::uint64_t>(p) * p))
                throw ConstructionMismatch("family member center too large for uniqueness");
        }
    }

    // V and Q intersect in the derived subgroup and cover S
    Subgroup inter = subgroup_intersection(S, sys->V, sys->Q);
    if (!(inter.elems == sys->Sder.elems)) throw ConstructionMismatch("V meet Q != S'");
    if (sys->V.order() * sys->Q.order() / inter.order() != S.size())
        throw ConstructionMismatch("V * Q != S");

    return sys;
}

// --- torus -------------------------------------------------------------------

// The conjugation action of an ambient element on S, recorded by the images
// of the three generators; this identifies the automorphism.
using GenImageTuple = std::array<std::uint32_t, 3>;

struct TorusData {
    std::vector<Mat> d0;        // diagonal torus of SU_4(p), order (p-1)(p^2-1)
    std::vector<GenImageTuple> d0_action; // generator-image tuple per member
    Mat theta;                  // diag(eta, eta^-1, eta^p, eta^-p), order p^2-1
    Mat tau;                    // diag(1, lam, lam^-1, 1), lam primitive in GF(p)
    Mat singer;                 // GU-diagonal diag(eta, 1, 1, eta^-p)
    GenImageTuple frobenius_action{}; // the semilinear map, never held as a matrix
    int d = 0;                  // gcd(4, p+1) = order of the action kernel of d0
    std::uint64_t gu_kernel = 0;  // order of the action kernel of all GU-diagonals
};

inline GenImageTuple conj_gen_images(const Su4System& sys, const Mat& t) {
    Mat tinv = mat_inv(sys.fld, t);
    GenImageTuple img{};
    for (size_t i = 0; i < sys.sylow_gens.size(); ++i)
        img[i] = sys.S.index_of(mat_mul(sys.fld, tinv, mat_mul(sys.fld, sys.sylow_gens[i], t)));
    return img;
}

template <class Tr>
bool normalizes_sylow(const GroupTable<Tr>& S, const QuadExtField& fld,
                      const std::vector<Mat>& gens, const Mat& t) {
    Mat tinv = mat_inv(fld, t);
    for (const Mat& g : gens) {
        Mat c = mat_mul(fld, tinv, mat_mul(fld, g, t));
        if (!S.try_index_of(c)) return false;
    }
    return true;
}

// conjugation acts trivially on S iff it fixes every generator
inline bool acts_trivially(const Su4System& sys, const Mat& t) {
    Mat tinv = mat_inv(sys.fld, t);
    for (const Mat& g : sys.sylow_gens) {
        if (mat_mul(sys.fld, tinv, mat_mul(sys.fld, g, t)) != g) return false;
    }
    return true;
}

inline bool is_scalar(const Mat& m) {
    fel c = m.at(0, 0);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            if (m.at(i, j) != (i == j ? c : 0)) return false;
    return true;
}

inline TorusData torus_normalizer(const Su4System& sys) {
    const QuadExtField& fld = sys.fld;
    TorusData td;
    int p = sys.p;
    for (int a = 1; a < fld.q; ++a) {
        for (int b = 1; b < fld.q; ++b) {
            fel ab = fld.mul(static_cast<fel>(a), static_cast<fel>(b));
            if (ab == 0 || !fld.in_prime_subfield(ab)) continue;
            td.d0.push_back(torus_diag(fld, static_cast<fel>(a), static_cast<fel>(b)));
        }
    }
    if (td.d0.size() != static_cast<size_t>(p - 1) * (fld.q - 1))
        throw ConstructionMismatch("torus order != (p-1)(p^2-1)");
    std::uint64_t kernel = 0;
    for (const Mat& t : td.d0) {
        if (!is_unitary(fld, t, sys.form) || mat_det(fld, t) != 1)
            throw ConstructionMismatch("torus member not special unitary");
        if (!normalizes_sylow(sys.S, fld, sys.sylow_gens, t))
            throw ConstructionMismatch("torus member does not normalize S");
        td.d0_action.push_back(conj_gen_images(sys, t));
        if (acts_trivially(sys, t)) {
            if (!is_scalar(t)) throw ConstructionMismatch("non-scalar torus member acts trivially");
            ++kernel;
        }
    }
    int d = std::gcd(4, p + 1);
    if (kernel != static_cast<std::uint64_t>(d))
        throw ConstructionMismatch("torus action kernel != gcd(4, p+1)");
    td.d = d;

    fel eta = find_primitive(fld);
    td.theta = torus_diag(fld, eta, fld.inv(eta));
    fel lam0 = fld.code(find_primitive(fld.prime), 0);
    td.tau = torus_diag(fld, 1, lam0);
    td.singer = diag4(fld, eta, 1, 1, fld.inv(fld.frobenius(eta)));
    if (!normalizes_sylow(sys.S, fld, sys.sylow_gens, td.singer))
        throw ConstructionMismatch("GU diagonal does not normalize S");
    for (size_t i = 0; i < sys.sylow_gens.size(); ++i)
        td.frobenius_action[i] = sys.S.index_of(mat_frobenius(fld, sys.sylow_gens[i]));

    // kernel of the full GU-diagonal action: the p+1 scalars of norm 1
    std::uint64_t gu_kernel = 0;
    for (int a = 1; a < fld.q; ++a) {
        for (int b = 1; b < fld.q; ++b) {
            Mat t = torus_diag(fld, static_cast<fel>(a), static_cast<fel>(b));
            if (acts_trivially(sys, t)) {
                if (!is_scalar(t)) throw ConstructionMismatch("non-scalar GU diagonal acts trivially");
                ++gu_kernel;
            }
        }
    }
    if (gu_kernel != static_cast<std::uint64_t>(p) + 1)
        throw ConstructionMismatch("GU action kernel != p+1 scalars");
    td.gu_kernel = gu_kernel;
    return td;
}

// --- automorphism permutations --------------------------------------------------

// index permutation of S induced by x |-> t^-1 x t
inline std::vector<std::uint32_t> conj_perm(const Su4System& sys, const Mat& t) {
    Mat tinv = mat_inv(sys.fld, t);
    std::vector<std::uint32_t> perm(sys.S.size());
    for (std::uint32_t i = 0; i < sys.S.size(); ++i) {
        Mat c = mat_mul(sys.fld, tinv, mat_mul(sys.fld, sys.S.elem(i), t));
        perm[i] = sys.S.index_of(c);
    }
    return perm;
}

// index permutation of the entrywise Frobenius map (a semilinear automorphism
// of S; stored as a permutation, never as a matrix)
inline std::vector<std::uint32_t> frobenius_perm(const Su4System& sys) {
    std::vector<std::uint32_t> perm(sys.S.size());
    for (std::uint32_t i = 0; i < sys.S.size(); ++i)
        perm[i] = sys.S.index_of(mat_frobenius(sys.fld, sys.S.elem(i)));
    return perm;
}

inline int perm_order(const std::vector<std::uint32_t>& perm) {
    std::vector<bool> seen(perm.size(), false);
    long long ord = 1;
    for (std::uint32_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        long long len = 0;
        std::uint32_t j = i;
        while (!seen[j]) {
            seen[j] = true;
            j = perm[j];
            ++len;
        }
        ord = std::lcm(ord, len);
    }
    return static_cast<int>(ord);
}

// Conjugation action matrix of an ambient matrix m on the section A/B of S.
inline Mat section_action(const Su4System& sys, const Subgroup& A, const Subgroup& B,
                          const Mat& m) {
    auto Q = quotient_view(sys.S, A, B);
    auto C = elementary_coordinates(Q, sys.p);
    Mat minv = mat_inv(sys.fld, m);
    return quotient_action_matrix(Q, C, [&](std::uint32_t x) {
        Mat img = mat_mul(sys.fld, minv, mat_mul(sys.fld, sys.S.elem(x), m));
        return sys.S.index_of(img);
    });
}

// Permutation induced on the members of the V-to-S family by conjugation with
// an ambient matrix (which must normalize S and permute the family).
inline std::vector<int> middle_family_permutation(const Su4System& sys, const Mat& t) {
    Mat tinv = mat_inv(sys.fld, t);
    std::vector<int> perm(sys.middle.size(), -1);
    for (size_t i = 0; i < sys.middle.size(); ++i) {
        std::vector<std::uint32_t> img;
        img.reserve(sys.middle[i].elems.size());
        for (std::uint32_t x : sys.middle[i].elems) {
            Mat c = mat_mul(sys.fld, tinv, mat_mul(sys.fld, sys.S.elem(x), t));
            img.push_back(sys.S.index_of(c));
        }
        std::sort(img.begin(), img.end());
        for (size_t j = 0; j < sys.middle.size(); ++j) {
            if (img == sys.middle[j].elems) {
                perm[i] = static_cast<int>(j);
                break;
            }
        }
        if (perm[i] < 0) throw ConstructionMismatch("family not permuted");
    }
    return perm;
}

inline bool is_single_cycle(const std::vector<int>& perm) {
    if (perm.empty()) return false;
    size_t len = 1;
    int cur = perm[0];
    while (cur != 0 && len <= perm.size()) {
        cur = perm[cur];
        ++len;
    }
    return len == perm.size();
}

// --- outer order ----------------------------------------------------------------

// p'-order of the subgroup of Out(S) induced by the GU_4(p) diagonals extended
// by the Frobenius map: verifies the kernel is exactly the p+1 scalars, that no
// other member acts as an inner automorphism, and returns |upstairs| / |kernel|.
inline std::uint64_t outer_order_check(const Su4System& sys) {
    const QuadExtField& fld = sys.fld;
    const auto& S = sys.S;
    // bucket: image of gen0 under inner automorphisms
    std::uint32_t g0 = S.gen_index(0);
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> bucket;
    for (std::uint32_t s = 0; s < S.size(); ++s) bucket[S.conj(g0, s)].push_back(s);

    std::uint64_t upstairs = 0, kernel = 0;
    std::vector<std::uint32_t> gen_idx;
    for (const Mat& g : sys.sylow_gens) gen_idx.push_back(S.index_of(g));

    for (int eps = 0; eps < 2; ++eps) {
        for (int a = 1; a < fld.q; ++a) {
            for (int b = 1; b < fld.q; ++b) {
                Mat t = torus_diag(fld, static_cast<fel>(a), static_cast<fel>(b));
                Mat tinv = mat_inv(fld, t);
                ++upstairs;
                // images of the three generators under x -> t^-1 frob^eps(x) t
                std::array<std::uint32_t, 3> img{};
                for (size_t i = 0; i < sys.sylow_gens.size(); ++i) {
                    Mat x = sys.sylow_gens[i];
                    if (eps) x = mat_frobenius(fld, x);
                    img[i] = S.index_of(mat_mul(fld, tinv, mat_mul(fld, x, t)));
                }
                bool trivial = true;
                for (size_t i = 0; i < sys.sylow_gens.size(); ++i)
                    if (img[i] != gen_idx[i]) trivial = false;
                if (trivial) {
                    if (eps != 0 || !is_scalar(t))
                        throw ConstructionMismatch("unexpected trivial action upstairs");
                    ++kernel;
                    continue;
                }
                // inner? find s with c_s matching on all generators
                auto it = bucket.find(img[0]);
                if (it != bucket.end()) {
                    for (std::uint32_t s : it->second) {
                        bool match = true;
                        for (size_t i = 1; i < sys.sylow_gens.size(); ++i) {
                            if (S.conj(gen_idx[i], s) != img[i]) {
                                match = false;
                                break;
                            }
                        }
                        if (match)
                            throw ConstructionMismatch("non-kernel member acts as inner automorphism");
                    }
                }
            }
        }
    }
    if (kernel != static_cast<std::uint64_t>(sys.p) + 1)
        throw ConstructionMismatch("outer kernel != p+1");
    return upstairs / kernel;
}

// --- Levi block -------------------------------------------------------------------

struct LeviData {
    std::vector<Mat> gens;
    std::unique_ptr<GroupTable<UnitaryMatTraits>> block; // SL_2(p)-shaped, order p(p^2-1)
};

inline LeviData levi_su2(const Su4System& sys) {
    const QuadExtField& fld = sys.fld;
    fel w = trace_zero_generator(fld);
    Mat lo = mat_id(4), up = mat_id(4);
    lo.at(2, 1) = w; // block [[1,0],[w,1]] in rows/cols 1,2
    up.at(1, 2) = w;
    LeviData ld;
    ld.gens = {lo, up};
    for (const Mat& g : ld.gens) {
        if (!is_unitary(fld, g, sys.form) || mat_det(fld, g) != 1)
            throw ConstructionMismatch("levi generator not special unitary");
    }
    ld.block = std::make_unique<GroupTable<UnitaryMatTraits>>(
        UnitaryMatTraits{&sys.fld, 4}, ld.gens, 1'000'000);
    std::uint64_t expect = static_cast<std::uint64_t>(sys.p) * (sys.p * sys.p - 1);
    if (ld.block->size() != expect) throw ConstructionMismatch("levi block order != p(p^2-1)");
    // every member normalizes Q (and hence its center Z)
    for (std::uint32_t i = 0; i < ld.block->size(); ++i) {
        const Mat& t = ld.block->elem(i);
        Mat tinv = mat_inv(fld, t);
        for (std::uint32_t qg : sys.Q.gens) {
            Mat c = mat_mul(fld, tinv, mat_mul(fld, sys.S.elem(qg), t));
            auto idx = sys.S.try_index_of(c);
            if (!idx || !sys.Q.contains(*idx))
                throw ConstructionMismatch("levi member does not normalize Q");
        }
    }
    return ld;
}

} // namespace su4check
