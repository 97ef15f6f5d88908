// Standalone verification of the 4-dimensional minus-type orthogonal module:
// the Sylow p-subgroup R of the isometry group realized by explicit lower
// unitriangular generators, the torus element t normalizing R, the counts of
// R- and N(R)-invariant quadratic forms, and the behavior of the involution in
// the torus. Also the SL_2(p) opposite-Borel eigenspace check.
//
// The fixed form is F = antidiag-with-middle-block(1, alpha) below, where
// -alpha generates GF(p)^x:
//
//   F = [[0,0,0,1],[0,1,0,0],[0,0,alpha,0],[1,0,0,0]].
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "su4check/field.hpp"
#include "su4check/groupkit.hpp"
#include "su4check/linalg.hpp"

namespace su4check {

struct Omega4Data {
    int p;
    PrimeField fp;
    fel alpha;      // -alpha generates GF(p)^x
    Mat form;
    Mat r1, r2;     // generators of R
    Mat t;          // torus element of order (p^2-1)/2 normalizing R
    Mat invol;      // t^((p^2-1)/4)
    std::unique_ptr<GroupTable<PrimeMatTraits>> R;

    explicit Omega4Data(int p_) : p(p_), fp(p_) {}
};

inline Mat omega4_form(fel alpha) {
    Mat f = mat_zero(4);
    f.at(0, 3) = 1;
    f.at(1, 1) = 1;
    f.at(2, 2) = alpha;
    f.at(3, 0) = 1;
    return f;
}

inline bool preserves_form(const PrimeField& fp, const Mat& g, const Mat& form) {
    return mat_mul(fp, g, mat_mul(fp, form, mat_transpose(g))) == form;
}

// Builds the data for a given choice of alpha (callers pass -lambda for a
// primitive lambda). All structural invariants are asserted here.
inline std::unique_ptr<Omega4Data> build_omega4_with_alpha(int p, fel alpha) {
    auto d = std::make_unique<Omega4Data>(p);
    const PrimeField& fp = d->fp;
    if (fp.order_of(fp.neg(alpha)) != p - 1)
        throw ConstructionMismatch("omega4: -alpha does not generate GF(p)^x");
    d->alpha = alpha;
    d->form = omega4_form(alpha);

    fel half = fp.inv(2);
    Mat r1 = mat_id(4);
    r1.at(1, 0) = 1;
    r1.at(3, 0) = fp.neg(half);
    r1.at(3, 1) = fp.neg(1);
    Mat r2 = mat_id(4);
    r2.at(2, 0) = fp.neg(alpha);
    r2.at(3, 0) = fp.neg(fp.mul(alpha, half));
    r2.at(3, 2) = 1;
    d->r1 = r1;
    d->r2 = r2;
    for (const Mat& g : {r1, r2})
        if (!preserves_form(fp, g, d->form)) throw ConstructionMismatch("omega4: generator breaks form");

    d->R = std::make_unique<GroupTable<PrimeMatTraits>>(PrimeMatTraits{&d->fp, 4},
                                                        std::vector<Mat>{r1, r2});
    if (d->R->size() != static_cast<std::uint32_t>(p) * p)
        throw ConstructionMismatch("omega4: |R| != p^2");

    // torus block of order p+1 preserving diag(1, alpha): first solution in scan order
    fel lambda = fp.neg(alpha);
    Mat block = mat_zero(2);
    bool found = false;
    for (int a = 0; a < p && !found; ++a) {
        for (int b = 0; b < p && !found; ++b) {
            fel aa = static_cast<fel>(a), bb = static_cast<fel>(b);
            if (fp.add(fp.mul(aa, aa), fp.mul(alpha, fp.mul(bb, bb))) != 1) continue;
            Mat m = mat_zero(2);
            m.at(0, 0) = aa;
            m.at(0, 1) = bb;
            m.at(1, 0) = fp.neg(fp.mul(alpha, bb));
            m.at(1, 1) = aa;
            if (matrix_order(fp, m, 4 * p) == p + 1) {
                block = m;
                found = true;
            }
        }
    }
    if (!found) throw ConstructionMismatch("omega4: no torus block of order p+1");
    Mat t = mat_zero(4);
    t.at(0, 0) = lambda;
    t.at(1, 1) = block.at(0, 0);
    t.at(1, 2) = block.at(0, 1);
    t.at(2, 1) = block.at(1, 0);
    t.at(2, 2) = block.at(1, 1);
    t.at(3, 3) = fp.inv(lambda);
    if (!preserves_form(fp, t, d->form)) throw ConstructionMismatch("omega4: t breaks form");
    if (matrix_order(fp, t, 4 * p * p) != (p * p - 1) / 2)
        throw ConstructionMismatch("omega4: order of t != (p^2-1)/2");
    Mat tinv = mat_inv(fp, t);
    for (const Mat& g : {r1, r2}) {
        Mat c = mat_mul(fp, tinv, mat_mul(fp, g, t));
        if (!d->R->try_index_of(c)) throw ConstructionMismatch("omega4: t does not normalize R");
    }
    d->t = t;
    d->invol = mat_pow(fp, t, (p * p - 1) / 4);
    return d;
}

inline std::unique_ptr<Omega4Data> build_omega4(int p) {
    PrimeField fp(p);
    return build_omega4_with_alpha(p, fp.neg(find_primitive(fp)));
}

// (number of projective classes of non-degenerate symmetric forms fixed by R,
//  same for <R, t>)
inline std::pair<int, int> form_counts(const Omega4Data& d) {
    const PrimeField& fp = d.fp;
    auto basis_r = invariant_form_space(fp, {d.r1, d.r2}, FormMode::Symmetric);
    auto basis_n = invariant_form_space(fp, {d.r1, d.r2, d.t}, FormMode::Symmetric);
    // post-hoc: every solved basis member is genuinely invariant
    for (const auto& basis : {basis_r, basis_n}) {
        for (const Mat& L : basis) {
            for (const Mat& g : {d.r1, d.r2}) {
                if (mat_mul(fp, g, mat_mul(fp, L, mat_transpose(g))) != L)
                    throw ConstructionMismatch("omega4: solved form not invariant");
            }
        }
    }
    return {count_projective_nondegenerate(fp, basis_r),
            count_projective_nondegenerate(fp, basis_n)};
}

// The one-dimensional solved space for <R, t>; the (4,4) slot of any basis
// vector vanishes (scale-invariant).
inline bool normalizer_form_corner_zero(const Omega4Data& d) {
    auto basis = invariant_form_space(d.fp, {d.r1, d.r2, d.t}, FormMode::Symmetric);
    if (basis.size() != 1) throw ConstructionMismatch("omega4: normalizer form space not a line");
    return basis[0].at(3, 3) == 0;
}

struct InvolutionReport {
    bool inverts_r = false;        // i r_k i = r_k^-1 for k = 1, 2
    bool pattern_ok = false;       // the epsilon pattern matching p mod 4
    int eps = 0;                   // +1 when 4 | p+1, -1 when 4 | p-1
};

inline InvolutionReport involution_behavior(const Omega4Data& d) {
    const PrimeField& fp = d.fp;
    InvolutionReport rep;
    const Mat& i = d.invol;
    Mat i_r1_i = mat_mul(fp, i, mat_mul(fp, d.r1, i));
    Mat i_r2_i = mat_mul(fp, i, mat_mul(fp, d.r2, i));
    rep.inverts_r = i_r1_i == mat_inv(fp, d.r1) && i_r2_i == mat_inv(fp, d.r2);
    rep.eps = ((d.p + 1) % 4 == 0) ? 1 : -1;
    fel e = rep.eps == 1 ? fp.one() : fp.neg(1);
    Mat expect = mat_zero(4);
    expect.at(0, 0) = e;
    expect.at(1, 1) = fp.neg(e);
    expect.at(2, 2) = fp.neg(e);
    expect.at(3, 3) = e;
    rep.pattern_ok = (i == expect);
    return rep;
}

// t-action orders on the summands V1 = <e1>, V2 = <e2, e3>, V3 = <e4>, and the
// fixed/commutator spaces of R.
struct TorusSummandReport {
    int order_v1 = 0, order_v2 = 0, order_v3 = 0;
    bool v2_irreducible = false;
    bool fixed_space_is_v3 = false;
    bool commutator_space_is_v2_plus_v3 = false;
};

inline TorusSummandReport torus_summands(const Omega4Data& d) {
    const PrimeField& fp = d.fp;
    TorusSummandReport rep;
    rep.order_v1 = fp.order_of(d.t.at(0, 0));
    rep.order_v3 = fp.order_of(d.t.at(3, 3));
    Mat block = mat_zero(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) block.at(i, j) = d.t.at(1 + i, 1 + j);
    rep.order_v2 = matrix_order(fp, block, 4 * d.p * d.p);
    // irreducible iff the characteristic polynomial has no root in GF(p)
    auto cp = char_poly(fp, block);
    bool has_root = false;
    for (int x = 0; x < d.p; ++x)
        if (poly_eval(fp, cp, static_cast<fel>(x)) == 0) has_root = true;
    rep.v2_irreducible = !has_root;

    // The module conventions of the explicit matrices are columnwise: the
    // fixed space of R is the right null space of the (r_k - I), and [V, R]
    // is the joint column space.
    Mat m1 = mat_sub(fp, d.r1, mat_id(4));
    Mat m2 = mat_sub(fp, d.r2, mat_id(4));
    std::vector<std::array<fel, kMaxDim>> fixed;
    std::array<fel, kMaxDim> v{};
    auto advance = [&](int n) {
        int pos = 0;
        while (pos < n) {
            int val = v[pos] + 1;
            if (val < d.p) {
                v[pos] = static_cast<fel>(val);
                return true;
            }
            v[pos] = 0;
            ++pos;
        }
        return false;
    };
    auto col_apply = [&](const Mat& m, const std::array<fel, kMaxDim>& x) {
        std::array<fel, kMaxDim> r{};
        for (int i = 0; i < 4; ++i) {
            fel s = 0;
            for (int j = 0; j < 4; ++j) s = fp.add(s, fp.mul(m.at(i, j), x[j]));
            r[i] = s;
        }
        return r;
    };
    do {
        bool zero = true;
        for (int i = 0; i < 4; ++i) zero = zero && v[i] == 0;
        if (zero) continue;
        auto w1 = col_apply(m1, v);
        auto w2 = col_apply(m2, v);
        bool ok = true;
        for (int i = 0; i < 4; ++i) ok = ok && w1[i] == 0 && w2[i] == 0;
        if (ok) fixed.push_back(v);
    } while (advance(4));
    // fixed space should be exactly the scalar multiples of e4
    rep.fixed_space_is_v3 = fixed.size() == static_cast<size_t>(d.p - 1);
    for (auto& w : fixed)
        if (w[0] != 0 || w[1] != 0 || w[2] != 0) rep.fixed_space_is_v3 = false;

    // [V, R]: joint column space of (r1 - I), (r2 - I); should be <e2,e3,e4>
    std::vector<std::array<fel, kMaxDim>> cols;
    for (int j = 0; j < 4; ++j) {
        std::array<fel, kMaxDim> c1{}, c2{};
        for (int i = 0; i < 4; ++i) {
            c1[i] = m1.at(i, j);
            c2[i] = m2.at(i, j);
        }
        cols.push_back(c1);
        cols.push_back(c2);
    }
    int rank = 0;
    bool touches_e1 = false;
    std::vector<std::array<fel, kMaxDim>> basis;
    for (auto col : cols) {
        for (auto& b : basis) {
            int lead = -1;
            for (int i = 0; i < 4; ++i)
                if (b[i] != 0) {
                    lead = i;
                    break;
                }
            if (lead >= 0 && col[lead] != 0) {
                fel c = fp.mul(col[lead], fp.inv(b[lead]));
                for (int i = 0; i < 4; ++i) col[i] = fp.sub(col[i], fp.mul(c, b[i]));
            }
        }
        bool nonzero = false;
        for (int i = 0; i < 4; ++i) nonzero = nonzero || col[i] != 0;
        if (nonzero) {
            basis.push_back(col);
            ++rank;
        }
    }
    for (auto& b : basis)
        if (b[0] != 0) touches_e1 = true;
    rep.commutator_space_is_v2_plus_v3 = (rank == 3) && !touches_e1;
    return rep;
}

// SL_2(p) opposite-Borel eigenspace check for r = diag(lambda, lambda^-1).
struct Sl2BorelReport {
    bool r_normalizes_opposite = false;
    bool eigenvalues_distinct = false;
    bool eigenspaces_are_fixed_spaces = false;
    bool skipped_order2 = false;
};

inline Sl2BorelReport sl2_opposite_borel_check(int p, fel lambda_code) {
    PrimeField fp(p);
    Sl2BorelReport rep;
    fel lam = lambda_code;
    if (lam == fp.neg(1)) { // o(r) = 2: the excluded case
        rep.skipped_order2 = true;
        return rep;
    }
    Mat r = mat_zero(2);
    r.at(0, 0) = lam;
    r.at(1, 1) = fp.inv(lam);
    Mat rinv = mat_inv(fp, r);
    rep.r_normalizes_opposite = true;
    for (int y = 0; y < p; ++y) {
        Mat u = mat_id(2);
        u.at(0, 1) = static_cast<fel>(y);
        Mat c = mat_mul(fp, rinv, mat_mul(fp, u, r));
        if (c.at(1, 0) != 0 || c.at(0, 0) != 1 || c.at(1, 1) != 1)
            rep.r_normalizes_opposite = false;
    }
    rep.eigenvalues_distinct = lam != fp.inv(lam);
    // C_V(S) = <e1> with eigenvalue lambda; C_V(S^h) = <e2> with lambda^-1
    std::array<fel, kMaxDim> e1{}, e2{};
    e1[0] = 1;
    e2[1] = 1;
    auto i1 = vec_mul(fp, e1, r);
    auto i2 = vec_mul(fp, e2, r);
    rep.eigenspaces_are_fixed_spaces = i1[0] == lam && i1[1] == 0 &&
                                       i2[0] == 0 && i2[1] == fp.inv(lam);
    return rep;
}

} // namespace su4check
