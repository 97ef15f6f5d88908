// Dense small-matrix algebra (n <= 6) over GF(p) / GF(p^2): determinants,
// inverses, rank, characteristic polynomials with exhaustive root search,
// unipotent Jordan profiles, and solvers for group-invariant bilinear forms.
//
// Matrices act on row vectors (v |-> v*M), matching the convention that maps
// are written on the right; a form F is preserved when M*F*M^T = F.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "su4check/field.hpp"

namespace su4check {

struct NonUnipotent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxDim = 6;

struct Mat {
    std::uint8_t n = 0;
    std::array<fel, kMaxDim * kMaxDim> e{};

    fel& at(int i, int j) { return e[static_cast<size_t>(i) * n + j]; }
    fel at(int i, int j) const { return e[static_cast<size_t>(i) * n + j]; }

    bool operator==(const Mat& o) const {
        if (n != o.n) return false;
        for (int i = 0; i < n * n; ++i)
            if (e[i] != o.e[i]) return false;
        return true;
    }
    bool operator!=(const Mat& o) const { return !(*this == o); }
};

inline Mat mat_zero(int n) {
    Mat m;
    m.n = static_cast<std::uint8_t>(n);
    return m;
}

inline Mat mat_id(int n) {
    Mat m = mat_zero(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

template <class F>
Mat mat_mul(const F& f, const Mat& a, const Mat& b) {
    Mat r = mat_zero(a.n);
    const int n = a.n;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            fel aik = a.at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < n; ++j) {
                fel bkj = b.at(k, j);
                if (bkj == 0) continue;
                r.at(i, j) = f.add(r.at(i, j), f.mul(aik, bkj));
            }
        }
    }
    return r;
}

inline Mat mat_transpose(const Mat& a) {
    Mat r = mat_zero(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) r.at(j, i) = a.at(i, j);
    return r;
}

template <class F>
Mat mat_frobenius(const F& f, const Mat& a) {
    Mat r = a;
    for (int i = 0; i < a.n * a.n; ++i) r.e[i] = f.frobenius(a.e[i]);
    return r;
}

template <class F>
Mat mat_add(const F& f, const Mat& a, const Mat& b) {
    Mat r = a;
    for (int i = 0; i < a.n * a.n; ++i) r.e[i] = f.add(a.e[i], b.e[i]);
    return r;
}

template <class F>
Mat mat_sub(const F& f, const Mat& a, const Mat& b) {
    Mat r = a;
    for (int i = 0; i < a.n * a.n; ++i) r.e[i] = f.sub(a.e[i], b.e[i]);
    return r;
}

template <class F>
Mat mat_scale(const F& f, fel c, const Mat& a) {
    Mat r = a;
    for (int i = 0; i < a.n * a.n; ++i) r.e[i] = f.mul(c, a.e[i]);
    return r;
}

template <class F>
Mat mat_pow(const F& f, Mat a, long long e) {
    Mat r = mat_id(a.n);
    while (e) {
        if (e & 1) r = mat_mul(f, r, a);
        a = mat_mul(f, a, a);
        e >>= 1;
    }
    return r;
}

// Gaussian elimination; returns (rank, det). Operates on a copy.
template <class F>
std::pair<int, fel> mat_rank_det(const F& f, Mat m) {
    const int n = m.n;
    fel det = 1;
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int piv = -1;
        for (int r = rank; r < n; ++r)
            if (m.at(r, col) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) {
            det = 0;
            continue;
        }
        if (piv != rank) {
            for (int j = 0; j < n; ++j) std::swap(m.e[static_cast<size_t>(piv) * n + j], m.e[static_cast<size_t>(rank) * n + j]);
            det = f.neg(det);
        }
        fel pv = m.at(rank, col);
        det = f.mul(det, pv);
        fel pinv = f.inv(pv);
        for (int j = col; j < n; ++j) m.at(rank, j) = f.mul(m.at(rank, j), pinv);
        for (int r = 0; r < n; ++r) {
            if (r == rank) continue;
            fel c = m.at(r, col);
            if (c == 0) continue;
            for (int j = col; j < n; ++j) m.at(r, j) = f.sub(m.at(r, j), f.mul(c, m.at(rank, j)));
        }
        ++rank;
    }
    if (rank < n) det = 0;
    return {rank, det};
}

template <class F>
int mat_rank(const F& f, const Mat& m) {
    return mat_rank_det(f, m).first;
}

template <class F>
fel mat_det(const F& f, const Mat& m) {
    return mat_rank_det(f, m).second;
}

template <class F>
Mat mat_inv(const F& f, const Mat& m) {
    const int n = m.n;
    Mat a = m, r = mat_id(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int i = col; i < n; ++i)
            if (a.at(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) throw SingularMatrix("mat_inv: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a.e[static_cast<size_t>(piv) * n + j], a.e[static_cast<size_t>(col) * n + j]);
                std::swap(r.e[static_cast<size_t>(piv) * n + j], r.e[static_cast<size_t>(col) * n + j]);
            }
        }
        fel pinv = f.inv(a.at(col, col));
        for (int j = 0; j < n; ++j) {
            a.at(col, j) = f.mul(a.at(col, j), pinv);
            r.at(col, j) = f.mul(r.at(col, j), pinv);
        }
        for (int i = 0; i < n; ++i) {
            if (i == col) continue;
            fel c = a.at(i, col);
            if (c == 0) continue;
            for (int j = 0; j < n; ++j) {
                a.at(i, j) = f.sub(a.at(i, j), f.mul(c, a.at(col, j)));
                r.at(i, j) = f.sub(r.at(i, j), f.mul(c, r.at(col, j)));
            }
        }
    }
    return r;
}

template <class F>
std::array<fel, kMaxDim> vec_mul(const F& f, const std::array<fel, kMaxDim>& v, const Mat& m) {
    std::array<fel, kMaxDim> r{};
    for (int j = 0; j < m.n; ++j) {
        fel s = 0;
        for (int i = 0; i < m.n; ++i) s = f.add(s, f.mul(v[i], m.at(i, j)));
        r[j] = s;
    }
    return r;
}

// --- characteristic polynomial -------------------------------------------

// Coefficients of det(xI - A), low degree first; monic of degree n.
// Division-free expansion: dynamic programming over column subsets.
template <class F>
std::vector<fel> char_poly(const F& f, const Mat& a) {
    const int n = a.n;
    using Poly = std::vector<fel>; // low degree first
    auto pmul = [&](const Poly& u, const Poly& v) {
        Poly r(u.size() + v.size() - 1, 0);
        for (size_t i = 0; i < u.size(); ++i) {
            if (u[i] == 0) continue;
            for (size_t j = 0; j < v.size(); ++j)
                r[i + j] = f.add(r[i + j], f.mul(u[i], v[j]));
        }
        return r;
    };
    auto padd = [&](Poly u, const Poly& v, bool negate) {
        if (u.size() < v.size()) u.resize(v.size(), 0);
        for (size_t i = 0; i < v.size(); ++i)
            u[i] = negate ? f.sub(u[i], v[i]) : f.add(u[i], v[i]);
        return u;
    };
    // entry polynomials of xI - A
    auto entry = [&](int i, int j) {
        Poly p{f.neg(a.at(i, j))};
        if (i == j) p.push_back(1);
        return p;
    };
    // dp[mask] = determinant of the minor on rows 0..k-1 and columns in mask,
    // where k = popcount(mask). Expanding along the topmost unused row, the
    // cofactor sign for column col is (-1)^(col - #chosen columns before col).
    std::vector<Poly> dp(size_t(1) << n), next(size_t(1) << n);
    dp[0] = Poly{1};
    for (int row = 0; row < n; ++row) {
        for (auto& v : next) v.clear();
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (dp[mask].empty()) continue;
            if (static_cast<int>(__builtin_popcount(mask)) != row) continue;
            for (int col = 0; col < n; ++col) {
                if (mask & (1u << col)) continue;
                int before = __builtin_popcount(mask & ((1u << col) - 1));
                bool negate = ((col - before) % 2) == 1;
                Poly term = pmul(dp[mask], entry(row, col));
                next[mask | (1u << col)] = padd(next[mask | (1u << col)], term, negate);
            }
        }
        dp.swap(next);
    }
    Poly res = dp[(size_t(1) << n) - 1];
    res.resize(n + 1, 0);
    return res;
}

template <class F>
fel poly_eval(const F& f, const std::vector<fel>& poly, fel x) {
    fel r = 0;
    for (size_t i = poly.size(); i-- > 0;) r = f.add(f.mul(r, x), poly[i]);
    return r;
}

// Divide poly by (x - root); assumes root is a root.
template <class F>
std::vector<fel> poly_deflate(const F& f, const std::vector<fel>& poly, fel root) {
    int deg = static_cast<int>(poly.size()) - 1;
    std::vector<fel> q(deg, 0);
    fel carry = poly[deg];
    for (int i = deg - 1; i >= 0; --i) {
        q[i] = carry;
        carry = f.add(poly[i], f.mul(root, carry));
    }
    return q;
}

// --- eigenvalue profile ----------------------------------------------------

struct EigenProfile {
    std::vector<std::pair<fel, int>> roots; // (root code in GF(p^2), multiplicity), sorted by code
    bool all_in_prime_subfield = true;
    std::vector<fel> unsplit; // leftover factor with no roots in GF(p^2) (low degree first); empty if split

    int multiplicity_of(fel r) const {
        for (auto& [v, m] : roots)
            if (v == r) return m;
        return 0;
    }
};

// Roots of the characteristic polynomial, searched exhaustively in GF(p^2).
// `poly` has coefficients already encoded in `ext`.
inline EigenProfile roots_in_ext(const QuadExtField& ext, std::vector<fel> poly) {
    EigenProfile out;
    for (int cand = 0; cand < ext.size(); ++cand) {
        fel c = static_cast<fel>(cand);
        int mult = 0;
        while (poly.size() > 1 && poly_eval(ext, poly, c) == 0) {
            poly = poly_deflate(ext, poly, c);
            ++mult;
        }
        if (mult > 0) {
            out.roots.emplace_back(c, mult);
            if (!ext.in_prime_subfield(c)) out.all_in_prime_subfield = false;
        }
    }
    if (poly.size() > 1) out.unsplit = poly;
    return out;
}

// Matrix over GF(p); eigenvalues searched in the given quadratic extension.
inline EigenProfile char_poly_eigenvalues(const PrimeField& f, const Mat& m, const QuadExtField& ext) {
    std::vector<fel> cp = char_poly(f, m); // coefficients lie in 0..p-1, valid codes in ext
    return roots_in_ext(ext, cp);
}

// Matrix over GF(p^2); eigenvalues searched in the same field.
inline EigenProfile char_poly_eigenvalues(const QuadExtField& f, const Mat& m) {
    return roots_in_ext(f, char_poly(f, m));
}

// --- unipotent Jordan profile ----------------------------------------------

// Partition of n from the rank sequence of (u - I)^k; throws if not unipotent.
template <class F>
std::vector<int> jordan_unipotent_profile(const F& f, const Mat& u) {
    const int n = u.n;
    Mat nmat = mat_sub(f, u, mat_id(n));
    std::vector<int> ranks{n};
    Mat powk = mat_id(n);
    for (int k = 1; k <= n; ++k) {
        powk = mat_mul(f, powk, nmat);
        ranks.push_back(mat_rank(f, powk));
    }
    if (ranks[n] != 0) throw NonUnipotent("jordan_unipotent_profile: (u-I)^n != 0");
    // d_k = rank((u-I)^(k-1)) - rank((u-I)^k) counts blocks of size >= k
    std::vector<int> partition;
    for (int k = 1; k <= n; ++k) {
        int ge_k = ranks[k - 1] - ranks[k];
        int ge_k1 = (k < n) ? ranks[k] - ranks[k + 1] : 0;
        int exactly_k = ge_k - ge_k1;
        for (int t = 0; t < exactly_k; ++t) partition.push_back(k);
    }
    std::sort(partition.rbegin(), partition.rend());
    return partition;
}

// --- invariant bilinear forms ----------------------------------------------

enum class FormMode { Symmetric, Any };

// Basis of { L : g L g^T = L for every g in gens }, one homogeneous system.
template <class F>
std::vector<Mat> invariant_form_space(const F& f, const std::vector<Mat>& gens, FormMode mode) {
    if (gens.empty()) throw std::invalid_argument("invariant_form_space: no generators");
    const int n = gens.front().n;
    // unknowns: entries of L
    std::vector<std::pair<int, int>> unknowns;
    if (mode == FormMode::Symmetric) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) unknowns.emplace_back(i, j);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) unknowns.emplace_back(i, j);
    }
    const int nu = static_cast<int>(unknowns.size());
    auto unknown_index = [&](int i, int j) {
        if (mode == FormMode::Symmetric && i > j) std::swap(i, j);
        for (int k = 0; k < nu; ++k)
            if (unknowns[k] == std::make_pair(i, j)) return k;
        return -1;
    };
    // rows: for each gen, for each (r,c): sum_{i,j} g[r][i] g[c][j] L[i][j] - L[r][c] = 0
    std::vector<std::vector<fel>> rows;
    for (const Mat& g : gens) {
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                std::vector<fel> row(nu, 0);
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        fel coef = f.mul(g.at(r, i), g.at(c, j));
                        if (coef == 0) continue;
                        int k = unknown_index(i, j);
                        row[k] = f.add(row[k], coef);
                    }
                }
                int k = unknown_index(r, c);
                row[k] = f.sub(row[k], 1);
                rows.push_back(std::move(row));
            }
        }
    }
    // nullspace by Gaussian elimination
    int nrows = static_cast<int>(rows.size());
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < nu && rank < nrows; ++col) {
        int piv = -1;
        for (int r = rank; r < nrows; ++r)
            if (rows[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[piv], rows[rank]);
        fel pinv = f.inv(rows[rank][col]);
        for (int j = col; j < nu; ++j) rows[rank][j] = f.mul(rows[rank][j], pinv);
        for (int r = 0; r < nrows; ++r) {
            if (r == rank) continue;
            fel cc = rows[r][col];
            if (cc == 0) continue;
            for (int j = col; j < nu; ++j)
                rows[r][j] = f.sub(rows[r][j], f.mul(cc, rows[rank][j]));
        }
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<bool> is_pivot(nu, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<Mat> basis;
    for (int freec = 0; freec < nu; ++freec) {
        if (is_pivot[freec]) continue;
        std::vector<fel> sol(nu, 0);
        sol[freec] = 1;
        for (int r = rank - 1; r >= 0; --r) {
            int pc = pivot_col[r];
            fel s = 0;
            for (int j = pc + 1; j < nu; ++j)
                if (sol[j] != 0) s = f.add(s, f.mul(rows[r][j], sol[j]));
            sol[pc] = f.neg(s);
        }
        Mat L = mat_zero(n);
        for (int k = 0; k < nu; ++k) {
            auto [i, j] = unknowns[k];
            L.at(i, j) = sol[k];
            if (mode == FormMode::Symmetric) L.at(j, i) = sol[k];
        }
        basis.push_back(L);
    }
    return basis;
}

// Number of projective classes of non-degenerate members of the span of `basis`.
// Representatives: first nonzero coefficient normalized to 1.
template <class F>
int count_projective_nondegenerate(const F& f, const std::vector<Mat>& basis) {
    if (basis.empty()) return 0;
    const int k = static_cast<int>(basis.size());
    const int n = basis.front().n;
    int count = 0;
    std::vector<fel> coef(k, 0);
    for (int lead = 0; lead < k; ++lead) {
        std::fill(coef.begin(), coef.end(), 0);
        coef[lead] = 1;
        while (true) {
            Mat L = basis[lead];
            for (int t = lead + 1; t < k; ++t)
                if (coef[t] != 0) L = mat_add(f, L, mat_scale(f, coef[t], basis[t]));
            if (mat_det(f, L) != 0) ++count;
            int pos = lead + 1; // odometer over the free coefficients
            while (pos < k) {
                int v = coef[pos] + 1;
                if (v < f.size()) {
                    coef[pos] = static_cast<fel>(v);
                    break;
                }
                coef[pos] = 0;
                ++pos;
            }
            if (pos >= k) break;
        }
        (void)n;
    }
    return count;
}

} // namespace su4check
