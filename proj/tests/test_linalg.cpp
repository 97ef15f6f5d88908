#include <catch2/catch.hpp>

#include "su4check/field.hpp"
#include "su4check/linalg.hpp"
#include "su4check/omega4.hpp"

using namespace su4check;

namespace {

// deterministic little generator for reproducible "random" matrices
struct Lcg {
    std::uint64_t s = 0x2545F4914F6CDD1Dull;
    std::uint32_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<std::uint32_t>(s >> 33);
    }
};

Mat random_invertible(const PrimeField& f, int n, Lcg& rng) {
    while (true) {
        Mat m = mat_zero(n);
        for (int i = 0; i < n * n; ++i) m.e[i] = static_cast<fel>(rng.next() % f.p);
        if (mat_det(f, m) != 0) return m;
    }
}

// independent rank via row reduction on plain ints
int naive_rank_mod(std::vector<std::vector<int>> m, int p) {
    int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] % p != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[piv], m[rank]);
        int inv = 1;
        while (m[rank][c] * inv % p != 1) ++inv;
        for (int j = 0; j < cols; ++j) m[rank][j] = m[rank][j] * inv % p;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] % p == 0) continue;
            int f = m[r][c] % p;
            for (int j = 0; j < cols; ++j) m[r][j] = ((m[r][j] - f * m[rank][j]) % p + p * p) % p;
        }
        ++rank;
    }
    return rank;
}

} // namespace

TEST_CASE("eigenvalues of simple matrices") {
    PrimeField f(5);
    QuadExtField q(5);
    auto id = char_poly_eigenvalues(f, mat_id(4), q);
    REQUIRE(id.roots.size() == 1);
    CHECK(id.roots[0] == std::make_pair(static_cast<fel>(1), 4));
    CHECK(id.all_in_prime_subfield);

    fel lam = find_primitive(f);
    Mat d = mat_zero(4);
    d.at(0, 0) = lam;
    d.at(1, 1) = lam;
    d.at(2, 2) = f.inv(lam);
    d.at(3, 3) = f.inv(lam);
    auto prof = char_poly_eigenvalues(f, d, q);
    CHECK(prof.multiplicity_of(lam) == 2);
    CHECK(prof.multiplicity_of(f.inv(lam)) == 2);
    CHECK(prof.all_in_prime_subfield);
}

TEST_CASE("roots beyond the quadratic extension are reported, not found") {
    PrimeField f(5);
    QuadExtField q(5);
    // companion matrix of x^4 - 2: no roots in GF(25), so the quartic is
    // irreducible and must come back unsplit
    Mat c = mat_zero(4);
    c.at(0, 1) = 1;
    c.at(1, 2) = 1;
    c.at(2, 3) = 1;
    c.at(3, 0) = 2;
    auto prof = char_poly_eigenvalues(f, c, q);
    CHECK(prof.roots.empty());
    REQUIRE(prof.unsplit.size() == 5);

    // block diag(companion(x^2 - 2), I_2): roots 1,1 in GF(5) and +-w upstairs
    Mat b = mat_id(4);
    b.at(0, 0) = 0;
    b.at(0, 1) = 1;
    b.at(1, 0) = 2;
    b.at(1, 1) = 0;
    auto mixed = char_poly_eigenvalues(f, b, q);
    CHECK(mixed.multiplicity_of(1) == 2);
    CHECK_FALSE(mixed.all_in_prime_subfield);
    CHECK(mixed.unsplit.empty());
    CHECK(mixed.roots.size() == 3); // 1, w, -w
}

TEST_CASE("eigen profile is conjugation invariant") {
    PrimeField f(5);
    QuadExtField q(5);
    Lcg rng;
    Mat d = mat_zero(4);
    d.at(0, 0) = 2;
    d.at(1, 1) = 2;
    d.at(2, 2) = 3;
    d.at(3, 3) = 1;
    auto base = char_poly_eigenvalues(f, d, q);
    for (int trial = 0; trial < 20; ++trial) {
        Mat g = random_invertible(f, 4, rng);
        Mat conj = mat_mul(f, mat_inv(f, g), mat_mul(f, d, g));
        auto prof = char_poly_eigenvalues(f, conj, q);
        REQUIRE(prof.roots == base.roots);
    }
}

TEST_CASE("unipotent jordan profiles") {
    PrimeField f(5);
    CHECK(jordan_unipotent_profile(f, mat_id(4)) == std::vector<int>{1, 1, 1, 1});

    // the first orthogonal-module generator: golden value (3,1), frozen from
    // the independent rank-sequence computation below
    auto d = build_omega4(5);
    auto profile = jordan_unipotent_profile(f, d->r1);
    CHECK(profile == std::vector<int>{3, 1});
    {
        std::vector<std::vector<int>> n(4, std::vector<int>(4, 0));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) n[i][j] = d->r1.at(i, j) - (i == j ? 1 : 0);
        // ranks of powers via the naive reducer
        auto mul = [&](const std::vector<std::vector<int>>& a,
                       const std::vector<std::vector<int>>& b) {
            std::vector<std::vector<int>> r(4, std::vector<int>(4, 0));
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k)
                    for (int j = 0; j < 4; ++j)
                        r[i][j] = (r[i][j] + a[i][k] * b[k][j] % 5 + 25) % 5;
            return r;
        };
        std::vector<std::vector<int>> fixed = n;
        for (auto& row : fixed)
            for (auto& v : row) v = ((v % 5) + 5) % 5;
        std::vector<int> ranks{4, naive_rank_mod(fixed, 5)};
        auto pow = fixed;
        for (int k = 2; k <= 4; ++k) {
            pow = mul(pow, fixed);
            ranks.push_back(naive_rank_mod(pow, 5));
        }
        CHECK(ranks == std::vector<int>{4, 2, 1, 0, 0});
        // rank sequence (4,2,1,0) forces the block profile (3,1)
    }

    Mat notuni = mat_id(4);
    notuni.at(0, 0) = 2;
    CHECK_THROWS_AS(jordan_unipotent_profile(f, notuni), NonUnipotent);
}

TEST_CASE("jordan profile is conjugation invariant") {
    PrimeField f(5);
    auto d = build_omega4(5);
    Lcg rng;
    auto base = jordan_unipotent_profile(f, d->r1);
    for (int trial = 0; trial < 10; ++trial) {
        Mat g = random_invertible(f, 4, rng);
        Mat c = mat_mul(f, mat_inv(f, g), mat_mul(f, d->r1, g));
        CHECK(jordan_unipotent_profile(f, c) == base);
    }
}

TEST_CASE("invariant form spaces") {
    PrimeField f(5);
    auto full = invariant_form_space(f, {mat_id(4)}, FormMode::Symmetric);
    CHECK(full.size() == 10); // n(n+1)/2

    auto d = build_omega4(5);
    auto basis_r = invariant_form_space(f, {d->r1, d->r2}, FormMode::Symmetric);
    CHECK(basis_r.size() == 2);
    CHECK(count_projective_nondegenerate(f, basis_r) == 5);
    auto basis_n = invariant_form_space(f, {d->r1, d->r2, d->t}, FormMode::Symmetric);
    CHECK(basis_n.size() == 1);
    CHECK(count_projective_nondegenerate(f, basis_n) == 1);
    // post hoc: solved members really are invariant
    for (const Mat& L : basis_r)
        for (const Mat& g : {d->r1, d->r2})
            CHECK(mat_mul(f, g, mat_mul(f, L, mat_transpose(g))) == L);
}
