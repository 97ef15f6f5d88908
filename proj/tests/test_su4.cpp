#include <catch2/catch.hpp>

#include <memory>
#include <set>

#include "su4check/su4.hpp"

using namespace su4check;

namespace {
const Su4System& sys5() {
    static std::unique_ptr<Su4System> sys = build_sylow(5);
    return *sys;
}
} // namespace

TEST_CASE("every constructed generator is special unitary") {
    const Su4System& sys = sys5();
    for (const Mat& g : sys.sylow_gens) {
        CHECK(is_unitary(sys.fld, g, sys.form));
        CHECK(mat_det(sys.fld, g) == 1);
    }
}

TEST_CASE("diagonal torus counting oracle") {
    const Su4System& sys = sys5();
    auto td = torus_normalizer(sys);
    // independent count: pairs (a, b) of units with a*b in GF(p)^x
    const QuadExtField& f = sys.fld;
    int count = 0;
    for (int a = 1; a < f.q; ++a)
        for (int b = 1; b < f.q; ++b) {
            fel ab = f.mul(static_cast<fel>(a), static_cast<fel>(b));
            if (ab != 0 && f.in_prime_subfield(ab)) ++count;
        }
    CHECK(count == 96);
    CHECK(td.d0.size() == 96);
    CHECK(td.d == 2);        // gcd(4, 6)
    CHECK(td.gu_kernel == 6); // norm-one scalars
}

TEST_CASE("torus members preserve the form and the determinant") {
    const Su4System& sys = sys5();
    auto td = torus_normalizer(sys);
    for (const Mat& t : td.d0) {
        REQUIRE(is_unitary(sys.fld, t, sys.form));
        REQUIRE(mat_det(sys.fld, t) == 1);
    }
}

TEST_CASE("family orbits: determinant-one torus halves, GU diagonal full") {
    const Su4System& sys = sys5();
    auto td = torus_normalizer(sys);
    // the determinant-one torus reaches only the squares of the cycle on the
    // p+1 family members: two orbits of size (p+1)/2
    auto perm_theta = middle_family_permutation(sys, td.theta);
    std::set<int> seen;
    std::vector<int> orbit_sizes;
    for (size_t i = 0; i < perm_theta.size(); ++i) {
        if (seen.count(static_cast<int>(i))) continue;
        int len = 0, cur = static_cast<int>(i);
        while (!seen.count(cur)) {
            seen.insert(cur);
            cur = perm_theta[cur];
            ++len;
        }
        orbit_sizes.push_back(len);
    }
    std::sort(orbit_sizes.begin(), orbit_sizes.end());
    CHECK(orbit_sizes == std::vector<int>{3, 3});
    // the GU diagonal is transitive in a single (p+1)-cycle
    auto perm_singer = middle_family_permutation(sys, td.singer);
    CHECK(is_single_cycle(perm_singer));
}

TEST_CASE("outer order at p = 5") {
    const Su4System& sys = sys5();
    CHECK(outer_order_check(sys) == 192);
}

TEST_CASE("frobenius is a semilinear automorphism of S") {
    const Su4System& sys = sys5();
    auto perm = frobenius_perm(sys);
    // involution
    for (std::uint32_t i = 0; i < 200; ++i) {
        std::uint32_t x = (i * 79) % sys.S.size();
        CHECK(perm[perm[x]] == x);
    }
    // multiplicative: frob(xy) = frob(x) frob(y), spot checks
    for (std::uint32_t i = 0; i < 50; ++i) {
        std::uint32_t x = (i * 131) % sys.S.size();
        std::uint32_t y = (i * 257 + 3) % sys.S.size();
        CHECK(perm[sys.S.mul(x, y)] == sys.S.mul(perm[x], perm[y]));
    }
}

TEST_CASE("levi block normalizes Q and has the right order") {
    const Su4System& sys = sys5();
    auto levi = levi_su2(sys);
    CHECK(levi.block->size() == 120);
}

TEST_CASE("construction rejects p outside the supported range") {
    CHECK_THROWS(build_sylow(2));
    CHECK_THROWS(build_sylow(17));
}

TEST_CASE("distinguished subgroups are stable under the stored automorphisms") {
    const Su4System& sys = sys5();
    auto td = torus_normalizer(sys);
    auto stable_under = [&](const std::vector<std::uint32_t>& perm) {
        auto image_of = [&](const Subgroup& H) {
            std::vector<std::uint32_t> img;
            img.reserve(H.elems.size());
            for (std::uint32_t x : H.elems) img.push_back(perm[x]);
            std::sort(img.begin(), img.end());
            return img;
        };
        return image_of(sys.Z) == sys.Z.elems && image_of(sys.Sder) == sys.Sder.elems &&
               image_of(sys.V) == sys.V.elems && image_of(sys.Q) == sys.Q.elems;
    };
    CHECK(stable_under(frobenius_perm(sys)));
    CHECK(stable_under(conj_perm(sys, td.theta)));
    CHECK(stable_under(conj_perm(sys, td.tau)));
    CHECK(stable_under(conj_perm(sys, td.singer)));
}

TEST_CASE("torus actions are recorded as generator-image tuples") {
    const Su4System& sys = sys5();
    auto td = torus_normalizer(sys);
    REQUIRE(td.d0_action.size() == td.d0.size());
    // trivial tuples correspond exactly to the scalar kernel
    GenImageTuple triv{};
    for (size_t i = 0; i < sys.sylow_gens.size(); ++i)
        triv[i] = sys.S.index_of(sys.sylow_gens[i]);
    int trivial = 0;
    for (auto& t : td.d0_action)
        if (t == triv) ++trivial;
    CHECK(trivial == td.d);
    // the semilinear map moves at least one generator and squares to identity
    CHECK_FALSE(td.frobenius_action == triv);
    auto perm = frobenius_perm(sys);
    for (size_t i = 0; i < 3; ++i) CHECK(perm[td.frobenius_action[i]] == triv[i]);
}

TEST_CASE("every element outside V acts on V with one size-3 block") {
    const Su4System& sys = sys5();
    PrimeField fp(5);
    auto Q = quotient_view(sys.S, sys.V, trivial_subgroup());
    auto C = elementary_coordinates(Q, 5);
    const std::vector<int> expect{3, 1};
    for (std::uint32_t s = 0; s < sys.S.size(); ++s) {
        if (sys.V.contains(s)) continue;
        Mat act = quotient_action_matrix(Q, C, [&](std::uint32_t x) { return sys.S.conj(x, s); });
        REQUIRE(jordan_unipotent_profile(fp, act) == expect);
    }
}

TEST_CASE("coordinates refuse a nonabelian quotient") {
    const Su4System& sys = sys5();
    // S/Z still has class 2, so it carries no vector-space coordinates
    auto Q = quotient_view(sys.S, sys.whole, sys.Z);
    CHECK_THROWS_AS(elementary_coordinates(Q, 5), ConstructionMismatch);
}
