#include <catch2/catch.hpp>

#include <memory>

#include "oracle_p3.hpp"
#include "su4check/groupkit.hpp"
#include "su4check/su4.hpp"

using namespace su4check;

namespace {

// one Sylow system per test binary; building it is cheap but not free
const Su4System& shared_sys5() {
    static std::unique_ptr<Su4System> sys = build_sylow(5);
    return *sys;
}

GroupTable<PrimeMatTraits> make_d8(const PrimeField& f) {
    Mat rot = mat_zero(2);
    rot.at(0, 1) = 1;
    rot.at(1, 0) = f.neg(1);
    Mat refl = mat_id(2);
    refl.at(1, 1) = f.neg(1);
    return GroupTable<PrimeMatTraits>(PrimeMatTraits{&f, 2}, {rot, refl});
}

} // namespace

TEST_CASE("closure basics") {
    static PrimeField f5(5);
    GroupTable<PrimeMatTraits> trivial(PrimeMatTraits{&f5, 2}, {});
    CHECK(trivial.size() == 1);

    const Su4System& sys = shared_sys5();
    CHECK(sys.S.size() == 15625);
    // idempotence: closing a closed element list adds nothing
    CHECK(closure_within(sys.S, sys.V.elems).order() == sys.V.order());
    CHECK(closure_within(sys.S, sys.Sder.elems).order() == sys.Sder.order());
}

TEST_CASE("closure budget is an error, not a truncation") {
    CHECK_THROWS_AS(build_sylow(5, 1000), BudgetExceeded);
    try {
        build_sylow(5, 1000);
    } catch (const BudgetExceeded& e) {
        CHECK(e.partial_count >= 1000);
    }
}

TEST_CASE("center and derived of an abelian group") {
    const Su4System& sys = shared_sys5();
    // the complement block: closure of the two a-parameter generators
    Subgroup torus_part = closure_within(sys.S, {sys.S.gen_index(0), sys.S.gen_index(1)});
    CHECK(torus_part.order() == 25);
    CHECK(is_abelian(sys.S, torus_part));
    CHECK(center(sys.S, torus_part).order() == 25);
    CHECK(derived_subgroup(sys.S, torus_part).order() == 1);
}

TEST_CASE("p = 3 invariants agree with the naive oracle") {
    auto sys = build_sylow(3);
    oracle3::Oracle G;
    G.build();
    REQUIRE(G.elems.size() == sys->S.size());
    auto whole = G.whole();
    CHECK(G.center_of(whole).size() == sys->Z.order());
    CHECK(G.derived_of(whole).size() == sys->Sder.order());
    CHECK(G.exponent_of(whole) == sys->exponent);
    CHECK(G.frattini_of(whole).size() == frattini(sys->S, sys->whole, 3).order());

    SECTION("subgroup counts above the center match the oracle enumeration") {
        // oracle: every subgroup of S/Z by closure growth; library: every
        // conjugacy class above the center, orbits summed
        auto zq = G.quotient_by(G.center_of(whole));
        auto all_quotient_subs = oracle3::Oracle::quotient_subgroups(zq);
        auto classes = subgroup_classes(sys->S, 3, 729, sys->Z, {3});
        std::uint64_t total = 0;
        for (auto& c : classes) total += c.orbit_size;
        CHECK(total == all_quotient_subs.size());
    }
}

TEST_CASE("subgroup classes of small groups") {
    static PrimeField f5(5);
    // C2 x C2 as diagonal sign matrices
    Mat a = mat_id(2), b = mat_id(2);
    a.at(0, 0) = f5.neg(1);
    b.at(1, 1) = f5.neg(1);
    GroupTable<PrimeMatTraits> v4(PrimeMatTraits{&f5, 2}, {a, b});
    REQUIRE(v4.size() == 4);
    auto classes = subgroup_classes(v4, 1, 4, trivial_subgroup(), {2});
    CHECK(classes.size() == 5);

    auto d8 = make_d8(f5);
    REQUIRE(d8.size() == 8);
    auto d8_classes = subgroup_classes(d8, 1, 8, trivial_subgroup(), {2});
    CHECK(d8_classes.size() == 8);
    std::uint64_t total = 0;
    for (auto& c : d8_classes) total += c.orbit_size;
    CHECK(total == 10);
}

TEST_CASE("dihedral subgroup counts against the subset oracle") {
    static PrimeField f5(5);
    auto d8 = make_d8(f5);
    // enumerate all 2^8 subsets and test subgrouphood directly
    int subgroups = 0;
    for (unsigned mask = 1; mask < 256; ++mask) {
        if (!(mask & 1)) continue; // must contain the identity (index 0)
        bool closed = true;
        for (int i = 0; i < 8 && closed; ++i) {
            if (!(mask >> i & 1)) continue;
            for (int j = 0; j < 8 && closed; ++j) {
                if (!(mask >> j & 1)) continue;
                if (!(mask >> d8.mul(i, j) & 1)) closed = false;
            }
        }
        if (closed) ++subgroups;
    }
    CHECK(subgroups == 10);
}

TEST_CASE("maximal subgroup classes of the sylow group") {
    const Su4System& sys = shared_sys5();
    // the documented window: order p^5 up to conjugacy, from the trivial group
    auto classes = subgroup_classes(sys.S, 3125, 3125, trivial_subgroup(), {5});
    CHECK(classes.size() == 31); // hyperplane count (5^3 - 1)/(5 - 1)
    for (auto& c : classes) CHECK(c.orbit_size == 1);
    // and it matches the direct hyperplane construction
    CHECK(sys.maximals.size() == 31);
}

TEST_CASE("quotient actions") {
    const Su4System& sys = shared_sys5();
    auto Q = quotient_view(sys.S, sys.whole, sys.V);
    auto C = elementary_coordinates(Q, 5);
    REQUIRE(C.dim == 2);

    SECTION("elements of the kernel act trivially") {
        for (int t = 0; t < 20; ++t) {
            std::uint32_t v = sys.V.elems[t * 7 % sys.V.elems.size()];
            Mat m = conjugation_action_matrix(sys.S, Q, C, sys.whole, sys.V, v);
            CHECK(m == mat_id(2));
        }
    }

    SECTION("GU diagonal acts as a full Singer cycle, torus as its square") {
        const QuadExtField& fld = sys.fld;
        PrimeField fp(5);
        fel eta = find_primitive(fld);
        Mat singer = diag4(fld, eta, 1, 1, fld.inv(fld.frobenius(eta)));
        Mat on_top = section_action(sys, sys.whole, sys.V, singer);
        CHECK(matrix_order(fp, on_top, 200) == 24);
        auto cp = char_poly(fp, on_top);
        bool root = false;
        for (int x = 0; x < 5; ++x)
            if (poly_eval(fp, cp, static_cast<fel>(x)) == 0) root = true;
        CHECK_FALSE(root); // irreducible: a Singer matrix
        // a determinant-one torus member only reaches the square of the cycle
        Mat theta = torus_diag(fld, eta, fld.inv(eta));
        CHECK(matrix_order(fp, section_action(sys, sys.whole, sys.V, theta), 200) == 12);
    }

    SECTION("everything inside S acts trivially on the middle section") {
        auto Qd = quotient_view(sys.S, sys.Sder, sys.Z);
        auto Cd = elementary_coordinates(Qd, 5);
        bool all_trivial = true;
        for (std::uint32_t s = 0; s < sys.S.size(); ++s) {
            for (std::uint32_t g : sys.Sder.gens) {
                if (!sys.Z.contains(sys.S.commutator(g, s))) {
                    all_trivial = false;
                    break;
                }
            }
            if (!all_trivial) break;
        }
        CHECK(all_trivial);
        // spot-check the action matrices as well
        Mat m = conjugation_action_matrix(sys.S, Qd, Cd, sys.Sder, sys.Z, sys.S.gen_index(0));
        CHECK(m == mat_id(2));
    }

    SECTION("non-normalizing elements are rejected") {
        // V is normal in S, so use a subgroup V does not normalize: the
        // order-25 complement block and an element of V outside its normalizer
        Subgroup torus_part = closure_within(sys.S, {sys.S.gen_index(0), sys.S.gen_index(1)});
        Subgroup triv = trivial_subgroup();
        auto Qt = quotient_view(sys.S, torus_part, triv);
        auto Ct = elementary_coordinates(Qt, 5);
        bool threw = false;
        for (std::uint32_t v : sys.V.elems) {
            try {
                conjugation_action_matrix(sys.S, Qt, Ct, torus_part, triv, v);
            } catch (const NotNormalizing&) {
                threw = true;
                break;
            }
        }
        CHECK(threw);
    }
}

TEST_CASE("isomorphism fingerprints") {
    const Su4System& sys = shared_sys5();
    CHECK(fingerprint_label(group_invariants(sys.S, sys.V, 5), 5) == "elementary-abelian p^4");
    CHECK(fingerprint_label(group_invariants(sys.S, sys.Q, 5), 5) == "extraspecial p+^(1+4)");

    // S'<e> for e in Q outside S'
    std::uint32_t e = 0;
    for (std::uint32_t x : sys.Q.elems)
        if (!sys.Sder.contains(x)) {
            e = x;
            break;
        }
    std::vector<std::uint32_t> seed = sys.Sder.gens;
    seed.push_back(e);
    Subgroup ext = closure_within(sys.S, seed);
    REQUIRE(ext.order() == 625);
    CHECK(fingerprint_label(group_invariants(sys.S, ext, 5), 5) == "p+^(1+2) x C_p");

    SECTION("structural witness: central product decomposition") {
        // brute-force witness that ext is (extraspecial p^3) x C_p: find
        // non-commuting x1, x2 and a central z outside <x1, x2> generating it
        bool witnessed = false;
        for (std::uint32_t x1 : ext.gens) {
            for (std::uint32_t x2 : ext.gens) {
                if (sys.S.mul(x1, x2) == sys.S.mul(x2, x1)) continue;
                Subgroup inner = closure_within(sys.S, {x1, x2});
                if (inner.order() != 125) continue;
                Subgroup zext = center(sys.S, ext);
                for (std::uint32_t z : zext.elems) {
                    if (inner.contains(z)) continue;
                    Subgroup all = closure_within(sys.S, {x1, x2, z});
                    if (all.elems == ext.elems && sys.S.order_of(z) == 5) witnessed = true;
                }
            }
        }
        CHECK(witnessed);
    }

    SECTION("the same label attaches to the explicit model group") {
        static PrimeField f5(5);
        // block matrices: a Heisenberg 3x3 block and a separate unipotent line
        Mat g1 = mat_id(5), g2 = mat_id(5), g3 = mat_id(5);
        g1.at(1, 0) = 1;
        g2.at(2, 1) = 1;
        g3.at(4, 3) = 1;
        GroupTable<PrimeMatTraits> model(PrimeMatTraits{&f5, 5}, {g1, g2, g3});
        REQUIRE(model.size() == 625);
        CHECK(fingerprint_label(group_invariants(model, whole_group(model), 5), 5) ==
              "p+^(1+2) x C_p");
    }

    SECTION("an unlisted type comes back unknown") {
        // a maximal-class subgroup of order p^4
        std::vector<std::uint32_t> seed{sys.S.gen_index(0), sys.S.gen_index(2)};
        Subgroup k = closure_within(sys.S, seed);
        REQUIRE(k.order() == 625);
        CHECK(fingerprint_label(group_invariants(sys.S, k, 5), 5) == "unknown");
    }
}

TEST_CASE("class invariants agree between representatives") {
    const Su4System& sys = shared_sys5();
    auto classes = subgroup_classes(sys.S, 625, 625, sys.Z, {5});
    REQUIRE(!classes.empty());
    int checked = 0;
    for (auto& cls : classes) {
        if (cls.orbit_size == 1 || checked >= 3) continue;
        ++checked;
        // conjugate the representative by a fixed generator and re-derive
        Subgroup conj = conjugate_subgroup(sys.S, cls.rep, sys.S.gen_index(0));
        auto a = group_invariants(sys.S, cls.rep, 5);
        auto b = group_invariants(sys.S, conj, 5);
        CHECK(a.center_order == b.center_order);
        CHECK(a.derived_order == b.derived_order);
        CHECK(a.exponent == b.exponent);
        CHECK(a.order_histogram == b.order_histogram);
    }
    CHECK(checked > 0);
}

TEST_CASE("normal closures are normal") {
    const Su4System& sys = shared_sys5();
    // normal closure in Q of a single element outside the derived subgroup
    std::uint32_t e = 0;
    for (std::uint32_t x : sys.Q.elems)
        if (!sys.Sder.contains(x)) {
            e = x;
            break;
        }
    Subgroup nc = normal_closure(sys.S, sys.Q, {e});
    CHECK(nc.contains(e));
    for (std::uint32_t g : sys.Q.gens)
        for (std::uint32_t x : nc.gens) CHECK(nc.contains(sys.S.conj(x, g)));
}

TEST_CASE("subgroup product rejects non-permuting factors") {
    const Su4System& sys = shared_sys5();
    // two distinct conjugate cyclic subgroups of the complement block need not
    // permute; find a pair whose product set is not a subgroup
    Subgroup a = closure_within(sys.S, {sys.S.gen_index(0)});
    bool threw = false;
    for (std::uint32_t s = 1; s < sys.S.size() && !threw; s += 7) {
        Subgroup b = conjugate_subgroup(sys.S, a, s);
        if (b.elems == a.elems) continue;
        try {
            subgroup_product(sys.S, a, b);
        } catch (const ConstructionMismatch&) {
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("class enumeration rejects a non-normal base") {
    const Su4System& sys = shared_sys5();
    Subgroup torus_part = closure_within(sys.S, {sys.S.gen_index(0), sys.S.gen_index(1)});
    CHECK_THROWS_AS(subgroup_classes(sys.S, 25, 625, torus_part, {5}), NotNormalizing);
}

TEST_CASE("abelian invariant factors") {
    static PrimeField f5(5);
    auto d8 = make_d8(f5);
    Subgroup rot = closure_within(d8, {d8.gen_index(0)});
    CHECK(abelian_invariant_factors(d8, rot) == std::vector<std::uint64_t>{4});
    Subgroup whole = whole_group(d8);
    CHECK_THROWS_AS(abelian_invariant_factors(d8, whole), std::invalid_argument);
}
