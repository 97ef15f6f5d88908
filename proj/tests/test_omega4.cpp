#include <catch2/catch.hpp>

#include "su4check/omega4.hpp"

using namespace su4check;

TEST_CASE("orthogonal module data across primes") {
    for (int p : {5, 7, 11}) {
        auto d = build_omega4(p);
        CHECK(d->R->size() == static_cast<std::uint32_t>(p * p));
        CHECK(matrix_order(d->fp, d->t, 4 * p * p) == (p * p - 1) / 2);
        auto [cr, cn] = form_counts(*d);
        CHECK(cr == p);
        CHECK(cn == 1);
    }
}

TEST_CASE("involution inverts the sylow group elementwise") {
    auto d = build_omega4(5);
    const PrimeField& f = d->fp;
    // i r1 i r1 = identity
    Mat prod = mat_mul(f, mat_mul(f, d->invol, d->r1), mat_mul(f, d->invol, d->r1));
    CHECK(prod == mat_id(4));
    // and for every element of R
    Mat iinv = mat_inv(f, d->invol);
    for (std::uint32_t k = 0; k < d->R->size(); ++k) {
        Mat r = d->R->elem(k);
        Mat lhs = mat_mul(f, iinv, mat_mul(f, r, d->invol));
        CHECK(lhs == mat_inv(f, r));
    }
}

TEST_CASE("involution pattern by residue class") {
    auto rep5 = involution_behavior(*build_omega4(5));
    CHECK(rep5.eps == -1); // 4 | p-1: fixes the middle plane, negates the ends
    CHECK(rep5.pattern_ok);
    auto rep7 = involution_behavior(*build_omega4(7));
    CHECK(rep7.eps == 1); // 4 | p+1: fixes the ends, negates the middle plane
    CHECK(rep7.pattern_ok);
    auto rep11 = involution_behavior(*build_omega4(11));
    CHECK(rep11.eps == 1);
    CHECK(rep11.pattern_ok);
}

TEST_CASE("sl2 opposite borel eigenspaces") {
    PrimeField f5(5), f7(7);
    auto rep = sl2_opposite_borel_check(5, find_primitive(f5)); // order 4
    CHECK(rep.r_normalizes_opposite);
    CHECK(rep.eigenvalues_distinct);
    CHECK(rep.eigenspaces_are_fixed_spaces);
    // an order-6 diagonal for p = 7
    auto rep7 = sl2_opposite_borel_check(7, find_primitive(f7));
    CHECK(rep7.eigenvalues_distinct);
    CHECK(rep7.eigenspaces_are_fixed_spaces);
    // the excluded involution case
    auto rep2 = sl2_opposite_borel_check(5, f5.neg(1));
    CHECK(rep2.skipped_order2);
}

TEST_CASE("rejects an alpha whose negative is not primitive") {
    PrimeField f(5);
    // -alpha = 4 has order 2, not 4
    CHECK_THROWS_AS(build_omega4_with_alpha(5, 1), ConstructionMismatch);
}
