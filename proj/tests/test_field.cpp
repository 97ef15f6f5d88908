#include <catch2/catch.hpp>

#include "su4check/field.hpp"

using namespace su4check;

namespace {

// plain-integer multiplicative order mod p, independent of the field code
int naive_order_mod(int a, int p) {
    int x = a % p, n = 1;
    while (x != 1) {
        x = x * a % p;
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("canonical modulus choices") {
    // smallest non-residue, confirmed by a plain residue scan
    for (int p : {3, 5, 7, 11, 13}) {
        QuadExtField f(p);
        std::vector<bool> sq(p, false);
        for (int x = 1; x < p; ++x) sq[x * x % p] = true;
        int expect = 0;
        for (int c = 2; c < p; ++c)
            if (!sq[c]) {
                expect = c;
                break;
            }
        CHECK(f.nonres == expect);
    }
}

TEST_CASE("primitive elements") {
    PrimeField f5(5);
    fel g = find_primitive(f5);
    CHECK(g == 2); // smallest residue of order 4
    CHECK(naive_order_mod(g, 5) == 4);

    QuadExtField q5(5);
    fel eta = find_primitive(q5);
    CHECK(q5.order_of(eta) == 24);
    CHECK(q5.pow(eta, 24) == 1); // Lagrange
    for (int p : {7, 11, 13}) {
        QuadExtField q(p);
        CHECK(q.order_of(find_primitive(q)) == p * p - 1);
    }
}

TEST_CASE("frobenius is an involution fixing the prime subfield") {
    QuadExtField q(5);
    for (int x = 0; x < q.q; ++x) {
        fel a = static_cast<fel>(x);
        CHECK(q.frobenius(q.frobenius(a)) == a);
        if (q.in_prime_subfield(a)) CHECK(q.frobenius(a) == a);
        if (x > 0) CHECK(q.pow(a, q.q - 1) == 1);
    }
}

TEST_CASE("norm maps onto the prime field with fibers of size p+1") {
    for (int p : {5, 7}) {
        QuadExtField q(p);
        std::vector<int> fiber(p, 0);
        for (int x = 1; x < q.q; ++x) {
            fel n = q.norm(static_cast<fel>(x));
            REQUIRE(q.in_prime_subfield(n));
            REQUIRE(n != 0);
            fiber[n]++;
        }
        for (int v = 1; v < p; ++v) CHECK(fiber[v] == p + 1);
    }
}

TEST_CASE("norm of a primitive element is primitive downstairs") {
    QuadExtField q(5);
    fel eta = find_primitive(q);
    fel n = q.norm(eta);
    CHECK(q.in_prime_subfield(n)); // the code of a prime-subfield element is its residue
    CHECK(naive_order_mod(n, 5) == 4);
}

TEST_CASE("trace-zero line") {
    for (int p : {5, 7, 11}) {
        QuadExtField q(p);
        fel w = trace_zero_generator(q);
        CHECK(q.trace(w) == 0);
        int count = 0;
        for (int x = 0; x < q.q; ++x)
            if (q.trace(static_cast<fel>(x)) == 0) ++count;
        CHECK(count == p); // a line over GF(p)
    }
}
