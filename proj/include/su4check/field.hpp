// Arithmetic in GF(p) and GF(p^2) for small odd primes (p <= 13).
//
// Elements are stored as packed integer codes. For GF(p^2) = GF(p)[w]/(w^2 - c),
// with c the first quadratic non-residue in scan order, the element x + y*w is
// the code x + p*y. All choices are canonical so that element indices agree
// bit-for-bit across runs.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace su4check {

using fel = std::uint16_t; // packed field element code

inline constexpr int kMaxPrime = 13;

inline bool is_small_odd_prime(int p) {
    return p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
}

struct PrimeField {
    int p;

    explicit PrimeField(int p_) : p(p_) {
        if (!is_small_odd_prime(p)) {
            throw std::invalid_argument("PrimeField: unsupported prime " + std::to_string(p_));
        }
    }

    int size() const { return p; }
    fel zero() const { return 0; }
    fel one() const { return 1; }
    fel add(fel a, fel b) const { return static_cast<fel>((a + b) % p); }
    fel sub(fel a, fel b) const { return static_cast<fel>((a + p - b) % p); }
    fel neg(fel a) const { return static_cast<fel>((p - a) % p); }
    fel mul(fel a, fel b) const { return static_cast<fel>((a * b) % p); }

    fel inv(fel a) const {
        if (a == 0) throw std::domain_error("PrimeField: inverse of zero");
        return pow(a, p - 2);
    }

    fel pow(fel a, long long e) const {
        long long m = p - 1;
        if (a == 0) return e == 0 ? one() : 0;
        e %= m;
        if (e < 0) e += m;
        fel r = 1, b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    // identity on the prime field; provided so matrix code is field-generic
    fel frobenius(fel a) const { return a; }

    int order_of(fel a) const {
        if (a == 0) throw std::domain_error("PrimeField: order of zero");
        int n = 1;
        fel x = a;
        while (x != 1) {
            x = mul(x, a);
            ++n;
        }
        return n;
    }

    bool is_square(fel a) const {
        if (a == 0) return true;
        return pow(a, (p - 1) / 2) == 1;
    }
};

struct QuadExtField {
    int p;
    int nonres;  // modulus is w^2 - nonres
    int q;       // p^2
    PrimeField prime;

    explicit QuadExtField(int p_) : p(p_), nonres(0), q(p_ * p_), prime(p_) {
        for (int c = 2; c < p; ++c) {
            if (!prime.is_square(static_cast<fel>(c))) {
                nonres = c;
                break;
            }
        }
        if (nonres == 0) throw std::logic_error("QuadExtField: no non-residue found");
        mul_tab_.assign(static_cast<size_t>(q) * q, 0);
        for (int a = 0; a < q; ++a) {
            for (int b = 0; b <= a; ++b) {
                fel r = mul_slow(static_cast<fel>(a), static_cast<fel>(b));
                mul_tab_[static_cast<size_t>(a) * q + b] = r;
                mul_tab_[static_cast<size_t>(b) * q + a] = r;
            }
        }
        inv_tab_.assign(q, 0);
        for (int a = 1; a < q; ++a) {
            for (int b = 1; b < q; ++b) {
                if (mul(static_cast<fel>(a), static_cast<fel>(b)) == 1) {
                    inv_tab_[a] = static_cast<fel>(b);
                    break;
                }
            }
        }
    }

    int size() const { return q; }
    fel zero() const { return 0; }
    fel one() const { return 1; }
    fel code(int x, int y) const { return static_cast<fel>(x % p + p * (y % p)); }
    int x_of(fel a) const { return a % p; }
    int y_of(fel a) const { return a / p; }
    bool in_prime_subfield(fel a) const { return y_of(a) == 0; }

    fel add(fel a, fel b) const {
        return code((x_of(a) + x_of(b)) % p, (y_of(a) + y_of(b)) % p);
    }
    fel sub(fel a, fel b) const {
        return code((x_of(a) + p - x_of(b)) % p, (y_of(a) + p - y_of(b)) % p);
    }
    fel neg(fel a) const { return code((p - x_of(a)) % p, (p - y_of(a)) % p); }
    fel mul(fel a, fel b) const { return mul_tab_[static_cast<size_t>(a) * q + b]; }

    fel inv(fel a) const {
        if (a == 0) throw std::domain_error("QuadExtField: inverse of zero");
        return inv_tab_[a];
    }

    // x + y*w  |->  x - y*w, since w^p = -w for w^2 a non-residue
    fel frobenius(fel a) const { return code(x_of(a), (p - y_of(a)) % p); }

    fel pow(fel a, long long e) const {
        long long m = q - 1;
        if (a == 0) return e == 0 ? one() : 0;
        e %= m;
        if (e < 0) e += m;
        fel r = 1, b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    fel norm(fel a) const { return mul(a, frobenius(a)); }        // in GF(p)
    fel trace(fel a) const { return add(a, frobenius(a)); }       // in GF(p)
    bool trace_zero(fel a) const { return trace(a) == 0; }

    int order_of(fel a) const {
        if (a == 0) throw std::domain_error("QuadExtField: order of zero");
        int n = 1;
        fel x = a;
        while (x != 1) {
            x = mul(x, a);
            ++n;
        }
        return n;
    }

  private:
    fel mul_slow(fel a, fel b) const {
        int x1 = x_of(a), y1 = y_of(a), x2 = x_of(b), y2 = y_of(b);
        int x = (x1 * x2 + nonres * y1 * y2) % p;
        int y = (x1 * y2 + x2 * y1) % p;
        return code(x, y);
    }

    std::vector<fel> mul_tab_;
    std::vector<fel> inv_tab_;
};

// Smallest generator of the multiplicative group in the canonical code order.
inline fel find_primitive(const PrimeField& f) {
    for (int a = 2; a < f.p; ++a) {
        if (f.order_of(static_cast<fel>(a)) == f.p - 1) return static_cast<fel>(a);
    }
    throw std::logic_error("find_primitive: none found");
}

inline fel find_primitive(const QuadExtField& f) {
    for (int a = 2; a < f.q; ++a) {
        if (f.order_of(static_cast<fel>(a)) == f.q - 1) return static_cast<fel>(a);
    }
    throw std::logic_error("find_primitive: none found");
}

// Canonical generator of the trace-zero line of GF(p^2): w itself.
inline fel trace_zero_generator(const QuadExtField& f) { return f.code(0, 1); }

} // namespace su4check
