#pragma once

#include <climits>
#include <cstdint>
#include <functional>
#include <string>

#include <gmpxx.h>

#include "pnf/error.hpp"

namespace pnf {

using Rational = mpq_class;
using Integer = mpz_class;

/// Valuation of zero.
inline constexpr int kInfiniteValuation = INT_MAX;

/// p-adic valuation of a rational; kInfiniteValuation for zero.
int valuation(const Rational& x, long p);
int valuation(const Integer& x, long p);

/// x * p^{-v(x)}; requires x != 0.
Rational unit_part(const Rational& x, long p);

/// p^k as an exact rational (k may be negative).
Rational prime_power(long p, int k);
long ipow(long base, int exp);

/// Residue of a p-integral rational modulo p^k, in [0, p^k).
long residue(const Rational& x, long p, int k);

/// Inverse of u modulo m (gcd(u, m) = 1).
long inverse_mod(long u, long m);

/// Nonnegative remainder.
inline long mod_floor(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

bool is_prime(long n);

/// 2x2 invertible matrix over Q, interpreted p-adically by its user.
struct Mat2 {
    Rational a{1}, b{0}, c{0}, d{1};

    Mat2() = default;
    Mat2(Rational a_, Rational b_, Rational c_, Rational d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

    Rational det() const { return a * d - b * c; }
    Mat2 inverse() const;
    Mat2 operator*(const Mat2& o) const;
    bool operator==(const Mat2& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator!=(const Mat2& o) const { return !(*this == o); }
    std::string to_string() const;

    static Mat2 identity() { return Mat2(); }
    /// [0 1; -1 0]
    static Mat2 weyl() { return Mat2(0, 1, -1, 0); }
    /// [y 0; 0 1]
    static Mat2 diag_a(const Rational& y) { return Mat2(y, 0, 0, 1); }
    /// [1 x; 0 1]
    static Mat2 unipotent(const Rational& x) { return Mat2(1, x, 0, 1); }
    /// [t 0; 0 t]
    static Mat2 central(const Rational& t) { return Mat2(t, 0, 0, t); }
    /// [1 0; c 1]
    static Mat2 lower(const Rational& c) { return Mat2(1, 0, c, 1); }
};

/// True iff all entries are p-integral and det is a p-adic unit.
bool in_maximal_compact(const Mat2& k, long p);
/// Membership in K1(p^n): maximal compact, top-left in 1 + p^n, lower-left in p^n.
bool in_k1(const Mat2& k, long p, int n);
/// Membership in K0(p^n): maximal compact with lower-left in p^n.
bool in_k0(const Mat2& k, long p, int n);

struct IwasawaParts {
    Rational z;  ///< central factor
    Rational x;  ///< unipotent entry
    Rational y;  ///< diagonal entry
    Mat2 k;      ///< maximal compact part
};

/// g = z(z) n(x) a(y) k with k in GL2(Z_p).
IwasawaParts iwasawa_decompose(const Mat2& g, long p);

/// Position of g in the double coset decomposition of G by K1(p^n).
struct CosetPosition {
    int t = 0;
    int l = 0;
    Rational v{1};       ///< unit representative; only its class mod p^{min(l, n-l)} matters
    Rational zfactor{1};
    Rational xshift{0};
    Mat2 witness;        ///< element of K1(p^n) closing the identity
    int n = 0;
};

/// The representative a(p^t) w n(p^{-l} v).
Mat2 coset_representative(long p, int t, int l, const Rational& v);

/// z(zfactor) n(xshift) a(p^t) w n(p^{-l} v) witness, as a matrix.
Mat2 reassemble(const CosetPosition& pos, long p);

CosetPosition coset_position(const Mat2& g, long p, int n);

struct MatrixInvariants {
    int t = 0;
    int l = 0;
    int n0g = 0;
    int qg = 0;
};

MatrixInvariants matrix_invariants(const Mat2& g, long p, int n, int m);

/// Calls f(a, b, c, d) for every integer matrix mod p^r with unit determinant.
/// Entries are representatives in [0, p^r).
void for_each_k_mod(long p, int r, const std::function<void(long, long, long, long)>& f);

/// Number of elements of GL2(Z/p^r).
long gl2_order(long p, int r);

}  // namespace pnf
