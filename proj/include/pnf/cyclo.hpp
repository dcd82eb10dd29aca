#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pnf/padic.hpp"

namespace pnf {

/// Upper bound on the modulus of any cyclotomic number (configurable).
std::uint64_t cyclo_modulus_cap();
void set_cyclo_modulus_cap(std::uint64_t cap);

/// Exact element of Q(zeta_M), zeta_M = exp(2 pi i / M).
///
/// Stored as a sparse combination of powers zeta^e with exponents in a fixed
/// basis of size phi(M): e = i + s*j with 0 <= i < s, 0 <= j < phi(r), where
/// r = rad(M) and s = M / r. This basis comes from Phi_M(x) = Phi_r(x^s).
class Cyclo {
public:
    using Term = std::pair<std::uint32_t, Rational>;

    Cyclo() = default;
    Cyclo(const Rational& q);  // NOLINT(google-explicit-constructor)
    Cyclo(long q) : Cyclo(Rational(q)) {}  // NOLINT(google-explicit-constructor)

    /// Sum of c * zeta_M^e over the given (e, c) pairs; exponents may be arbitrary.
    static Cyclo from_terms(std::uint64_t M, std::vector<Term> raw) { return from_raw(M, std::move(raw)); }
    /// Sum over e of counts[e] * zeta_M^e.
    static Cyclo from_counts(std::uint64_t M, const std::vector<long>& counts);
    /// zeta_M^e.
    static Cyclo root(std::uint64_t M, std::int64_t e);
    /// Positive square root of a prime p, exactly.
    static Cyclo sqrt_prime(long p);
    /// p^{h/2} for any integer h.
    static Cyclo half_power(long p, int h);

    std::uint64_t modulus() const { return M_; }
    const std::vector<Term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
    Rational rational_value() const;  // requires is_rational()

    Cyclo operator+(const Cyclo& o) const;
    Cyclo operator-(const Cyclo& o) const;
    Cyclo operator-() const;
    Cyclo operator*(const Cyclo& o) const;
    Cyclo operator*(const Rational& q) const;
    Cyclo& operator+=(const Cyclo& o) { return *this = *this + o; }
    Cyclo& operator-=(const Cyclo& o) { return *this = *this - o; }
    Cyclo& operator*=(const Cyclo& o) { return *this = *this * o; }
    bool operator==(const Cyclo& o) const;
    bool operator!=(const Cyclo& o) const { return !(*this == o); }

    /// Complex conjugation zeta -> zeta^{-1}.
    Cyclo conj() const;
    /// Galois automorphism zeta -> zeta^k, gcd(k, M) = 1.
    Cyclo galois(std::int64_t k) const;
    /// |z|^2 = z * conj(z).
    Cyclo norm2() const { return *this * conj(); }
    /// Multiplicative inverse (exact linear solve); throws on zero.
    Cyclo inverse() const;
    Cyclo pow(int k) const;

    /// Re-express in Q(zeta_N), M | N.
    Cyclo promote(std::uint64_t N) const;

    std::complex<double> to_complex() const;

    /// Canonical text: "M|e:c,e:c,...".
    std::string to_string() const;

private:
    std::uint64_t M_ = 1;
    std::vector<Term> terms_;

    static Cyclo from_raw(std::uint64_t M, std::vector<Term> raw);
    void shrink();
};

/// Sign of a real cyclotomic number via its complex embedding; exact zero detection.
int real_sign(const Cyclo& z);

/// Root of unity zeta_M^e kept symbolically, with reduced (M, e).
struct Root {
    std::uint64_t M = 1;
    std::uint64_t e = 0;

    static Root make(std::uint64_t M, std::int64_t e);
    Root operator*(const Root& o) const;
    Root inv() const { return make(M, -static_cast<std::int64_t>(e)); }
    Root pow(std::int64_t k) const;
    bool is_one() const { return e == 0; }
    bool operator==(const Root& o) const { return M == o.M && e == o.e; }
    bool operator!=(const Root& o) const { return !(*this == o); }
    bool operator<(const Root& o) const { return M != o.M ? M < o.M : e < o.e; }
    std::uint64_t order() const { return M; }
    Cyclo to_cyclo() const { return Cyclo::root(M, static_cast<std::int64_t>(e)); }
    std::complex<double> to_complex() const;
};

/// zeta times p^{h/2}: the shape of every Satake-type ratio used in the tables.
struct ScaledRoot {
    Root zeta;
    int half_exp = 0;  ///< power of sqrt(p)
    long p = 2;

    ScaledRoot operator*(const ScaledRoot& o) const;
    ScaledRoot conj() const { return ScaledRoot{zeta.inv(), half_exp, p}; }
    ScaledRoot pow(int k) const;
    Cyclo to_cyclo() const;
    std::complex<double> to_complex() const;
    double modulus() const;
};

/// 1 / (1 - z), exact.
Cyclo inv_one_minus(const ScaledRoot& z);

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t euler_phi(std::uint64_t n);

}  // namespace pnf
