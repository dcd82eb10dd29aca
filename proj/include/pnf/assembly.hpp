#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "pnf/whittaker.hpp"

namespace pnf {

// ----------------------------------------------------------------- level invariants

struct LevelInvariants {
    long N = 1, M = 1;
    long N0 = 1;  ///< largest integer with N0^2 | N
    long N1 = 1;  ///< N / N0
    long N2 = 1;  ///< N1 / N0, squarefree
    long M1 = 1;  ///< M / gcd(M, N1)
    /// Upper bound N0^{1/6} N1^{1/3} M1^{1/2} (times lambda^{5/24}) as text.
    std::string bound_text;
};

LevelInvariants level_invariants(long N, long M);

/// Exponent of N in N0^{1/6} N1^{1/3} M1^{1/2} for N = p^n, M = p^m.
Rational prime_power_exponent(int n, int m);

struct IntroRow {
    int n = 1;                 ///< N = p^n
    std::vector<int> ms;       ///< M = p^m for m in ms
    int n0 = 0, n1 = 0, m1 = 0;
    Rational upper;            ///< exponent of N in the upper bound
    std::string lower;         ///< reference lower-bound column
    bool lower_conjectured_sharp = true;
};

/// Rows for N = p^n, n <= 5, grouping consecutive m with equal (n0, n1, m1).
std::vector<IntroRow> intro_table();

// ----------------------------------------------------------------- exponent algebra

enum class Sym : int { kN0 = 0, kN1, kN2, kM1, kT, kY, kLambda, kCount };

const char* sym_name(Sym s);

/// Monomial prod s^{e_s} over the symbols, exponents rational.
class ExponentVector {
public:
    ExponentVector() = default;
    static ExponentVector one() { return {}; }
    static ExponentVector symbol(Sym s, const Rational& e = 1);

    const Rational& operator[](Sym s) const { return e_[static_cast<std::size_t>(s)]; }
    Rational& operator[](Sym s) { return e_[static_cast<std::size_t>(s)]; }

    ExponentVector operator*(const ExponentVector& o) const;
    ExponentVector operator/(const ExponentVector& o) const;
    ExponentVector pow(const Rational& k) const;
    /// Replace s by the given monomial.
    ExponentVector substitute(Sym s, const ExponentVector& value) const;
    bool operator==(const ExponentVector& o) const { return e_ == o.e_; }
    bool operator!=(const ExponentVector& o) const { return !(*this == o); }
    /// Coordinatewise: every exponent of o / this is >= 0 (all symbols >= 1, y eliminated first).
    bool dominated_by(const ExponentVector& o) const;
    std::string to_string() const;

private:
    std::array<Rational, static_cast<std::size_t>(Sym::kCount)> e_{};
};

/// Sum of monomials with the dominated ones removed (order preserved).
std::vector<ExponentVector> reduce_dominated(const std::vector<ExponentVector>& terms);

struct RegimeCheck {
    std::string name;
    ExponentVector threshold;              ///< y compared to this monomial
    std::vector<ExponentVector> reduced;   ///< terms after eliminating y
    bool ok = true;
    std::vector<std::string> failing;      ///< failing monomials with the quotient
};

struct CaseCheckReport {
    ExponentVector Lambda;                        ///< T^{1/6} N2^{1/3}
    ExponentVector target;                        ///< squared bound without the common N1 M1 factor
    std::vector<ExponentVector> substituted;      ///< five terms after the substitution
    std::vector<ExponentVector> reduced;          ///< maximal terms
    std::vector<ExponentVector> displayed;        ///< the two-term display as printed
    bool display_matches = false;
    std::vector<std::string> display_mismatch;
    RegimeCheck small_y_printed;     ///< y <= T^{1/4} N2^{-1/6} with the derived terms
    RegimeCheck small_y_display;     ///< same threshold with the displayed terms
    RegimeCheck large_y_printed;     ///< Whittaker bound for y >= T^{1/4} N2^{-1/6}
    ExponentVector large_y_fourier;  ///< first Whittaker term at the printed threshold, not squared
    bool large_y_fourier_matches = false;  ///< equals N2^{-5/12} T^{3/8}
    RegimeCheck small_y_corrected;   ///< y <= T^{1/4} N2^{-1/2}
    RegimeCheck large_y_corrected;
    bool degenerate_ok = false;      ///< N2 = 1: both regimes close
    bool printed_ok = false;         ///< display, both printed regimes
    bool corrected_ok = false;
};

CaseCheckReport exponent_casecheck();

// ----------------------------------------------------------------- Whittaker expansion

/// One prime of the level: the newform there and the group element g_p.
struct LocalFactor {
    std::shared_ptr<const Newform> W;
    Mat2 g;
};

struct WhittakerLength {
    long Q = 1;      ///< prod p^{q(g_p)}
    long N0g = 1;    ///< prod p^{n0(g_p)}
    long N0 = 1;
    long M1 = 1;
    bool divides_ok = true;  ///< Q | N0 M1 and N0g | N0
};

/// g_p must lie in K a(p^{n1}) with l(g_p) <= n0 when n is odd.
WhittakerLength whittaker_length(const std::vector<LocalFactor>& factors);

/// The cosets K a(p^{n1}) mod p^{n+1} satisfying the parity condition.
std::vector<Mat2> j_coset_elements(const LocalRep& pi);

/// prod_p W_p(a(n p^{-q(g_p)}) g_p), exact.
Cyclo local_coefficient_product(long n, const std::vector<LocalFactor>& factors);

struct BlockAverageReport {
    long blocks = 0;
    double constant = 0;  ///< max of block sum / (N0g n1^{-1/2})
    bool periodic_ok = true;
    long periodic_pairs = 0;
};

/// Blocks [r N0g, (r+1) N0g) of integers coprime to the level for each n1 | N^inf in n1s, r < r_max;
/// also checks |lambda(n0 n1)| = |lambda(n0' n1)| when n0 = n0' mod N0g.
BlockAverageReport block_average(const std::vector<LocalFactor>& factors, const std::vector<long>& n1s, int r_max);

struct FourierBound {
    double value = 0;       ///< Q T / y + N0g T^{1/3}
    std::string form;
    double crossover_y = 0; ///< T^{2/3} Q / N0g
};

FourierBound fourier_bound_eval(double Q, double N0g, double T, double y);

}  // namespace pnf
