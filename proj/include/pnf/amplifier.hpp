#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pnf/cyclo.hpp"
#include "pnf/padic.hpp"

namespace pnf {

// ----------------------------------------------------------------- Hecke algebra

/// Central character at unramified primes: omega(p) as a root of unity; completely multiplicative.
using CentralValues = std::map<long, Root>;

/// omega(n) for n coprime to the level; throws if a prime of n is missing.
Root central_value(const CentralValues& omega, long n);

/// Finite combination of Hecke symbols kappa_l, keyed by the index l.
using HeckeExpansion = std::map<long, Cyclo>;

/// kappa_m * kappa_n^* = omega^{-1}(n) sum_{t | gcd(m, n)} omega(t) kappa_{mn / t^2}, exact.
HeckeExpansion hecke_convolution_expand(long m, long n, const CentralValues& omega);

/// Product of two expansions with kappa_a * kappa_b = sum_{t | gcd(a, b)} omega(t) kappa_{ab / t^2}.
HeckeExpansion hecke_multiply(const HeckeExpansion& x, const HeckeExpansion& y, const CentralValues& omega);

// ----------------------------------------------------------------- amplifier

/// Exact element of Q(i).
struct GaussRational {
    Rational re;
    Rational im;

    GaussRational operator+(const GaussRational& o) const { return {re + o.re, im + o.im}; }
    GaussRational operator-(const GaussRational& o) const { return {re - o.re, im - o.im}; }
    GaussRational operator*(const GaussRational& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    bool operator==(const GaussRational& o) const { return re == o.re && im == o.im; }
    Rational norm2() const { return re * re + im * im; }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

/// Hecke eigenvalues at one unramified prime.
struct HeckeEigenvalues {
    long ell = 2;
    GaussRational lambda;     ///< lambda(ell)
    GaussRational lambda_sq;  ///< lambda(ell^2)

    /// lambda(ell)^2 - lambda(ell^2).
    GaussRational central() const { return lambda * lambda - lambda_sq; }
};

/// Rejects inputs unless |lambda^2 - lambda(ell^2)| = 1 exactly.
void check_hecke_constraint(const HeckeEigenvalues& h);

/// Exact decision of sqrt(A) + sqrt(B) >= 1 for A = |lambda|^2, B = |lambda(ell^2)|^2.
bool certified_unit_sum(const HeckeEigenvalues& h);

/// Synthetic eigenvalues: omega in {1, -1, i, -i}, Sato-Tate angle, lambda rounded to 2^-20,
/// lambda(ell^2) = lambda^2 - omega exactly; lambda = 0 with probability 1/16.
HeckeEigenvalues sample_hecke(std::mt19937_64& rng, long ell);

struct UnitSumSweep {
    long draws = 0;
    long violations = 0;
    long zero_draws = 0;
    double min_sum = 1e300;
};

UnitSumSweep unit_sum_sweep(long draws, std::uint64_t seed);

struct AmplifierCoefficients {
    double Lambda = 1;
    long level = 1;
    std::vector<long> primes;                      ///< S
    std::map<long, std::complex<double>> c;        ///< c_r at r = ell, ell^2
    std::map<long, std::complex<double>> y;        ///< y_l, l <= 16 Lambda^4
    std::map<long, std::string> shape;             ///< shape label of each l in the y support
    bool shapes_ok = true;                         ///< every l with y_l != 0 has an allowed shape
    bool unit_c_ok = true;                         ///< |c_r| = 1 on the support
    double y1_over_Lambda = 0;
    double max_offdiag = 0;                        ///< max |y_l| over l != 1
    double lambda_prime = 0;                       ///< sum over S of |lambda(ell)| + |lambda(ell^2)|
    bool lambda_prime_certified = true;            ///< each summand >= 1, exactly
};

/// S = primes coprime to the level in [Lambda, 2 Lambda]; eigenvalues looked up per prime.
AmplifierCoefficients build_amplifier(double Lambda, long level, const std::map<long, HeckeEigenvalues>& eigen);

/// Primes coprime to level in [Lambda, 2 Lambda].
std::vector<long> amplifier_primes(double Lambda, long level);

// ----------------------------------------------------------------- lattice counting

/// Point z = x + i y of the upper half plane, with x and y^2 rational.
struct UpperPoint {
    Rational x;
    Rational y2;

    double y() const { return std::sqrt(y2.get_d()); }
    static UpperPoint from_double(double x, double y);
    std::string to_string() const;
};

struct LatticeMatrix {
    long a = 1, b = 0, c = 0, d = 1;
    bool operator==(const LatticeMatrix& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

/// u(z, gamma z) = |z - gamma z|^2 / (4 Im z Im gamma z), exact.
Rational point_pair_invariant(const UpperPoint& z, const LatticeMatrix& g);

/// {gamma : a > 0, N2 | c, ad - bc = ell, u(z, gamma z) <= delta}, ordered by (c, d, a, b).
/// box_factor scales the entry box; 1 is sufficient, 2 is the recount.
std::vector<LatticeMatrix> enumerate_close_lattice(const UpperPoint& z, long ell, double delta, long N2,
                                                   double box_factor = 1.0);

/// Same count with delta = 1 allowed (the kernel support).
std::vector<LatticeMatrix> enumerate_support_lattice(const UpperPoint& z, long ell, long N2);

/// Im z >= sqrt(3) / (2L) and |cz + d|^2 >= 1/L for all integer (c, d) != 0, exact.
bool fundamental_membership(const UpperPoint& z, long L);

/// Bracket Lambda + Lambda N2^{1/2} delta^{1/2} y + Lambda^{5/2} delta^{1/2} N2^{-1/2}
///   + Lambda^{5/2} delta^{1/2} y + Lambda^4 delta N2^{-1}, times (Lambda N2)^eps.
double counting_bound(double Lambda, double delta, long N2, double y, double eps = 0.01);

/// Per-ell comparison target: sqrt(ell) times the bound at Lambda = ell.
double counting_bound_single(long ell, double delta, long N2, double y, double eps = 0.01);

struct CountRow {
    std::string z;
    long ell = 1;
    double delta = 0;
    long N2 = 1;
    long count = 0;
    double bound = 0;
    double ratio = 0;
};

struct CountSweep {
    std::vector<CountRow> rows;
    double max_ratio = 0;
    long recount_configs = 0;
    long recount_mismatches = 0;
    bool monotone_ok = true;  ///< non-decreasing in delta, non-increasing under N2 | N2'
};

/// Grid sweep of counts against the per-ell bound, with monotonicity checks.
CountSweep count_sweep(const std::vector<UpperPoint>& zs, long ell_max, const std::vector<double>& deltas,
                       const std::vector<long>& N2s);

/// Double-box recount on random configurations; returns the number of mismatches.
long double_box_recount(long configs, std::uint64_t seed, long* compared = nullptr);

struct GeometricSide {
    double value = 0;      ///< sum_l |y_l| / sqrt(l) sum_gamma |kernel(u)|
    double bound = 0;      ///< dyadic aggregation of counting_bound
    double ratio = 0;
    long matrices = 0;
    double identity_part = 0;  ///< contribution of l = 1
};

/// Amplified geometric side against the dyadic counting bound; z must lie in F_{N2}.
GeometricSide geometric_side(const UpperPoint& z, const AmplifierCoefficients& amp, long N2,
                             const std::function<double(double)>& kernel);

}  // namespace pnf
