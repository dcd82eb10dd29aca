#pragma once

#include <string>
#include <vector>

#include "pnf/chars.hpp"
#include "pnf/cyclo.hpp"

namespace pnf {

enum class RepKind { kUnramifiedPS, kRamifiedPS, kSteinberg, kDihedral };

const char* rep_kind_name(RepKind k);

/// Character of Q_p^x trivial on units with the given value at p.
GL1Char unramified_char(long p, Root at_p);
/// Character of Q_p^x from a residue character, with value 1 at p.
GL1Char tilde_char(const ResidueCharacter& mu);

/// Generic irreducible unitary representation of GL2(Q_p) with central character trivial at p.
struct LocalRep {
    RepKind kind = RepKind::kUnramifiedPS;
    long p = 2;
    int n = 0;   ///< conductor exponent
    int n0 = 0;  ///< floor(n/2)
    int n1 = 0;  ///< ceil(n/2)
    int m = 0;   ///< conductor exponent of the central character
    int m1 = 0;  ///< max(0, m - n1)
    GL1Char chi1;  ///< first inducing character, or the Steinberg twist
    GL1Char chi2;  ///< second inducing character (principal series)
    QuadExtCharacter xi;  ///< character of E^x (dihedral)
    GL1Char omega;
    std::string id;
    std::string params;  ///< human-readable parameter summary
};

LocalRep make_principal_series(const GL1Char& chi1, const GL1Char& chi2);
LocalRep make_steinberg(const GL1Char& chi);
/// Dihedral supercuspidal from xi = theta(residue) psi_E(beta log(.)) with a(xi) = a_xi.
LocalRep make_dihedral(long p, bool ramified_E, int a_xi, long theta_index, const QuadElem& beta);

/// Twist nu (x) pi; nu(p) must keep the central character trivial at p.
LocalRep twist(const LocalRep& pi, const GL1Char& nu);
/// The contragredient, realized as omega^{-1} (x) pi.
LocalRep contragredient(const LocalRep& pi);

/// a(nu pi).
int twist_conductor(const LocalRep& pi, const GL1Char& nu);
/// kappa_j(nu pi) q^{-1/2}: L(s, nu pi)^{-1} = prod (1 - root_j q^{1/2 - s}).
std::vector<ScaledRoot> l_factor_roots(const LocalRep& pi, const GL1Char& nu);
/// epsilon(1/2, nu pi, psi).
Cyclo twist_epsilon(const LocalRep& pi, const GL1Char& nu);
/// W_pi(a(p^a)) for a >= 0.
Cyclo diagonal_whittaker(const LocalRep& pi, int a);

struct CatalogCoverage {
    long p = 2;
    int n = 0;
    std::string variant;
    bool present = false;
    std::string note;
};

/// Catalog of representations with n <= n_max, with a per-variant coverage report.
std::vector<LocalRep> build_catalog(long p, int n_max, std::vector<CatalogCoverage>* coverage = nullptr);

struct TwistCountRow {
    int r = 0;
    long count = 0;
    Rational bound_sq;  ///< q^{2l - r}; count^2 must not exceed it
    bool ok = true;
};

struct TwistCountReport {
    int l = 0;
    int ceiling = 0;  ///< max(n, l + m)
    bool conductor_bound_ok = true;
    std::vector<TwistCountRow> rows;
    bool ok = true;
};

/// Enumerates mu with a(mu) = l and tallies a(mu pi) against max(n, l + m).
TwistCountReport twist_count_bound_check(const LocalRep& pi, int l);

}  // namespace pnf
