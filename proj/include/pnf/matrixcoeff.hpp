#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "pnf/whittaker.hpp"

namespace pnf {

/// Normalized matrix coefficient g -> <v, pi(g) v> / <v, v> of the newvector v.
class MatrixCoefficient {
public:
    explicit MatrixCoefficient(std::shared_ptr<const Newform> W);

    const Newform& newform() const { return *W_; }
    const LocalRep& rep() const { return W_->rep(); }

    /// Whittaker inner-product backend; exact, with the geometric tail summed in closed form.
    Cyclo value(const Mat2& g) const;

    /// [K : K^0] with K^0 = K for n even and the upper-triangular-mod-p group for n odd.
    long k0_index() const;
    /// Membership of an integral matrix in K^0.
    bool in_k0(const Mat2& k) const;
    /// The truncated conjugated coefficient: value(a(p^{-n1}) g a(p^{n1})) on Z K^0, zero elsewhere.
    Cyclo truncated(const Mat2& g) const;

private:
    std::shared_ptr<const Newform> W_;
    Cyclo norm2_;
    std::vector<ScaledRoot> diag_roots_;
    std::vector<Cyclo> diag_weights_;

    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, int, long, std::string>, Cyclo> cache_;

    Cyclo inner_sum(int t, int l, long vres, const Rational& xs) const;
};

/// Closed formula for supercuspidal pi at n(x) g_{t,l,v}, 0 <= l < n; the character sum carries G(-p^{l-n}, mu).
Cyclo supercuspidal_coefficient(const LocalRep& pi, int t, int l, const Rational& v, const Rational& x);

/// Normalized Gauss sum with G(0, chi) = [chi trivial].
Cyclo gauss_any(const Rational& x, const ResidueCharacter& chi);

/// Values of the truncated coefficient on K^0 modulo p^R.
struct KTable {
    long p = 2;
    int R = 0;
    long P = 1;  ///< p^R
    std::vector<std::array<long, 4>> elements;
    std::vector<Cyclo> values;
    std::vector<std::int32_t> slot;  ///< code -> position in elements, or -1

    long code(long a, long b, long c, long d) const;
    /// Position of the reduction of an integral unit-determinant matrix, or -1 if not in K^0.
    long find(long a, long b, long c, long d) const;
};

KTable tabulate_truncated(const MatrixCoefficient& phi, int R);

struct DeltaReport {
    Cyclo delta;                 ///< integral of |truncated|^2 over K^0, vol(K) = 1
    bool rational = false;
    Rational delta_q;
    long index = 1;              ///< [K : K^0]
    Rational dimension;          ///< 1 / (index * delta)
    bool dimension_integer = false;
    Rational normalized;         ///< delta * q^{n1 + m1}
    bool refinement_stable = false;
    std::string refinement_mode;
    long elements = 0;
    bool ok = false;
};

/// Exact delta from a table at level R = n, with a stability check at level n + 1.
DeltaReport compute_delta(const MatrixCoefficient& phi, const KTable& table, long full_refine_limit = 400000);

struct IdempotencyReport {
    long points = 0;
    long off_support = 0;
    bool ok = true;
    std::vector<std::string> counterexamples;
};

/// (truncated * truncated)(h) = delta * truncated(h) at sampled h, exact.
IdempotencyReport verify_idempotency(const MatrixCoefficient& phi, const KTable& table, const Cyclo& delta,
                                     int samples, std::uint64_t seed);

struct EigenReport {
    long samples = 0;
    bool ok = true;
    double max_abs_error = 0;
    std::vector<std::string> counterexamples;
};

/// R(truncated) applied to the translated newform reproduces delta times it at sampled points, exact.
EigenReport verify_eigenvector(const MatrixCoefficient& phi, const KTable& table, const Cyclo& delta, int samples,
                               std::uint64_t seed);

struct SpectrumReport {
    long samples = 0;
    bool ok = true;
    double max_abs_error = 0;
};

/// Applying R(truncated) twice to translates of the newform scales by delta (floating point).
SpectrumReport verify_two_step_spectrum(const MatrixCoefficient& phi, const KTable& table, const Cyclo& delta,
                                        int samples, std::uint64_t seed);

struct BackendReport {
    long points = 0;
    long nonzero = 0;
    bool ok = true;
    std::vector<std::string> counterexamples;
};

/// Formula backend against the inner-product backend over the coset window with unipotent shifts.
BackendReport compare_backends(const MatrixCoefficient& phi);

struct IntegConstantsRow {
    int j = 0;
    Rational lhs;  ///< volume of K_0(p^j), by counting
    Rational rhs;  ///< sum_k A_k * integral over B
    bool ok = false;
};

struct IntegConstantsReport {
    long q = 2;
    int n = 1;
    std::vector<Rational> constants;
    std::vector<IntegConstantsRow> rows;
    bool ok = true;
};

Rational integration_constant(long q, int n, int k);
IntegConstantsReport integ_constants_verify(long q, int n);

struct OrthogonalityReport {
    bool ok = true;
    long characters = 0;
    long cross_pairs = 0;
    long nonzero_cross = 0;
    Rational diagonal;       ///< character-diagonal part of the restricted integral
    Rational identity_term;  ///< the Kronecker-delta term squared, reported separately
    Cyclo identity_cross;    ///< cross terms between the delta term and the character sum
    Cyclo full;              ///< full restricted integral of |coefficient|^2
    Rational ratio;          ///< diagonal / q^{-2 n1}
    bool full_consistent = false;
    std::vector<std::string> counterexamples;
};

/// Restricted integral of |coefficient|^2 over the cell above K^0 with its character expansion.
OrthogonalityReport cross_term_orthogonality(const MatrixCoefficient& phi);

}  // namespace pnf
