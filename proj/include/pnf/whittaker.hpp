#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "pnf/chars.hpp"
#include "pnf/padic.hpp"
#include "pnf/reps.hpp"

namespace pnf {

/// Twist data for one character mu of conductor <= n.
struct TwistData {
    ResidueCharacter mu;
    int a_twist = 0;                 ///< a(mu pi)
    Cyclo eps;                       ///< epsilon(1/2, mu pi)
    std::vector<ScaledRoot> gamma;   ///< L(s, mu pi)^{-1} = prod (1 - gamma_j X), X = q^{1/2-s}
};

/// Per (l, mu) Laurent data: d_{t,l}(mu) = R[k] at t = -a(mu pi) - k.
struct LaurentRow {
    std::size_t twist = 0;           ///< index into the twist list
    std::vector<Cyclo> R;            ///< bracket times L(1-s, ...)^{-1}, coefficients of Y^k = X^{-k}
    std::vector<Cyclo> tail;         ///< C_j with c_t = sum_j C_j gamma_j^t for t >= -a(mu pi)
    int t_min = 0;                   ///< smallest t with possibly nonzero c
};

/// The normalized Whittaker newform of a catalog representation.
class Newform {
public:
    explicit Newform(LocalRep pi);

    const LocalRep& rep() const { return pi_; }
    long p() const { return pi_.p; }
    int n() const { return pi_.n; }

    const std::vector<TwistData>& twists() const { return twists_; }
    /// Rows for mu with a(mu) <= l.
    const std::vector<LaurentRow>& rows(int l) const { return rows_.at(static_cast<std::size_t>(l)); }

    Cyclo d_value(int t, int l, std::size_t row) const;
    Cyclo c_value(int t, int l, std::size_t row) const;
    std::complex<double> c_value_complex(int t, int l, std::size_t row) const;

    /// W(g_{t,l,v}) with g_{t,l,v} = a(p^t) w n(p^{-l} v).
    Cyclo coset_value(int t, int l, const Rational& v) const;
    std::complex<double> coset_value_complex(int t, int l, const Rational& v) const;

    Cyclo value(const Mat2& g) const;
    std::complex<double> value_complex(const Mat2& g) const;

    /// Squared norm of the newform in the Whittaker model: sum_a |W(a(p^a))|^2.
    Cyclo norm_squared() const;

private:
    LocalRep pi_;
    std::vector<TwistData> twists_;
    std::vector<std::vector<LaurentRow>> rows_;

    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, int, std::size_t>, Cyclo> c_cache_;
    mutable std::map<std::tuple<int, int, long>, Cyclo> w_cache_;
    mutable std::map<std::tuple<int, int, long>, std::complex<double>> wc_cache_;

    Cyclo c_value_uncached(int t, int l, std::size_t row) const;
};

/// Verification window: t in [-2n-2, 2], 0 <= l <= n, v over units mod p^{max(l, n-l)}.
struct CosetCell {
    int t;
    int l;
    long v;
};
std::vector<CosetCell> verification_window(long p, int n);

struct SupportReport {
    bool ok = true;
    long cells = 0;
    long nonzero = 0;
    bool below_rows_zero = true;
    std::vector<std::string> counterexamples;
};

/// W(g) != 0 implies t >= -max(2l, l+m, n), over the window.
SupportReport verify_support(const Newform& W);

struct AverageRow {
    int r = 0;
    double worst = 0;  ///< max over g of the root-mean-square at this r
};

struct JSupportReport {
    bool ok = true;
    long cosets = 0;
    long evaluations = 0;
    double constant = 0;  ///< max over g, r of rms * q^{r/4}
    std::vector<AverageRow> rows;
    bool monotone = true;
    std::vector<std::string> counterexamples;
};

/// Support v(y) >= -q(g) and average size on K a(p^{n1}) (mod p^{n+1}); r = 0..r_max.
JSupportReport verify_j_support(const Newform& W, int r_max = 4);

/// Average size over the coset window: rms over v of W(g_{t,l,v}) at t = floor + r.
JSupportReport verify_coset_average(const Newform& W, int r_max = 4);

struct ALReport {
    bool ok = true;
    long triples = 0;
    long nonzero = 0;
    Cyclo eps_extracted;
    Cyclo eps_formula;
    bool eps_constant = true;
    bool eps_unit = true;
    std::vector<std::string> counterexamples;
};

/// Atkin-Lehner identity between W for the contragredient and W over the window.
ALReport atkin_lehner_verify(const Newform& W, const Newform& Wtilde);

struct SupScan {
    double sup = 0;
    int t = 0, l = 0;
    long v = 1;
};
SupScan sup_scan(const Newform& W);

}  // namespace pnf
