#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace pnf {

/// K_{it}(y) for real t >= 0 and y > 0, by the cosine integral on a shifted contour.
/// Validated range: t in [0, 100], y in (0, 500].
double bessel_k_it(double t, double y);

/// The same integral on the real axis by the trapezoid rule with step h (reference route).
double bessel_k_it_trapezoid(double t, double y, double h);

/// min(T^{1/3}, |y/T - 1|^{-1/2}) with T = 1 + t.
double bessel_envelope(double t, double y);

/// t e^{pi t} |K_{it}(y)|^2 / envelope(t, y).
double bessel_bound_ratio(double t, double y);

struct EnvelopeSweep {
    int t_points = 0;
    int y_points = 0;
    double max_ratio = 0;
    double argmax_t = 0;
    double argmax_y_over_T = 0;
    double transition_ratio = 0;   ///< at y = T
    double exponential_ratio = 0;  ///< at y = 3T
    double oscillatory_ratio = 0;  ///< at y = 0.01 T
};

/// Sweep over t in [t_lo, t_hi] and y/T in [r_lo, r_hi] on log-spaced grids.
EnvelopeSweep bessel_envelope_sweep(double t_lo, double t_hi, int t_points, double r_lo, double r_hi, int r_points);

struct TailReport {
    double T = 0;
    double step = 0;        ///< 2 pi y / Q
    double threshold = 0;   ///< T + T^{1/3 + eps}
    double total = 0;       ///< sum over n of |K_{iT}(n * step)|^2
    double tail = 0;        ///< part with n * step above the threshold
    double relative = 0;
};

/// Relative Bessel mass beyond T + T^{1/3 + eps} in the sum over n >= 1 of |K_{iT}(n step)|^2.
TailReport bessel_tail_mass(double T, double step, double eps = 0.01);

/// Point-pair kernel on u in [0, 1] built from the spectral pair h = h0^2, with
/// g0(xi) = bump(xi / a) cos(T xi) supported in |xi| <= a, a = asinh(1).
class ArchKernel {
public:
    explicit ArchKernel(double T, int grid = 4096);

    double T() const { return T_; }
    /// Radial profile; zero for u > 1.
    double operator()(double u) const;
    /// Unscaled profile from the inverse Abel transform.
    double raw(double u) const;
    /// Scale applied to the raw profile so that the pointwise bounds hold on the construction grid.
    double scale() const { return scale_; }
    /// h(r) = scale * h0(r)^2 in closed quadrature form.
    double spectral(double r) const;
    /// h(i s) for 0 <= s < 1/2.
    double spectral_imag(double s) const;
    /// h(r) recomputed from the profile through Q, g and the cosine transform.
    double spectral_from_profile(double r) const;

private:
    double T_;
    double a_;
    double scale_ = 1;
    double step_;
    std::vector<double> gp_;   // g'(xi) on a uniform grid of [0, 2a]
    std::vector<double> gpp_;  // g''(xi)

    // g(xi) on fixed quadrature nodes of [0, 2a], filled on first use
    mutable std::once_flag profile_once_;
    mutable std::vector<double> profile_nodes_, profile_weights_, profile_values_;
    double profile_r_max_ = 0;

    double g0(double xi) const;
    double g0_prime(double xi) const;
    double g0_second(double xi) const;
    double gprime(double xi) const;
    double q_prime(double w) const;
    double q_of(double w) const;
};

struct KernelReport {
    double T = 0;
    bool support_ok = true;
    bool sup_bound_ok = true;       ///< |k| <= T on the check grid
    bool decay_bound_ok = true;     ///< |k(u)| <= T^{1/2} u^{-1/4} for u >= T^{-2}
    double min_spectral = 0;        ///< min of the profile-derived transform on the grid
    bool nonnegative_ok = true;     ///< min >= -1e-8
    double spectral_at_T = 0;
    double max_chain_error = 0;     ///< profile-derived vs closed form, relative to the peak
    bool ok = true;
};

/// Checks the four kernel properties on grids.
KernelReport kernel_verify(const ArchKernel& k, int u_points = 400, int r_points = 120);

}  // namespace pnf
