#include "pnf/archimedean.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

#include "pnf/error.hpp"

namespace pnf {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussLegendre {
    static constexpr int kOrder = 20;
    std::array<double, kOrder> x{};
    std::array<double, kOrder> w{};

    GaussLegendre() {
        for (int i = 0; i < kOrder; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (kOrder + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = z;
                for (int k = 2; k <= kOrder; ++k) {
                    double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = kOrder * (z * p1 - p0) / (z * z - 1);
                double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            double p0 = 1, p1 = z;
            for (int k = 2; k <= kOrder; ++k) {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = kOrder * (z * p1 - p0) / (z * z - 1);
            x[i] = z;
            w[i] = 2 / ((1 - z * z) * dp * dp);
        }
    }
};

const GaussLegendre& gl() {
    static const GaussLegendre rule;
    return rule;
}

template <class F>
double integrate_panel(F&& f, double lo, double hi) {
    const auto& r = gl();
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0;
    for (int i = 0; i < GaussLegendre::kOrder; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

template <class F>
double integrate(F&& f, double lo, double hi, int panels) {
    if (hi <= lo) return 0;
    double s = 0;
    const double h = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) s += integrate_panel(f, lo + k * h, lo + (k + 1) * h);
    return s;
}

double bump(double s) {
    if (std::abs(s) >= 1) return 0;
    return std::exp(1 - 1 / (1 - s * s));
}

double bump_d1(double s) {
    if (std::abs(s) >= 1) return 0;
    const double d = 1 - s * s;
    return bump(s) * (-2 * s / (d * d));
}

double bump_d2(double s) {
    if (std::abs(s) >= 1) return 0;
    const double d = 1 - s * s;
    return bump(s) * (6 * s * s * s * s - 2) / (d * d * d * d);
}

}  // namespace

// ----------------------------------------------------------------- K_{it}

double bessel_k_it(double t, double y) {
    require(y > 0, ErrorCode::kInvalidArgument, "bessel_k_it needs y > 0");
    require(t >= 0 && t <= 100 && y <= 500, ErrorCode::kInvalidArgument,
            "bessel_k_it validated for t in [0, 100], y in (0, 500]");
    // contour Im u = alpha: K = e^{-t alpha} int_0^inf e^{-y cos(alpha) cosh v} cos(t v - y sin(alpha) sinh v) dv
    auto phi = [&](double alpha) { return -t * alpha - y * std::cos(alpha); };
    const double alpha0 = t <= y ? std::asin(t / y) : kPi / 2;
    const double overshoot = 2.0;
    double alpha;
    if (t <= y && y * std::cos(alpha0) >= 1.0) {
        alpha = alpha0;
    } else if (phi(0) - phi(alpha0) <= overshoot) {
        alpha = 0;
    } else {
        double lo = kPi / 2 - alpha0, hi = kPi / 2;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (phi(kPi / 2 - mid) - phi(alpha0) < overshoot) lo = mid;
            else hi = mid;
        }
        alpha = kPi / 2 - lo;
    }
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double decay = y * ca;
    const double vmax = std::acosh(1 + 50 / decay);
    auto integrand = [&](double v) {
        return std::exp(-decay * (std::cosh(v) - 1)) * std::cos(t * v - y * sa * std::sinh(v));
    };
    auto rate = [&](double v) { return std::abs(t - y * sa * std::cosh(v)) + decay * std::sinh(v) + 1e-3; };
    double s = 0, v = 0;
    while (v < vmax) {
        double h = std::min(0.5, 3.0 / rate(v));
        h = std::min(h, 3.0 / rate(std::min(vmax, v + h)));
        double hi = std::min(vmax, v + h);
        s += integrate_panel(integrand, v, hi);
        v = hi;
    }
    return std::exp(phi(alpha)) * s;
}

double bessel_k_it_trapezoid(double t, double y, double h) {
    long double s = 0.5L * std::exp(-static_cast<long double>(y));
    for (long k = 1;; ++k) {
        long double u = static_cast<long double>(k) * h;
        long double c = std::cosh(u);
        if (y * c > 11000) break;
        s += std::exp(-y * c) * std::cos(t * u);
    }
    return static_cast<double>(s * h);
}

double bessel_envelope(double t, double y) {
    const double T = 1 + t;
    const double d = std::abs(y / T - 1);
    const double cap = std::cbrt(T);
    if (d == 0) return cap;
    return std::min(cap, 1 / std::sqrt(d));
}

double bessel_bound_ratio(double t, double y) {
    const double k = bessel_k_it(t, y);
    return t * std::exp(kPi * t) * k * k / bessel_envelope(t, y);
}

EnvelopeSweep bessel_envelope_sweep(double t_lo, double t_hi, int t_points, double r_lo, double r_hi, int r_points) {
    EnvelopeSweep s;
    s.t_points = t_points;
    s.y_points = r_points;
    for (int i = 0; i < t_points; ++i) {
        double t = t_points == 1 ? t_lo : t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (t_points - 1));
        const double T = 1 + t;
        for (int j = 0; j < r_points; ++j) {
            double r = r_points == 1 ? r_lo : r_lo * std::pow(r_hi / r_lo, static_cast<double>(j) / (r_points - 1));
            double q = bessel_bound_ratio(t, r * T);
            if (q > s.max_ratio) {
                s.max_ratio = q;
                s.argmax_t = t;
                s.argmax_y_over_T = r;
            }
        }
        s.transition_ratio = std::max(s.transition_ratio, bessel_bound_ratio(t, T));
        s.exponential_ratio = std::max(s.exponential_ratio, bessel_bound_ratio(t, 3 * T));
        s.oscillatory_ratio = std::max(s.oscillatory_ratio, bessel_bound_ratio(t, 0.01 * T));
    }
    return s;
}

TailReport bessel_tail_mass(double T, double step, double eps) {
    require(step > 0 && T >= 0, ErrorCode::kInvalidArgument, "tail mass needs T >= 0 and step > 0");
    TailReport r;
    r.T = T;
    r.step = step;
    r.threshold = T + std::pow(T, 1.0 / 3 + eps);
    const double x_end = std::max(r.threshold, kPi * T / 2) + 80;
    for (long n = 1;; ++n) {
        double x = n * step;
        if (x > x_end || x > 500) break;
        double k = bessel_k_it(T, x);
        // scale by e^{pi T} to keep the squares in range
        double m = k * k * std::exp(kPi * T);
        r.total += m;
        if (x > r.threshold) r.tail += m;
    }
    r.relative = r.total > 0 ? r.tail / r.total : 0;
    return r;
}

// ----------------------------------------------------------------- kernel

ArchKernel::ArchKernel(double T, int grid) : T_(T), a_(std::asinh(1.0)) {
    require(T >= 1, ErrorCode::kInvalidArgument, "kernel needs T >= 1");
    require(grid >= 64, ErrorCode::kInvalidArgument, "kernel grid too small");
    const double xi_max = 2 * a_;
    step_ = xi_max / grid;
    gp_.resize(static_cast<std::size_t>(grid) + 1);
    gpp_.resize(static_cast<std::size_t>(grid) + 1);
    const int panels = static_cast<int>(std::ceil(2 * a_ * (T + 4) / 3)) + 4;
    for (int i = 0; i <= grid; ++i) {
        const double xi = i * step_;
        const double lo = std::max(-a_, xi - a_), hi = std::min(a_, xi + a_);
        gp_[static_cast<std::size_t>(i)] =
            integrate([&](double s) { return g0(s) * g0_prime(xi - s); }, lo, hi, panels);
        gpp_[static_cast<std::size_t>(i)] =
            integrate([&](double s) { return g0(s) * g0_second(xi - s); }, lo, hi, panels);
    }
    // scale so that |k| <= T and |k(u)| <= T^{1/2} u^{-1/4} (u >= T^{-2}) on a dense xi-grid
    double worst = 0;
    const int checks = 6000;
    for (int i = 0; i <= checks; ++i) {
        const double xi = xi_max * i / checks;
        const double u = std::sinh(xi / 2) * std::sinh(xi / 2);
        const double k = std::abs(raw(u));
        worst = std::max(worst, k / T);
        if (u >= 1 / (T * T) && u > 0) worst = std::max(worst, k * std::pow(u, 0.25) / std::sqrt(T));
    }
    scale_ = worst > 0 ? 0.95 / worst : 1;
    profile_r_max_ = 2 * T + 10;
}

double ArchKernel::g0(double xi) const { return bump(xi / a_) * std::cos(T_ * xi); }

double ArchKernel::g0_prime(double xi) const {
    const double s = xi / a_;
    return bump_d1(s) / a_ * std::cos(T_ * xi) - T_ * bump(s) * std::sin(T_ * xi);
}

double ArchKernel::g0_second(double xi) const {
    const double s = xi / a_;
    const double c = std::cos(T_ * xi), sn = std::sin(T_ * xi);
    return bump_d2(s) / (a_ * a_) * c - 2 * T_ * bump_d1(s) / a_ * sn - T_ * T_ * bump(s) * c;
}

double ArchKernel::gprime(double xi) const {
    // g' is odd; cubic Hermite interpolation from g' and g''
    const double sign = xi < 0 ? -1 : 1;
    xi = std::abs(xi);
    const double pos = xi / step_;
    const std::size_t last = gp_.size() - 1;
    if (pos >= static_cast<double>(last)) return 0;
    const std::size_t i = static_cast<std::size_t>(pos);
    const double s = pos - static_cast<double>(i);
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return sign * (h00 * gp_[i] + h10 * step_ * gpp_[i] + h01 * gp_[i + 1] + h11 * step_ * gpp_[i + 1]);
}

double ArchKernel::q_prime(double w) const {
    // Q(w) = g(2 asinh(sqrt w)) / 2
    const double r = std::sqrt(w);
    const double xi = 2 * std::asinh(r);
    return 0.5 * gprime(xi) / (r * std::sqrt(1 + w));
}

double ArchKernel::raw(double u) const {
    if (u > 1 || u < 0) return 0;
    const double top = std::sqrt(1 - u);
    const int panels = static_cast<int>(std::ceil(2 * a_ * (T_ + 4) / 3)) + 4;
    return -(2 / kPi) * integrate([&](double s) { return q_prime(u + s * s); }, 0, top, panels);
}

double ArchKernel::operator()(double u) const { return scale_ * raw(u); }

double ArchKernel::spectral(double r) const {
    const int panels = static_cast<int>(std::ceil(a_ * (T_ + std::abs(r) + 4) / 3)) + 4;
    double h0 = 2 * integrate([&](double xi) { return g0(xi) * std::cos(r * xi); }, 0, a_, panels);
    return scale_ * h0 * h0;
}

double ArchKernel::spectral_imag(double s) const {
    const int panels = static_cast<int>(std::ceil(a_ * (T_ + 4) / 3)) + 4;
    double h0 = 2 * integrate([&](double xi) { return g0(xi) * std::cosh(s * xi); }, 0, a_, panels);
    return scale_ * h0 * h0;
}

double ArchKernel::q_of(double w) const {
    if (w >= 1) return 0;
    const int panels = static_cast<int>(std::ceil(2 * a_ * (T_ + 4) / 3)) + 4;
    return 2 * integrate([&](double s) { return (*this)(w + s * s); }, 0, std::sqrt(1 - w), panels);
}

double ArchKernel::spectral_from_profile(double r) const {
    // h(r) = int g(xi) e^{i r xi} d xi with g(xi) = 2 Q(sinh^2(xi / 2))
    auto g_of = [&](double xi) {
        const double sh = std::sinh(xi / 2);
        return 2 * q_of(sh * sh);
    };
    if (std::abs(r) > profile_r_max_) {
        const int panels = static_cast<int>(std::ceil(2 * a_ * (T_ + std::abs(r) + 4) / 3)) + 4;
        return 2 * integrate([&](double xi) { return g_of(xi) * std::cos(r * xi); }, 0, 2 * a_, panels);
    }
    std::call_once(profile_once_, [&] {
        const int panels = static_cast<int>(std::ceil(2 * a_ * (T_ + profile_r_max_ + 4) / 3)) + 4;
        const auto& rule = gl();
        const double h = 2 * a_ / panels;
        for (int k = 0; k < panels; ++k) {
            const double mid = (k + 0.5) * h;
            for (int i = 0; i < GaussLegendre::kOrder; ++i) {
                const double xi = mid + 0.5 * h * rule.x[i];
                profile_nodes_.push_back(xi);
                profile_weights_.push_back(0.5 * h * rule.w[i]);
                profile_values_.push_back(g_of(xi));
            }
        }
    });
    double s = 0;
    for (std::size_t i = 0; i < profile_nodes_.size(); ++i)
        s += profile_weights_[i] * profile_values_[i] * std::cos(r * profile_nodes_[i]);
    return 2 * s;
}

KernelReport kernel_verify(const ArchKernel& k, int u_points, int r_points) {
    KernelReport rep;
    const double T = k.T();
    rep.T = T;
    for (double u : {1.0 + 1e-9, 1.01, 1.5, 3.0, 10.0})
        if (k(u) != 0) rep.support_ok = false;
    // offset grids, independent of the construction grid
    for (int i = 0; i < u_points; ++i) {
        const double frac = (i + 0.37) / u_points;
        for (double u : {frac, std::pow(10.0, -8 + 8 * frac)}) {
            const double v = std::abs(k(u));
            if (v > T) rep.sup_bound_ok = false;
            if (u >= 1 / (T * T) && v > std::sqrt(T) / std::pow(u, 0.25)) rep.decay_bound_ok = false;
        }
    }
    rep.min_spectral = 1e300;
    double peak = k.spectral(T);
    rep.spectral_at_T = k.spectral_from_profile(T);
    const double r_max = 2 * T + 10;
    for (int i = 0; i <= r_points; ++i) {
        const double r = r_max * i / r_points;
        const double chain = k.spectral_from_profile(r);
        rep.min_spectral = std::min(rep.min_spectral, chain);
        rep.max_chain_error = std::max(rep.max_chain_error, std::abs(chain - k.spectral(r)) / peak);
    }
    for (double s : {0.1, 0.25, 0.4, 0.49}) rep.min_spectral = std::min(rep.min_spectral, k.spectral_imag(s));
    rep.nonnegative_ok = rep.min_spectral >= -1e-8;
    rep.ok = rep.support_ok && rep.sup_bound_ok && rep.decay_bound_ok && rep.nonnegative_ok;
    return rep;
}

}  // namespace pnf
