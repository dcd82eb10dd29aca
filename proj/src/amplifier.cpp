#include "pnf/amplifier.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include "pnf/error.hpp"

namespace pnf {

namespace {

std::vector<std::pair<long, int>> factorize(long n) {
    std::vector<std::pair<long, int>> f;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

std::vector<long> divisors(long n) {
    std::vector<long> d;
    for (long k = 1; k * k <= n; ++k) {
        if (n % k) continue;
        d.push_back(k);
        if (k * k != n) d.push_back(n / k);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::complex<double> central_complex(const std::map<long, std::complex<double>>& omega, long n) {
    std::complex<double> v = 1;
    for (auto [p, e] : factorize(n)) {
        auto it = omega.find(p);
        require(it != omega.end(), ErrorCode::kInvalidArgument, "no central value at prime " + std::to_string(p));
        v *= std::pow(it->second, e);
    }
    return v;
}

// kappa_r * kappa_s^* in floating point, for central values given as complex numbers
void accumulate_product(long r, long s, std::complex<double> weight, const std::map<long, std::complex<double>>& omega,
                        std::map<long, std::complex<double>>& out) {
    const std::complex<double> twist = std::conj(central_complex(omega, s));
    for (long t : divisors(std::gcd(r, s))) out[r / t * (s / t)] += weight * twist * central_complex(omega, t);
}

std::string shape_label(long l, const std::vector<long>& primes) {
    if (l == 1) return "1";
    std::vector<int> exps;
    long rest = l;
    for (long p : primes) {
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        if (e) exps.push_back(e);
    }
    if (rest != 1) return "";
    std::sort(exps.rbegin(), exps.rend());
    if (exps.size() == 1) {
        static const char* single[] = {"", "l1", "l1*l1", "l1*l1^2", "l1^2*l1^2"};
        return exps[0] <= 4 ? single[exps[0]] : "";
    }
    if (exps.size() == 2) {
        if (exps[0] == 1 && exps[1] == 1) return "l1*l2";
        if (exps[0] == 2 && exps[1] == 1) return "l1*l2^2";
        if (exps[0] == 2 && exps[1] == 2) return "l1^2*l2^2";
    }
    return "";
}

Rational exact_rational(double v) {
    Rational q(v);
    q.canonicalize();
    return q;
}

}  // namespace

// ----------------------------------------------------------------- Hecke algebra

Root central_value(const CentralValues& omega, long n) {
    require(n >= 1, ErrorCode::kInvalidArgument, "Hecke index must be positive");
    Root v = Root::make(1, 0);
    for (auto [p, e] : factorize(n)) {
        auto it = omega.find(p);
        require(it != omega.end(), ErrorCode::kInvalidArgument, "no central value at prime " + std::to_string(p));
        v = v * it->second.pow(e);
    }
    return v;
}

HeckeExpansion hecke_convolution_expand(long m, long n, const CentralValues& omega) {
    require(m >= 1 && n >= 1, ErrorCode::kInvalidArgument, "Hecke indices must be positive");
    const Root twist = central_value(omega, n).inv();
    HeckeExpansion out;
    for (long t : divisors(std::gcd(m, n))) {
        Cyclo coeff = (twist * central_value(omega, t)).to_cyclo();
        out[m / t * (n / t)] += coeff;
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

HeckeExpansion hecke_multiply(const HeckeExpansion& x, const HeckeExpansion& y, const CentralValues& omega) {
    HeckeExpansion out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : y)
            for (long t : divisors(std::gcd(a, b))) out[a / t * (b / t)] += ca * cb * central_value(omega, t).to_cyclo();
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

// ----------------------------------------------------------------- amplifier

void check_hecke_constraint(const HeckeEigenvalues& h) {
    require(h.ell >= 2 && is_prime(h.ell), ErrorCode::kInvalidArgument, "eigenvalue index must be prime");
    require(h.central().norm2() == 1, ErrorCode::kInvalidArgument,
            "lambda(l)^2 - lambda(l^2) must have modulus one at l = " + std::to_string(h.ell));
}

bool certified_unit_sum(const HeckeEigenvalues& h) {
    const Rational A = h.lambda.norm2(), B = h.lambda_sq.norm2();
    if (A >= 1 || B >= 1) return true;
    // sqrt(B) >= 1 - sqrt(A) > 0  <=>  2 sqrt(A) >= 1 + A - B
    const Rational c = 1 + A - B;
    if (c <= 0) return true;
    return c * c <= 4 * A;
}

HeckeEigenvalues sample_hecke(std::mt19937_64& rng, long ell) {
    static const GaussRational kUnits[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    static const double kHalfAngle[4] = {0, std::numbers::pi / 2, std::numbers::pi / 4, -std::numbers::pi / 4};
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> unif(0, 1);
    const int k = pick(rng);
    HeckeEigenvalues h;
    h.ell = ell;
    if (std::uniform_int_distribution<int>(0, 15)(rng) == 0) {
        h.lambda = {0, 0};
    } else {
        double theta;
        for (;;) {
            theta = std::numbers::pi * unif(rng);
            if (unif(rng) <= std::sin(theta) * std::sin(theta)) break;
        }
        const double mod = 2 * std::cos(theta);
        const double den = 1 << 20;
        h.lambda.re = Rational(static_cast<long>(std::llround(mod * std::cos(kHalfAngle[k]) * den)), 1 << 20);
        h.lambda.im = Rational(static_cast<long>(std::llround(mod * std::sin(kHalfAngle[k]) * den)), 1 << 20);
        h.lambda.re.canonicalize();
        h.lambda.im.canonicalize();
    }
    h.lambda_sq = h.lambda * h.lambda - kUnits[k];
    return h;
}

UnitSumSweep unit_sum_sweep(long draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    UnitSumSweep s;
    for (long i = 0; i < draws; ++i) {
        HeckeEigenvalues h = sample_hecke(rng, 2);
        check_hecke_constraint(h);
        ++s.draws;
        if (h.lambda.norm2() == 0) ++s.zero_draws;
        if (!certified_unit_sum(h)) ++s.violations;
        s.min_sum = std::min(s.min_sum, std::abs(h.lambda.to_complex()) + std::abs(h.lambda_sq.to_complex()));
    }
    return s;
}

std::vector<long> amplifier_primes(double Lambda, long level) {
    require(Lambda >= 1, ErrorCode::kInvalidArgument, "Lambda must be >= 1");
    std::vector<long> S;
    for (long l = static_cast<long>(std::ceil(Lambda)); l <= static_cast<long>(std::floor(2 * Lambda)); ++l)
        if (is_prime(l) && std::gcd(l, level) == 1) S.push_back(l);
    return S;
}

AmplifierCoefficients build_amplifier(double Lambda, long level, const std::map<long, HeckeEigenvalues>& eigen) {
    AmplifierCoefficients A;
    A.Lambda = Lambda;
    A.level = level;
    A.primes = amplifier_primes(Lambda, level);
    std::map<long, std::complex<double>> lambda_of, omega;
    for (long l : A.primes) {
        auto it = eigen.find(l);
        require(it != eigen.end(), ErrorCode::kInvalidArgument, "no eigenvalues supplied at " + std::to_string(l));
        const HeckeEigenvalues& h = it->second;
        check_hecke_constraint(h);
        lambda_of[l] = h.lambda.to_complex();
        lambda_of[l * l] = h.lambda_sq.to_complex();
        omega[l] = h.central().to_complex();
        A.lambda_prime += std::abs(h.lambda.to_complex()) + std::abs(h.lambda_sq.to_complex());
        if (!certified_unit_sum(h)) A.lambda_prime_certified = false;
    }
    for (const auto& [r, lam] : lambda_of) {
        const double m = std::abs(lam);
        A.c[r] = m == 0 ? std::complex<double>(1) : std::conj(lam) / m;
        if (std::abs(std::abs(A.c[r]) - 1) > 1e-12) A.unit_c_ok = false;
    }
    for (const auto& [r, cr] : A.c)
        for (const auto& [s, cs] : A.c) accumulate_product(r, s, cr * std::conj(cs), omega, A.y);
    for (auto it = A.y.begin(); it != A.y.end();) it = std::abs(it->second) < 1e-12 ? A.y.erase(it) : std::next(it);
    const double l_max = 16 * std::pow(Lambda, 4);
    for (const auto& [l, v] : A.y) {
        std::string label = shape_label(l, A.primes);
        A.shape[l] = label;
        if (label.empty() || static_cast<double>(l) > l_max) A.shapes_ok = false;
        if (l != 1) A.max_offdiag = std::max(A.max_offdiag, std::abs(v));
    }
    auto one = A.y.find(1);
    A.y1_over_Lambda = one == A.y.end() ? 0 : std::abs(one->second) / Lambda;
    return A;
}

// ----------------------------------------------------------------- lattice counting

UpperPoint UpperPoint::from_double(double x, double y) {
    require(y > 0, ErrorCode::kInvalidArgument, "point must lie in the upper half plane");
    UpperPoint z;
    z.x = exact_rational(x);
    Rational yq = exact_rational(y);
    z.y2 = yq * yq;
    return z;
}

std::string UpperPoint::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << x.get_d() << "+" << y() << "i";
    return os.str();
}

Rational point_pair_invariant(const UpperPoint& z, const LatticeMatrix& g) {
    // z (cz + d) - (az + b) = c z^2 + (d - a) z - b
    const Rational re = g.c * (z.x * z.x - z.y2) + (g.d - g.a) * z.x - g.b;
    const Rational im_over_y = 2 * g.c * z.x + (g.d - g.a);
    const long ell = g.a * g.d - g.b * g.c;
    require(ell > 0, ErrorCode::kInvalidArgument, "lattice matrix needs positive determinant");
    Rational u = (re * re + z.y2 * im_over_y * im_over_y) / (4 * ell * z.y2);
    u.canonicalize();
    return u;
}

namespace {

// Entry box from u = (A^2 + B^2 + C^2 + D^2 - 2) / 4 for the conjugate of gamma / sqrt(ell) by n(x) a(y):
// C = cy / sqrt(ell), D = (cx + d) / sqrt(ell), A = (a - xc) / sqrt(ell), B = (ax + b - x(cx + d)) / (y sqrt(ell)).
std::vector<LatticeMatrix> enumerate_impl(const UpperPoint& z, long ell, double delta, long N2, double box) {
    require(ell >= 1 && N2 >= 1, ErrorCode::kInvalidArgument, "ell and N2 must be positive");
    require(std::gcd(ell, N2) == 1, ErrorCode::kInvalidArgument, "ell must be coprime to N2");
    require(delta >= 0, ErrorCode::kInvalidArgument, "delta must be non-negative");
    const double x = z.x.get_d(), y = z.y();
    const double R = box * std::sqrt(static_cast<double>(ell) * (2 + 4 * delta)) * (1 + 1e-12) + 1e-9;
    const Rational dq = exact_rational(delta);
    const double y2 = z.y2.get_d();

    auto accept = [&](long a, long b, long c, long d) {
        const double re = c * (x * x - y2) + (d - a) * x - b;
        const double im = 2 * c * x + (d - a);
        const double u = (re * re + y2 * im * im) / (4.0 * static_cast<double>(ell) * y2);
        const double margin = 1e-9 * (1 + delta);
        if (u > delta + margin) return false;
        if (u < delta - margin) return true;
        return point_pair_invariant(z, {a, b, c, d}) <= dq;
    };

    auto scan_c = [&](long c) {
        std::vector<LatticeMatrix> out;
        const double shift = c * x;
        for (long d = static_cast<long>(std::ceil(-shift - R)); d <= static_cast<long>(std::floor(-shift + R)); ++d) {
            const long a_lo = std::max(1L, static_cast<long>(std::ceil(shift - R)));
            const long a_hi = static_cast<long>(std::floor(shift + R));
            for (long a = a_lo; a <= a_hi; ++a) {
                if (c != 0) {
                    const long num = a * d - ell;
                    if (num % c != 0) continue;
                    const long b = num / c;
                    if (accept(a, b, c, d)) out.push_back({a, b, c, d});
                } else {
                    if (a * d != ell) continue;
                    const double centre = x * d - a * x;
                    for (long b = static_cast<long>(std::ceil(centre - y * R));
                         b <= static_cast<long>(std::floor(centre + y * R)); ++b)
                        if (accept(a, b, 0, d)) out.push_back({a, b, 0, d});
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const LatticeMatrix& p, const LatticeMatrix& q) {
            return std::tie(p.d, p.a, p.b) < std::tie(q.d, q.a, q.b);
        });
        return out;
    };

    const long c_max = static_cast<long>(std::floor(R / y));
    std::vector<long> cs;
    for (long c = -(c_max / N2) * N2; c <= c_max; c += N2) cs.push_back(c);

    std::vector<std::vector<LatticeMatrix>> parts(cs.size());
    if (cs.size() >= 64) {
        const std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w)
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < cs.size(); i += workers) parts[i] = scan_c(cs[i]);
            }));
        for (auto& j : jobs) j.get();
    } else {
        for (std::size_t i = 0; i < cs.size(); ++i) parts[i] = scan_c(cs[i]);
    }
    std::vector<LatticeMatrix> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

}  // namespace

std::vector<LatticeMatrix> enumerate_close_lattice(const UpperPoint& z, long ell, double delta, long N2,
                                                   double box_factor) {
    require(delta < 1, ErrorCode::kInvalidArgument, "delta must be < 1");
    require(box_factor >= 1, ErrorCode::kInvalidArgument, "box factor must be >= 1");
    return enumerate_impl(z, ell, delta, N2, box_factor);
}

std::vector<LatticeMatrix> enumerate_support_lattice(const UpperPoint& z, long ell, long N2) {
    return enumerate_impl(z, ell, 1.0, N2, 1.0);
}

bool fundamental_membership(const UpperPoint& z, long L) {
    require(L >= 1, ErrorCode::kInvalidArgument, "L must be >= 1");
    require(z.y2 > 0, ErrorCode::kInvalidArgument, "point must lie in the upper half plane");
    // y^2 >= 3 / (4 L^2)
    if (z.y2 * 4 * L * L < 3) return false;
    const Rational inv_L(1, L);
    // c^2 y^2 >= 1/L settles every d; the remaining c satisfy c^2 < 1 / (L y^2)
    const Rational c2_bound = 1 / (z.y2 * L);
    const double root_inv_L = 1 / std::sqrt(static_cast<double>(L));
    for (long c = 0;; ++c) {
        if (Rational(c * c) >= c2_bound && c > 0) break;
        const double centre = -c * z.x.get_d();
        for (long d = static_cast<long>(std::floor(centre - root_inv_L)) - 1;
             d <= static_cast<long>(std::ceil(centre + root_inv_L)) + 1; ++d) {
            if (c == 0 && d == 0) continue;
            const Rational re = c * z.x + d;
            if (re * re + c * c * z.y2 < inv_L) return false;
        }
    }
    return true;
}

double counting_bound(double Lambda, double delta, long N2, double y, double eps) {
    const double n2 = static_cast<double>(N2);
    const double sd = std::sqrt(delta);
    const double bracket = Lambda + Lambda * std::sqrt(n2) * sd * y + std::pow(Lambda, 2.5) * sd / std::sqrt(n2) +
                           std::pow(Lambda, 2.5) * sd * y + std::pow(Lambda, 4) * delta / n2;
    return std::pow(Lambda * n2, eps) * bracket;
}

double counting_bound_single(long ell, double delta, long N2, double y, double eps) {
    const double l = static_cast<double>(ell);
    return std::sqrt(l) * counting_bound(std::sqrt(l), delta, N2, y, eps);
}

CountSweep count_sweep(const std::vector<UpperPoint>& zs, long ell_max, const std::vector<double>& deltas,
                       const std::vector<long>& N2s) {
    CountSweep s;
    std::vector<double> ds = deltas;
    std::sort(ds.begin(), ds.end());
    for (const auto& z : zs) {
        const std::string zlabel = z.to_string();
        std::map<std::pair<long, long>, std::vector<long>> counts;  // (N2, ell) -> counts by delta
        for (long N2 : N2s)
            for (long ell = 1; ell <= ell_max; ++ell) {
                if (std::gcd(ell, N2) != 1) continue;
                std::vector<long> by_delta;
                for (double delta : ds) {
                    CountRow row;
                    row.z = zlabel;
                    row.ell = ell;
                    row.delta = delta;
                    row.N2 = N2;
                    row.count = static_cast<long>(enumerate_close_lattice(z, ell, delta, N2).size());
                    row.bound = counting_bound_single(ell, delta, N2, z.y());
                    row.ratio = row.count / row.bound;
                    s.max_ratio = std::max(s.max_ratio, row.ratio);
                    if (!by_delta.empty() && row.count < by_delta.back()) s.monotone_ok = false;
                    by_delta.push_back(row.count);
                    s.rows.push_back(row);
                }
                counts[{N2, ell}] = by_delta;
            }
        for (const auto& [key, v] : counts)
            for (const auto& [key2, v2] : counts) {
                if (key2.second != key.second || key2.first == key.first || key2.first % key.first != 0) continue;
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (v2[i] > v[i]) s.monotone_ok = false;
            }
    }
    return s;
}

long double_box_recount(long configs, std::uint64_t seed, long* compared) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> xs(-50, 50), ys(30, 300), ells(1, 60), n2s(1, 10), ds(1, 900);
    long mismatches = 0, done = 0;
    while (done < configs) {
        const long ell = ells(rng), N2 = n2s(rng);
        UpperPoint z;
        z.x = Rational(xs(rng), 100);
        z.x.canonicalize();
        Rational y(ys(rng), 100);
        y.canonicalize();
        z.y2 = y * y;
        const double delta = static_cast<double>(ds(rng)) / 1000;
        if (std::gcd(ell, N2) != 1) continue;
        ++done;
        if (enumerate_close_lattice(z, ell, delta, N2, 1.0) != enumerate_close_lattice(z, ell, delta, N2, 2.0))
            ++mismatches;
    }
    if (compared) *compared = done;
    return mismatches;
}

GeometricSide geometric_side(const UpperPoint& z, const AmplifierCoefficients& amp, long N2,
                             const std::function<double(double)>& kernel) {
    require(fundamental_membership(z, N2), ErrorCode::kInvalidArgument,
            "point " + z.to_string() + " is outside F_" + std::to_string(N2));
    GeometricSide g;
    for (const auto& [l, yl] : amp.y) {
        const auto mats = enumerate_support_lattice(z, l, N2);
        double inner = 0;
        const double x = z.x.get_d(), y2 = z.y2.get_d();
        for (const auto& m : mats) {
            const double re = m.c * (x * x - y2) + (m.d - m.a) * x - m.b;
            const double im = 2 * m.c * x + (m.d - m.a);
            inner += std::abs(kernel((re * re + y2 * im * im) / (4.0 * static_cast<double>(l) * y2)));
        }
        const double part = std::abs(yl) / std::sqrt(static_cast<double>(l)) * inner;
        g.value += part;
        g.matrices += static_cast<long>(mats.size());
        if (l == 1) g.identity_part = part;
    }
    // dyadic shells (2^{-j-1}, 2^{-j}] and the core [0, 2^{-J}]
    const int depth = 24;
    const double y = z.y();
    auto shell_sup = [&](double lo, double hi) {
        double m = 0;
        for (int i = 0; i <= 32; ++i) m = std::max(m, std::abs(kernel(lo + (hi - lo) * i / 32.0)));
        return m;
    };
    for (int j = 0; j < depth; ++j) {
        const double hi = std::ldexp(1.0, -j), lo = std::ldexp(1.0, -j - 1);
        g.bound += shell_sup(lo, hi) * counting_bound(amp.Lambda, hi, N2, y);
    }
    g.bound += shell_sup(0, std::ldexp(1.0, -depth)) * counting_bound(amp.Lambda, std::ldexp(1.0, -depth), N2, y);
    g.ratio = g.bound > 0 ? g.value / g.bound : 0;
    return g;
}

}  // namespace pnf
