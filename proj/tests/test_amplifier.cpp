#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "pnf/amplifier.hpp"

using namespace pnf;

namespace {

using cd = std::complex<double>;

// lambda(l^k) from Satake parameters alpha, beta at one prime
cd satake_power(cd alpha, cd beta, int k) {
    cd s = 0;
    for (int i = 0; i <= k; ++i) s += std::pow(alpha, i) * std::pow(beta, k - i);
    return s;
}

struct SatakeForm {
    std::map<long, std::pair<cd, cd>> params;

    cd lambda(long n) const {
        cd v = 1;
        for (const auto& [p, ab] : params) {
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            v *= satake_power(ab.first, ab.second, k);
        }
        REQUIRE(n == 1);
        return v;
    }
};

std::vector<LatticeMatrix> brute_force(const UpperPoint& z, long ell, const Rational& delta, long N2, long box) {
    std::vector<LatticeMatrix> out;
    for (long c = -box; c <= box; ++c) {
        if (c % N2) continue;
        for (long d = -box; d <= box; ++d)
            for (long a = 1; a <= box; ++a)
                for (long b = -box; b <= box; ++b) {
                    if (a * d - b * c != ell) continue;
                    LatticeMatrix m{a, b, c, d};
                    if (point_pair_invariant(z, m) <= delta) out.push_back(m);
                }
    }
    std::sort(out.begin(), out.end(), [](const LatticeMatrix& p, const LatticeMatrix& q) {
        return std::tie(p.c, p.d, p.a, p.b) < std::tie(q.c, q.d, q.a, q.b);
    });
    return out;
}

}  // namespace

TEST_CASE("hecke: expansion hand values") {
    const long l1 = 5, l2 = 7;
    CentralValues omega{{l1, Root::make(4, 1)}, {l2, Root::make(3, 1)}};
    const Cyclo w1 = Root::make(4, 1).to_cyclo(), w2 = Root::make(3, 1).to_cyclo();
    const Cyclo w1i = w1.inverse(), w2i = w2.inverse();

    CHECK(hecke_convolution_expand(1, 1, omega) == HeckeExpansion{{1, Cyclo(1)}});

    HeckeExpansion ll = hecke_convolution_expand(l1, l1, omega);
    CHECK(ll == HeckeExpansion{{1, Cyclo(1)}, {l1 * l1, w1i}});

    HeckeExpansion l2l2 = hecke_convolution_expand(l1 * l1, l1 * l1, omega);
    CHECK(l2l2 == HeckeExpansion{{1, Cyclo(1)}, {l1 * l1, w1i}, {l1 * l1 * l1 * l1, w1i * w1i}});

    HeckeExpansion mixed = hecke_convolution_expand(l1, l1 * l1, omega);
    CHECK(mixed == HeckeExpansion{{l1, w1i}, {l1 * l1 * l1, w1i * w1i}});

    HeckeExpansion distinct = hecke_convolution_expand(l1, l2, omega);
    CHECK(distinct == HeckeExpansion{{l1 * l2, w2i}});
}

TEST_CASE("hecke: expansion against Satake eigenvalues") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ang(0, 2 * M_PI);
    std::uniform_int_distribution<int> ex(0, 11);
    for (int trial = 0; trial < 20; ++trial) {
        CentralValues omega;
        SatakeForm f;
        for (long p : {2L, 3L, 5L}) {
            Root w = Root::make(12, ex(rng));
            omega[p] = w;
            const cd wc = w.to_complex();
            const cd alpha = std::sqrt(wc) * std::polar(1.0, ang(rng));
            f.params[p] = {alpha, wc / alpha};
        }
        for (long m : {1L, 2L, 4L, 6L, 9L, 10L, 12L})
            for (long n : {1L, 2L, 3L, 4L, 5L, 8L, 15L}) {
                HeckeExpansion e = hecke_convolution_expand(m, n, omega);
                cd rhs = 0;
                for (const auto& [l, c] : e) rhs += c.to_complex() * f.lambda(l);
                const cd lhs = f.lambda(m) * f.lambda(n) * std::conj(central_value(omega, n).to_complex());
                CHECK_MESSAGE(std::abs(lhs - rhs) < 1e-10, "m=" << m << " n=" << n);
            }
    }
}

TEST_CASE("hecke: identity symbol is neutral") {
    CentralValues omega{{2, Root::make(6, 1)}, {3, Root::make(4, 3)}, {7, Root::make(1, 0)}};
    const HeckeExpansion one{{1, Cyclo(1)}};
    for (long m : {1L, 2L, 6L, 14L, 36L})
        for (long n : {1L, 3L, 12L, 49L}) {
            HeckeExpansion e = hecke_convolution_expand(m, n, omega);
            CHECK(hecke_multiply(e, one, omega) == e);
            CHECK(hecke_multiply(one, e, omega) == e);
        }
}

TEST_CASE("amplifier: unit-sum bound under the constraint sampler") {
    UnitSumSweep s = unit_sum_sweep(10000, 5);
    CHECK(s.draws == 10000);
    CHECK(s.violations == 0);
    CHECK(s.zero_draws > 0);
    CHECK(s.min_sum >= 1 - 1e-12);
    // tight case lambda = 0, omega = 1
    HeckeEigenvalues h{3, {0, 0}, {-1, 0}};
    check_hecke_constraint(h);
    CHECK(certified_unit_sum(h));
    // off-constraint input is rejected
    HeckeEigenvalues bad{3, {1, 0}, {1, 0}};
    CHECK_THROWS_AS(check_hecke_constraint(bad), Error);
    // just below the bound: sqrt(A) + sqrt(B) < 1 is detected
    HeckeEigenvalues below{3, {Rational(1, 4), 0}, {Rational(1, 4), 0}};
    CHECK_FALSE(certified_unit_sum(below));
}

TEST_CASE("amplifier: prime set, coefficient support and shapes") {
    CHECK(amplifier_primes(10, 7) == std::vector<long>{11, 13, 17, 19});
    std::mt19937_64 rng(4);
    std::map<long, HeckeEigenvalues> eig;
    for (long l = 2; l < 60; ++l)
        if (is_prime(l)) eig[l] = sample_hecke(rng, l);
    for (double L : {1.0, 3.0, 10.0, 20.0}) {
        AmplifierCoefficients A = build_amplifier(L, 7, eig);
        CHECK(A.shapes_ok);
        CHECK(A.unit_c_ok);
        CHECK(A.lambda_prime_certified);
        CHECK(A.lambda_prime >= static_cast<double>(A.primes.size()) - 1e-12);
        CHECK(std::abs(A.y.at(1)) == doctest::Approx(2.0 * A.primes.size()));
        CHECK(A.max_offdiag <= 2 + 1e-9);
        for (const auto& [r, c] : A.c) CHECK(std::abs(std::abs(c) - 1) < 1e-12);
    }
    CHECK_THROWS_AS(build_amplifier(10, 7, {}), Error);
}

TEST_CASE("lattice: small cases against brute force") {
    const UpperPoint i = UpperPoint::from_double(0, 1);
    auto id = enumerate_close_lattice(i, 1, 0, 1);
    REQUIRE(id.size() == 1);
    CHECK(id[0] == LatticeMatrix{1, 0, 0, 1});
    auto two = enumerate_close_lattice(i, 2, 0, 1);
    CHECK(two.size() == 2);
    CHECK(std::find(two.begin(), two.end(), LatticeMatrix{1, 1, -1, 1}) != two.end());
    CHECK(std::find(two.begin(), two.end(), LatticeMatrix{1, -1, 1, 1}) != two.end());
    CHECK(enumerate_close_lattice(i, 1, 0, 2).size() == 1);
    CHECK_THROWS_AS(enumerate_close_lattice(i, 1, 1.0, 1), Error);

    std::mt19937_64 rng(8);
    std::uniform_int_distribution<long> xs(-5, 5), ys(5, 20), ells(1, 12), n2s(1, 4), ds(1, 9);
    for (int k = 0; k < 30; ++k) {
        UpperPoint z;
        z.x = Rational(xs(rng), 10);
        Rational y(ys(rng), 10);
        z.x.canonicalize();
        y.canonicalize();
        z.y2 = y * y;
        const long ell = ells(rng), N2 = n2s(rng);
        if (std::gcd(ell, N2) != 1) continue;
        const double delta = ds(rng) / 10.0;
        auto fast = enumerate_close_lattice(z, ell, delta, N2);
        auto slow = brute_force(z, ell, Rational(delta), N2, 16);
        CHECK_MESSAGE(fast == slow, "z=" << z.to_string() << " ell=" << ell << " N2=" << N2 << " delta=" << delta);
    }
}

TEST_CASE("lattice: projective normalization and monotonicity") {
    const UpperPoint z = UpperPoint::from_double(0.25, 1.5);
    auto mats = enumerate_close_lattice(z, 12, 0.5, 1);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        CHECK(mats[i].a > 0);
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            // positive rational multiples share the ratios of all entries
            const auto& p = mats[i];
            const auto& q = mats[j];
            const bool proportional = p.a * q.b == p.b * q.a && p.a * q.c == p.c * q.a && p.a * q.d == p.d * q.a;
            CHECK_FALSE(proportional);
        }
    }
    long prev = 0;
    for (double d : {0.0, 0.01, 0.1, 0.3, 0.6, 0.9}) {
        long n = static_cast<long>(enumerate_close_lattice(z, 12, d, 1).size());
        CHECK(n >= prev);
        prev = n;
    }
    CHECK(enumerate_close_lattice(z, 5, 0.5, 6).size() <= enumerate_close_lattice(z, 5, 0.5, 2).size());
    CHECK(enumerate_close_lattice(z, 5, 0.5, 2).size() <= enumerate_close_lattice(z, 5, 0.5, 1).size());
}

TEST_CASE("lattice: double-box recount") {
    long compared = 0;
    CHECK(double_box_recount(40, 99, &compared) == 0);
    CHECK(compared == 40);
}

TEST_CASE("fundamental domain membership") {
    CHECK(fundamental_membership(UpperPoint::from_double(0, 2), 1));
    CHECK_FALSE(fundamental_membership(UpperPoint::from_double(0, 0.1), 1));
    UpperPoint corner;
    corner.x = Rational(1, 2);
    corner.y2 = Rational(3, 4);
    CHECK(fundamental_membership(corner, 1));
    UpperPoint inside = corner;
    inside.y2 = Rational(3, 4) - Rational(1, 1000000);
    CHECK_FALSE(fundamental_membership(inside, 1));
    // L = 6 boundary height sqrt(3)/12
    UpperPoint low;
    low.x = Rational(1, 2);
    low.y2 = Rational(3, 144);
    CHECK_FALSE(fundamental_membership(low, 6));  // (c, d) = (2, -1) gives 1/12 < 1/6
    low.x = 0;
    CHECK_FALSE(fundamental_membership(low, 6));
    UpperPoint top;
    top.x = 0;
    top.y2 = Rational(1, 6);
    CHECK(fundamental_membership(top, 6));
    // direct minimization oracle for random points
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> xs(-50, 50), ys(5, 150), Ls(1, 8);
    for (int k = 0; k < 200; ++k) {
        UpperPoint z;
        z.x = Rational(xs(rng), 100);
        z.y2 = Rational(ys(rng), 100);
        z.x.canonicalize();
        z.y2.canonicalize();
        const long L = Ls(rng);
        bool expect = z.y2 * 4 * L * L >= 3;
        for (long c = -40; c <= 40 && expect; ++c)
            for (long d = -40; d <= 40; ++d) {
                if (c == 0 && d == 0) continue;
                Rational re = c * z.x + d;
                if ((re * re + c * c * z.y2) * L < 1) {
                    expect = false;
                    break;
                }
            }
        CHECK(fundamental_membership(z, L) == expect);
    }
}

TEST_CASE("counting: comparison ratio on a small grid") {
    std::vector<UpperPoint> zs{UpperPoint::from_double(0, 1), UpperPoint::from_double(0, 2)};
    CountSweep s = count_sweep(zs, 12, {1e-2, 1e-1}, {1, 2});
    CHECK(s.monotone_ok);
    CHECK(s.max_ratio > 0);
    CHECK(s.max_ratio <= 1.2);
}

TEST_CASE("geometric side: identity term and bound") {
    std::mt19937_64 rng(4);
    std::map<long, HeckeEigenvalues> eig;
    for (long l = 2; l < 20; ++l)
        if (is_prime(l)) eig[l] = sample_hecke(rng, l);
    auto bump = [](double u) { return u < 1 ? 1 - u : 0.0; };
    AmplifierCoefficients A = build_amplifier(1, 1, eig);
    GeometricSide g = geometric_side(UpperPoint::from_double(0, 2), A, 1, bump);
    CHECK(g.identity_part > 0);
    CHECK(g.value >= g.identity_part);
    CHECK(g.bound > 0);
    CHECK_THROWS_AS(geometric_side(UpperPoint::from_double(0, 0.2), A, 1, bump), Error);
}
