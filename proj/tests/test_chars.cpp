#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "pnf/chars.hpp"

using namespace pnf;

namespace {

using cd = std::complex<double>;

bool near(cd a, cd b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// Floating-point additive character, written from scratch.
cd psi_oracle(const Rational& x, long p) {
    if (x == 0) return 1;
    int v = valuation(x, p);
    if (v >= 0) return 1;
    long pk = ipow(p, -v);
    Rational frac = x * pk;  // integral numerator modulo pk
    long r = residue(frac, p, -v);
    return std::polar(1.0, 2 * M_PI * static_cast<double>(r) / static_cast<double>(pk));
}

// Normalized Gauss sum over units modulo p^R, floating point.
cd gauss_oracle(const Rational& x, const ResidueCharacter& mu, int R) {
    long p = mu.p();
    long pR = ipow(p, R);
    cd s = 0;
    long count = 0;
    for (long u = 1; u < pR; ++u) {
        if (u % p == 0) continue;
        s += mu.at_residue(u % mu.group().modulus()).to_complex() * psi_oracle(x * u, p);
        ++count;
    }
    return s / static_cast<double>(count);
}

}  // namespace

TEST_CASE("character enumeration counts") {
    CHECK(enumerate_tilde_characters(3, 1).size() == 2);
    CHECK(enumerate_tilde_characters(2, 2).size() == 2);
    CHECK(enumerate_tilde_characters(5, 2).size() == 20);
    CHECK(enumerate_tilde_characters(2, 1).size() == 1);
    CHECK(enumerate_tilde_characters(2, 4).size() == 8);
    auto chars = enumerate_tilde_characters(5, 2);
    int by[3] = {0, 0, 0};
    for (const auto& mu : chars) by[mu.conductor()]++;
    CHECK(by[0] == 1);
    CHECK(by[1] == 3);
    CHECK(by[2] == 16);
    for (std::size_t i = 1; i < chars.size(); ++i) CHECK(chars[i - 1].conductor() <= chars[i].conductor());
    // conductor 1 never occurs at p = 2
    for (const auto& mu : enumerate_tilde_characters(2, 4)) CHECK(mu.conductor() != 1);
}

TEST_CASE("characters are multiplicative and lift consistently") {
    std::mt19937_64 rng(11);
    for (long p : {2L, 3L, 5L}) {
        for (const auto& mu : enumerate_tilde_characters(p, 3)) {
            ResidueCharacter up = mu.lift(mu.level() + 1);
            CHECK(up == mu);
            CHECK(up.conductor() == mu.conductor());
            long M = ipow(p, 4);
            std::uniform_int_distribution<long> d(1, M - 1);
            for (int s = 0; s < 5; ++s) {
                long u = d(rng), v = d(rng);
                if (u % p == 0 || v % p == 0) continue;
                CHECK(mu.at_unit(Rational(u * v)) == mu.at_unit(Rational(u)) * mu.at_unit(Rational(v)));
                CHECK(up.at_unit(Rational(u)) == mu.at_unit(Rational(u)));
            }
            CHECK((mu * mu.inv()).is_trivial());
        }
    }
}

TEST_CASE("additive character") {
    for (long p : {2L, 3L, 5L}) {
        CHECK(psi(Rational(1, p), p).to_cyclo() == Cyclo::root(static_cast<std::uint64_t>(p), 1));
        CHECK(psi(Rational(7), p).is_one());
        std::mt19937_64 rng(p);
        std::uniform_int_distribution<long> d(-500, 500);
        for (int i = 0; i < 50; ++i) {
            Rational a(d(rng), ipow(p, 3)), b(d(rng), ipow(p, 2) * 7);
            a.canonicalize();
            b.canonicalize();
            CHECK(psi(a + b, p) == psi(a, p) * psi(b, p));
            CHECK(near(psi(a, p).to_complex(), psi_oracle(a, p)));
        }
    }
}

TEST_CASE("Gauss sums: direct, fast and floating oracle agree") {
    for (long p : {2L, 3L, 5L}) {
        int amax = p == 5 ? 2 : 3;
        for (const auto& mu : enumerate_tilde_characters(p, amax)) {
            for (int k = -amax - 1; k <= 1; ++k) {
                for (long u : {1L, 3L, p + 1}) {
                    if (u % p == 0) continue;
                    Rational x = prime_power(p, k) * u;
                    Cyclo g = gauss_sum(x, mu);
                    CHECK(g == gauss_sum_fast(x, mu));
                    int R = std::max({amax, -k, 1});
                    CHECK(near(g.to_complex(), gauss_oracle(x, mu, R)));
                    int a = mu.conductor();
                    bool nonzero = a == 0 ? k >= -1 : k == -a;
                    CHECK(g.is_zero() == !nonzero);
                    if (a >= 1 && k == -a) {
                        Rational expected = prime_power(p, -a) / ((1 - Rational(1, p)) * (1 - Rational(1, p)));
                        CHECK(g.norm2() == Cyclo(expected));
                    }
                }
            }
        }
        CHECK(gauss_sum(Rational(1, p), ResidueCharacter::trivial(p)) == Cyclo(Rational(-1, p - 1)));
    }
}

TEST_CASE("GL1 epsilon factors") {
    // quadratic character: eps^2 = eta(-1)
    for (long p : {3L, 5L, 7L}) {
        ResidueCharacter leg(UnitGroup::get(p, 1), {(p - 1) / 2});
        GL1Char eta{leg, Root{}};
        Cyclo e = gl1_epsilon(eta);
        int sign = p % 4 == 1 ? 1 : -1;
        CHECK(e * e == Cyclo(sign));
    }
    // modulus one for every character modulo 9, any value at p
    for (const auto& mu : enumerate_tilde_characters(3, 2)) {
        for (int j = 0; j < 3; ++j) {
            GL1Char chi{mu, Root::make(3, j)};
            CHECK(gl1_epsilon(chi).norm2() == Cyclo(1));
        }
    }
    // eps(chi) eps(chi^{-1}) = chi(-1)
    for (long p : {2L, 3L, 5L}) {
        for (const auto& mu : enumerate_tilde_characters(p, 2)) {
            GL1Char chi{mu, Root::make(4, 1)};
            Cyclo prod = gl1_epsilon(chi) * gl1_epsilon(chi.inv());
            CHECK(prod == mu.at_unit(Rational(-1)).to_cyclo());
        }
    }
}

TEST_CASE("quadratic extension arithmetic") {
    for (long p : {3L, 5L}) {
        for (bool ram : {false, true}) {
            auto E = std::make_shared<const QuadExt>(p, ram);
            QuadElem pi = E->uniformizer();
            CHECK(E->val(pi) == 1);
            CHECK(E->val(E->uniformizer_power(-3)) == -3);
            CHECK(E->val(E->from_rational(Rational(p))) == E->ram_index());
            for (int k = 0; k <= 3; ++k) {
                auto us = E->unit_residues(k);
                long expected = k == 0 ? 1 : E->residue_count(k) / E->residue_size() * (E->residue_size() - 1);
                CHECK(static_cast<long>(us.size()) == expected);
            }
            QuadElem a{Rational(2), Rational(1, 3)};
            QuadElem one = E->mul(a, E->inv(a));
            CHECK(one.x == 1);
            CHECK(one.y == 0);
            CHECK(E->norm(E->mul(a, a)) == E->norm(a) * E->norm(a));
        }
    }
}

TEST_CASE("characters of E^x built from parameters") {
    for (long p : {3L, 5L}) {
        for (bool ram : {false, true}) {
            auto E = std::make_shared<const QuadExt>(p, ram);
            const int e = E->ram_index();
            const int level = ram ? 4 : 3;
            for (int a = 1; a <= 3; ++a) {
                QuadElem beta = E->uniformizer_power(-(a + E->psi_shift()));
                long theta = 1;
                auto xi = QuadExtCharacter::from_parameters(E, level, theta, beta, Root::make(2, 1));
                CHECK(xi.conductor() == a);
                // multiplicativity on random units
                auto us = E->unit_residues(level);
                std::mt19937_64 rng(static_cast<unsigned long>(p * 10 + a));
                std::uniform_int_distribution<std::size_t> d(0, us.size() - 1);
                for (int s = 0; s < 30; ++s) {
                    const QuadElem& u = us[d(rng)];
                    const QuadElem& v = us[d(rng)];
                    CHECK(xi.at(E->mul(u, v)) == xi.at_unit(u) * xi.at_unit(v));
                }
                Cyclo eps = quad_epsilon(xi);
                CHECK(eps.norm2() == Cyclo(1));
                // a twist by a character of conductor <= 1 keeps modulus one
                if (e * 1 <= level) {
                    for (const auto& mu : enumerate_tilde_characters(p, 1)) {
                        auto tw = xi.twist(GL1Char{mu, Root{}});
                        if (tw.conductor() >= 1) CHECK(quad_epsilon(tw).norm2() == Cyclo(1));
                    }
                }
                GL1Char res = xi.restrict_to_base((level + e - 1) / e);
                for (long u = 1; u < ipow(p, 2); ++u)
                    if (u % p != 0) CHECK(res.unit.at_unit(Rational(u)) == xi.at_unit(E->from_rational(Rational(u))));
            }
        }
    }
}

TEST_CASE("lambda constant of E/F") {
    for (long p : {3L, 5L, 7L}) {
        QuadExt ram(p, true), unr(p, false);
        CHECK(langlands_lambda(unr) == Cyclo(1));
        Cyclo lam = langlands_lambda(ram);
        CHECK(lam.norm2() == Cyclo(1));
        CHECK(lam * lam == Cyclo(ram.eta_p()));
    }
}
