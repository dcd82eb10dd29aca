#include "doctest.h"

#include <cmath>
#include <random>

#include "pnf/cyclo.hpp"

using namespace pnf;

namespace {

Cyclo random_cyclo(std::mt19937_64& rng, std::uint64_t M, int terms) {
    std::uniform_int_distribution<int> e(0, static_cast<int>(M) - 1);
    std::uniform_int_distribution<int> c(-5, 5);
    Cyclo z;
    for (int i = 0; i < terms; ++i) z += Cyclo::root(M, e(rng)) * Rational(c(rng), 1 + std::abs(c(rng)));
    return z;
}

bool near(std::complex<double> a, std::complex<double> b, double tol = 1e-10) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("cyclotomic basic identities") {
    CHECK(Cyclo::root(4, 1) * Cyclo::root(4, 1) == Cyclo(-1));
    CHECK((Cyclo(1) + Cyclo::root(3, 1) + Cyclo::root(3, 2)).is_zero());
    CHECK(Cyclo::root(5, 1).conj() == Cyclo::root(5, 4));
    CHECK(Cyclo::root(5, 1).norm2() == Cyclo(1));
    CHECK(near(Cyclo::root(4, 1).to_complex(), {0, 1}, 1e-12));
    CHECK(Cyclo().to_complex() == std::complex<double>(0, 0));
    auto z = Cyclo(1) + Cyclo::root(8, 1);
    CHECK(near(z.to_complex(), {1 + std::cos(M_PI / 4), std::sin(M_PI / 4)}, 1e-12));
}

TEST_CASE("canonical form: equal values have identical representations") {
    // zeta_12^k computed two ways
    for (int k = 0; k < 12; ++k) {
        Cyclo a = Cyclo::root(12, k);
        Cyclo b = Cyclo::root(3, 1).pow(k) * Cyclo::root(4, 1).pow(-k);
        Cyclo a12 = a.promote(12), b12 = b.promote(12);
        CHECK(a12.terms() == b12.terms());
        CHECK(a == b);
    }
}

TEST_CASE("square roots of primes") {
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
        Cyclo s = Cyclo::sqrt_prime(p);
        CHECK(s * s == Cyclo(p));
        CHECK(s.to_complex().real() > 0);
        CHECK(std::abs(s.to_complex().imag()) < 1e-12);
        CHECK(Cyclo::half_power(p, 3) == s * s * s);
        CHECK(Cyclo::half_power(p, -1) * s == Cyclo(1));
    }
}

TEST_CASE("ring axioms on random samples") {
    std::mt19937_64 rng(3);
    for (std::uint64_t M : {5u, 8u, 9u, 12u, 15u, 24u, 36u}) {
        for (int it = 0; it < 20; ++it) {
            Cyclo a = random_cyclo(rng, M, 4), b = random_cyclo(rng, M, 3), c = random_cyclo(rng, 6, 2);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + b == b + a);
            CHECK(near((a * b).to_complex(), a.to_complex() * b.to_complex()));
            CHECK(near(a.conj().to_complex(), std::conj(a.to_complex())));
            if (!a.is_zero()) CHECK(a * a.inverse() == Cyclo(1));
        }
    }
}

TEST_CASE("zero test agrees with complex embedding") {
    std::mt19937_64 rng(5);
    int zeros = 0;
    for (int it = 0; it < 1000; ++it) {
        std::uint64_t M = (it % 3 == 0) ? 9 : (it % 3 == 1 ? 10 : 12);
        Cyclo a = random_cyclo(rng, M, 2);
        Cyclo b = (it % 2) ? a * Cyclo::root(M, 1) : random_cyclo(rng, M, 2);
        Cyclo d = a * Cyclo::root(M, 1) - b;
        bool z = d.is_zero();
        zeros += z;
        CHECK(z == (std::abs(d.to_complex()) < 1e-9));
    }
    CHECK(zeros > 0);
}

TEST_CASE("inverse of one minus a scaled root") {
    for (long p : {2L, 3L, 5L}) {
        ScaledRoot z{Root::make(6, 1), -1, p};
        Cyclo inv = inv_one_minus(z);
        CHECK(inv * (Cyclo(1) - z.to_cyclo()) == Cyclo(1));
    }
}

TEST_CASE("modulus cap") {
    auto old = cyclo_modulus_cap();
    set_cyclo_modulus_cap(100);
    CHECK_THROWS_AS(Cyclo::root(101, 1), Error);
    set_cyclo_modulus_cap(old);
}
