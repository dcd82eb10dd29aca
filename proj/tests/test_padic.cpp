#include "doctest.h"

#include <random>

#include "pnf/padic.hpp"

using namespace pnf;

namespace {

Rational q(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

Mat2 random_gl2(std::mt19937_64& rng, long p) {
    std::uniform_int_distribution<int> e(-3, 3);
    std::uniform_int_distribution<long> u(-40, 40);
    while (true) {
        Mat2 g(q(u(rng)) * prime_power(p, e(rng)), q(u(rng)) * prime_power(p, e(rng)),
               q(u(rng)) * prime_power(p, e(rng)), q(u(rng)) * prime_power(p, e(rng)));
        if (g.det() != 0) return g;
    }
}

}  // namespace

TEST_CASE("valuation and residues") {
    CHECK(valuation(q(12), 2) == 2);
    CHECK(valuation(q(5, 18), 3) == -2);
    CHECK(valuation(q(0), 5) == kInfiniteValuation);
    CHECK(residue(q(1, 2), 3, 2) == 5);  // 2*5 = 10 = 1 mod 9
    CHECK(unit_part(q(-12), 2) == q(-3));
}

TEST_CASE("iwasawa worked examples") {
    long p = 3;
    auto iw = iwasawa_decompose(Mat2::identity(), p);
    CHECK(iw.z == 1);
    CHECK(iw.x == 0);
    CHECK(iw.y == 1);
    CHECK(iw.k == Mat2::identity());

    Rational w = p;
    auto iw2 = iwasawa_decompose(Mat2::weyl() * Mat2::diag_a(w), p);
    CHECK(iw2.z == w);
    CHECK(iw2.x == 0);
    CHECK(iw2.y == 1 / w);
    CHECK(iw2.k == Mat2::weyl());

    auto iw3 = iwasawa_decompose(Mat2::unipotent(q(1, 3)), p);
    CHECK(iw3.z == 1);
    CHECK(iw3.x == q(1, 3));
    CHECK(iw3.y == 1);
    CHECK(iw3.k == Mat2::identity());

    CHECK_THROWS_AS(iwasawa_decompose(Mat2(1, 2, 2, 4), p), Error);
}

TEST_CASE("iwasawa reconstructs random matrices exactly") {
    std::mt19937_64 rng(7);
    for (long p : {2L, 3L, 5L}) {
        for (int it = 0; it < 300; ++it) {
            Mat2 g = random_gl2(rng, p);
            auto iw = iwasawa_decompose(g, p);
            CHECK(in_maximal_compact(iw.k, p));
            Mat2 back = Mat2::central(iw.z) * Mat2::unipotent(iw.x) * Mat2::diag_a(iw.y) * iw.k;
            CHECK(back == g);
        }
    }
}

TEST_CASE("coset position examples") {
    long p = 3;
    auto c1 = coset_position(Mat2::diag_a(3), p, 1);
    CHECK(c1.l == 1);
    CHECK(c1.t == -1);
    auto c2 = coset_position(Mat2::weyl() * Mat2::diag_a(3), p, 1);
    CHECK(c2.l == 0);
    CHECK(c2.t == -1);
    auto c3 = coset_position(Mat2::unipotent(1) * Mat2::diag_a(3), p, 2);
    CHECK(reassemble(c3, p) == Mat2::unipotent(1) * Mat2::diag_a(3));
    CHECK(in_k1(c3.witness, p, 2));
}

TEST_CASE("coset position witness and invariants on random matrices") {
    std::mt19937_64 rng(11);
    for (long p : {2L, 3L, 5L}) {
        for (int n = 0; n <= 4; ++n) {
            for (int it = 0; it < 100; ++it) {
                Mat2 g = random_gl2(rng, p);
                auto pos = coset_position(g, p, n);
                CHECK(reassemble(pos, p) == g);
                CHECK(in_k1(pos.witness, p, n));
                CHECK(pos.l >= 0);
                CHECK(pos.l <= n);
                CHECK(valuation(pos.v, p) == 0);
                auto iw = iwasawa_decompose(g, p);
                int lk = std::min(valuation(iw.k.c, p), n);
                CHECK(pos.l == lk);
                CHECK(pos.t == valuation(iw.y, p) - 2 * pos.l);
            }
        }
    }
}

TEST_CASE("matrix invariants examples") {
    long p = 3;
    for (int m = 0; m <= 4; ++m) {
        auto inv = matrix_invariants(Mat2::diag_a(9), p, 4, m);
        CHECK(inv.l == 4);
        CHECK(inv.n0g == 0);
        CHECK(inv.qg == std::max(2, 0 - 2 + m));
    }
    auto i2 = matrix_invariants(Mat2::unipotent(1) * Mat2::diag_a(9), p, 3, 0);
    CHECK(i2.l >= 2);
    auto i3 = matrix_invariants(Mat2::weyl() * Mat2::diag_a(9), p, 3, 0);
    CHECK(i3.l <= 1);
}

TEST_CASE("t(g) formula on K a(p^{n1}) exhaustively") {
    for (long p : {2L, 3L}) {
        for (int n = 1; n <= (p == 2 ? 4 : 3); ++n) {
            int n1 = (n + 1) / 2;
            Rational shift = prime_power(p, n1);
            long bad = 0, count = 0;
            for_each_k_mod(p, p == 2 ? std::min(n + 1, 3) : std::min(n + 1, 2), [&](long a, long b, long c, long d) {
                Mat2 g = Mat2(a, b, c, d) * Mat2::diag_a(shift);
                auto pos = coset_position(g, p, n);
                ++count;
                if (pos.t != std::min(n1 - 2 * pos.l, -n1)) ++bad;
            });
            CHECK(count > 0);
            CHECK(bad == 0);
        }
    }
}

TEST_CASE("l classification for odd n over K mod p^2") {
    for (long p : {2L, 3L}) {
        for (int n : {1, 3}) {
            int n1 = (n + 1) / 2, n0 = n / 2;
            for_each_k_mod(p, 2, [&](long a, long b, long c, long d) {
                Mat2 k(a, b, c, d);
                int l = coset_position(k * Mat2::diag_a(prime_power(p, n1)), p, n).l;
                // K^0(p) has upper-right entry in p; N(o)K^0(p) is {d a unit}, wK^0(p) is {d in p}
                bool in_n_k0 = (d % p != 0);
                bool in_w_k0 = (d % p == 0);
                CHECK((l >= n1) == in_n_k0);
                CHECK((l <= n0) == in_w_k0);
                CHECK(!(in_n_k0 && in_w_k0));
            });
        }
    }
}

TEST_CASE("gl2 order") {
    long count = 0;
    for_each_k_mod(2, 2, [&](long, long, long, long) { ++count; });
    CHECK(count == gl2_order(2, 2));
    CHECK(gl2_order(3, 2) == 3888);
    CHECK(gl2_order(2, 3) == 1536);
}
