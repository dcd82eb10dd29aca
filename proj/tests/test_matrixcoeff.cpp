#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "pnf/matrixcoeff.hpp"

using namespace pnf;

namespace {

using cd = std::complex<double>;

bool near(cd a, cd b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

Mat2 random_matrix(std::mt19937_64& rng, long p) {
    std::uniform_int_distribution<long> num(-30, 30);
    std::uniform_int_distribution<int> ex(-2, 2);
    for (;;) {
        Mat2 g(Rational(num(rng)) * prime_power(p, ex(rng)), Rational(num(rng)) * prime_power(p, ex(rng)),
               Rational(num(rng)) * prime_power(p, ex(rng)), Rational(num(rng)) * prime_power(p, ex(rng)));
        if (g.det() != 0) return g;
    }
}

Mat2 random_k1(std::mt19937_64& rng, long p, int n) {
    std::uniform_int_distribution<long> d(-30, 30);
    long pn = ipow(p, n);
    for (;;) {
        Mat2 k(Rational(1 + pn * d(rng)), Rational(d(rng)), Rational(pn * d(rng)), Rational(d(rng)));
        Rational det = k.det();
        if (det != 0 && valuation(det, p) == 0) return k;
    }
}

// <pi(g) W, W> / <W, W> by truncated summation over the diagonal torus in floating point.
cd whittaker_pairing(const Newform& W, const Mat2& g, int a_max, int unit_level) {
    const long p = W.p();
    const long P = ipow(p, unit_level);
    cd num = 0, den = 0;
    for (int a = -12; a <= a_max; ++a) {
        cd shell = 0, shell_norm = 0;
        long units = 0;
        for (long u = 1; u < P; ++u) {
            if (u % p == 0) continue;
            ++units;
            Mat2 y = Mat2::diag_a(prime_power(p, a) * u);
            cd w0 = W.value_complex(y);
            shell += W.value_complex(y * g) * std::conj(w0);
            shell_norm += std::norm(w0);
        }
        num += shell / static_cast<double>(units);
        den += shell_norm / static_cast<double>(units);
    }
    return num / den;
}

// Rank of the Gram matrix of K^0 translates of the conjugated newvector: dim of the K^0 span.
long gram_rank(const KTable& T) {
    const std::size_t m = T.elements.size();
    std::vector<std::vector<cd>> M(m, std::vector<cd>(m));
    std::vector<std::array<long, 4>> inv(m);
    const long P = T.P;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& e = T.elements[i];
        long det = mod_floor(e[0] * e[3] - e[1] * e[2], P);
        long di = inverse_mod(det, P);
        inv[i] = {mod_floor(e[3] * di, P), mod_floor(-e[1] * di, P), mod_floor(-e[2] * di, P), mod_floor(e[0] * di, P)};
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const auto& a = inv[i];
            const auto& b = T.elements[j];
            long c0 = mod_floor(a[0] * b[0] + a[1] * b[2], P), c1 = mod_floor(a[0] * b[1] + a[1] * b[3], P);
            long c2 = mod_floor(a[2] * b[0] + a[3] * b[2], P), c3 = mod_floor(a[2] * b[1] + a[3] * b[3], P);
            long pos = T.find(c0, c1, c2, c3);
            if (pos >= 0) M[i][j] = T.values[static_cast<std::size_t>(pos)].to_complex();
        }
    long rank = 0;
    std::vector<bool> used(m, false);
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t best = m;
        double bv = 1e-8;
        for (std::size_t r = 0; r < m; ++r)
            if (!used[r] && std::abs(M[r][col]) > bv) {
                bv = std::abs(M[r][col]);
                best = r;
            }
        if (best == m) continue;
        used[best] = true;
        ++rank;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == best || M[r][col] == 0.0) continue;
            cd f = M[r][col] / M[best][col];
            for (std::size_t c = col; c < m; ++c) M[r][c] -= f * M[best][c];
        }
    }
    return rank;
}

}  // namespace

TEST_CASE("matrix coefficient: identity, centre and hermitian symmetry") {
    std::mt19937_64 rng(11);
    for (long p : {2L, 3L}) {
        for (const auto& pi : build_catalog(p, 3)) {
            auto W = std::make_shared<Newform>(pi);
            MatrixCoefficient phi(W);
            CHECK_MESSAGE(phi.value(Mat2::identity()) == Cyclo(1), pi.id);
            for (long u : {2L, 5L, 7L, 10L}) {
                if (u % p == 0) continue;
                Cyclo expect = pi.omega.at(Rational(u)).inv().to_cyclo();
                CHECK_MESSAGE(phi.value(Mat2::central(Rational(u))) == expect, pi.id);
            }
            for (int s = 0; s < 6; ++s) {
                Mat2 g = random_matrix(rng, p);
                CHECK_MESSAGE(phi.value(g.inverse()) == phi.value(g).conj(), (pi.id + " g=" + g.to_string()));
            }
        }
    }
}

TEST_CASE("matrix coefficient: bi-invariance under K1") {
    std::mt19937_64 rng(12);
    for (long p : {2L, 3L}) {
        for (const auto& pi : build_catalog(p, 3)) {
            auto W = std::make_shared<Newform>(pi);
            MatrixCoefficient phi(W);
            for (int s = 0; s < 5; ++s) {
                Mat2 g = random_matrix(rng, p);
                Mat2 k1 = random_k1(rng, p, pi.n), k2 = random_k1(rng, p, pi.n);
                CHECK_MESSAGE(phi.value(k1 * g * k2) == phi.value(g), (pi.id + " g=" + g.to_string()));
            }
        }
    }
}

TEST_CASE("matrix coefficient: closed-form tail against a truncated torus sum") {
    std::mt19937_64 rng(13);
    for (long p : {2L, 3L}) {
        for (const auto& pi : build_catalog(p, 2)) {
            auto W = std::make_shared<Newform>(pi);
            MatrixCoefficient phi(W);
            for (int s = 0; s < 3; ++s) {
                Mat2 g = random_matrix(rng, p);
                cd oracle = std::conj(whittaker_pairing(*W, g, 70, std::max(pi.n, 1) + 2));
                CHECK_MESSAGE(near(phi.value(g).to_complex(), oracle, 1e-8), (pi.id + " g=" + g.to_string()));
            }
        }
    }
}

TEST_CASE("delta: exact values and dimension of the K0 span") {
    for (long p : {2L, 3L}) {
        const int n_max = p == 2 ? 3 : 1;
        for (const auto& pi : build_catalog(p, n_max)) {
            auto W = std::make_shared<Newform>(pi);
            MatrixCoefficient phi(W);
            KTable T = tabulate_truncated(phi, pi.n);
            DeltaReport D = compute_delta(phi, T);
            REQUIRE_MESSAGE(D.ok, pi.id);
            long rank = gram_rank(T);
            CHECK_MESSAGE(D.dimension == Rational(rank), (pi.id + " dim=" + D.dimension.get_str()));
            if (pi.n == 0) CHECK(D.delta_q == 1);
        }
    }
    // Steinberg at p = 2: one-dimensional span, index 3
    auto cat = build_catalog(2, 1);
    for (const auto& pi : cat) {
        if (pi.kind != RepKind::kSteinberg) continue;
        MatrixCoefficient phi(std::make_shared<Newform>(pi));
        DeltaReport D = compute_delta(phi, tabulate_truncated(phi, 1));
        CHECK(D.delta_q == Rational(1, 3));
        CHECK(D.dimension == 1);
    }
}

TEST_CASE("delta: idempotency and eigenvector") {
    for (long p : {2L, 3L}) {
        const int n_max = p == 2 ? 3 : 1;
        for (const auto& pi : build_catalog(p, n_max)) {
            MatrixCoefficient phi(std::make_shared<Newform>(pi));
            KTable T = tabulate_truncated(phi, pi.n);
            DeltaReport D = compute_delta(phi, T);
            IdempotencyReport I = verify_idempotency(phi, T, D.delta, 20, 5);
            CHECK_MESSAGE(I.ok, pi.id);
            CHECK(I.off_support > 0);
            EigenReport E = verify_eigenvector(phi, T, D.delta, 4, 6);
            CHECK_MESSAGE(E.ok, pi.id);
        }
    }
}

TEST_CASE("integration constants: hand values") {
    CHECK(integration_constant(2, 1, 0) == Rational(2, 3));
    CHECK(integration_constant(2, 1, 1) == Rational(4, 3));
    CHECK(integration_constant(3, 2, 1) == Rational(3, 2));
    for (long q : {2L, 3L, 5L})
        for (int n = 1; n <= 3; ++n) {
            Rational s;
            for (int k = 0; k <= n; ++k) s += integration_constant(q, n, k) * prime_power(q, -2 * k);
            CHECK(s == 1);
        }
    auto r1 = integ_constants_verify(2, 1);
    CHECK(r1.ok);
    CHECK(r1.rows[1].lhs == Rational(1, 3));
    auto r2 = integ_constants_verify(3, 2);
    CHECK(r2.ok);
    CHECK(r2.rows[2].lhs == Rational(1, 12));
    // volume of K_0(p^j) is 1 / (q^{j-1}(q+1))
    for (long q : {2L, 3L, 5L}) {
        auto r = integ_constants_verify(q, 3);
        CHECK(r.ok);
        for (const auto& row : r.rows)
            if (row.j > 0) CHECK(row.lhs == 1 / (prime_power(q, row.j - 1) * (q + 1)));
    }
}

TEST_CASE("supercuspidal closed formula and cross terms") {
    for (const auto& pi : build_catalog(3, 2)) {
        if (pi.kind != RepKind::kDihedral || pi.n != 2) continue;
        MatrixCoefficient phi(std::make_shared<Newform>(pi));
        BackendReport B = compare_backends(phi);
        CHECK_MESSAGE(B.ok, pi.id);
        CHECK(B.nonzero > 0);
        OrthogonalityReport O = cross_term_orthogonality(phi);
        CHECK_MESSAGE(O.ok, pi.id);
        CHECK(O.nonzero_cross == 0);
        CHECK(O.full_consistent);
        CHECK(O.ratio > 0);
    }
}
