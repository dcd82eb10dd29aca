#include "pnf/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

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

std::string rational_text(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational R(long a, long b = 1) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

}  // namespace

// ----------------------------------------------------------------- level invariants

LevelInvariants level_invariants(long N, long M) {
    require(N >= 1 && M >= 1, ErrorCode::kInvalidArgument, "N and M must be positive");
    require(N % M == 0, ErrorCode::kInvalidArgument, "M must divide N");
    LevelInvariants L;
    L.N = N;
    L.M = M;
    for (auto [p, e] : factorize(N)) L.N0 *= ipow(p, e / 2);
    L.N1 = N / L.N0;
    L.N2 = L.N1 / L.N0;
    L.M1 = M / std::gcd(M, L.N1);
    require(L.N0 % L.M1 == 0, ErrorCode::kInternal, "M1 must divide N0");
    const auto f = factorize(N);
    if (N == 1) {
        L.bound_text = "lambda^{5/24}";
    } else if (f.size() == 1) {
        const auto fm = factorize(M);
        const int m = fm.empty() ? 0 : fm[0].second;
        L.bound_text = "N^{" + rational_text(prime_power_exponent(f[0].second, m)) + "} lambda^{5/24}";
    } else {
        std::ostringstream os;
        os << L.N0 << "^{1/6} * " << L.N1 << "^{1/3} * " << L.M1 << "^{1/2} * lambda^{5/24}";
        L.bound_text = os.str();
    }
    return L;
}

Rational prime_power_exponent(int n, int m) {
    require(n >= 1 && m >= 0 && m <= n, ErrorCode::kInvalidArgument, "need 0 <= m <= n, n >= 1");
    const int n0 = n / 2, n1 = n - n0, m1 = std::max(0, m - n1);
    Rational e = R(n0, 6) + R(n1, 3) + R(m1, 2);
    e /= n;
    e.canonicalize();
    return e;
}

std::vector<IntroRow> intro_table() {
    // reference lower-bound column, one entry per row in order
    static const char* kLower[] = {"1", "1", "N^{1/4}", "1", "N^{1/6}", "1", "1", "N^{1/4}", "1", "N^{1/10}", "N^{1/5}"};
    std::vector<IntroRow> rows;
    for (int n = 1; n <= 5; ++n) {
        for (int m = 0; m <= n; ++m) {
            const int n0 = n / 2, n1 = n - n0, m1 = std::max(0, m - n1);
            if (!rows.empty() && rows.back().n == n && rows.back().m1 == m1) {
                rows.back().ms.push_back(m);
                continue;
            }
            IntroRow r;
            r.n = n;
            r.ms = {m};
            r.n0 = n0;
            r.n1 = n1;
            r.m1 = m1;
            r.upper = prime_power_exponent(n, m);
            rows.push_back(r);
        }
    }
    for (std::size_t i = 0; i < rows.size() && i < 11; ++i) rows[i].lower = kLower[i];
    rows[6].lower_conjectured_sharp = false;
    return rows;
}

// ----------------------------------------------------------------- exponent algebra

const char* sym_name(Sym s) {
    switch (s) {
        case Sym::kN0: return "N0";
        case Sym::kN1: return "N1";
        case Sym::kN2: return "N2";
        case Sym::kM1: return "M1";
        case Sym::kT: return "T";
        case Sym::kY: return "y";
        case Sym::kLambda: return "Lambda";
        default: return "?";
    }
}

ExponentVector ExponentVector::symbol(Sym s, const Rational& e) {
    ExponentVector v;
    v[s] = e;
    return v;
}

ExponentVector ExponentVector::operator*(const ExponentVector& o) const {
    ExponentVector v;
    for (std::size_t i = 0; i < e_.size(); ++i) v.e_[i] = e_[i] + o.e_[i];
    return v;
}

ExponentVector ExponentVector::operator/(const ExponentVector& o) const {
    ExponentVector v;
    for (std::size_t i = 0; i < e_.size(); ++i) v.e_[i] = e_[i] - o.e_[i];
    return v;
}

ExponentVector ExponentVector::pow(const Rational& k) const {
    ExponentVector v;
    for (std::size_t i = 0; i < e_.size(); ++i) {
        v.e_[i] = e_[i] * k;
        v.e_[i].canonicalize();
    }
    return v;
}

ExponentVector ExponentVector::substitute(Sym s, const ExponentVector& value) const {
    ExponentVector v = *this;
    const Rational k = v[s];
    v[s] = 0;
    return v * value.pow(k);
}

bool ExponentVector::dominated_by(const ExponentVector& o) const {
    for (std::size_t i = 0; i < e_.size(); ++i)
        if (o.e_[i] < e_[i]) return false;
    return true;
}

std::string ExponentVector::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (e_[i] == 0) continue;
        if (!out.empty()) out += " ";
        out += sym_name(static_cast<Sym>(i));
        if (e_[i] != 1) out += "^(" + rational_text(e_[i]) + ")";
    }
    return out.empty() ? "1" : out;
}

std::vector<ExponentVector> reduce_dominated(const std::vector<ExponentVector>& terms) {
    std::vector<ExponentVector> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < terms.size() && !drop; ++j) {
            if (i == j) continue;
            // drop strictly dominated terms and later duplicates
            if (terms[i].dominated_by(terms[j]) && (terms[i] != terms[j] || j < i)) drop = true;
        }
        if (!drop) out.push_back(terms[i]);
    }
    return out;
}

namespace {

using EV = ExponentVector;

EV mono(std::initializer_list<std::pair<Sym, Rational>> parts) {
    EV v;
    for (const auto& [s, e] : parts) v[s] += e;
    return v;
}

// Eliminate y by its regime bound (upper bound for small y, lower bound for large y) and compare.
RegimeCheck regime_check(const std::string& name, const std::vector<EV>& terms, const EV& threshold, bool small_y,
                         const EV& target) {
    RegimeCheck rc;
    rc.name = name;
    rc.threshold = threshold;
    for (const EV& t : terms) {
        const Rational e = t[Sym::kY];
        if ((small_y && e < 0) || (!small_y && e > 0)) {
            rc.ok = false;
            rc.failing.push_back(t.to_string() + ": y exponent has the wrong sign for this regime");
            rc.reduced.push_back(t);
            continue;
        }
        EV r = t.substitute(Sym::kY, threshold);
        rc.reduced.push_back(r);
        if (!r.dominated_by(target)) {
            rc.ok = false;
            rc.failing.push_back(t.to_string() + " -> " + r.to_string() + " exceeds " + target.to_string() +
                                 " by " + (r / target).to_string());
        }
    }
    return rc;
}

std::vector<EV> set_N2_trivial(const std::vector<EV>& terms) {
    std::vector<EV> out;
    for (const EV& t : terms) out.push_back(t.substitute(Sym::kN2, EV::one()));
    return out;
}

}  // namespace

CaseCheckReport exponent_casecheck() {
    CaseCheckReport r;
    const EV T = EV::symbol(Sym::kT), y = EV::symbol(Sym::kY), L = EV::symbol(Sym::kLambda);
    const auto N2 = [](long a, long b) { return EV::symbol(Sym::kN2, R(a, b)); };
    const auto Tp = [](long a, long b) { return EV::symbol(Sym::kT, R(a, b)); };
    const auto Lp = [](long a, long b) { return EV::symbol(Sym::kLambda, R(a, b)); };

    // amplified bound without the common N1 M1 factor
    const std::vector<EV> amplified = {
        T / L,
        N2(1, 2) * Tp(1, 2) * y / L,
        Lp(1, 2) * Tp(1, 2) * N2(-1, 2),
        Lp(1, 2) * Tp(1, 2) * y,
        Lp(2, 1) * Tp(1, 2) * N2(-1, 1),
    };
    r.Lambda = Tp(1, 6) * N2(1, 3);
    for (const EV& t : amplified) r.substituted.push_back(t.substitute(Sym::kLambda, r.Lambda));
    r.reduced = reduce_dominated(r.substituted);
    r.target = Tp(5, 6) * N2(-1, 3);
    r.displayed = {Tp(5, 6) * N2(-1, 3), Tp(7, 12) * N2(-1, 6) * y};

    r.display_matches = r.reduced.size() == r.displayed.size();
    for (const EV& t : r.reduced)
        if (std::find(r.displayed.begin(), r.displayed.end(), t) == r.displayed.end()) {
            r.display_matches = false;
            r.display_mismatch.push_back("derived " + t.to_string() + " not displayed");
        }
    for (const EV& t : r.displayed)
        if (std::find(r.reduced.begin(), r.reduced.end(), t) == r.reduced.end()) {
            r.display_matches = false;
            r.display_mismatch.push_back("displayed " + t.to_string() + " not derived");
        }

    const EV printed_threshold = Tp(1, 4) * N2(-1, 6);
    const EV corrected_threshold = Tp(1, 4) * N2(-1, 2);
    // squared Whittaker bound without N1 M1: T / (N2 y) + T^{1/3} / (N2 M1)
    const std::vector<EV> fourier = {T * N2(-1, 1) / y, Tp(1, 3) * N2(-1, 1) * EV::symbol(Sym::kM1, -1)};

    r.small_y_printed = regime_check("y <= T^(1/4) N2^(-1/6), derived terms", r.reduced, printed_threshold, true, r.target);
    r.small_y_display =
        regime_check("y <= T^(1/4) N2^(-1/6), displayed terms", r.displayed, printed_threshold, true, r.target);
    r.large_y_printed = regime_check("y >= T^(1/4) N2^(-1/6)", fourier, printed_threshold, false, r.target);
    r.large_y_fourier = fourier[0].substitute(Sym::kY, printed_threshold).pow(R(1, 2));
    r.large_y_fourier_matches = r.large_y_fourier == N2(-5, 12) * Tp(3, 8);
    r.small_y_corrected =
        regime_check("y <= T^(1/4) N2^(-1/2), derived terms", r.reduced, corrected_threshold, true, r.target);
    r.large_y_corrected = regime_check("y >= T^(1/4) N2^(-1/2)", fourier, corrected_threshold, false, r.target);

    const EV flat_target = r.target.substitute(Sym::kN2, EV::one());
    const EV flat_threshold = printed_threshold.substitute(Sym::kN2, EV::one());
    const RegimeCheck d1 = regime_check("N2 = 1 small y", set_N2_trivial(r.reduced), flat_threshold, true, flat_target);
    const RegimeCheck d2 = regime_check("N2 = 1 large y", set_N2_trivial(fourier), flat_threshold, false, flat_target);
    r.degenerate_ok = d1.ok && d2.ok;

    r.printed_ok = r.display_matches && r.small_y_printed.ok && r.large_y_printed.ok;
    r.corrected_ok = r.small_y_corrected.ok && r.large_y_corrected.ok;
    return r;
}

// ----------------------------------------------------------------- Whittaker expansion

std::vector<Mat2> j_coset_elements(const LocalRep& pi) {
    const long p = pi.p;
    const long PN = ipow(p, pi.n + 1);
    const Mat2 shift = Mat2::diag_a(prime_power(p, pi.n1));
    std::vector<Mat2> ks;
    for (long c = 0; c < PN; ++c) ks.push_back(Mat2::lower(Rational(c)));
    for (long e = 0; e < PN; e += p) ks.push_back(Mat2(0, 1, -1, Rational(-e)));
    std::vector<Mat2> out;
    for (const Mat2& k : ks) {
        Mat2 g = k * shift;
        MatrixInvariants inv = matrix_invariants(g, p, pi.n, pi.m);
        if (pi.n % 2 == 0 || inv.l <= pi.n0) out.push_back(g);
    }
    return out;
}

WhittakerLength whittaker_length(const std::vector<LocalFactor>& factors) {
    WhittakerLength w;
    for (const auto& f : factors) {
        require(f.W != nullptr, ErrorCode::kInvalidArgument, "missing newform");
        const LocalRep& pi = f.W->rep();
        const long p = pi.p;
        const Mat2 k = f.g * Mat2::diag_a(prime_power(p, -pi.n1));
        require(in_maximal_compact(k, p), ErrorCode::kInvalidArgument,
                "g_p is not in K a(p^n1) at p = " + std::to_string(p));
        MatrixInvariants inv = matrix_invariants(f.g, p, pi.n, pi.m);
        require(pi.n % 2 == 0 || inv.l <= pi.n0, ErrorCode::kInvalidArgument,
                "l(g_p) > n0 at odd-conductor prime p = " + std::to_string(p));
        w.Q *= ipow(p, inv.qg);
        w.N0g *= ipow(p, inv.n0g);
        w.N0 *= ipow(p, pi.n0);
        w.M1 *= ipow(p, pi.m1);
    }
    w.divides_ok = (w.N0 * w.M1) % w.Q == 0 && w.N0 % w.N0g == 0;
    return w;
}

Cyclo local_coefficient_product(long n, const std::vector<LocalFactor>& factors) {
    require(n != 0, ErrorCode::kInvalidArgument, "n must be nonzero");
    Cyclo v(1);
    for (const auto& f : factors) {
        const LocalRep& pi = f.W->rep();
        MatrixInvariants inv = matrix_invariants(f.g, pi.p, pi.n, pi.m);
        v *= f.W->value(Mat2::diag_a(Rational(n) * prime_power(pi.p, -inv.qg)) * f.g);
        if (v.is_zero()) break;
    }
    return v;
}

BlockAverageReport block_average(const std::vector<LocalFactor>& factors, const std::vector<long>& n1s, int r_max) {
    BlockAverageReport rep;
    const WhittakerLength w = whittaker_length(factors);
    long level = 1;
    for (const auto& f : factors) level *= f.W->p();
    for (long n1 : n1s) {
        long rest = n1;
        for (const auto& f : factors)
            while (rest % f.W->p() == 0) rest /= f.W->p();
        require(rest == 1, ErrorCode::kInvalidArgument, "n1 must divide a power of the level");
        std::map<long, Cyclo> first_block;
        for (int r = 0; r < r_max; ++r) {
            double sum = 0;
            for (long n0 = std::max<long>(1, r * w.N0g); n0 < (r + 1) * w.N0g; ++n0) {
                if (std::gcd(n0, level) != 1) continue;
                const Cyclo lam = local_coefficient_product(n0 * n1, factors);
                const Cyclo mod2 = lam.norm2();
                sum += mod2.to_complex().real();
                const long residue = n0 % w.N0g;
                auto it = first_block.find(residue);
                if (it == first_block.end()) {
                    first_block.emplace(residue, mod2);
                } else {
                    ++rep.periodic_pairs;
                    if (it->second != mod2) rep.periodic_ok = false;
                }
            }
            ++rep.blocks;
            rep.constant =
                std::max(rep.constant, sum / (static_cast<double>(w.N0g) / std::sqrt(static_cast<double>(n1))));
        }
    }
    return rep;
}

FourierBound fourier_bound_eval(double Q, double N0g, double T, double y) {
    require(y > 0, ErrorCode::kInvalidArgument, "y must be positive");
    require(Q >= 1 && N0g >= 1 && T >= 1, ErrorCode::kInvalidArgument, "need Q, N0g, T >= 1");
    FourierBound b;
    b.value = Q * T / y + N0g * std::cbrt(T);
    std::ostringstream os;
    os.precision(10);
    os << "Q^g T / y + N0^g T^(1/3) = " << Q << "*" << T << "/" << y << " + " << N0g << "*" << T << "^(1/3)";
    b.form = os.str();
    b.crossover_y = std::pow(T, 2.0 / 3) * Q / N0g;
    return b;
}

}  // namespace pnf
