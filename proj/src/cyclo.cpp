#include "pnf/cyclo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace pnf {

namespace {

std::atomic<std::uint64_t> g_modulus_cap{1000000};

using Poly = std::vector<long long>;  // coefficients, low degree first

std::uint64_t radical(std::uint64_t n) {
    std::uint64_t r = 1;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            r *= d;
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) r *= n;
    return r;
}

Poly poly_divide_exact(Poly num, const Poly& den) {
    // den monic
    int dn = static_cast<int>(den.size()) - 1;
    int nn = static_cast<int>(num.size()) - 1;
    if (nn < dn) return Poly{0};
    Poly q(nn - dn + 1, 0);
    for (int i = nn; i >= dn; --i) {
        long long c = num[i];
        q[i - dn] = c;
        if (c == 0) continue;
        for (int k = 0; k <= dn; ++k) num[i - dn + k] -= c * den[k];
    }
    return q;
}

std::mutex g_poly_mutex;
std::map<std::uint64_t, Poly> g_cyclo_polys;

Poly cyclotomic_poly(std::uint64_t r) {
    {
        std::lock_guard<std::mutex> lk(g_poly_mutex);
        auto it = g_cyclo_polys.find(r);
        if (it != g_cyclo_polys.end()) return it->second;
    }
    Poly num(r + 1, 0);
    num[0] = -1;
    num[r] = 1;
    for (std::uint64_t d = 1; d < r; ++d)
        if (r % d == 0) num = poly_divide_exact(num, cyclotomic_poly(d));
    std::lock_guard<std::mutex> lk(g_poly_mutex);
    g_cyclo_polys[r] = num;
    return num;
}

/// Reduction data for one modulus.
struct Field {
    std::uint64_t M = 1, r = 1, s = 1, phi_r = 1;
    Poly phi;  // Phi_r, monic, degree phi_r
    std::mutex mu;
    std::deque<Poly> rows;  // rows[j - phi_r] = y^j mod Phi_r, computed lazily in order

    const Poly& row(std::uint64_t j) {
        std::lock_guard<std::mutex> lk(mu);
        while (rows.size() <= j - phi_r) {
            Poly next(phi_r, 0);
            if (rows.empty()) {
                for (std::uint64_t k = 0; k < phi_r; ++k) next[k] = -phi[k];
            } else {
                const Poly& prev = rows.back();
                long long top = prev[phi_r - 1];
                for (std::uint64_t k = phi_r - 1; k >= 1; --k) next[k] = prev[k - 1];
                next[0] = 0;
                if (top != 0)
                    for (std::uint64_t k = 0; k < phi_r; ++k) next[k] -= top * phi[k];
            }
            rows.push_back(std::move(next));
        }
        return rows[j - phi_r];
    }
};

std::mutex g_field_mutex;
std::map<std::uint64_t, std::unique_ptr<Field>> g_fields;

Field& field_for(std::uint64_t M) {
    std::lock_guard<std::mutex> lk(g_field_mutex);
    auto it = g_fields.find(M);
    if (it != g_fields.end()) return *it->second;
    auto f = std::make_unique<Field>();
    f->M = M;
    f->r = radical(M);
    f->s = M / f->r;
    f->phi = cyclotomic_poly(f->r);
    f->phi_r = f->phi.size() - 1;
    Field& ref = *f;
    g_fields.emplace(M, std::move(f));
    return ref;
}

void merge_sorted(std::vector<Cyclo::Term>& v) {
    std::sort(v.begin(), v.end(),
              [](const Cyclo::Term& x, const Cyclo::Term& y) { return x.first < y.first; });
    std::vector<Cyclo::Term> out;
    out.reserve(v.size());
    for (auto& t : v) {
        if (!out.empty() && out.back().first == t.first) {
            out.back().second += t.second;
        } else {
            if (!out.empty() && out.back().second == 0) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().second == 0) out.pop_back();
    v = std::move(out);
}

}  // namespace

std::uint64_t cyclo_modulus_cap() { return g_modulus_cap.load(); }
void set_cyclo_modulus_cap(std::uint64_t cap) { g_modulus_cap.store(cap); }

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

std::uint64_t euler_phi(std::uint64_t n) {
    std::uint64_t result = n;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            while (n % d == 0) n /= d;
            result -= result / d;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

Cyclo::Cyclo(const Rational& q) {
    if (q != 0) {
        terms_.emplace_back(0u, q);
        terms_.back().second.canonicalize();
    }
}

Cyclo Cyclo::from_raw(std::uint64_t M, std::vector<Term> raw) {
    require(M >= 1 && M <= cyclo_modulus_cap(), ErrorCode::kOverflow,
            "cyclotomic modulus " + std::to_string(M) + " exceeds cap");
    Field& f = field_for(M);
    std::vector<Term> expanded;
    expanded.reserve(raw.size());
    for (auto& t : raw) {
        if (t.second == 0) continue;
        std::uint64_t e = t.first % M;
        std::uint64_t i = e % f.s, j = e / f.s;
        if (j < f.phi_r) {
            expanded.emplace_back(static_cast<std::uint32_t>(e), std::move(t.second));
        } else {
            const Poly& row = f.row(j);
            for (std::uint64_t k = 0; k < f.phi_r; ++k)
                if (row[k] != 0)
                    expanded.emplace_back(static_cast<std::uint32_t>(i + f.s * k),
                                          t.second * Rational(static_cast<long>(row[k])));
        }
    }
    merge_sorted(expanded);
    Cyclo out;
    out.M_ = M;
    out.terms_ = std::move(expanded);
    out.shrink();
    return out;
}

Cyclo Cyclo::from_counts(std::uint64_t M, const std::vector<long>& counts) {
    std::vector<Term> raw;
    for (std::size_t e = 0; e < counts.size(); ++e)
        if (counts[e] != 0) raw.emplace_back(static_cast<std::uint32_t>(e % M), Rational(counts[e]));
    return from_raw(M, std::move(raw));
}

void Cyclo::shrink() {
    std::uint64_t g = M_;
    for (const auto& t : terms_) g = std::gcd(g, static_cast<std::uint64_t>(t.first));
    if (terms_.empty()) g = M_;
    if (g <= 1) return;
    // The exponents all lie in the subfield Q(zeta_{M/g}); re-reduce there.
    std::uint64_t M2 = M_ / g;
    std::vector<Term> raw;
    raw.reserve(terms_.size());
    for (auto& t : terms_) raw.emplace_back(static_cast<std::uint32_t>(t.first / g), t.second);
    Cyclo r = from_raw(M2, std::move(raw));
    *this = std::move(r);
}

Cyclo Cyclo::root(std::uint64_t M, std::int64_t e) {
    require(M >= 1, ErrorCode::kInvalidArgument, "root: modulus must be positive");
    std::int64_t m = static_cast<std::int64_t>(M);
    std::uint64_t ee = static_cast<std::uint64_t>(((e % m) + m) % m);
    std::uint64_t g = std::gcd(M, ee);
    if (ee == 0) return Cyclo(Rational(1));
    return from_raw(M / g, {Term(static_cast<std::uint32_t>(ee / g), Rational(1))});
}

Cyclo Cyclo::sqrt_prime(long p) {
    require(is_prime(p), ErrorCode::kInvalidArgument, "sqrt_prime: p must be prime");
    if (p == 2) return root(8, 1) + root(8, -1);
    // Quadratic Gauss sum g = sum (a/p) zeta_p^a; g = sqrt(p) if p = 1 mod 4, i sqrt(p) otherwise.
    std::vector<Term> raw;
    std::vector<int> is_sq(p, 0);
    for (long a = 1; a < p; ++a) is_sq[(a * a) % p] = 1;
    for (long a = 1; a < p; ++a) raw.emplace_back(static_cast<std::uint32_t>(a), Rational(is_sq[a] ? 1 : -1));
    Cyclo g = from_raw(static_cast<std::uint64_t>(p), std::move(raw));
    if (p % 4 == 1) return g;
    return root(4, -1) * g;
}

Cyclo Cyclo::half_power(long p, int h) {
    int whole = h >= 0 ? h / 2 : -((-h + 1) / 2);
    int odd = h - 2 * whole;  // 0 or 1
    Cyclo out(prime_power(p, whole));
    if (odd) out = out * sqrt_prime(p);
    return out;
}

Rational Cyclo::rational_value() const {
    require(is_rational(), ErrorCode::kInvalidArgument, "cyclotomic number is not rational");
    return terms_.empty() ? Rational(0) : terms_[0].second;
}

Cyclo Cyclo::promote(std::uint64_t N) const {
    require(N % M_ == 0, ErrorCode::kInvalidArgument, "promote: modulus does not divide target");
    if (N == M_) return *this;
    std::uint64_t f = N / M_;
    std::vector<Term> raw;
    raw.reserve(terms_.size());
    for (const auto& t : terms_) raw.emplace_back(static_cast<std::uint32_t>(t.first * f), t.second);
    // Build without shrinking so the result stays in Q(zeta_N).
    require(N <= cyclo_modulus_cap(), ErrorCode::kOverflow,
            "cyclotomic modulus " + std::to_string(N) + " exceeds cap");
    Field& fld = field_for(N);
    std::vector<Term> expanded;
    for (auto& t : raw) {
        std::uint64_t e = t.first % N;
        std::uint64_t i = e % fld.s, j = e / fld.s;
        if (j < fld.phi_r) {
            expanded.emplace_back(static_cast<std::uint32_t>(e), t.second);
        } else {
            const Poly& row = fld.row(j);
            for (std::uint64_t k = 0; k < fld.phi_r; ++k)
                if (row[k] != 0)
                    expanded.emplace_back(static_cast<std::uint32_t>(i + fld.s * k),
                                          t.second * Rational(static_cast<long>(row[k])));
        }
    }
    merge_sorted(expanded);
    Cyclo out;
    out.M_ = N;
    out.terms_ = std::move(expanded);
    return out;
}

Cyclo Cyclo::operator+(const Cyclo& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    std::uint64_t N = lcm_u64(M_, o.M_);
    require(N <= cyclo_modulus_cap(), ErrorCode::kOverflow,
            "cyclotomic modulus " + std::to_string(N) + " exceeds cap");
    std::uint64_t fa = N / M_, fb = N / o.M_;
    std::vector<Term> raw;
    raw.reserve(terms_.size() + o.terms_.size());
    for (const auto& t : terms_) raw.emplace_back(static_cast<std::uint32_t>(t.first * fa), t.second);
    for (const auto& t : o.terms_) raw.emplace_back(static_cast<std::uint32_t>(t.first * fb), t.second);
    return from_raw(N, std::move(raw));
}

Cyclo Cyclo::operator-() const {
    Cyclo out = *this;
    for (auto& t : out.terms_) t.second = -t.second;
    return out;
}

Cyclo Cyclo::operator-(const Cyclo& o) const { return *this + (-o); }

Cyclo Cyclo::operator*(const Rational& q) const {
    if (q == 0) return Cyclo();
    Rational qc = q;
    qc.canonicalize();
    Cyclo out = *this;
    for (auto& t : out.terms_) t.second *= qc;
    return out;
}

Cyclo Cyclo::operator*(const Cyclo& o) const {
    if (is_zero() || o.is_zero()) return Cyclo();
    if (o.is_rational()) return *this * o.terms_[0].second;
    if (is_rational()) return o * terms_[0].second;
    std::uint64_t N = lcm_u64(M_, o.M_);
    require(N <= cyclo_modulus_cap(), ErrorCode::kOverflow,
            "cyclotomic modulus " + std::to_string(N) + " exceeds cap");
    std::uint64_t fa = N / M_, fb = N / o.M_;
    std::vector<Term> raw;
    raw.reserve(terms_.size() * o.terms_.size());
    for (const auto& x : terms_)
        for (const auto& y : o.terms_)
            raw.emplace_back(static_cast<std::uint32_t>((x.first * fa + y.first * fb) % N),
                             x.second * y.second);
    return from_raw(N, std::move(raw));
}

bool Cyclo::operator==(const Cyclo& o) const {
    if (M_ == o.M_) return terms_ == o.terms_;
    return (*this - o).is_zero();
}

Cyclo Cyclo::galois(std::int64_t k) const {
    std::int64_t m = static_cast<std::int64_t>(M_);
    std::uint64_t kk = static_cast<std::uint64_t>(((k % m) + m) % m);
    require(std::gcd(kk, M_) == 1 || M_ == 1, ErrorCode::kInvalidArgument,
            "galois: exponent not coprime to modulus");
    std::vector<Term> raw;
    raw.reserve(terms_.size());
    for (const auto& t : terms_)
        raw.emplace_back(static_cast<std::uint32_t>((t.first * kk) % M_), t.second);
    return from_raw(M_, std::move(raw));
}

Cyclo Cyclo::conj() const {
    if (M_ <= 2) return *this;
    return galois(static_cast<std::int64_t>(M_) - 1);
}

Cyclo Cyclo::pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    Cyclo result(Rational(1)), base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    return result;
}

Cyclo Cyclo::inverse() const {
    require(!is_zero(), ErrorCode::kNotInvertible, "inverse of zero");
    if (is_rational()) return Cyclo(Rational(1) / terms_[0].second);
    if (terms_.size() == 1) {
        // c zeta^e
        return root(M_, -static_cast<std::int64_t>(terms_[0].first)) * (Rational(1) / terms_[0].second);
    }
    // Solve (multiplication by this) y = 1 in the canonical basis.
    Field& f = field_for(M_);
    std::uint64_t n = f.phi_r * f.s;
    std::vector<std::uint64_t> basis;
    basis.reserve(n);
    for (std::uint64_t j = 0; j < f.phi_r; ++j)
        for (std::uint64_t i = 0; i < f.s; ++i) basis.push_back(i + f.s * j);
    std::sort(basis.begin(), basis.end());
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;
    // columns: this * zeta^{basis[c]}
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n + 1));
    for (std::size_t c = 0; c < n; ++c) {
        Cyclo col = (*this * root(M_, static_cast<std::int64_t>(basis[c]))).promote(M_);
        for (const auto& t : col.terms_) A[index.at(t.first)][c] = t.second;
    }
    A[index.at(0)][n] = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        require(piv < n, ErrorCode::kInternal, "inverse: singular multiplication matrix");
        std::swap(A[piv], A[col]);
        Rational inv = 1 / A[col][col];
        for (std::size_t k = col; k <= n; ++k) A[col][k] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            Rational fct = A[r][col];
            for (std::size_t k = col; k <= n; ++k) A[r][k] -= fct * A[col][k];
        }
    }
    std::vector<Term> raw;
    for (std::size_t i = 0; i < n; ++i)
        if (A[i][n] != 0) raw.emplace_back(static_cast<std::uint32_t>(basis[i]), A[i][n]);
    return from_raw(M_, std::move(raw));
}

std::complex<double> Cyclo::to_complex() const {
    long double re = 0, im = 0;
    const long double two_pi = 6.283185307179586476925286766559L;
    for (const auto& t : terms_) {
        long double c = t.second.get_d();
        long double ang = two_pi * static_cast<long double>(t.first) / static_cast<long double>(M_);
        re += c * std::cos(ang);
        im += c * std::sin(ang);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

std::string Cyclo::to_string() const {
    std::ostringstream os;
    os << M_ << "|";
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << ",";
        first = false;
        os << t.first << ":" << t.second.get_str();
    }
    return os.str();
}

int real_sign(const Cyclo& z) {
    if (z.is_zero()) return 0;
    double re = z.to_complex().real();
    require(std::abs(re) > 1e-300, ErrorCode::kInternal, "real_sign: undecidable");
    return re > 0 ? 1 : -1;
}

Root Root::make(std::uint64_t M, std::int64_t e) {
    std::int64_t m = static_cast<std::int64_t>(M);
    std::uint64_t ee = static_cast<std::uint64_t>(((e % m) + m) % m);
    std::uint64_t g = std::gcd(M, ee);
    if (ee == 0) return Root{1, 0};
    return Root{M / g, ee / g};
}

Root Root::operator*(const Root& o) const {
    std::uint64_t N = lcm_u64(M, o.M);
    return make(N, static_cast<std::int64_t>((e * (N / M) + o.e * (N / o.M)) % N));
}

Root Root::pow(std::int64_t k) const {
    std::int64_t m = static_cast<std::int64_t>(M);
    std::int64_t kk = ((k % m) + m) % m;
    return make(M, static_cast<std::int64_t>((static_cast<unsigned __int128>(e) * kk) % M));
}

std::complex<double> Root::to_complex() const {
    const long double two_pi = 6.283185307179586476925286766559L;
    long double ang = two_pi * static_cast<long double>(e) / static_cast<long double>(M);
    return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

ScaledRoot ScaledRoot::operator*(const ScaledRoot& o) const {
    return ScaledRoot{zeta * o.zeta, half_exp + o.half_exp, p};
}

ScaledRoot ScaledRoot::pow(int k) const { return ScaledRoot{zeta.pow(k), half_exp * k, p}; }

Cyclo ScaledRoot::to_cyclo() const { return zeta.to_cyclo() * Cyclo::half_power(p, half_exp); }

std::complex<double> ScaledRoot::to_complex() const { return zeta.to_complex() * modulus(); }

double ScaledRoot::modulus() const { return std::pow(static_cast<double>(p), half_exp / 2.0); }

Cyclo inv_one_minus(const ScaledRoot& z) {
    // 1/(1-z) = (1 + z + ... + z^{N-1}) / (1 - z^N) with z^N rational.
    int N = static_cast<int>(z.zeta.M) * 2;
    Cyclo zn = z.pow(N).to_cyclo();
    require(zn.is_rational(), ErrorCode::kInternal, "inv_one_minus: power not rational");
    Rational denom = 1 - zn.rational_value();
    require(denom != 0, ErrorCode::kNotInvertible, "inv_one_minus: z is a root of unity of modulus 1");
    Cyclo num;
    Cyclo zc = z.to_cyclo();
    Cyclo power(Rational(1));
    for (int k = 0; k < N; ++k) {
        num += power;
        power = power * zc;
    }
    return num * (Rational(1) / denom);
}

}  // namespace pnf
