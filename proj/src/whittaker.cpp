#include "pnf/whittaker.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

namespace pnf {

namespace {

// Complete homogeneous polynomial h_i in the roots (coefficient of X^i in prod 1/(1 - g_j X)).
Cyclo complete_h(const std::vector<ScaledRoot>& g, int i) {
    if (i < 0) return Cyclo();
    if (g.empty()) return i == 0 ? Cyclo(1) : Cyclo();
    if (g.size() == 1) return g[0].pow(i).to_cyclo();
    require(g.size() == 2, ErrorCode::kInternal, "at most two L-factor roots expected");
    Cyclo s;
    for (int j = 0; j <= i; ++j) s += (g[0].pow(j) * g[1].pow(i - j)).to_cyclo();
    return s;
}

// Coefficients of prod (1 - r_j Y).
std::vector<Cyclo> euler_poly(const std::vector<ScaledRoot>& r) {
    std::vector<Cyclo> P{Cyclo(1)};
    for (const auto& root : r) {
        Cyclo z = root.to_cyclo();
        std::vector<Cyclo> Q(P.size() + 1);
        for (std::size_t i = 0; i < P.size(); ++i) {
            Q[i] += P[i];
            Q[i + 1] -= P[i] * z;
        }
        P = std::move(Q);
    }
    return P;
}

// h_a = sum_j B_j r_j^a for distinct roots.
std::vector<Cyclo> partial_fractions(const std::vector<ScaledRoot>& r) {
    if (r.size() == 1) return {Cyclo(1)};
    if (r.size() == 2) {
        Cyclo a = r[0].to_cyclo(), b = r[1].to_cyclo();
        Cyclo inv = (a - b).inverse();
        return {a * inv, -(b * inv)};
    }
    return {};
}

long unit_rep(const Rational& v, long p, int l) {
    if (l <= 0) return 1;
    return residue(v, p, l);
}

}  // namespace

Newform::Newform(LocalRep pi) : pi_(std::move(pi)) {
    const long p = pi_.p;
    const int n = pi_.n;
    for (const auto& mu : enumerate_tilde_characters(p, n)) {
        GL1Char nu = tilde_char(mu);
        TwistData td;
        td.mu = mu;
        td.a_twist = twist_conductor(pi_, nu);
        td.eps = twist_epsilon(pi_, nu);
        td.gamma = l_factor_roots(pi_, nu);
        twists_.push_back(std::move(td));
    }
    std::vector<Cyclo> wdiag;
    for (int a = 0; a <= n + 4; ++a) wdiag.push_back(diagonal_whittaker(pi_, a));
    const Cyclo omega_m1 = pi_.omega.at(Rational(-1)).to_cyclo();

    rows_.resize(static_cast<std::size_t>(n) + 1);
    for (int l = 0; l <= n; ++l) {
        for (std::size_t i = 0; i < twists_.size(); ++i) {
            const TwistData& td = twists_[i];
            if (td.mu.conductor() > l) continue;
            ResidueCharacter mu_inv = td.mu.inv();
            std::vector<ScaledRoot> rho = l_factor_roots(pi_, tilde_char(mu_inv) * pi_.omega.inv());
            std::vector<Cyclo> P = euler_poly(rho);
            const int deg = static_cast<int>(rho.size());
            const int dmax = l + deg + 2;
            std::vector<Cyclo> B(static_cast<std::size_t>(dmax) + 1);
            for (int a = 0; a <= dmax; ++a) {
                const Cyclo& g = gauss_sum_at_power(a - l, mu_inv);
                if (g.is_zero()) continue;
                Cyclo w = a < static_cast<int>(wdiag.size()) ? wdiag[static_cast<std::size_t>(a)]
                                                              : diagonal_whittaker(pi_, a);
                B[static_cast<std::size_t>(a)] = w * g;
            }
            LaurentRow row;
            row.twist = i;
            row.R.resize(static_cast<std::size_t>(dmax) + 1);
            for (int k = 0; k <= dmax; ++k) {
                Cyclo s;
                for (int j = 0; j <= deg && j <= k; ++j)
                    s += P[static_cast<std::size_t>(j)] * B[static_cast<std::size_t>(k - j)];
                row.R[static_cast<std::size_t>(k)] = s * omega_m1;
            }
            for (int k = l + deg + 1; k <= dmax; ++k)
                require(row.R[static_cast<std::size_t>(k)].is_zero(), ErrorCode::kInternal,
                        "Laurent data did not terminate for " + pi_.id);
            while (!row.R.empty() && row.R.back().is_zero()) row.R.pop_back();
            if (row.R.empty()) {
                row.t_min = INT_MAX;
            } else {
                int k0 = static_cast<int>(row.R.size()) - 1;
                row.t_min = -td.a_twist - k0;
            }
            // closed-form tail for t >= -a(mu pi)
            std::vector<Cyclo> Bj = partial_fractions(td.gamma);
            Cyclo eps_bar = td.eps.conj();
            for (std::size_t j = 0; j < td.gamma.size(); ++j) {
                Cyclo s;
                for (std::size_t k = 0; k < row.R.size(); ++k)
                    s += row.R[k] * td.gamma[j].pow(static_cast<int>(k)).to_cyclo();
                row.tail.push_back(eps_bar * Bj[j] * td.gamma[j].pow(td.a_twist).to_cyclo() * s);
            }
            rows_[static_cast<std::size_t>(l)].push_back(std::move(row));
        }
    }
}

Cyclo Newform::d_value(int t, int l, std::size_t r) const {
    const LaurentRow& row = rows(l).at(r);
    int k = -t - twists_[row.twist].a_twist;
    if (k < 0 || k >= static_cast<int>(row.R.size())) return Cyclo();
    return row.R[static_cast<std::size_t>(k)];
}

Cyclo Newform::c_value_uncached(int t, int l, std::size_t r) const {
    const LaurentRow& row = rows(l).at(r);
    if (t < row.t_min) return Cyclo();
    const TwistData& td = twists_[row.twist];
    Cyclo s;
    for (std::size_t k = 0; k < row.R.size(); ++k) {
        if (row.R[k].is_zero()) continue;
        int i = t + td.a_twist + static_cast<int>(k);
        if (i < 0) continue;
        s += row.R[k] * complete_h(td.gamma, i);
    }
    return s * td.eps.conj();
}

Cyclo Newform::c_value(int t, int l, std::size_t r) const {
    auto key = std::make_tuple(t, l, r);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = c_cache_.find(key);
        if (it != c_cache_.end()) return it->second;
    }
    Cyclo v = c_value_uncached(t, l, r);
    std::lock_guard<std::mutex> lock(mu_);
    c_cache_.emplace(key, v);
    return v;
}

std::complex<double> Newform::c_value_complex(int t, int l, std::size_t r) const {
    return c_value(t, l, r).to_complex();
}

Cyclo Newform::coset_value(int t, int l, const Rational& v) const {
    require(l >= 0 && l <= pi_.n, ErrorCode::kInvalidArgument, "coset_value: l out of range");
    long vr = unit_rep(v, pi_.p, l);
    auto key = std::make_tuple(t, l, vr);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = w_cache_.find(key);
        if (it != w_cache_.end()) return it->second;
    }
    std::map<Root, Cyclo> grouped;
    const auto& rs = rows(l);
    for (std::size_t r = 0; r < rs.size(); ++r) {
        Cyclo c = c_value(t, l, r);
        if (c.is_zero()) continue;
        const ResidueCharacter& mu = twists_[rs[r].twist].mu;
        grouped[mu.at_residue(vr % mu.group().modulus())] += c;
    }
    Cyclo s;
    for (const auto& [root, c] : grouped) s += c * root.to_cyclo();
    std::lock_guard<std::mutex> lock(mu_);
    w_cache_.emplace(key, s);
    return s;
}

std::complex<double> Newform::coset_value_complex(int t, int l, const Rational& v) const {
    long vr = unit_rep(v, pi_.p, l);
    auto key = std::make_tuple(t, l, vr);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = wc_cache_.find(key);
        if (it != wc_cache_.end()) return it->second;
    }
    std::complex<double> s = coset_value(t, l, Rational(vr)).to_complex();
    std::lock_guard<std::mutex> lock(mu_);
    wc_cache_.emplace(key, s);
    return s;
}

Cyclo Newform::value(const Mat2& g) const {
    CosetPosition pos = coset_position(g, pi_.p, pi_.n);
    Cyclo w = coset_value(pos.t, pos.l, pos.v);
    if (w.is_zero()) return w;
    return w * (pi_.omega.at(pos.zfactor) * psi(pos.xshift, pi_.p)).to_cyclo();
}

std::complex<double> Newform::value_complex(const Mat2& g) const {
    CosetPosition pos = coset_position(g, pi_.p, pi_.n);
    std::complex<double> w = coset_value_complex(pos.t, pos.l, pos.v);
    return w * (pi_.omega.at(pos.zfactor) * psi(pos.xshift, pi_.p)).to_complex();
}

Cyclo Newform::norm_squared() const {
    std::vector<ScaledRoot> rho = l_factor_roots(pi_, pi_.omega.inv());
    if (rho.empty()) return Cyclo(1);
    std::vector<Cyclo> B = partial_fractions(rho);
    Cyclo s;
    for (std::size_t j = 0; j < rho.size(); ++j)
        for (std::size_t k = 0; k < rho.size(); ++k)
            s += B[j] * B[k].conj() * inv_one_minus(rho[j] * rho[k].conj());
    return s;
}

std::vector<CosetCell> verification_window(long p, int n) {
    std::vector<CosetCell> out;
    for (int t = -2 * n - 2; t <= 2; ++t)
        for (int l = 0; l <= n; ++l) {
            long M = ipow(p, std::max(l, n - l));
            for (long v = 1; v <= std::max(M, 1L); ++v) {
                if (M > 1 && v % p == 0) continue;
                if (M == 1 && v > 1) break;
                out.push_back(CosetCell{t, l, v});
            }
        }
    return out;
}

SupportReport verify_support(const Newform& W) {
    SupportReport rep;
    const LocalRep& pi = W.rep();
    for (const CosetCell& c : verification_window(pi.p, pi.n)) {
        ++rep.cells;
        Cyclo w = W.coset_value(c.t, c.l, Rational(c.v));
        if (w.is_zero()) continue;
        ++rep.nonzero;
        int floor_t = -std::max({2 * c.l, c.l + pi.m, pi.n});
        if (c.t < floor_t) {
            rep.ok = false;
            if (rep.counterexamples.size() < 10) {
                std::ostringstream os;
                os << "t=" << c.t << ",l=" << c.l << ",v=" << c.v << ",W=" << w.to_string();
                rep.counterexamples.push_back(os.str());
            }
        }
        if (c.t < -2 * pi.n) rep.below_rows_zero = false;
    }
    rep.ok = rep.ok && rep.below_rows_zero;
    return rep;
}

namespace {

std::vector<Mat2> projective_line_reps(long p, int N) {
    std::vector<Mat2> out;
    long PN = ipow(p, N);
    for (long c = 0; c < PN; ++c) out.push_back(Mat2::lower(Rational(c)));
    for (long e = 0; e < PN; e += p) out.push_back(Mat2(0, 1, -1, Rational(-e)));
    return out;
}

std::vector<long> units_mod(long p, int k) {
    std::vector<long> out;
    long M = ipow(p, std::max(k, 0));
    if (M == 1) return {1};
    for (long u = 1; u < M; ++u)
        if (u % p != 0) out.push_back(u);
    return out;
}

void finish_rows(JSupportReport& rep, const std::vector<double>& worst, long p) {
    rep.rows.clear();
    for (std::size_t r = 0; r < worst.size(); ++r) {
        rep.rows.push_back(AverageRow{static_cast<int>(r), worst[r]});
        rep.constant = std::max(rep.constant, worst[r] * std::pow(static_cast<double>(p), r / 4.0));
        if (r > 0 && worst[r] > worst[r - 1] * (1 + 1e-12) + 1e-15) rep.monotone = false;
    }
}

}  // namespace

JSupportReport verify_j_support(const Newform& W, int r_max) {
    JSupportReport rep;
    const LocalRep& pi = W.rep();
    const long p = pi.p;
    const int n = pi.n;
    std::vector<double> worst(static_cast<std::size_t>(r_max) + 1, 0.0);
    const Mat2 shift = Mat2::diag_a(prime_power(p, pi.n1));
    for (const Mat2& k : projective_line_reps(p, n + 1)) {
        Mat2 g = k * shift;
        MatrixInvariants inv = matrix_invariants(g, p, n, pi.m);
        if (!(n % 2 == 0 || inv.l <= pi.n0)) continue;
        ++rep.cosets;
        const int q = inv.qg;
        // strictly below the support floor: exact zeros
        for (int b = -q - 2; b <= -q - 1; ++b)
            for (long u : units_mod(p, inv.n0g + 1)) {
                ++rep.evaluations;
                CosetPosition pos = coset_position(Mat2::diag_a(prime_power(p, b) * u) * g, p, n);
                if (!W.coset_value(pos.t, pos.l, pos.v).is_zero()) {
                    rep.ok = false;
                    if (rep.counterexamples.size() < 10)
                        rep.counterexamples.push_back("k=" + k.to_string() + ",b=" + std::to_string(b) +
                                                      ",u=" + std::to_string(u));
                }
            }
        for (int r = 0; r <= r_max; ++r) {
            int b = -q + r;
            double s = 0;
            auto us = units_mod(p, inv.n0g);
            for (long u : us) {
                ++rep.evaluations;
                s += std::norm(W.value_complex(Mat2::diag_a(prime_power(p, b) * u) * g));
            }
            double rms = std::sqrt(s / static_cast<double>(us.size()));
            worst[static_cast<std::size_t>(r)] = std::max(worst[static_cast<std::size_t>(r)], rms);
        }
    }
    finish_rows(rep, worst, p);
    return rep;
}

JSupportReport verify_coset_average(const Newform& W, int r_max) {
    JSupportReport rep;
    const LocalRep& pi = W.rep();
    const long p = pi.p;
    std::vector<double> worst(static_cast<std::size_t>(r_max) + 1, 0.0);
    for (int l = 0; l <= pi.n; ++l) {
        ++rep.cosets;
        int floor_t = -std::max({2 * l, l + pi.m, pi.n});
        for (int r = 0; r <= r_max; ++r) {
            double s = 0;
            auto vs = units_mod(p, l);
            for (long v : vs) {
                ++rep.evaluations;
                s += std::norm(W.coset_value_complex(floor_t + r, l, Rational(v)));
            }
            double rms = std::sqrt(s / static_cast<double>(vs.size()));
            worst[static_cast<std::size_t>(r)] = std::max(worst[static_cast<std::size_t>(r)], rms);
        }
    }
    finish_rows(rep, worst, p);
    return rep;
}

ALReport atkin_lehner_verify(const Newform& W, const Newform& Wt) {
    ALReport rep;
    const LocalRep& pi = W.rep();
    const long p = pi.p;
    const int n = pi.n;
    rep.eps_formula = twist_epsilon(pi, unramified_char(p, Root{}));
    bool have = false;
    for (const CosetCell& c : verification_window(p, n)) {
        ++rep.triples;
        Rational v(c.v);
        Cyclo lhs = Wt.coset_value(c.t, c.l, v);
        Cyclo inner = W.coset_value(c.t + 2 * c.l - n, n - c.l, -v);
        if (inner.is_zero() || lhs.is_zero()) {
            if (!(inner.is_zero() && lhs.is_zero())) {
                rep.ok = false;
                if (rep.counterexamples.size() < 10) {
                    std::ostringstream os;
                    os << "t=" << c.t << ",l=" << c.l << ",v=" << c.v << ": one side vanishes";
                    rep.counterexamples.push_back(os.str());
                }
            }
            continue;
        }
        ++rep.nonzero;
        Root phase = pi.omega.at(v) * psi(-prime_power(p, c.t + c.l) / v, p);
        Cyclo rhs_wo_eps = inner * phase.to_cyclo();
        if (!have) {
            rep.eps_extracted = lhs * rhs_wo_eps.inverse();
            have = true;
        }
        if (lhs != rep.eps_extracted * rhs_wo_eps) {
            rep.eps_constant = false;
            rep.ok = false;
            if (rep.counterexamples.size() < 10) {
                std::ostringstream os;
                os << "t=" << c.t << ",l=" << c.l << ",v=" << c.v << ": lhs=" << lhs.to_string()
                   << " rhs/eps=" << rhs_wo_eps.to_string();
                rep.counterexamples.push_back(os.str());
            }
        }
    }
    if (!have) rep.ok = false;
    rep.eps_unit = have && rep.eps_extracted.norm2() == Cyclo(1);
    rep.ok = rep.ok && rep.eps_unit && rep.eps_extracted == rep.eps_formula;
    return rep;
}

SupScan sup_scan(const Newform& W) {
    SupScan s;
    const LocalRep& pi = W.rep();
    for (const CosetCell& c : verification_window(pi.p, pi.n)) {
        double a = std::abs(W.coset_value_complex(c.t, c.l, Rational(c.v)));
        if (a > s.sup + 1e-12) {
            s.sup = a;
            s.t = c.t;
            s.l = c.l;
            s.v = c.v;
        }
    }
    return s;
}

}  // namespace pnf
