#include "pnf/chars.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace pnf {

namespace {

long powmod(long b, long e, long m) {
    long r = 1 % m;
    b = mod_floor(b, m);
    while (e > 0) {
        if (e & 1) r = static_cast<long>((static_cast<__int128>(r) * b) % m);
        b = static_cast<long>((static_cast<__int128>(b) * b) % m);
        e >>= 1;
    }
    return r;
}

int legendre(long u, long p) {
    long r = powmod(u, (p - 1) / 2, p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

// Sum of counted roots of unity as one exact cyclotomic number.
Cyclo sum_roots(const std::map<Root, long>& counts) {
    std::uint64_t N = 1;
    for (const auto& [r, c] : counts)
        if (c != 0) N = lcm_u64(N, r.M);
    std::vector<long> v(N, 0);
    for (const auto& [r, c] : counts) v[r.e * (N / r.M)] += c;
    return Cyclo::from_counts(N, v);
}

}  // namespace

// ---------------------------------------------------------------- unit groups

long primitive_root(long p) {
    require(p > 2 && is_prime(p), ErrorCode::kInvalidArgument, "primitive_root: odd prime required");
    long phi = p - 1;
    std::vector<long> factors;
    long m = phi;
    for (long d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            factors.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) factors.push_back(m);
    for (long g = 2; g < p; ++g) {
        bool ok = true;
        for (long f : factors)
            if (powmod(g, phi / f, p) == 1) ok = false;
        if (!ok) continue;
        if (powmod(g, p - 1, p * p) == 1) return g + p;
        return g;
    }
    fail(ErrorCode::kInternal, "primitive_root: none found");
}

UnitGroup::UnitGroup(long p, int A) : p_(p), A_(A), pA_(ipow(p, A)) {
    require(is_prime(p), ErrorCode::kInvalidArgument, "UnitGroup: p must be prime");
    require(A >= 0, ErrorCode::kInvalidArgument, "UnitGroup: negative level");
    if (p == 2) {
        if (A == 2) {
            orders_ = {2};
            gens_ = {3};
        } else if (A >= 3) {
            orders_ = {2, pA_ / 4};
            gens_ = {pA_ - 1, 5};
        }
    } else if (A >= 1) {
        orders_ = {pA_ / p * (p - 1)};
        gens_ = {primitive_root(p) % pA_};
    }
    for (long o : orders_) exponent_ = std::lcm(exponent_, o);
    const std::size_t f = orders_.size();
    dlog_.assign(static_cast<std::size_t>(pA_) * f, -1);
    if (f == 1) {
        long x = 1;
        for (long k = 0; k < orders_[0]; ++k) {
            dlog_[static_cast<std::size_t>(x)] = static_cast<int>(k);
            x = x * gens_[0] % pA_;
        }
    } else if (f == 2) {
        for (long s = 0; s < 2; ++s) {
            long x = s == 0 ? 1 : pA_ - 1;
            for (long k = 0; k < orders_[1]; ++k) {
                dlog_[static_cast<std::size_t>(x) * 2] = static_cast<int>(s);
                dlog_[static_cast<std::size_t>(x) * 2 + 1] = static_cast<int>(k);
                x = x * 5 % pA_;
            }
        }
    }
}

long UnitGroup::order() const {
    long r = 1;
    for (long o : orders_) r *= o;
    return r;
}

std::shared_ptr<const UnitGroup> UnitGroup::get(long p, int A) {
    static std::mutex mu;
    static std::map<std::pair<long, int>, std::shared_ptr<const UnitGroup>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, A}];
    if (!slot) slot = std::make_shared<const UnitGroup>(p, A);
    return slot;
}

// ------------------------------------------------------------ residue chars

ResidueCharacter::ResidueCharacter(std::shared_ptr<const UnitGroup> group, std::vector<long> idx)
    : group_(std::move(group)), idx_(std::move(idx)) {
    const auto& ord = group_->orders();
    require(idx_.size() == ord.size(), ErrorCode::kInvalidArgument,
            "ResidueCharacter: index length does not match group");
    for (std::size_t i = 0; i < ord.size(); ++i) {
        idx_[i] = mod_floor(idx_[i], ord[i]);
        weights_.push_back(group_->exponent() / ord[i]);
    }
    compute_conductor();
}

ResidueCharacter ResidueCharacter::trivial(long p, int level) {
    auto g = UnitGroup::get(p, level);
    return ResidueCharacter(g, std::vector<long>(g->orders().size(), 0));
}

Root ResidueCharacter::at_residue(long u) const {
    if (idx_.empty()) return Root{};
    u = mod_floor(u, group_->modulus());
    require(group_->is_unit(u), ErrorCode::kInvalidArgument, "character evaluated at a non-unit");
    const int* d = group_->dlog(u);
    long E = group_->exponent();
    long e = 0;
    for (std::size_t i = 0; i < idx_.size(); ++i) e = (e + idx_[i] % E * d[i] % E * weights_[i]) % E;
    return Root::make(static_cast<std::uint64_t>(E), e);
}

Root ResidueCharacter::at_unit(const Rational& u) const {
    require(valuation(u, p()) == 0, ErrorCode::kInvalidArgument, "at_unit: argument is not a unit");
    return at_residue(residue(u, p(), level()));
}

Root ResidueCharacter::at(const Rational& x) const { return at_unit(unit_part(x, p())); }

void ResidueCharacter::compute_conductor() {
    const long p = group_->p();
    const int A = group_->level();
    for (int c = 0; c <= A; ++c) {
        std::vector<long> gens;
        if (c == 0 || (p == 2 && c == 1)) {
            gens = group_->generators();
        } else if (c < A) {
            gens = {1 + ipow(p, c)};
        }
        bool trivial_here = true;
        for (long g : gens)
            if (!at_residue(g).is_one()) trivial_here = false;
        if (trivial_here) {
            conductor_ = c;
            return;
        }
    }
    conductor_ = A;
}

ResidueCharacter ResidueCharacter::lift(int L) const {
    const int A = level();
    require(L >= A, ErrorCode::kInvalidArgument, "lift: target level below current level");
    if (L == A) return *this;
    const long p = this->p();
    auto g = UnitGroup::get(p, L);
    std::vector<long> nidx(g->orders().size(), 0);
    if (p != 2) {
        if (A >= 1) nidx[0] = idx_[0] * ipow(p, L - A);
    } else if (A == 2) {
        nidx[0] = idx_[0];
    } else if (A >= 3) {
        nidx[0] = idx_[0];
        nidx[1] = idx_[1] * ipow(2, L - A);
    }
    return ResidueCharacter(g, std::move(nidx));
}

ResidueCharacter ResidueCharacter::operator*(const ResidueCharacter& o) const {
    require(p() == o.p(), ErrorCode::kInvalidArgument, "character product: different primes");
    int L = std::max(level(), o.level());
    ResidueCharacter a = lift(L), b = o.lift(L);
    std::vector<long> idx(a.idx_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = a.idx_[i] + b.idx_[i];
    return ResidueCharacter(a.group_, std::move(idx));
}

ResidueCharacter ResidueCharacter::inv() const { return pow(-1); }

ResidueCharacter ResidueCharacter::pow(long k) const {
    std::vector<long> idx(idx_.size());
    const auto& ord = group_->orders();
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = static_cast<long>((static_cast<__int128>(idx_[i]) * mod_floor(k, ord[i])) % ord[i]);
    return ResidueCharacter(group_, std::move(idx));
}

bool ResidueCharacter::operator==(const ResidueCharacter& o) const {
    if (p() != o.p()) return false;
    int L = std::max(level(), o.level());
    return lift(L).idx_ == o.lift(L).idx_;
}

bool ResidueCharacter::operator<(const ResidueCharacter& o) const {
    if (conductor_ != o.conductor_) return conductor_ < o.conductor_;
    int L = std::max(level(), o.level());
    return lift(L).idx_ < o.lift(L).idx_;
}

std::string ResidueCharacter::to_string() const {
    std::ostringstream os;
    os << p() << "^" << level() << ":[";
    for (std::size_t i = 0; i < idx_.size(); ++i) os << (i ? "," : "") << idx_[i];
    os << "]";
    return os.str();
}

std::vector<ResidueCharacter> enumerate_tilde_characters(long p, int a_max) {
    require(a_max >= 0, ErrorCode::kInvalidArgument, "enumerate: negative conductor bound");
    auto g = UnitGroup::get(p, std::max(a_max, 1));
    const auto& ord = g->orders();
    std::vector<ResidueCharacter> out;
    std::vector<long> idx(ord.size(), 0);
    while (true) {
        ResidueCharacter mu(g, idx);
        if (mu.conductor() <= a_max) out.push_back(mu);
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
            if (++idx[i] < ord[i]) break;
            idx[i] = 0;
        }
        if (i == idx.size()) break;
    }
    std::stable_sort(out.begin(), out.end());
    return out;
}

Root GL1Char::at(const Rational& x) const {
    long p = unit.p();
    int v = valuation(x, p);
    return at_p.pow(v) * unit.at_unit(unit_part(x, p));
}

// ------------------------------------------------------------- Gauss sums

Root psi(const Rational& x, long p) {
    if (x == 0) return Root{};
    int v = valuation(x, p);
    if (v >= 0) return Root{};
    int k = -v;
    long res = residue(x * prime_power(p, k), p, k);
    return Root::make(static_cast<std::uint64_t>(ipow(p, k)), res);
}

Cyclo gauss_sum(const Rational& x, const ResidueCharacter& mu) {
    const long p = mu.p();
    int k = (x == 0) ? 0 : std::max(0, -valuation(x, p));
    int r = std::max({mu.level(), k, 1});
    long pr = ipow(p, r);
    long pk = ipow(p, k);
    long res0 = k > 0 ? residue(x * prime_power(p, k), p, k) : 0;
    std::map<Root, long> counts;
    for (long u = 1; u < pr; ++u) {
        if (u % p == 0) continue;
        Root add = Root::make(static_cast<std::uint64_t>(pk),
                              static_cast<long>((static_cast<__int128>(res0) * u) % pk));
        counts[add * mu.at_residue(u % mu.group().modulus())] += 1;
    }
    return sum_roots(counts) * Rational(1, pr / p * (p - 1));
}

const Cyclo& gauss_sum_at_power(int k, const ResidueCharacter& mu) {
    static const Cyclo zero;
    static const Cyclo one(1);
    const long p = mu.p();
    const int a = mu.conductor();
    if (a == 0) {
        if (k >= 0) return one;
        if (k < -1) return zero;
        static std::mutex m0;
        static std::map<long, Cyclo> minus;
        std::lock_guard<std::mutex> lock(m0);
        auto it = minus.find(p);
        if (it == minus.end()) it = minus.emplace(p, Cyclo(Rational(-1, p - 1))).first;
        return it->second;
    }
    if (k != -a) return zero;
    static std::mutex mu_lock;
    static std::map<std::pair<long, std::vector<long>>, Cyclo> cache;
    ResidueCharacter canon = mu.lift(std::max(mu.level(), a));
    auto key = std::make_pair(p * 1000 + canon.level(), canon.index());
    {
        std::lock_guard<std::mutex> lock(mu_lock);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Cyclo val = gauss_sum(prime_power(p, k), canon);
    std::lock_guard<std::mutex> lock(mu_lock);
    return cache.emplace(key, std::move(val)).first->second;
}

Cyclo gauss_sum_fast(const Rational& x, const ResidueCharacter& mu) {
    if (x == 0) return mu.is_trivial() ? Cyclo(1) : Cyclo();
    const long p = mu.p();
    int v = valuation(x, p);
    const Cyclo& g = gauss_sum_at_power(v, mu);
    if (g.is_zero()) return g;
    return mu.at_unit(unit_part(x, p)).inv().to_cyclo() * g;
}

Cyclo gl1_epsilon(const GL1Char& eta) {
    const int a = eta.conductor();
    if (a == 0) return Cyclo(1);
    const long p = eta.unit.p();
    Cyclo g = gauss_sum_at_power(-a, eta.unit.inv());
    return eta.at_p.pow(a).to_cyclo() * Cyclo::half_power(p, a) * g * Rational(p - 1, p);
}

// ------------------------------------------------------ quadratic extensions

QuadExt::QuadExt(long p, bool ramified) : p_(p), D_(p), ramified_(ramified) {
    require(p > 2 && is_prime(p), ErrorCode::kUnsupported,
            "quadratic extensions are supported for odd primes only");
    if (!ramified) {
        D_ = 2;
        while (legendre(D_, p) != -1) ++D_;
    }
}

QuadElem QuadExt::mul(const QuadElem& a, const QuadElem& b) const {
    return QuadElem{a.x * b.x + Rational(D_) * a.y * b.y, a.x * b.y + a.y * b.x};
}

QuadElem QuadExt::inv(const QuadElem& a) const {
    Rational n = norm(a);
    require(n != 0, ErrorCode::kNotInvertible, "QuadExt::inv of zero");
    return QuadElem{a.x / n, -a.y / n};
}

int QuadExt::val(const QuadElem& a) const {
    require(a.x != 0 || a.y != 0, ErrorCode::kInvalidArgument, "valuation of zero");
    int vx = valuation(a.x, p_);
    int vy = valuation(a.y, p_);
    if (!ramified_) return std::min(vx, vy);
    long ex = vx == kInfiniteValuation ? LONG_MAX : 2L * vx;
    long ey = vy == kInfiniteValuation ? LONG_MAX : 2L * vy + 1;
    return static_cast<int>(std::min(ex, ey));
}

QuadElem QuadExt::uniformizer() const { return ramified_ ? QuadElem{0, 1} : QuadElem{Rational(p_), 0}; }

QuadElem QuadExt::uniformizer_power(int k) const {
    if (!ramified_) return QuadElem{prime_power(p_, k), 0};
    int h = k >= 0 ? k / 2 : -((-k + 1) / 2);  // floor(k / 2)
    if (k - 2 * h == 0) return QuadElem{prime_power(p_, h), 0};
    return QuadElem{0, prime_power(p_, h)};
}

long QuadExt::residue_count(int k) const {
    return ramified_ ? ipow(p_, k) : ipow(p_, 2 * k);
}

long QuadExt::residue_index(const QuadElem& u, int k) const {
    if (!ramified_) {
        long pk = ipow(p_, k);
        return residue(u.x, p_, k) + pk * residue(u.y, p_, k);
    }
    int kx = (k + 1) / 2, ky = k / 2;
    return residue(u.x, p_, kx) + ipow(p_, kx) * residue(u.y, p_, ky);
}

std::vector<QuadElem> QuadExt::unit_residues(int k) const {
    std::vector<QuadElem> out;
    if (k == 0) {
        out.push_back(QuadElem{1, 0});
        return out;
    }
    long px = ramified_ ? ipow(p_, (k + 1) / 2) : ipow(p_, k);
    long py = ramified_ ? ipow(p_, k / 2) : ipow(p_, k);
    for (long y = 0; y < py; ++y)
        for (long x = 0; x < px; ++x) {
            bool unit = ramified_ ? (x % p_ != 0) : (x % p_ != 0 || y % p_ != 0);
            if (unit) out.push_back(QuadElem{Rational(x), Rational(y)});
        }
    return out;
}

QuadElem QuadExt::residue_generator() const {
    if (ramified_) return QuadElem{Rational(primitive_root(p_)), 0};
    const long q = p_ * p_;
    for (long b = 0; b < p_; ++b)
        for (long a = 0; a < p_; ++a) {
            if (a == 0 && b == 0) continue;
            long x = a, y = b, ord = 1;
            while (!(x == 1 && y == 0)) {
                long nx = mod_floor(x * a + D_ * y * b, p_);
                long ny = mod_floor(x * b + y * a, p_);
                x = nx;
                y = ny;
                ++ord;
            }
            if (ord == q - 1) return QuadElem{Rational(a), Rational(b)};
        }
    fail(ErrorCode::kInternal, "residue_generator: none found");
}

int QuadExt::eta_unit(const Rational& u) const {
    if (!ramified_) return 1;
    return legendre(residue(u, p_, 1), p_);
}

int QuadExt::eta_p() const { return ramified_ ? legendre(-1, p_) : -1; }

// ------------------------------------------------------- characters of E^x

QuadExtCharacter::QuadExtCharacter(std::shared_ptr<const QuadExt> E, int level, std::vector<Root> table,
                                   Root at_uniformizer)
    : E_(std::move(E)), level_(level), table_(std::move(table)), at_pi_(at_uniformizer) {
    require(static_cast<long>(table_.size()) == E_->residue_count(level_), ErrorCode::kInvalidArgument,
            "QuadExtCharacter: table size mismatch");
    compute_conductor();
}

namespace {

struct ModPair {
    Integer x, y;
};

ModPair mul_mod(const ModPair& a, const ModPair& b, long D, const Integer& m) {
    ModPair r{(a.x * b.x + D * a.y * b.y) % m, (a.x * b.y + a.y * b.x) % m};
    if (r.x < 0) r.x += m;
    if (r.y < 0) r.y += m;
    return r;
}

}  // namespace

QuadExtCharacter QuadExtCharacter::from_parameters(std::shared_ptr<const QuadExt> E, int level,
                                                   long theta_index, const QuadElem& beta,
                                                   Root at_uniformizer) {
    const long p = E->p();
    const long D = E->D();
    const int e = E->ram_index();
    const long qE = E->residue_size();

    // residue-field discrete logarithm
    std::vector<long> rdlog(static_cast<std::size_t>(p * p), -1);
    {
        QuadElem g = E->residue_generator();
        long gx = residue(g.x, p, 1), gy = residue(g.y, p, 1);
        long x = 1, y = 0;
        for (long k = 0; k < qE - 1; ++k) {
            rdlog[static_cast<std::size_t>(x + p * y)] = k;
            long nx = mod_floor(x * gx + D * y * gy, p);
            long ny = mod_floor(x * gy + y * gx, p);
            x = nx;
            y = ny;
        }
    }

    // series length and working precision for the logarithm
    int vbeta = std::min(valuation(beta.x, p), valuation(beta.y, p));
    if (vbeta == kInfiniteValuation) vbeta = 0;
    auto vp_int = [p](long j) {
        int v = 0;
        while (j % p == 0) {
            j /= p;
            ++v;
        }
        return v;
    };
    int J = 1;
    for (int j = 1; j < 400; ++j)
        if (j / e - vp_int(j) + vbeta < 0) J = j + 1;
    int maxv = 0;
    for (int j = 1; j <= J; ++j) maxv = std::max(maxv, vp_int(j));
    int N = std::max(1, maxv - vbeta + 1);
    Integer pN;
    mpz_ui_pow_ui(pN.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(N));
    const Rational scale = Rational(1, qE - 1);

    // the additive part only depends on u modulo p_E^{k0}
    int vb = (beta.x == 0 && beta.y == 0) ? 0 : E->val(beta);
    int k0 = std::clamp(-E->psi_shift() - vb, 1, std::max(level, 1));
    std::vector<Root> additive(static_cast<std::size_t>(E->residue_count(k0)), Root{});
    for (const QuadElem& u : E->unit_residues(k0)) {
        // w = u^{qE - 1} = 1 + z modulo p^N
        ModPair base{Integer(u.x.get_num()) % pN, Integer(u.y.get_num()) % pN};
        ModPair w{1, 0};
        for (long k = qE - 1; k > 0; k >>= 1) {
            if (k & 1) w = mul_mod(w, base, D, pN);
            base = mul_mod(base, base, D, pN);
        }
        ModPair z{w.x - 1, w.y};
        ModPair zj{1, 0};
        QuadElem L{0, 0};
        for (int j = 1; j <= J; ++j) {
            zj = mul_mod(zj, z, D, pN);
            Rational c = Rational(j % 2 == 1 ? 1 : -1, j);
            L.x += c * Rational(zj.x);
            L.y += c * Rational(zj.y);
        }
        L.x *= scale;
        L.y *= scale;
        additive[static_cast<std::size_t>(E->residue_index(u, k0))] = E->psi_E(E->mul(beta, L));
    }
    std::vector<Root> table(static_cast<std::size_t>(E->residue_count(level)), Root{});
    for (const QuadElem& u : E->unit_residues(level)) {
        long rx = residue(u.x, p, 1), ry = E->ramified() ? 0 : residue(u.y, p, 1);
        Root theta = Root::make(static_cast<std::uint64_t>(qE - 1),
                                theta_index * rdlog[static_cast<std::size_t>(rx + p * ry)]);
        table[static_cast<std::size_t>(E->residue_index(u, level))] =
            theta * additive[static_cast<std::size_t>(E->residue_index(u, k0))];
    }
    return QuadExtCharacter(std::move(E), level, std::move(table), at_uniformizer);
}

Root QuadExtCharacter::at_unit(const QuadElem& u) const {
    require(E_->val(u) == 0, ErrorCode::kInvalidArgument, "QuadExtCharacter::at_unit: not a unit");
    return table_[static_cast<std::size_t>(E_->residue_index(u, level_))];
}

Root QuadExtCharacter::at(const QuadElem& x) const {
    int k = E_->val(x);
    QuadElem u = E_->mul(x, E_->uniformizer_power(-k));
    return at_pi_.pow(k) * at_unit(u);
}

void QuadExtCharacter::compute_conductor() {
    std::vector<QuadElem> basis = {QuadElem{1, 0}};
    if (!E_->ramified()) basis.push_back(QuadElem{0, 1});
    auto principal = [&](int j, const QuadElem& b) {
        QuadElem t = E_->mul(E_->uniformizer_power(j), b);
        return QuadElem{t.x + 1, t.y};
    };
    for (int c = 0; c <= level_; ++c) {
        std::vector<QuadElem> gens;
        if (c == 0) gens.push_back(E_->residue_generator());
        for (int j = std::max(c, 1); j < level_; ++j)
            for (const auto& b : basis) gens.push_back(principal(j, b));
        bool trivial_here = true;
        for (const auto& g : gens)
            if (!at_unit(g).is_one()) trivial_here = false;
        if (trivial_here) {
            conductor_ = c;
            return;
        }
    }
    conductor_ = level_;
}

QuadExtCharacter QuadExtCharacter::twist(const GL1Char& mu) const {
    require(level_ >= E_->ram_index() * mu.conductor(), ErrorCode::kUnsupported,
            "twist: table level too small for the twisting character");
    const long p = E_->p();
    const long D = E_->D();
    const long M = mu.unit.group().modulus();
    const long px = E_->ramified() ? ipow(p, (level_ + 1) / 2) : ipow(p, level_);
    std::vector<Root> table(table_.size(), Root{});
    for (std::size_t i = 0; i < table.size(); ++i) {
        long x = static_cast<long>(i) % px, y = static_cast<long>(i) / px;
        bool unit = E_->ramified() ? (x % p != 0) : (x % p != 0 || y % p != 0);
        if (!unit) continue;
        __int128 nm = static_cast<__int128>(x) * x - static_cast<__int128>(D) * y * y;
        long r = static_cast<long>(((nm % M) + M) % M);
        table[i] = table_[i] * mu.unit.at_residue(r);
    }
    Root pi = at_pi_ * mu.at(E_->norm(E_->uniformizer()));
    return QuadExtCharacter(E_, level_, std::move(table), pi);
}

GL1Char QuadExtCharacter::restrict_to_base(int base_level) const {
    const long p = E_->p();
    auto g = UnitGroup::get(p, base_level);
    std::vector<long> idx;
    for (std::size_t i = 0; i < g->generators().size(); ++i) {
        Root r = at_unit(QuadElem{Rational(g->generators()[i]), 0});
        long ord = g->orders()[i];
        require(ord % static_cast<long>(r.M) == 0, ErrorCode::kInternal,
                "restrict_to_base: base level too small");
        idx.push_back(static_cast<long>(r.e) * (ord / static_cast<long>(r.M)));
    }
    ResidueCharacter unit(g, idx);
    for (long u = 1; u < g->modulus(); ++u) {
        if (u % p == 0) continue;
        require(unit.at_residue(u) == at_unit(QuadElem{Rational(u), 0}), ErrorCode::kInternal,
                "restrict_to_base: base level too small");
    }
    return GL1Char{unit, at(QuadElem{Rational(p), 0})};
}

bool QuadExtCharacter::galois_invariant() const {
    for (const QuadElem& u : E_->unit_residues(level_))
        if (at_unit(E_->conj(u)) != at_unit(u)) return false;
    return at(E_->conj(E_->uniformizer())) == at_pi_;
}

Cyclo quad_epsilon(const QuadExtCharacter& xi) {
    const QuadExt& E = xi.field();
    const int a = xi.conductor();
    require(a >= 1, ErrorCode::kInvalidArgument, "quad_epsilon: character must be ramified");
    const int shift = a + E.psi_shift();
    QuadElem c = E.uniformizer_power(-shift);
    std::map<Root, long> counts;
    for (const QuadElem& u : E.unit_residues(a)) counts[xi.at_unit(u).inv() * E.psi_E(E.mul(c, u))] += 1;
    Cyclo sum = sum_roots(counts);
    Cyclo lead = xi.at_uniformizer().pow(shift).to_cyclo();
    int half = E.ramified() ? -a : -2 * a;
    return lead * Cyclo::half_power(E.p(), half) * sum;
}

Cyclo langlands_lambda(const QuadExt& E) {
    if (!E.ramified()) return Cyclo(1);
    const long p = E.p();
    ResidueCharacter leg(UnitGroup::get(p, 1), {(p - 1) / 2});
    GL1Char eta{leg, Root::make(2, E.eta_p() == 1 ? 0 : 1)};
    return gl1_epsilon(eta);
}

}  // namespace pnf
