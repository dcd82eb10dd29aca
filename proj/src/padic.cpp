#include "pnf/padic.hpp"

#include <algorithm>
#include <sstream>

namespace pnf {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kOk: return "ok";
        case ErrorCode::kInvalidArgument: return "invalid argument";
        case ErrorCode::kNotInvertible: return "not invertible";
        case ErrorCode::kUnsupported: return "unsupported";
        case ErrorCode::kOverflow: return "overflow";
        case ErrorCode::kVerificationFailed: return "verification failed";
        case ErrorCode::kIo: return "io error";
        case ErrorCode::kInternal: return "internal error";
    }
    return "unknown";
}

int valuation(const Integer& x, long p) {
    if (x == 0) return kInfiniteValuation;
    Integer r = x;
    mpz_class pz(p);
    return static_cast<int>(mpz_remove(r.get_mpz_t(), r.get_mpz_t(), pz.get_mpz_t()));
}

int valuation(const Rational& x, long p) {
    if (x == 0) return kInfiniteValuation;
    return valuation(Integer(x.get_num()), p) - valuation(Integer(x.get_den()), p);
}

Rational prime_power(long p, int k) {
    Integer pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(k >= 0 ? k : -k));
    if (k >= 0) return Rational(pk);
    Rational r(Integer(1), pk);
    r.canonicalize();
    return r;
}

long ipow(long base, int exp) {
    require(exp >= 0, ErrorCode::kInvalidArgument, "ipow: negative exponent");
    long r = 1;
    for (int i = 0; i < exp; ++i) {
        require(r <= LONG_MAX / (base == 0 ? 1 : base), ErrorCode::kOverflow, "ipow overflow");
        r *= base;
    }
    return r;
}

Rational unit_part(const Rational& x, long p) {
    require(x != 0, ErrorCode::kInvalidArgument, "unit_part of zero");
    Rational r = x / prime_power(p, valuation(x, p));
    r.canonicalize();
    return r;
}

long inverse_mod(long u, long m) {
    if (m == 1) return 0;
    Integer r;
    Integer uz(mod_floor(u, m));
    Integer mz(m);
    require(mpz_invert(r.get_mpz_t(), uz.get_mpz_t(), mz.get_mpz_t()) != 0,
            ErrorCode::kNotInvertible, "inverse_mod: not a unit");
    return r.get_si();
}

long residue(const Rational& x, long p, int k) {
    require(k >= 0, ErrorCode::kInvalidArgument, "residue: negative precision");
    long pk = ipow(p, k);
    if (pk == 1) return 0;
    require(valuation(Integer(x.get_den()), p) == 0, ErrorCode::kInvalidArgument,
            "residue: rational is not p-integral");
    Integer mz(pk);
    Integer num = x.get_num() % mz;
    Integer den = x.get_den() % mz;
    Integer inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mz.get_mpz_t());
    Integer r = (num * inv) % mz;
    if (r < 0) r += mz;
    return r.get_si();
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return Mat2(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d);
}

Mat2 Mat2::inverse() const {
    Rational dt = det();
    require(dt != 0, ErrorCode::kNotInvertible, "matrix is not invertible");
    return Mat2(d / dt, -b / dt, -c / dt, a / dt);
}

std::string Mat2::to_string() const {
    std::ostringstream os;
    os << "[" << a.get_str() << "," << b.get_str() << ";" << c.get_str() << "," << d.get_str()
       << "]";
    return os.str();
}

bool in_maximal_compact(const Mat2& k, long p) {
    for (const Rational* e : {&k.a, &k.b, &k.c, &k.d})
        if (valuation(*e, p) < 0) return false;
    return valuation(k.det(), p) == 0;
}

bool in_k0(const Mat2& k, long p, int n) {
    return in_maximal_compact(k, p) && valuation(k.c, p) >= n;
}

bool in_k1(const Mat2& k, long p, int n) {
    return in_k0(k, p, n) && valuation(Rational(k.a - 1), p) >= n;
}

IwasawaParts iwasawa_decompose(const Mat2& g, long p) {
    Rational dt = g.det();
    require(dt != 0, ErrorCode::kNotInvertible, "not invertible");
    IwasawaParts out;
    Rational A, B, D;
    if (g.d != 0 && valuation(g.d, p) <= valuation(g.c, p)) {
        Rational gamma = g.c / g.d;
        out.k = Mat2::lower(gamma);
        A = dt / g.d;
        B = g.b;
        D = g.d;
    } else {
        Rational e = g.d / g.c;
        out.k = Mat2(0, 1, -1, -e);
        A = -dt / g.c;
        B = -g.a;
        D = -g.c;
    }
    out.z = D;
    out.x = B / D;
    out.y = A / D;
    return out;
}

Mat2 coset_representative(long p, int t, int l, const Rational& v) {
    return Mat2::diag_a(prime_power(p, t)) * Mat2::weyl() *
           Mat2::unipotent(prime_power(p, -l) * v);
}

Mat2 reassemble(const CosetPosition& pos, long p) {
    return Mat2::central(pos.zfactor) * Mat2::unipotent(pos.xshift) *
           coset_representative(p, pos.t, pos.l, pos.v) * pos.witness;
}

CosetPosition coset_position(const Mat2& g, long p, int n) {
    require(n >= 0, ErrorCode::kInvalidArgument, "coset_position: n must be >= 0");
    IwasawaParts iw = iwasawa_decompose(g, p);
    CosetPosition pos;
    pos.n = n;
    const Mat2& k = iw.k;
    if (k.a == 1 && k.b == 0 && k.d == 1) {
        // k = [1 0; gamma 1] with gamma integral
        Rational gamma = k.c;
        Mat2 tail;  // K1 factor on the right
        int lv = valuation(gamma, p);
        if (lv >= n) {
            gamma = prime_power(p, n);
            tail = Mat2::lower(k.c - gamma);
            lv = n;
        }
        Rational v = prime_power(p, lv) / gamma;  // 1 / unit part of gamma
        Rational d2 = -prime_power(p, lv) / v;
        Rational y2 = iw.y * v * v * prime_power(p, -2 * lv);
        int t = valuation(y2, p);
        Rational u2 = y2 / prime_power(p, t);
        pos.t = t;
        pos.l = lv;
        pos.v = v / u2;
        pos.zfactor = iw.z * d2;
        pos.xshift = iw.x + iw.y * v * prime_power(p, -lv);
        pos.witness = Mat2(1, 0, 0, u2) * tail;
    } else {
        // k = w n(e) with v(e) > 0
        Rational e = -k.d;
        int t = valuation(iw.y, p);
        Rational u = iw.y / prime_power(p, t);
        pos.t = t;
        pos.l = 0;
        pos.v = 1 / u;
        pos.zfactor = iw.z;
        pos.xshift = iw.x;
        pos.witness = Mat2(1, 0, 0, u) * Mat2::unipotent(e - 1);
    }
    pos.v.canonicalize();
    require(in_k1(pos.witness, p, n), ErrorCode::kInternal, "coset_position: witness not in K1");
    require(reassemble(pos, p) == g, ErrorCode::kInternal,
            "coset_position: witness does not reassemble " + g.to_string());
    return pos;
}

MatrixInvariants matrix_invariants(const Mat2& g, long p, int n, int m) {
    require(m >= 0, ErrorCode::kInvalidArgument, "matrix_invariants: m must be >= 0");
    CosetPosition pos = coset_position(g, p, n);
    MatrixInvariants inv;
    inv.t = pos.t;
    inv.l = pos.l;
    inv.n0g = std::min(pos.l, n - pos.l);
    int n0 = n / 2;
    int n1 = n - n0;
    inv.qg = std::max(n0, inv.n0g - n1 + m);
    return inv;
}

void for_each_k_mod(long p, int r, const std::function<void(long, long, long, long)>& f) {
    long P = ipow(p, r);
    for (long a = 0; a < P; ++a)
        for (long b = 0; b < P; ++b)
            for (long c = 0; c < P; ++c)
                for (long d = 0; d < P; ++d) {
                    long det = mod_floor(a * d - b * c, p);
                    if (det != 0) f(a, b, c, d);
                }
}

long gl2_order(long p, int r) {
    // |GL2(F_p)| * p^{4(r-1)}
    long base = (p * p - 1) * (p * p - p);
    if (r == 0) return 1;
    return base * ipow(p, 4 * (r - 1));
}

}  // namespace pnf
