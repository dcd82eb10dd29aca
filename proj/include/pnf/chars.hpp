#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pnf/cyclo.hpp"
#include "pnf/padic.hpp"

namespace pnf {

/// Structure of (Z/p^A)^x as a product of cyclic factors with a discrete-log table.
class UnitGroup {
public:
    static std::shared_ptr<const UnitGroup> get(long p, int A);

    long p() const { return p_; }
    int level() const { return A_; }
    long modulus() const { return pA_; }
    const std::vector<long>& orders() const { return orders_; }
    const std::vector<long>& generators() const { return gens_; }
    /// Lcm of the factor orders.
    long exponent() const { return exponent_; }
    long order() const;
    /// Discrete logs of a unit residue u in [0, p^A), one per factor.
    const int* dlog(long u) const { return &dlog_[static_cast<std::size_t>(u) * orders_.size()]; }
    bool is_unit(long u) const { return u % p_ != 0 || pA_ == 1; }

    UnitGroup(long p, int A);

private:
    long p_;
    int A_;
    long pA_;
    long exponent_ = 1;
    std::vector<long> orders_;
    std::vector<long> gens_;
    std::vector<int> dlog_;
};

/// Primitive root modulo p^2 (hence modulo every p^k), odd p.
long primitive_root(long p);

/// Character of Z_p^x of finite conductor, extended to Q_p^x by mu(p) = 1.
class ResidueCharacter {
public:
    ResidueCharacter() = default;
    ResidueCharacter(std::shared_ptr<const UnitGroup> group, std::vector<long> idx);
    static ResidueCharacter trivial(long p, int level = 1);

    long p() const { return group_->p(); }
    int level() const { return group_->level(); }
    const std::vector<long>& index() const { return idx_; }
    const UnitGroup& group() const { return *group_; }
    /// Conductor exponent a(mu).
    int conductor() const { return conductor_; }
    bool is_trivial() const { return conductor_ == 0; }

    /// Value at a unit residue modulo p^level.
    Root at_residue(long u) const;
    /// Value at a p-adic unit given as a rational.
    Root at_unit(const Rational& u) const;
    /// Value at any nonzero rational (mu(p) = 1).
    Root at(const Rational& x) const;

    ResidueCharacter lift(int level) const;
    ResidueCharacter operator*(const ResidueCharacter& o) const;
    ResidueCharacter inv() const;
    ResidueCharacter pow(long k) const;
    bool operator==(const ResidueCharacter& o) const;
    bool operator!=(const ResidueCharacter& o) const { return !(*this == o); }
    bool operator<(const ResidueCharacter& o) const;

    std::string to_string() const;

private:
    std::shared_ptr<const UnitGroup> group_;
    std::vector<long> idx_;
    std::vector<long> weights_;  // exponent / order_i
    int conductor_ = 0;
    void compute_conductor();
};

/// All characters with a(mu) <= a_max, ordered by (conductor, index), at level max(a_max, 1).
std::vector<ResidueCharacter> enumerate_tilde_characters(long p, int a_max);

/// Character of F^x: a unit part plus a root-of-unity value at p.
struct GL1Char {
    ResidueCharacter unit;
    Root at_p;

    int conductor() const { return unit.conductor(); }
    Root at(const Rational& x) const;
    GL1Char operator*(const GL1Char& o) const { return GL1Char{unit * o.unit, at_p * o.at_p}; }
    GL1Char inv() const { return GL1Char{unit.inv(), at_p.inv()}; }
};

/// The additive character of Q_p trivial exactly on Z_p.
Root psi(const Rational& x, long p);

/// Normalized Gauss sum over the units by direct summation.
Cyclo gauss_sum(const Rational& x, const ResidueCharacter& mu);
/// Same value through the vanishing pattern and a per-character cache.
Cyclo gauss_sum_fast(const Rational& x, const ResidueCharacter& mu);
/// G(p^k, mu), cached.
const Cyclo& gauss_sum_at_power(int k, const ResidueCharacter& mu);

/// epsilon(1/2, eta, psi) for a character of Q_p^x.
Cyclo gl1_epsilon(const GL1Char& eta);

/// Element x + y sqrt(D) of a quadratic extension.
struct QuadElem {
    Rational x{0};
    Rational y{0};
};

/// Q_p(sqrt D): unramified with D a nonresidue unit, or ramified with D = p.
class QuadExt {
public:
    QuadExt(long p, bool ramified);

    long p() const { return p_; }
    long D() const { return D_; }
    bool ramified() const { return ramified_; }
    int ram_index() const { return ramified_ ? 2 : 1; }
    long residue_size() const { return ramified_ ? p_ : p_ * p_; }
    /// Exponent of the conductor of psi o Tr: it is trivial on p_E^{-delta}.
    int psi_shift() const { return ramified_ ? 1 : 0; }

    QuadElem mul(const QuadElem& a, const QuadElem& b) const;
    QuadElem inv(const QuadElem& a) const;
    QuadElem conj(const QuadElem& a) const { return QuadElem{a.x, -a.y}; }
    Rational norm(const QuadElem& a) const { return a.x * a.x - Rational(D_) * a.y * a.y; }
    Rational trace(const QuadElem& a) const { return 2 * a.x; }
    int val(const QuadElem& a) const;
    QuadElem uniformizer() const;
    QuadElem uniformizer_power(int k) const;
    QuadElem from_rational(const Rational& q) const { return QuadElem{q, 0}; }

    /// Unit residues modulo p_E^k as integer pairs (x, y).
    std::vector<QuadElem> unit_residues(int k) const;
    /// Dense index in [0, residue_count(k)) of an integral element modulo p_E^k.
    long residue_index(const QuadElem& u, int k) const;
    long residue_count(int k) const;
    /// Generator of the residue field's multiplicative group, as a lift.
    QuadElem residue_generator() const;
    /// Quadratic character of F^x attached to E/F.
    int eta_unit(const Rational& u) const;
    int eta_p() const;

    Root psi_E(const QuadElem& a) const { return psi(trace(a), p_); }

private:
    long p_;
    long D_;
    bool ramified_;
};

/// Character of E^x tabulated on (o_E / p_E^A)^x, with a value at the uniformizer.
class QuadExtCharacter {
public:
    QuadExtCharacter() = default;
    QuadExtCharacter(std::shared_ptr<const QuadExt> E, int level, std::vector<Root> table, Root at_uniformizer);

    /// theta(residue) * psi_E(beta * log(u^{q_E-1})/(q_E-1)), tabulated at the given level.
    static QuadExtCharacter from_parameters(std::shared_ptr<const QuadExt> E, int level, long theta_index,
                                            const QuadElem& beta, Root at_uniformizer);

    const QuadExt& field() const { return *E_; }
    std::shared_ptr<const QuadExt> field_ptr() const { return E_; }
    int level() const { return level_; }
    int conductor() const { return conductor_; }
    Root at_uniformizer() const { return at_pi_; }

    Root at_unit(const QuadElem& u) const;
    Root at(const QuadElem& x) const;
    /// xi * (mu o Norm).
    QuadExtCharacter twist(const GL1Char& mu) const;
    /// Restriction to F^x as a GL1 character.
    GL1Char restrict_to_base(int base_level) const;
    /// Whether xi equals its Galois conjugate.
    bool galois_invariant() const;

private:
    std::shared_ptr<const QuadExt> E_;
    int level_ = 0;
    std::vector<Root> table_;
    Root at_pi_;
    int conductor_ = 0;
    void compute_conductor();
};

/// epsilon(1/2, xi, psi o Tr) for a ramified character of E^x.
Cyclo quad_epsilon(const QuadExtCharacter& xi);
/// The constant lambda(E/F, psi) from the quadratic character of E/F.
Cyclo langlands_lambda(const QuadExt& E);

}  // namespace pnf
