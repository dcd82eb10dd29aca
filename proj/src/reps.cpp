#include "pnf/reps.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pnf {

const char* rep_kind_name(RepKind k) {
    switch (k) {
        case RepKind::kUnramifiedPS: return "unramified_ps";
        case RepKind::kRamifiedPS: return "ramified_ps";
        case RepKind::kSteinberg: return "steinberg";
        case RepKind::kDihedral: return "dihedral";
    }
    return "unknown";
}

GL1Char unramified_char(long p, Root at_p) { return GL1Char{ResidueCharacter::trivial(p, 1), at_p}; }

GL1Char tilde_char(const ResidueCharacter& mu) { return GL1Char{mu, Root{}}; }

namespace {

std::string root_str(const Root& r) {
    std::ostringstream os;
    if (r.is_one()) return "1";
    os << "z" << r.M << "^" << r.e;
    return os.str();
}

std::string char_str(const GL1Char& c) {
    return "{unit:" + c.unit.to_string() + ",a=" + std::to_string(c.conductor()) + ",at_p:" + root_str(c.at_p) + "}";
}

void fill_levels(LocalRep& pi) {
    pi.n0 = pi.n / 2;
    pi.n1 = pi.n - pi.n0;
    pi.m = pi.omega.conductor();
    pi.m1 = std::max(0, pi.m - pi.n1);
    require(pi.omega.at_p.is_one(), ErrorCode::kInvalidArgument,
            "central character must be trivial at p");
}

int dihedral_conductor(const QuadExtCharacter& xi) {
    return xi.field().ramified() ? xi.conductor() + 1 : 2 * xi.conductor();
}

GL1Char dihedral_central(const QuadExtCharacter& xi, int base_level) {
    const QuadExt& E = xi.field();
    GL1Char res = xi.restrict_to_base(base_level);
    const long p = E.p();
    GL1Char eta;
    if (E.ramified())
        eta = GL1Char{ResidueCharacter(UnitGroup::get(p, 1), {(p - 1) / 2}), Root::make(2, E.eta_p() == 1 ? 0 : 1)};
    else
        eta = unramified_char(p, Root::make(2, 1));
    return res * eta;
}

}  // namespace

LocalRep make_principal_series(const GL1Char& chi1, const GL1Char& chi2) {
    LocalRep pi;
    pi.p = chi1.unit.p();
    pi.kind = (chi1.conductor() == 0 && chi2.conductor() == 0) ? RepKind::kUnramifiedPS : RepKind::kRamifiedPS;
    pi.chi1 = chi1;
    pi.chi2 = chi2;
    pi.n = chi1.conductor() + chi2.conductor();
    pi.omega = chi1 * chi2;
    if (pi.kind == RepKind::kUnramifiedPS) {
        Root r = chi1.at_p * chi2.at_p.inv();
        require(!r.is_one() && !(r.M == 2), ErrorCode::kInvalidArgument,
                "unramified principal series needs alpha^2 != 1 in this catalog");
    }
    fill_levels(pi);
    pi.params = "chi1=" + char_str(chi1) + ",chi2=" + char_str(chi2);
    pi.id = "p" + std::to_string(pi.p) + "-n" + std::to_string(pi.n) + "-" + rep_kind_name(pi.kind) + "-" +
            chi1.unit.to_string() + "-" + root_str(chi1.at_p);
    return pi;
}

LocalRep make_steinberg(const GL1Char& chi) {
    LocalRep pi;
    pi.p = chi.unit.p();
    pi.kind = RepKind::kSteinberg;
    pi.chi1 = chi;
    pi.chi2 = chi;
    pi.n = std::max(2 * chi.conductor(), 1);
    pi.omega = chi * chi;
    fill_levels(pi);
    pi.params = "chi=" + char_str(chi);
    pi.id = "p" + std::to_string(pi.p) + "-n" + std::to_string(pi.n) + "-steinberg-" + chi.unit.to_string() + "-" +
            root_str(chi.at_p);
    return pi;
}

LocalRep make_dihedral(long p, bool ramified_E, int a_xi, long theta_index, const QuadElem& beta) {
    require(p != 2, ErrorCode::kUnsupported, "dihedral supercuspidals are unsupported at p=2");
    require(a_xi >= 1, ErrorCode::kInvalidArgument, "dihedral: a(xi) must be >= 1");
    auto E = std::make_shared<const QuadExt>(p, ramified_E);
    const int n = ramified_E ? a_xi + 1 : 2 * a_xi;
    const int level = E->ram_index() * n;
    // choose xi(varpi_E) so that the central character is trivial at p
    Root at_pi;
    if (!ramified_E) {
        at_pi = Root::make(2, 1);  // eta(p) = -1 and xi(p) = xi(varpi_E)
    } else {
        at_pi = E->eta_p() == 1 ? Root{} : Root::make(4, 1);  // xi(varpi_E)^2 = eta(p)
    }
    QuadExtCharacter xi = QuadExtCharacter::from_parameters(E, level, theta_index, beta, at_pi);
    require(xi.conductor() == a_xi, ErrorCode::kInvalidArgument,
            "dihedral: parameters give conductor " + std::to_string(xi.conductor()));
    require(!xi.galois_invariant(), ErrorCode::kInvalidArgument,
            "dihedral: xi factors through the norm");
    LocalRep pi;
    pi.p = p;
    pi.kind = RepKind::kDihedral;
    pi.xi = xi;
    pi.n = n;
    pi.omega = dihedral_central(xi, n);
    fill_levels(pi);
    std::ostringstream os;
    os << "E=" << (ramified_E ? "ramified" : "unramified") << ",D=" << E->D() << ",a_xi=" << a_xi
       << ",theta=" << theta_index << ",beta=(" << beta.x.get_str() << "," << beta.y.get_str() << ")"
       << ",xi_pi=" << root_str(at_pi);
    pi.params = os.str();
    pi.id = "p" + std::to_string(p) + "-n" + std::to_string(n) + "-dihedral-" + (ramified_E ? "ram" : "unr") +
            "-t" + std::to_string(theta_index);
    return pi;
}

int twist_conductor(const LocalRep& pi, const GL1Char& nu) {
    switch (pi.kind) {
        case RepKind::kUnramifiedPS:
        case RepKind::kRamifiedPS: return (pi.chi1 * nu).conductor() + (pi.chi2 * nu).conductor();
        case RepKind::kSteinberg: return std::max(2 * (pi.chi1 * nu).conductor(), 1);
        case RepKind::kDihedral: return dihedral_conductor(pi.xi.twist(nu));
    }
    return 0;
}

LocalRep twist(const LocalRep& pi, const GL1Char& nu) {
    switch (pi.kind) {
        case RepKind::kUnramifiedPS:
        case RepKind::kRamifiedPS: {
            LocalRep out;
            GL1Char a = pi.chi1 * nu, b = pi.chi2 * nu;
            out.p = pi.p;
            out.kind = (a.conductor() == 0 && b.conductor() == 0) ? RepKind::kUnramifiedPS : RepKind::kRamifiedPS;
            out.chi1 = a;
            out.chi2 = b;
            out.n = a.conductor() + b.conductor();
            out.omega = a * b;
            fill_levels(out);
            out.params = "chi1=" + char_str(a) + ",chi2=" + char_str(b);
            out.id = pi.id + "*" + nu.unit.to_string();
            return out;
        }
        case RepKind::kSteinberg: {
            LocalRep out = make_steinberg(pi.chi1 * nu);
            out.id = pi.id + "*" + nu.unit.to_string();
            return out;
        }
        case RepKind::kDihedral: {
            LocalRep out = pi;
            out.xi = pi.xi.twist(nu);
            out.n = dihedral_conductor(out.xi);
            out.omega = pi.omega * nu * nu;
            fill_levels(out);
            out.id = pi.id + "*" + nu.unit.to_string();
            return out;
        }
    }
    return pi;
}

LocalRep contragredient(const LocalRep& pi) { return twist(pi, pi.omega.inv()); }

std::vector<ScaledRoot> l_factor_roots(const LocalRep& pi, const GL1Char& nu) {
    std::vector<ScaledRoot> out;
    switch (pi.kind) {
        case RepKind::kUnramifiedPS:
        case RepKind::kRamifiedPS:
            for (const GL1Char* c : {&pi.chi1, &pi.chi2}) {
                GL1Char t = *c * nu;
                if (t.conductor() == 0) out.push_back(ScaledRoot{t.at_p, -1, pi.p});
            }
            break;
        case RepKind::kSteinberg: {
            GL1Char t = pi.chi1 * nu;
            if (t.conductor() == 0) out.push_back(ScaledRoot{t.at_p, -2, pi.p});
            break;
        }
        case RepKind::kDihedral: break;
    }
    return out;
}

Cyclo twist_epsilon(const LocalRep& pi, const GL1Char& nu) {
    switch (pi.kind) {
        case RepKind::kUnramifiedPS:
        case RepKind::kRamifiedPS: return gl1_epsilon(pi.chi1 * nu) * gl1_epsilon(pi.chi2 * nu);
        case RepKind::kSteinberg: {
            GL1Char t = pi.chi1 * nu;
            if (t.conductor() == 0) return -t.at_p.to_cyclo();
            Cyclo e = gl1_epsilon(t);
            return e * e;
        }
        case RepKind::kDihedral: {
            QuadExtCharacter t = pi.xi.twist(nu);
            return langlands_lambda(t.field()) * quad_epsilon(t);
        }
    }
    return Cyclo(1);
}

Cyclo diagonal_whittaker(const LocalRep& pi, int a) {
    if (a < 0) return Cyclo();
    std::vector<ScaledRoot> rho = l_factor_roots(pi, pi.omega.inv());
    if (rho.empty()) return a == 0 ? Cyclo(1) : Cyclo();
    if (rho.size() == 1) return rho[0].pow(a).to_cyclo();
    Cyclo s;
    for (int i = 0; i <= a; ++i) s += (rho[0].pow(i) * rho[1].pow(a - i)).to_cyclo();
    return s;
}

std::vector<LocalRep> build_catalog(long p, int n_max, std::vector<CatalogCoverage>* coverage) {
    std::vector<LocalRep> out;
    auto note = [&](int n, const std::string& variant, bool present, const std::string& why) {
        if (coverage) coverage->push_back(CatalogCoverage{p, n, variant, present, why});
    };
    auto first_with_conductor = [&](int a) -> const ResidueCharacter* {
        static thread_local std::vector<ResidueCharacter> pool;
        pool = enumerate_tilde_characters(p, a);
        for (const auto& mu : pool)
            if (mu.conductor() == a) return &mu;
        return nullptr;
    };
    for (int n = 0; n <= n_max; ++n) {
        if (n == 0) {
            out.push_back(make_principal_series(unramified_char(p, Root::make(3, 1)),
                                                unramified_char(p, Root::make(3, 2))));
            note(n, "unramified_ps", true, "");
            continue;
        }
        // ramified principal series: chi1 of conductor n, chi2 unramified
        if (const ResidueCharacter* mu = first_with_conductor(n)) {
            GL1Char c1{*mu, Root::make(3, 1)};
            out.push_back(make_principal_series(c1, unramified_char(p, Root::make(3, 2))));
            note(n, "ramified_ps", true, "");
        } else {
            note(n, "ramified_ps", false, "no primitive character of this conductor");
        }
        // Steinberg twists
        if (n == 1) {
            out.push_back(make_steinberg(unramified_char(p, Root{})));
            out.push_back(make_steinberg(unramified_char(p, Root::make(2, 1))));
            note(n, "steinberg", true, "");
        } else if (n % 2 == 0) {
            if (const ResidueCharacter* mu = first_with_conductor(n / 2)) {
                out.push_back(make_steinberg(tilde_char(*mu)));
                note(n, "steinberg", true, "");
            } else {
                note(n, "steinberg", false, "no primitive character of conductor n/2");
            }
        } else {
            note(n, "steinberg", false, "odd n >= 3 is not a Steinberg conductor");
        }
        // dihedral supercuspidals
        if (n >= 2) {
            if (p == 2) {
                note(n, "dihedral", false, "unsupported at p=2");
                continue;
            }
            if (n % 2 == 0) {
                int a = n / 2;
                QuadElem beta = a == 1 ? QuadElem{0, 0} : QuadElem{0, prime_power(p, -a)};
                out.push_back(make_dihedral(p, false, a, 1, beta));
                note(n, "dihedral_unramified_E", true, "");
            }
            int a = n - 1;
            bool found = false;
            std::string why = "no Galois-regular character found";
            for (long theta : {1L, 2L, 0L}) {
                QuadElem beta = a == 1 ? QuadElem{0, 0} : QuadExt(p, true).uniformizer_power(-(a + 1));
                try {
                    out.push_back(make_dihedral(p, true, a, theta, beta));
                    found = true;
                    break;
                } catch (const Error& e) {
                    why = e.what();
                }
            }
            note(n, "dihedral_ramified_E", found, found ? "" : why);
        }
    }
    return out;
}

TwistCountReport twist_count_bound_check(const LocalRep& pi, int l) {
    require(l >= 0 && l <= pi.n0, ErrorCode::kInvalidArgument, "twist count check needs 0 <= l <= n0");
    TwistCountReport rep;
    rep.l = l;
    rep.ceiling = std::max(pi.n, l + pi.m);
    std::map<int, long> counts;
    for (const auto& mu : enumerate_tilde_characters(pi.p, l)) {
        if (mu.conductor() != l) continue;
        int a = twist_conductor(pi, tilde_char(mu));
        if (a > rep.ceiling) rep.conductor_bound_ok = false;
        counts[rep.ceiling - a] += 1;
    }
    for (const auto& [r, c] : counts) {
        TwistCountRow row;
        row.r = r;
        row.count = c;
        row.bound_sq = prime_power(pi.p, 2 * l - r);
        row.ok = r >= 0 && Rational(c * c) <= row.bound_sq;
        rep.ok = rep.ok && row.ok;
        rep.rows.push_back(row);
    }
    rep.ok = rep.ok && rep.conductor_bound_ok;
    return rep;
}

}  // namespace pnf
