#include "pnf/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "pnf/amplifier.hpp"
#include "pnf/archimedean.hpp"
#include "pnf/assembly.hpp"
#include "pnf/error.hpp"
#include "pnf/matrixcoeff.hpp"

namespace pnf {

namespace {

constexpr std::size_t kMaxExamples = 5;

void note(Json& list, const std::string& s) {
    if (list.size() < kMaxExamples) list.push_back(s);
}

void note_all(Json& list, const std::vector<std::string>& v) {
    for (const auto& s : v) note(list, s);
}

std::string qtext(const Rational& q) { return q.get_str(); }

long get_long(const Json& params, const char* key, long fallback) {
    if (!params.contains(key)) return fallback;
    require(params[key].is_number_integer(), ErrorCode::kInvalidArgument, std::string("parameter ") + key + " must be an integer");
    return params[key].get<long>();
}

double get_double(const Json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    require(params[key].is_number(), ErrorCode::kInvalidArgument, std::string("parameter ") + key + " must be a number");
    return params[key].get<double>();
}

std::vector<std::shared_ptr<const Newform>> catalog_newforms(long p, int n_max) {
    std::vector<std::shared_ptr<const Newform>> out;
    for (auto& pi : build_catalog(p, n_max)) out.push_back(std::make_shared<Newform>(pi));
    return out;
}

int default_n_max(long p) { return p == 5 ? 3 : 4; }

// ----------------------------------------------------------------- local checks

CheckResult check_normalization(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", default_n_max(p)));
    r.params = {{"p", p}, {"n_max", n_max}};
    Json bad = Json::array();
    long count = 0;
    for (const auto& W : catalog_newforms(p, n_max)) {
        ++count;
        if (W->value(Mat2::identity()) != Cyclo(1)) note(bad, W->rep().id);
    }
    r.pass = bad.empty() && count > 0;
    r.details = {{"representations", count}, {"failures", bad}};
    return r;
}

CheckResult check_support(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", default_n_max(p)));
    r.params = {{"p", p}, {"n_max", n_max}};
    long cells = 0, nonzero = 0;
    bool ok = true;
    Json examples = Json::array();
    for (const auto& W : catalog_newforms(p, n_max)) {
        SupportReport s = verify_support(*W);
        cells += s.cells;
        nonzero += s.nonzero;
        if (!s.ok || !s.below_rows_zero) {
            ok = false;
            note(examples, W->rep().id);
            note_all(examples, s.counterexamples);
        }
    }
    r.pass = ok;
    r.details = {{"cells", cells}, {"nonzero", nonzero}, {"counterexamples", examples}};
    return r;
}

CheckResult check_jsupport(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", default_n_max(p)));
    r.params = {{"p", p}, {"n_max", n_max}};
    long cosets = 0, evals = 0;
    bool ok = true;
    Json examples = Json::array();
    for (const auto& W : catalog_newforms(p, n_max)) {
        JSupportReport s = verify_j_support(*W, 0);
        cosets += s.cosets;
        evals += s.evaluations;
        if (!s.ok) {
            ok = false;
            note(examples, W->rep().id);
            note_all(examples, s.counterexamples);
        }
    }
    r.pass = ok;
    r.details = {{"cosets", cosets}, {"evaluations", evals}, {"counterexamples", examples}};
    return r;
}

CheckResult check_avgsize(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", default_n_max(p)));
    const int r_max = static_cast<int>(get_long(params, "r_max", 4));
    r.params = {{"p", p}, {"n_max", n_max}, {"r_max", r_max}};
    std::vector<double> worst(static_cast<std::size_t>(r_max) + 1, 0.0);
    std::vector<std::string> worst_id(worst.size());
    double constant = 0;
    Json per_rep = Json::array();
    for (const auto& W : catalog_newforms(p, n_max)) {
        JSupportReport s = verify_j_support(*W, r_max);
        constant = std::max(constant, s.constant);
        Json rms = Json::array();
        for (const auto& row : s.rows) {
            const auto i = static_cast<std::size_t>(row.r);
            rms.push_back(row.worst);
            if (row.worst > worst[i]) {
                worst[i] = row.worst;
                worst_id[i] = W->rep().id;
            }
        }
        per_rep.push_back({{"id", W->rep().id}, {"constant", s.constant}, {"rms", rms}, {"monotone", s.monotone}});
    }
    bool monotone = true;
    Json rows = Json::array();
    for (std::size_t i = 0; i < worst.size(); ++i) {
        rows.push_back({{"r", i}, {"rms", worst[i]}, {"attained_by", worst_id[i]}});
        if (i > 0 && worst[i] > worst[i - 1] * (1 + 1e-12)) monotone = false;
    }
    r.measured = constant;
    r.locked_value = locked::kAverageSize;
    r.pass = monotone && constant <= locked::kAverageSize;
    r.details = {{"catalog_rows", rows}, {"catalog_monotone", monotone}, {"representations", per_rep}};
    return r;
}

CheckResult check_al(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", default_n_max(p)));
    r.params = {{"p", p}, {"n_max", n_max}};
    bool ok = true;
    long checked = 0, triples = 0;
    Json reps = Json::array(), examples = Json::array();
    for (const auto& W : catalog_newforms(p, n_max)) {
        if (!W->rep().omega.at_p.is_one()) continue;
        Newform Wt(contragredient(W->rep()));
        ALReport a = atkin_lehner_verify(*W, Wt);
        ++checked;
        triples += a.triples;
        const bool good = a.ok && a.eps_constant && a.eps_unit;
        if (!good) {
            ok = false;
            note(examples, W->rep().id);
            note_all(examples, a.counterexamples);
        }
        reps.push_back({{"id", W->rep().id}, {"epsilon", a.eps_extracted.to_string()}, {"ok", good}});
    }
    r.pass = ok && checked > 0;
    r.details = {{"representations", reps}, {"triples", triples}, {"counterexamples", examples}};
    return r;
}

CheckResult check_twistcond(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", default_n_max(p)));
    r.params = {{"p", p}, {"n_max", n_max}};
    bool ok = true;
    long rows = 0, conductor_exceptions = 0;
    Json examples = Json::array();
    for (const auto& W : catalog_newforms(p, n_max)) {
        const LocalRep& pi = W->rep();
        for (int l = 0; l <= pi.n0; ++l) {
            TwistCountReport t = twist_count_bound_check(pi, l);
            rows += static_cast<long>(t.rows.size());
            if (!t.conductor_bound_ok) ++conductor_exceptions;
            if (!t.ok) {
                ok = false;
                note(examples, pi.id + " l=" + std::to_string(l));
            }
        }
    }
    r.pass = ok && conductor_exceptions == 0;
    r.details = {{"rows", rows}, {"conductor_exceptions", conductor_exceptions}, {"counterexamples", examples}};
    return r;
}

std::vector<LocalRep> exact_mode_list(long p, int n_max) {
    std::vector<LocalRep> out;
    for (auto& pi : build_catalog(p, n_max)) out.push_back(pi);
    return out;
}

CheckResult check_delta(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", p == 2 ? 3 : 2));
    r.params = {{"p", p}, {"n_max", n_max}};
    const Rational floor(locked::kDeltaFloorNum, locked::kDeltaFloorDen);
    bool ok = true;
    Rational min_norm;
    bool first = true;
    Json reps = Json::array();
    for (const auto& pi : exact_mode_list(p, n_max)) {
        MatrixCoefficient phi(std::make_shared<Newform>(pi));
        KTable T = tabulate_truncated(phi, std::max(pi.n, 1));
        DeltaReport D = compute_delta(phi, T);
        const bool good = D.ok && D.dimension_integer && D.normalized >= floor;
        ok = ok && good;
        if (D.rational && (first || D.normalized < min_norm)) {
            min_norm = D.normalized;
            first = false;
        }
        reps.push_back({{"id", pi.id},
                        {"delta", D.rational ? qtext(D.delta_q) : D.delta.to_string()},
                        {"index", D.index},
                        {"dimension", qtext(D.dimension)},
                        {"normalized", qtext(D.normalized)},
                        {"refinement", D.refinement_mode},
                        {"refinement_stable", D.refinement_stable},
                        {"ok", good}});
    }
    r.measured = first ? 0.0 : min_norm.get_d();
    r.locked_value = floor.get_d();
    r.pass = ok && !first && floor >= Rational(1, 8);
    r.details = {{"min_normalized", first ? std::string("none") : qtext(min_norm)}, {"representations", reps}};
    return r;
}

CheckResult check_idempotency(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 2);
    const int n_max = static_cast<int>(get_long(params, "n_max", p == 2 ? 3 : 2));
    const int samples = static_cast<int>(get_long(params, "samples", 50));
    const int eigen_samples = static_cast<int>(get_long(params, "eigen_samples", 10));
    const std::uint64_t seed = static_cast<std::uint64_t>(get_long(params, "seed", 1));
    r.params = {{"p", p}, {"n_max", n_max}, {"samples", samples}, {"eigen_samples", eigen_samples}, {"seed", seed}};
    bool ok = true;
    Json reps = Json::array(), examples = Json::array();
    long points = 0, eigen_points = 0;
    for (const auto& pi : exact_mode_list(p, n_max)) {
        MatrixCoefficient phi(std::make_shared<Newform>(pi));
        KTable T = tabulate_truncated(phi, std::max(pi.n, 1));
        DeltaReport D = compute_delta(phi, T);
        IdempotencyReport I = verify_idempotency(phi, T, D.delta, samples, seed);
        EigenReport E = verify_eigenvector(phi, T, D.delta, eigen_samples, seed + 1);
        points += I.points;
        eigen_points += E.samples;
        const bool good = I.ok && E.ok && I.points >= samples && E.samples >= eigen_samples;
        if (!good) {
            ok = false;
            note(examples, pi.id);
            note_all(examples, I.counterexamples);
            note_all(examples, E.counterexamples);
        }
        reps.push_back({{"id", pi.id},
                        {"points", I.points},
                        {"off_support", I.off_support},
                        {"eigen_samples", E.samples},
                        {"eigen_max_error", E.max_abs_error},
                        {"ok", good}});
    }
    r.pass = ok;
    r.details = {{"points", points}, {"eigen_points", eigen_points}, {"representations", reps}, {"counterexamples", examples}};
    return r;
}

CheckResult check_integlemma(const Json& params) {
    CheckResult r;
    const int n_max = static_cast<int>(get_long(params, "n_max", 3));
    r.params = {{"q", Json::array({2, 3, 5})}, {"n_max", n_max}};
    bool ok = true;
    Json rows = Json::array();
    for (long q : {2L, 3L, 5L})
        for (int n = 1; n <= n_max; ++n) {
            IntegConstantsReport rep = integ_constants_verify(q, n);
            ok = ok && rep.ok;
            Json consts = Json::array();
            for (const auto& c : rep.constants) consts.push_back(qtext(c));
            Json js = Json::array();
            for (const auto& row : rep.rows)
                js.push_back({{"j", row.j}, {"lhs", qtext(row.lhs)}, {"rhs", qtext(row.rhs)}, {"ok", row.ok}});
            rows.push_back({{"q", q}, {"n", n}, {"constants", consts}, {"rows", js}, {"ok", rep.ok}});
        }
    r.pass = ok;
    r.details = {{"cases", rows}};
    return r;
}

CheckResult check_orthogonality(const Json& params) {
    CheckResult r;
    const long p = get_long(params, "p", 3);
    const int n = static_cast<int>(get_long(params, "n", 2));
    r.params = {{"p", p}, {"n", n}};
    const Rational low(locked::kOrthoLowNum, locked::kOrthoLowDen), high(locked::kOrthoHighNum, locked::kOrthoHighDen);
    bool ok = true;
    long count = 0;
    Json reps = Json::array(), examples = Json::array();
    double worst = 0;
    for (const auto& pi : build_catalog(p, n)) {
        if (pi.kind != RepKind::kDihedral || pi.n != n) continue;
        ++count;
        MatrixCoefficient phi(std::make_shared<Newform>(pi));
        BackendReport B = compare_backends(phi);
        OrthogonalityReport O = cross_term_orthogonality(phi);
        const bool in_range = O.ratio >= low && O.ratio <= high;
        const bool good = B.ok && O.ok && O.nonzero_cross == 0 && O.full_consistent && in_range;
        ok = ok && good;
        if (!good) {
            note(examples, pi.id);
            note_all(examples, B.counterexamples);
            note_all(examples, O.counterexamples);
        }
        worst = std::max(worst, std::abs(O.ratio.get_d() - 1));
        reps.push_back({{"id", pi.id},
                        {"backend_points", B.points},
                        {"backend_nonzero", B.nonzero},
                        {"backends_agree", B.ok},
                        {"cross_pairs", O.cross_pairs},
                        {"nonzero_cross", O.nonzero_cross},
                        {"diagonal", qtext(O.diagonal)},
                        {"identity_term", qtext(O.identity_term)},
                        {"ratio", qtext(O.ratio)},
                        {"ok", good}});
        if (count == 1) r.measured = O.ratio.get_d();
    }
    r.locked_value = high.get_d();
    r.pass = ok && count > 0;
    r.details = {{"locked_interval", Json::array({qtext(low), qtext(high)})},
                 {"representations", reps},
                 {"counterexamples", examples}};
    return r;
}

// ----------------------------------------------------------------- global checks

Json exponent_list(const std::vector<ExponentVector>& v) {
    Json out = Json::array();
    for (const auto& e : v) out.push_back(e.to_string());
    return out;
}

Json regime_json(const RegimeCheck& rc) {
    return {{"regime", rc.name}, {"threshold", rc.threshold.to_string()}, {"terms", exponent_list(rc.reduced)},
            {"ok", rc.ok}, {"failing", rc.failing}};
}

CheckResult check_caseorder(const Json&) {
    CheckResult r;
    CaseCheckReport c = exponent_casecheck();
    r.pass = c.printed_ok;
    r.details = {{"Lambda", c.Lambda.to_string()},
                 {"target", c.target.to_string()},
                 {"substituted", exponent_list(c.substituted)},
                 {"maximal", exponent_list(c.reduced)},
                 {"displayed", exponent_list(c.displayed)},
                 {"display_matches", c.display_matches},
                 {"display_mismatch", c.display_mismatch},
                 {"small_y_printed", regime_json(c.small_y_printed)},
                 {"small_y_displayed_terms", regime_json(c.small_y_display)},
                 {"large_y_printed", regime_json(c.large_y_printed)},
                 {"large_y_whittaker_term", c.large_y_fourier.to_string()},
                 {"large_y_whittaker_matches", c.large_y_fourier_matches},
                 {"small_y_corrected", regime_json(c.small_y_corrected)},
                 {"large_y_corrected", regime_json(c.large_y_corrected)},
                 {"degenerate_N2_1", c.degenerate_ok},
                 {"corrected_split_closes", c.corrected_ok}};
    return r;
}

CheckResult check_table(const Json&) {
    CheckResult r;
    Json rows = Json::array();
    bool ok = true;
    for (const auto& row : intro_table()) {
        Json ms = Json::array();
        for (int m : row.ms) {
            ms.push_back(m);
            for (long p : {2L, 3L, 5L}) {
                auto L = level_invariants(ipow(p, row.n), ipow(p, m));
                ok = ok && L.N0 == ipow(p, row.n0) && L.N1 == ipow(p, row.n1) && L.M1 == ipow(p, row.m1);
            }
        }
        rows.push_back({{"N", "p^" + std::to_string(row.n)},
                        {"M_exponents", ms},
                        {"N0", "p^" + std::to_string(row.n0)},
                        {"N1", "p^" + std::to_string(row.n1)},
                        {"M1", "p^" + std::to_string(row.m1)},
                        {"upper", "N^{" + qtext(row.upper) + "}"},
                        {"lower", row.lower},
                        {"lower_conjectured_sharp", row.lower_conjectured_sharp}});
    }
    r.pass = ok && rows.size() == 11;
    r.details = {{"rows", rows}};
    return r;
}

CheckResult check_counting(const Json& params) {
    CheckResult r;
    const long configs = get_long(params, "recount_configs", 100);
    const std::uint64_t seed = static_cast<std::uint64_t>(get_long(params, "seed", 1));
    const long ell_max = get_long(params, "ell_max", 50);
    r.params = {{"recount_configs", configs}, {"seed", seed}, {"ell_max", ell_max},
                {"z", Json::array({"i", "2i", "0.3+0.9i"})}, {"delta", Json::array({1e-4, 1e-2, 1e-1})},
                {"N2", Json::array({1, 2, 3, 5, 6})}};
    long compared = 0;
    const long mismatches = double_box_recount(configs, seed, &compared);
    UpperPoint z3;
    z3.x = Rational(3, 10);
    z3.y2 = Rational(81, 100);
    const std::vector<UpperPoint> zs{UpperPoint::from_double(0, 1), UpperPoint::from_double(0, 2), z3};
    CountSweep s = count_sweep(zs, ell_max, {1e-4, 1e-2, 1e-1}, {1, 2, 3, 5, 6});
    const CountRow* arg = nullptr;
    for (const auto& row : s.rows)
        if (!arg || row.ratio > arg->ratio) arg = &row;
    r.measured = s.max_ratio;
    r.locked_value = locked::kCounting;
    r.pass = mismatches == 0 && compared == configs && s.monotone_ok && s.max_ratio <= locked::kCounting;
    r.details = {{"recount_compared", compared},
                 {"recount_mismatches", mismatches},
                 {"rows", s.rows.size()},
                 {"monotone", s.monotone_ok}};
    if (arg)
        r.details["argmax"] = {{"z", arg->z}, {"ell", arg->ell}, {"delta", arg->delta}, {"N2", arg->N2},
                               {"count", arg->count}, {"bound", arg->bound}};
    return r;
}

CheckResult check_amplifier(const Json& params) {
    CheckResult r;
    const long draws = get_long(params, "draws", 10000);
    const std::uint64_t seed = static_cast<std::uint64_t>(get_long(params, "seed", 1));
    r.params = {{"draws", draws}, {"seed", seed}};
    UnitSumSweep u = unit_sum_sweep(draws, seed);

    // hand values with omega(5) = i, omega(7) = zeta_3
    const long l1 = 5, l2 = 7;
    CentralValues omega{{l1, Root::make(4, 1)}, {l2, Root::make(3, 1)}};
    const Cyclo w1i = Root::make(4, 3).to_cyclo(), w2i = Root::make(3, 2).to_cyclo();
    struct Case {
        const char* name;
        long m, n;
        HeckeExpansion expect;
    };
    const std::vector<Case> cases = {
        {"(l,l)", l1, l1, {{1, Cyclo(1)}, {l1 * l1, w1i}}},
        {"(l^2,l^2)", l1 * l1, l1 * l1, {{1, Cyclo(1)}, {l1 * l1, w1i}, {l1 * l1 * l1 * l1, w1i * w1i}}},
        {"(l,l^2)", l1, l1 * l1, {{l1, w1i}, {l1 * l1 * l1, w1i * w1i}}},
        {"(l1,l2)", l1, l2, {{l1 * l2, w2i}}},
    };
    bool hecke_ok = true;
    Json hand = Json::array();
    for (const auto& c : cases) {
        HeckeExpansion e = hecke_convolution_expand(c.m, c.n, omega);
        const bool match = e == c.expect;
        bool neutral = hecke_multiply(e, {{1, Cyclo(1)}}, omega) == e;
        hecke_ok = hecke_ok && match && neutral;
        Json terms = Json::object();
        for (const auto& [l, coeff] : e) terms[std::to_string(l)] = coeff.to_string();
        hand.push_back({{"case", c.name}, {"terms", terms}, {"match", match}, {"identity_neutral", neutral}});
    }
    r.measured = u.min_sum;
    r.pass = u.violations == 0 && u.draws == draws && hecke_ok;
    r.details = {{"draws", u.draws}, {"violations", u.violations}, {"zero_draws", u.zero_draws},
                 {"min_sum", u.min_sum}, {"hecke", hand}};
    return r;
}

CheckResult check_bessel(const Json& params) {
    CheckResult r;
    const long t_points = get_long(params, "t_points", 25);
    const long r_points = get_long(params, "r_points", 60);
    r.params = {{"t", Json::array({1, 50})}, {"y_over_T", Json::array({0.01, 3})}, {"t_points", t_points},
                {"r_points", r_points}};
    const double coarse = bessel_k_it_trapezoid(0, 1, 0.05), fine = bessel_k_it_trapezoid(0, 1, 0.025);
    const double k01 = bessel_k_it(0, 1);
    const bool oracle_ok = std::abs(coarse - fine) < 1e-12 && std::abs(k01 - fine) < 1e-8;
    EnvelopeSweep s = bessel_envelope_sweep(1, 50, static_cast<int>(t_points), 0.01, 3, static_cast<int>(r_points));
    const bool envelope_ok = s.max_ratio <= locked::kBesselEnvelope && s.exponential_ratio < 1;
    Json tails = Json::array();
    bool tail_ok = true;
    double worst_tail = 0;
    for (auto [T, step] : std::vector<std::pair<double, double>>{{10, 0.1}, {20, 0.05}, {50, 0.2}}) {
        TailReport t = bessel_tail_mass(T, step);
        worst_tail = std::max(worst_tail, t.relative);
        tail_ok = tail_ok && t.relative < 1e-12;
        tails.push_back({{"T", T}, {"step", step}, {"threshold", t.threshold}, {"relative_mass", t.relative}});
    }
    r.measured = s.max_ratio;
    r.locked_value = locked::kBesselEnvelope;
    r.pass = oracle_ok && envelope_ok && tail_ok;
    r.details = {{"K0_1", k01},
                 {"trapezoid_coarse", coarse},
                 {"trapezoid_fine", fine},
                 {"oracle_ok", oracle_ok},
                 {"envelope_max", s.max_ratio},
                 {"envelope_argmax_t", s.argmax_t},
                 {"envelope_argmax_y_over_T", s.argmax_y_over_T},
                 {"transition_ratio", s.transition_ratio},
                 {"exponential_ratio", s.exponential_ratio},
                 {"oscillatory_ratio", s.oscillatory_ratio},
                 {"envelope_ok", envelope_ok},
                 {"tail", tails},
                 {"tail_worst", worst_tail},
                 {"tail_ok", tail_ok}};
    return r;
}

CheckResult check_kernel(const Json& params) {
    CheckResult r;
    const double T = get_double(params, "T", 10);
    r.params = {{"T", T}};
    ArchKernel k(T);
    KernelReport rep = kernel_verify(k);
    r.measured = rep.spectral_at_T;
    r.locked_value = locked::kKernelFloor;
    r.pass = rep.ok && rep.spectral_at_T >= locked::kKernelFloor;
    r.details = {{"scale", k.scale()},
                 {"support", rep.support_ok},
                 {"sup_bound", rep.sup_bound_ok},
                 {"decay_bound", rep.decay_bound_ok},
                 {"min_spectral", rep.min_spectral},
                 {"spectral_at_T", rep.spectral_at_T},
                 {"max_chain_error", rep.max_chain_error}};
    return r;
}

using CheckFn = CheckResult (*)(const Json&);

const std::map<std::string, CheckFn>& registry() {
    static const std::map<std::string, CheckFn> m = {
        {"normalization", check_normalization}, {"support", check_support},   {"jsupport", check_jsupport},
        {"avgsize", check_avgsize},             {"al", check_al},             {"twistcond", check_twistcond},
        {"delta", check_delta},                 {"idempotency", check_idempotency},
        {"integlemma", check_integlemma},       {"orthogonality", check_orthogonality},
        {"caseorder", check_caseorder},         {"table", check_table},       {"counting", check_counting},
        {"amplifier", check_amplifier},         {"bessel", check_bessel},     {"kernel", check_kernel},
    };
    return m;
}

}  // namespace

Json CheckResult::to_json() const {
    Json j;
    j["check"] = check;
    j["params"] = params;
    j["status"] = pass ? "pass" : "fail";
    j["measured_constant"] = measured ? Json(*measured) : Json(nullptr);
    j["locked_constant"] = locked_value ? Json(*locked_value) : Json(nullptr);
    j["details"] = details;
    return j;
}

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

CheckResult run_check(const std::string& name, const Json& params) {
    auto it = registry().find(name);
    require(it != registry().end(), ErrorCode::kInvalidArgument, "unknown check: " + name);
    require(params.is_object(), ErrorCode::kInvalidArgument, "check parameters must be a JSON object");
    CheckResult r = it->second(params);
    r.check = name;
    return r;
}

std::vector<CheckResult> run_checks(const std::vector<std::pair<std::string, Json>>& jobs, int workers) {
    std::vector<CheckResult> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                out[i] = run_check(jobs[i].first, jobs[i].second);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

Json results_json(const std::vector<CheckResult>& results) {
    Json arr = Json::array();
    for (const auto& r : results) arr.push_back(r.to_json());
    return arr;
}

// ----------------------------------------------------------------- cache

TableCache::TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    require(!ec, ErrorCode::kIo, "cannot create cache directory " + dir_.string());
}

std::filesystem::path TableCache::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<Json> TableCache::load(const std::string& key) const {
    std::ifstream in(path_for(key));
    if (!in) return std::nullopt;
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (j.value("version", -1) != kVersion || j.value("key", std::string()) != key) return std::nullopt;
    if (!j.contains("data")) return std::nullopt;
    return j["data"];
}

void TableCache::store(const std::string& key, const Json& data) const {
    const auto target = path_for(key);
    std::ostringstream tag;
    tag << std::this_thread::get_id();
    const auto tmp = target.string() + ".tmp." + tag.str();
    {
        std::ofstream out(tmp, std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + tmp);
        Json j;
        j["version"] = kVersion;
        j["key"] = key;
        j["data"] = data;
        out << j.dump(1) << "\n";
        require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    require(!ec, ErrorCode::kIo, "cannot rename " + tmp);
}

Json character_table(long p, int a, const TableCache* cache) {
    const std::string key = "chars_p" + std::to_string(p) + "_a" + std::to_string(a);
    if (cache)
        if (auto hit = cache->load(key)) return *hit;
    Json rows = Json::array();
    for (const auto& mu : enumerate_tilde_characters(p, a)) {
        if (mu.conductor() != a) continue;
        rows.push_back({{"character", mu.to_string()},
                        {"gauss", gauss_sum_at_power(-a, mu).to_string()},
                        {"epsilon", gl1_epsilon(GL1Char{mu, Root::make(1, 0)}).to_string()}});
    }
    Json data = {{"p", p}, {"conductor", a}, {"characters", rows}};
    if (cache) cache->store(key, data);
    return data;
}

Json epsilon_table(long p, int n_max, const TableCache* cache) {
    const std::string key = "eps_p" + std::to_string(p) + "_n" + std::to_string(n_max);
    if (cache)
        if (auto hit = cache->load(key)) return *hit;
    Json rows = Json::array();
    const GL1Char trivial = unramified_char(p, Root::make(1, 0));
    for (const auto& pi : build_catalog(p, n_max))
        rows.push_back({{"id", pi.id},
                        {"kind", rep_kind_name(pi.kind)},
                        {"n", pi.n},
                        {"m", pi.m},
                        {"params", pi.params},
                        {"epsilon", twist_epsilon(pi, trivial).to_string()}});
    Json data = {{"p", p}, {"n_max", n_max}, {"representations", rows}};
    if (cache) cache->store(key, data);
    return data;
}

}  // namespace pnf
