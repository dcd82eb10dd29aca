#include "pnf/pnf.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "pnf/amplifier.hpp"
#include "pnf/archimedean.hpp"
#include "pnf/assembly.hpp"
#include "pnf/error.hpp"
#include "pnf/report.hpp"
#include "pnf/whittaker.hpp"

struct pnf_catalog {
    long p = 2;
    int n_max = 0;
    std::vector<pnf::LocalRep> reps;
    std::vector<pnf::CatalogCoverage> coverage;
};

struct pnf_newform {
    std::shared_ptr<const pnf::Newform> W;
};

struct pnf_cache {
    pnf::TableCache cache;
};

namespace {

thread_local std::string g_last_error;

pnf_status to_status(pnf::ErrorCode code) { return static_cast<pnf_status>(static_cast<int>(code)); }

template <class F>
pnf_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return PNF_OK;
    } catch (const pnf::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PNF_ERR_INTERNAL;
    } catch (const pnf::Json::exception& e) {
        g_last_error = std::string("malformed JSON: ") + e.what();
        return PNF_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PNF_ERR_INTERNAL;
    }
}

void need(const void* ptr, const char* what) {
    pnf::require(ptr != nullptr, pnf::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(char** out, const pnf::Json& j) { *out = dup_string(j.dump()); }

pnf::Rational parse_rational(const char* s) {
    need(s, "rational entry");
    pnf::Rational q;
    pnf::require(q.set_str(s, 10) == 0, pnf::ErrorCode::kInvalidArgument, std::string("not a rational: ") + s);
    pnf::require(q.get_den() != 0, pnf::ErrorCode::kInvalidArgument, std::string("zero denominator: ") + s);
    q.canonicalize();
    return q;
}

void emit_value(const pnf::Cyclo& w, char** out_exact, double* re, double* im) {
    need(out_exact, "out_exact");
    const auto z = w.to_complex();
    if (re) *re = z.real();
    if (im) *im = z.imag();
    *out_exact = dup_string(w.to_string());
}

}  // namespace

extern "C" {

const char* pnf_version(void) { return "1.0.0"; }

const char* pnf_status_name(pnf_status status) {
    return pnf::error_code_name(static_cast<pnf::ErrorCode>(static_cast<int>(status)));
}

const char* pnf_last_error(void) { return g_last_error.c_str(); }

void pnf_string_free(char* s) { std::free(s); }

pnf_status pnf_catalog_create(long p, int n_max, pnf_catalog** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        pnf::require(p == 2 || p == 3 || p == 5, pnf::ErrorCode::kInvalidArgument, "catalog primes are 2, 3, 5");
        pnf::require(n_max >= 0 && n_max <= 4, pnf::ErrorCode::kInvalidArgument, "n_max must lie in [0, 4]");
        auto cat = std::make_unique<pnf_catalog>();
        cat->p = p;
        cat->n_max = n_max;
        cat->reps = pnf::build_catalog(p, n_max, &cat->coverage);
        *out = cat.release();
    });
}

void pnf_catalog_destroy(pnf_catalog* catalog) { delete catalog; }

pnf_status pnf_catalog_size(const pnf_catalog* catalog, size_t* out) {
    return guarded([&] {
        need(catalog, "catalog");
        need(out, "out");
        *out = catalog->reps.size();
    });
}

pnf_status pnf_catalog_json(const pnf_catalog* catalog, char** out_json) {
    return guarded([&] {
        need(catalog, "catalog");
        need(out_json, "out_json");
        pnf::Json reps = pnf::Json::array();
        for (std::size_t i = 0; i < catalog->reps.size(); ++i) {
            const auto& pi = catalog->reps[i];
            reps.push_back({{"index", i},
                            {"id", pi.id},
                            {"kind", pnf::rep_kind_name(pi.kind)},
                            {"p", pi.p},
                            {"n", pi.n},
                            {"n0", pi.n0},
                            {"n1", pi.n1},
                            {"m", pi.m},
                            {"m1", pi.m1},
                            {"params", pi.params}});
        }
        pnf::Json cov = pnf::Json::array();
        for (const auto& c : catalog->coverage)
            cov.push_back({{"n", c.n}, {"variant", c.variant}, {"present", c.present}, {"note", c.note}});
        emit(out_json, {{"p", catalog->p}, {"n_max", catalog->n_max}, {"representations", reps}, {"coverage", cov}});
    });
}

pnf_status pnf_catalog_find(const pnf_catalog* catalog, const char* id, size_t* out_index) {
    return guarded([&] {
        need(catalog, "catalog");
        need(id, "id");
        need(out_index, "out_index");
        for (std::size_t i = 0; i < catalog->reps.size(); ++i)
            if (catalog->reps[i].id == id) {
                *out_index = i;
                return;
            }
        pnf::fail(pnf::ErrorCode::kInvalidArgument, std::string("no catalog entry ") + id);
    });
}

pnf_status pnf_newform_create(const pnf_catalog* catalog, size_t index, pnf_newform** out) {
    return guarded([&] {
        need(catalog, "catalog");
        need(out, "out");
        *out = nullptr;
        pnf::require(index < catalog->reps.size(), pnf::ErrorCode::kInvalidArgument, "catalog index out of range");
        auto nf = std::make_unique<pnf_newform>();
        nf->W = std::make_shared<pnf::Newform>(catalog->reps[index]);
        *out = nf.release();
    });
}

void pnf_newform_destroy(pnf_newform* newform) { delete newform; }

pnf_status pnf_newform_eval(const pnf_newform* newform, const char* a, const char* b, const char* c, const char* d,
                            char** out_exact, double* out_re, double* out_im) {
    return guarded([&] {
        need(newform, "newform");
        pnf::Mat2 g(parse_rational(a), parse_rational(b), parse_rational(c), parse_rational(d));
        pnf::require(g.det() != 0, pnf::ErrorCode::kNotInvertible, "matrix is singular");
        emit_value(newform->W->value(g), out_exact, out_re, out_im);
    });
}

pnf_status pnf_newform_coset_value(const pnf_newform* newform, int t, int l, const char* v, char** out_exact,
                                   double* out_re, double* out_im) {
    return guarded([&] {
        need(newform, "newform");
        pnf::require(l >= 0 && l <= newform->W->n(), pnf::ErrorCode::kInvalidArgument, "l must lie in [0, n]");
        const pnf::Rational vq = parse_rational(v);
        pnf::require(vq != 0, pnf::ErrorCode::kInvalidArgument, "v must be a unit");
        emit_value(newform->W->coset_value(t, l, vq), out_exact, out_re, out_im);
    });
}

pnf_status pnf_newform_scan(const pnf_newform* newform, int t_min, int t_max, char** out_json) {
    return guarded([&] {
        need(newform, "newform");
        need(out_json, "out_json");
        pnf::require(t_min <= t_max, pnf::ErrorCode::kInvalidArgument, "t_min exceeds t_max");
        const auto& W = *newform->W;
        pnf::Json rows = pnf::Json::array();
        for (const auto& cell : pnf::verification_window(W.p(), W.n())) {
            if (cell.t < t_min || cell.t > t_max) continue;
            const pnf::Cyclo w = W.coset_value(cell.t, cell.l, pnf::Rational(cell.v));
            if (w.is_zero()) continue;
            rows.push_back({{"t", cell.t}, {"l", cell.l}, {"v", cell.v}, {"value", w.to_string()},
                            {"abs", std::abs(w.to_complex())}});
        }
        emit(out_json, {{"id", W.rep().id}, {"t_min", t_min}, {"t_max", t_max}, {"nonzero", rows}});
    });
}

pnf_status pnf_check_names(char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        emit(out_json, pnf::check_names());
    });
}

pnf_status pnf_run_checks(const char* jobs_json, int workers, char** out_json, int* out_all_pass) {
    return guarded([&] {
        need(jobs_json, "jobs_json");
        need(out_json, "out_json");
        const pnf::Json jobs = pnf::Json::parse(jobs_json);
        pnf::require(jobs.is_array(), pnf::ErrorCode::kInvalidArgument, "jobs must be a JSON array");
        std::vector<std::pair<std::string, pnf::Json>> list;
        for (const auto& j : jobs) {
            pnf::require(j.is_object() && j.contains("check") && j["check"].is_string(),
                         pnf::ErrorCode::kInvalidArgument, "each job needs a string field check");
            list.emplace_back(j["check"].get<std::string>(), j.value("params", pnf::Json::object()));
        }
        const auto results = pnf::run_checks(list, workers);
        bool all = true;
        for (const auto& r : results) all = all && r.pass;
        if (out_all_pass) *out_all_pass = all ? 1 : 0;
        emit(out_json, pnf::results_json(results));
    });
}

pnf_status pnf_bessel_k(double t, double y, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = pnf::bessel_k_it(t, y);
    });
}

pnf_status pnf_bessel_envelope(double t, double y, double* out_k, double* out_ratio, double* out_envelope) {
    return guarded([&] {
        const double k = pnf::bessel_k_it(t, y);
        if (out_k) *out_k = k;
        if (out_ratio) *out_ratio = pnf::bessel_bound_ratio(t, y);
        if (out_envelope) *out_envelope = pnf::bessel_envelope(t, y);
    });
}

pnf_status pnf_count(double x, double y, long ell, double delta, long N2, char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        pnf::require(std::isfinite(x) && std::isfinite(y) && y > 0, pnf::ErrorCode::kInvalidArgument,
                     "z must lie in the upper half plane");
        pnf::require(ell >= 1 && N2 >= 1, pnf::ErrorCode::kInvalidArgument, "ell and N2 must be positive");
        const pnf::UpperPoint z = pnf::UpperPoint::from_double(x, y);
        const auto mats = pnf::enumerate_close_lattice(z, ell, delta, N2);
        pnf::Json list = pnf::Json::array();
        for (const auto& g : mats)
            list.push_back({{"a", g.a}, {"b", g.b}, {"c", g.c}, {"d", g.d},
                            {"u", pnf::point_pair_invariant(z, g).get_str()}});
        const double bound = pnf::counting_bound_single(ell, delta, N2, z.y());
        emit(out_json, {{"z", z.to_string()},
                        {"ell", ell},
                        {"delta", delta},
                        {"N2", N2},
                        {"count", static_cast<long>(mats.size())},
                        {"bound", bound},
                        {"ratio", static_cast<double>(mats.size()) / bound},
                        {"matrices", list}});
    });
}

pnf_status pnf_level_invariants(long N, long M, char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        const auto L = pnf::level_invariants(N, M);
        emit(out_json, {{"N", L.N}, {"M", L.M}, {"N0", L.N0}, {"N1", L.N1}, {"N2", L.N2}, {"M1", L.M1},
                        {"bound", L.bound_text}});
    });
}

pnf_status pnf_fourier_bound(double Q, double N0g, double T, double y, char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        const auto f = pnf::fourier_bound_eval(Q, N0g, T, y);
        emit(out_json, {{"Q", Q}, {"N0g", N0g}, {"T", T}, {"y", y}, {"value", f.value}, {"form", f.form},
                        {"crossover_y", f.crossover_y}});
    });
}

pnf_status pnf_intro_table(char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        pnf::Json rows = pnf::Json::array();
        for (const auto& row : pnf::intro_table())
            rows.push_back({{"n", row.n}, {"m", row.ms}, {"n0", row.n0}, {"n1", row.n1}, {"m1", row.m1},
                            {"upper", row.upper.get_str()}, {"lower", row.lower},
                            {"lower_conjectured_sharp", row.lower_conjectured_sharp}});
        emit(out_json, rows);
    });
}

pnf_status pnf_cache_open(const char* dir, pnf_cache** out) {
    return guarded([&] {
        need(dir, "dir");
        need(out, "out");
        *out = nullptr;
        *out = new pnf_cache{pnf::TableCache(dir)};
    });
}

void pnf_cache_close(pnf_cache* cache) { delete cache; }

pnf_status pnf_character_table(pnf_cache* cache, long p, int a, char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        pnf::require(p >= 2 && a >= 1 && a <= 4, pnf::ErrorCode::kInvalidArgument, "need p >= 2 and 1 <= a <= 4");
        emit(out_json, pnf::character_table(p, a, cache ? &cache->cache : nullptr));
    });
}

pnf_status pnf_epsilon_table(pnf_cache* cache, long p, int n_max, char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        pnf::require(n_max >= 0 && n_max <= 4, pnf::ErrorCode::kInvalidArgument, "n_max must lie in [0, 4]");
        emit(out_json, pnf::epsilon_table(p, n_max, cache ? &cache->cache : nullptr));
    });
}

}  // extern "C"
