#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnf/pnf.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct ApiError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(pnf_status s) {
    if (s != PNF_OK) throw ApiError(std::string(pnf_status_name(s)) + ": " + pnf_last_error());
}

/// Takes ownership of a string returned by the library.
std::string take(char* s) {
    std::string out(s ? s : "");
    pnf_string_free(s);
    return out;
}

Json take_json(char* s) { return Json::parse(take(s)); }

struct Options {
    std::string out_path;
    std::string csv_path;
    std::string cache_dir = ".pnf_cache";
    std::uint64_t seed = 1;
    int workers = 0;
    bool quiet = false;
};

void log_line(const Options& o, const std::string& s) {
    if (!o.quiet) std::cerr << "[pnf] " << s << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp);
        f << text;
        if (!f) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot rename " + tmp);
}

void write_json(const Options& o, const Json& j) { write_text(o.out_path, j.dump(2) + "\n"); }

std::string csv_cell(const Json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

/// Rows of objects with a shared header taken from the first row.
void write_csv(const std::string& path, const Json& rows) {
    if (path.empty()) return;
    std::ostringstream os;
    if (!rows.empty()) {
        std::vector<std::string> keys;
        for (auto it = rows[0].begin(); it != rows[0].end(); ++it) keys.push_back(it.key());
        for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << keys[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << csv_cell(r.value(keys[i], Json()));
            os << "\n";
        }
    }
    write_text(path, os.str());
}

struct CacheHandle {
    pnf_cache* ptr = nullptr;
    explicit CacheHandle(const std::string& dir) {
        if (!dir.empty()) check(pnf_cache_open(dir.c_str(), &ptr));
    }
    ~CacheHandle() { pnf_cache_close(ptr); }
    CacheHandle(const CacheHandle&) = delete;
    CacheHandle& operator=(const CacheHandle&) = delete;
};

struct CatalogHandle {
    pnf_catalog* ptr = nullptr;
    CatalogHandle(long p, int n_max) { check(pnf_catalog_create(p, n_max, &ptr)); }
    ~CatalogHandle() { pnf_catalog_destroy(ptr); }
    CatalogHandle(const CatalogHandle&) = delete;
    CatalogHandle& operator=(const CatalogHandle&) = delete;
};

struct NewformHandle {
    pnf_newform* ptr = nullptr;
    NewformHandle(const CatalogHandle& cat, const std::string& id) {
        size_t index = 0;
        check(pnf_catalog_find(cat.ptr, id.c_str(), &index));
        check(pnf_newform_create(cat.ptr, index, &ptr));
    }
    ~NewformHandle() { pnf_newform_destroy(ptr); }
    NewformHandle(const NewformHandle&) = delete;
    NewformHandle& operator=(const NewformHandle&) = delete;
};

int default_n_max(long p) { return p == 5 ? 3 : 4; }

// ----------------------------------------------------------------- catalog

struct CatalogArgs {
    std::vector<long> primes{2, 3, 5};
    int n_max = -1;
    int char_conductor = 0;
};

int run_catalog(const Options& o, const CatalogArgs& a) {
    CacheHandle cache(o.cache_dir);
    Json out = Json::array();
    Json csv = Json::array();
    for (long p : a.primes) {
        const int n_max = a.n_max >= 0 ? a.n_max : default_n_max(p);
        CatalogHandle cat(p, n_max);
        char* s = nullptr;
        check(pnf_catalog_json(cat.ptr, &s));
        Json entry = take_json(s);
        check(pnf_epsilon_table(cache.ptr, p, n_max, &s));
        const Json eps = take_json(s);
        auto& reps = entry["representations"];
        for (std::size_t i = 0; i < reps.size(); ++i) {
            reps[i]["epsilon"] = eps["representations"][i]["epsilon"];
            csv.push_back(reps[i]);
        }
        if (a.char_conductor > 0) {
            Json chars = Json::array();
            for (int c = 1; c <= a.char_conductor; ++c) {
                check(pnf_character_table(cache.ptr, p, c, &s));
                chars.push_back(take_json(s));
            }
            entry["characters"] = chars;
        }
        out.push_back(entry);
    }
    write_json(o, out);
    write_csv(o.csv_path, csv);
    return 0;
}

// ----------------------------------------------------------------- whittaker

struct WhittakerArgs {
    long p = 2;
    int n_max = -1;
    std::string id;
    std::vector<std::string> g;
    int t = 0, l = 0;
    std::string v = "1";
    bool coset = false;
    int t_min = -10, t_max = 2;
};

int run_whittaker_eval(const Options& o, const WhittakerArgs& a) {
    CatalogHandle cat(a.p, a.n_max >= 0 ? a.n_max : default_n_max(a.p));
    NewformHandle W(cat, a.id);
    char* exact = nullptr;
    double re = 0, im = 0;
    Json out = {{"id", a.id}};
    if (a.coset) {
        check(pnf_newform_coset_value(W.ptr, a.t, a.l, a.v.c_str(), &exact, &re, &im));
        out["coset"] = {{"t", a.t}, {"l", a.l}, {"v", a.v}};
    } else {
        if (a.g.size() != 4) throw CLI::ValidationError("--g", "needs four entries a b c d");
        check(pnf_newform_eval(W.ptr, a.g[0].c_str(), a.g[1].c_str(), a.g[2].c_str(), a.g[3].c_str(), &exact, &re,
                               &im));
        out["g"] = a.g;
    }
    out["value"] = take(exact);
    out["re"] = re;
    out["im"] = im;
    write_json(o, out);
    return 0;
}

int run_whittaker_scan(const Options& o, const WhittakerArgs& a) {
    CatalogHandle cat(a.p, a.n_max >= 0 ? a.n_max : default_n_max(a.p));
    NewformHandle W(cat, a.id);
    char* s = nullptr;
    check(pnf_newform_scan(W.ptr, a.t_min, a.t_max, &s));
    const Json out = take_json(s);
    write_json(o, out);
    write_csv(o.csv_path, out["nonzero"]);
    return 0;
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
    std::vector<std::string> checks;
    std::vector<long> primes{2, 3, 5};
    int n_max = -1;
    int samples = 50;
    int eigen_samples = 10;
    long draws = 10000;
    long recount_configs = 100;
    double kernel_T = 10;
};

bool per_prime(const std::string& c) {
    return c == "normalization" || c == "support" || c == "jsupport" || c == "avgsize" || c == "al" ||
           c == "twistcond" || c == "delta" || c == "idempotency";
}

bool exact_mode(const std::string& c) { return c == "delta" || c == "idempotency"; }

Json build_jobs(const Options& o, const VerifyArgs& a, const std::vector<std::string>& names) {
    Json jobs = Json::array();
    for (const auto& c : names) {
        if (per_prime(c)) {
            for (long p : a.primes) {
                if (exact_mode(c) && p == 5 && a.n_max < 0) continue;
                Json params = {{"p", p}};
                if (a.n_max >= 0) params["n_max"] = a.n_max;
                if (c == "idempotency") {
                    params["samples"] = a.samples;
                    params["eigen_samples"] = a.eigen_samples;
                    params["seed"] = o.seed;
                }
                jobs.push_back({{"check", c}, {"params", params}});
            }
        } else if (c == "counting") {
            jobs.push_back({{"check", c}, {"params", {{"recount_configs", a.recount_configs}, {"seed", o.seed}}}});
        } else if (c == "amplifier") {
            jobs.push_back({{"check", c}, {"params", {{"draws", a.draws}, {"seed", o.seed}}}});
        } else if (c == "kernel") {
            jobs.push_back({{"check", c}, {"params", {{"T", a.kernel_T}}}});
        } else {
            jobs.push_back({{"check", c}, {"params", Json::object()}});
        }
    }
    return jobs;
}

int run_verify(const Options& o, const VerifyArgs& a) {
    char* s = nullptr;
    check(pnf_check_names(&s));
    const Json known = take_json(s);
    std::vector<std::string> names;
    for (const auto& c : a.checks) {
        if (c == "all") {
            for (const auto& k : known) names.push_back(k.get<std::string>());
            continue;
        }
        if (std::find(known.begin(), known.end(), Json(c)) == known.end())
            throw CLI::ValidationError("check", "unknown check " + c);
        names.push_back(c);
    }
    const Json jobs = build_jobs(o, a, names);
    const int workers = o.workers > 0 ? o.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    log_line(o, "seed=" + std::to_string(o.seed) + " workers=" + std::to_string(workers) +
                    " jobs=" + std::to_string(jobs.size()));
    int all_pass = 0;
    check(pnf_run_checks(jobs.dump().c_str(), workers, &s, &all_pass));
    const Json results = take_json(s);
    Json report = {{"tool", "pnf"}, {"version", pnf_version()}, {"seed", o.seed}, {"results", results}};
    write_json(o, report);
    Json csv = Json::array();
    for (const auto& r : results) {
        csv.push_back({{"check", r["check"]},
                       {"params", r["params"].dump()},
                       {"status", r["status"]},
                       {"measured_constant", r["measured_constant"]},
                       {"locked_constant", r["locked_constant"]}});
        log_line(o, r["check"].get<std::string>() + " " + r["params"].dump() + " " + r["status"].get<std::string>());
    }
    write_csv(o.csv_path, csv);
    return all_pass ? 0 : kExitFail;
}

// ----------------------------------------------------------------- count, bessel, bound, table

struct CountArgs {
    double x = 0, y = 1;
    long ell = 1;
    double delta = 0.01;
    long N2 = 1;
};

int run_count(const Options& o, const CountArgs& a) {
    char* s = nullptr;
    check(pnf_count(a.x, a.y, a.ell, a.delta, a.N2, &s));
    const Json out = take_json(s);
    write_json(o, out);
    write_csv(o.csv_path, out["matrices"]);
    return 0;
}

struct BesselArgs {
    std::vector<double> t{1};
    std::vector<double> y{1};
};

int run_bessel(const Options& o, const BesselArgs& a) {
    Json rows = Json::array();
    for (double t : a.t)
        for (double y : a.y) {
            double k = 0, ratio = 0, env = 0;
            check(pnf_bessel_envelope(t, y, &k, &ratio, &env));
            rows.push_back({{"t", t}, {"y", y}, {"K", k}, {"envelope", env}, {"ratio", ratio}});
        }
    write_json(o, rows);
    write_csv(o.csv_path, rows);
    return 0;
}

struct BoundArgs {
    long N = 1, M = 1;
    double Q = 1, N0g = 1, T = 10, y = 1;
};

int run_bound(const Options& o, const BoundArgs& a) {
    char* s = nullptr;
    check(pnf_level_invariants(a.N, a.M, &s));
    Json out = {{"level", take_json(s)}};
    check(pnf_fourier_bound(a.Q, a.N0g, a.T, a.y, &s));
    out["fourier"] = take_json(s);
    write_json(o, out);
    write_csv(o.csv_path, Json::array({out["level"]}));
    return 0;
}

int run_table(const Options& o) {
    char* s = nullptr;
    check(pnf_intro_table(&s));
    const Json rows = take_json(s);
    write_json(o, rows);
    Json csv = Json::array();
    for (const auto& r : rows) {
        Json row = r;
        row["m"] = r["m"].dump();
        csv.push_back(row);
    }
    write_csv(o.csv_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local newform, matrix coefficient and counting verification tool"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI file with option values; sections name subcommands");
    app.get_config_formatter_base()->arrayDelimiter(',');

    Options o;
    app.add_option("-o,--out", o.out_path, "JSON output file (default stdout)");
    app.add_option("--csv", o.csv_path, "CSV output file");
    app.add_option("--cache-dir", o.cache_dir, "Directory for cached character and epsilon tables")
        ->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for every sampled quantity")->capture_default_str();
    app.add_option("-j,--workers", o.workers, "Worker threads for verify (0 = hardware)")->capture_default_str();
    app.add_flag("-q,--quiet", o.quiet, "No log lines on stderr");
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "Print the effective configuration as INI and exit");

    auto* cat = app.add_subcommand("catalog", "List catalog representations with epsilon factors");
    CatalogArgs ca;
    cat->add_option("--primes", ca.primes, "Primes")->delimiter(',')->capture_default_str();
    cat->add_option("--n-max", ca.n_max, "Largest conductor exponent (default 4, 3 for p = 5)");
    cat->add_option("--characters", ca.char_conductor, "Add character tables up to this conductor exponent")
        ->check(CLI::Range(0, 4));

    auto* wh = app.add_subcommand("whittaker", "Evaluate newform Whittaker functions");
    wh->require_subcommand(1);
    wh->fallthrough();
    WhittakerArgs wa;
    auto* ev = wh->add_subcommand("eval", "W(g) for a matrix or a coset triple");
    auto* sc = wh->add_subcommand("scan", "Nonzero values over the coset window");
    for (auto* sub : {ev, sc}) {
        sub->add_option("--p", wa.p, "Prime")->check(CLI::IsMember({2, 3, 5}))->capture_default_str();
        sub->add_option("--n-max", wa.n_max, "Catalog range searched for the id");
        sub->add_option("--id", wa.id, "Catalog id")->required();
    }
    ev->add_option("--g", wa.g, "Matrix entries a b c d as rationals")->expected(4);
    ev->add_flag("--coset", wa.coset, "Evaluate at a(p^t) w n(p^{-l} v)");
    ev->add_option("--t", wa.t, "Coset t");
    ev->add_option("--l", wa.l, "Coset l");
    ev->add_option("--v", wa.v, "Coset v (rational unit)");
    sc->add_option("--t-min", wa.t_min, "Smallest t")->capture_default_str();
    sc->add_option("--t-max", wa.t_max, "Largest t")->capture_default_str();

    auto* ver = app.add_subcommand("verify", "Run verification checks; exit 0 iff all pass");
    VerifyArgs va;
    ver->add_option("checks", va.checks,
                    "Checks: normalization support jsupport avgsize al twistcond delta idempotency integlemma "
                    "orthogonality caseorder table counting amplifier bessel kernel, or all")
        ->required();
    ver->add_option("--primes", va.primes, "Primes for per-representation checks")
        ->delimiter(',')
        ->capture_default_str();
    ver->add_option("--n-max", va.n_max, "Override the conductor range");
    ver->add_option("--samples", va.samples, "Idempotency points per representation")->capture_default_str();
    ver->add_option("--eigen-samples", va.eigen_samples, "Eigenvector samples per representation")
        ->capture_default_str();
    ver->add_option("--draws", va.draws, "Amplifier constraint draws")->capture_default_str();
    ver->add_option("--recount-configs", va.recount_configs, "Double-box recount configurations")
        ->capture_default_str();
    ver->add_option("--kernel-T", va.kernel_T, "Spectral parameter for the kernel check")->capture_default_str();

    auto* cnt = app.add_subcommand("count", "Count lattice matrices near a point");
    CountArgs cta;
    cnt->add_option("--x", cta.x, "Re z")->capture_default_str();
    cnt->add_option("--y", cta.y, "Im z")->capture_default_str();
    cnt->add_option("--ell", cta.ell, "Determinant")->capture_default_str();
    cnt->add_option("--delta", cta.delta, "Invariant radius")->capture_default_str();
    cnt->add_option("--N2", cta.N2, "Divisibility of the lower-left entry")->capture_default_str();

    auto* bes = app.add_subcommand("bessel", "K_{it}(y) with the envelope ratio over a grid");
    BesselArgs ba;
    bes->add_option("--t", ba.t, "Orders")->delimiter(',')->capture_default_str();
    bes->add_option("--y", ba.y, "Arguments")->delimiter(',')->capture_default_str();

    auto* bnd = app.add_subcommand("bound", "Level invariants and the Whittaker-expansion bound");
    BoundArgs bda;
    bnd->add_option("--N", bda.N, "Level")->capture_default_str();
    bnd->add_option("--M", bda.M, "Conductor of the central character")->capture_default_str();
    bnd->add_option("--Q", bda.Q, "Product of p^{q(g_p)}")->capture_default_str();
    bnd->add_option("--N0g", bda.N0g, "Product of p^{n0(g_p)}")->capture_default_str();
    bnd->add_option("--T", bda.T, "Spectral parameter")->capture_default_str();
    bnd->add_option("--y", bda.y, "Height")->capture_default_str();

    auto* tab = app.add_subcommand("table", "Exponent table for prime-power levels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (dump_config) {
        std::cout << app.config_to_str(true, true);
        return 0;
    }
    try {
        if (*cat) return run_catalog(o, ca);
        if (*ev) return run_whittaker_eval(o, wa);
        if (*sc) return run_whittaker_scan(o, wa);
        if (*ver) return run_verify(o, va);
        if (*cnt) return run_count(o, cta);
        if (*bes) return run_bessel(o, ba);
        if (*bnd) return run_bound(o, bda);
        if (*tab) return run_table(o);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
