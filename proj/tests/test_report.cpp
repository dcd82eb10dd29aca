#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "pnf/error.hpp"
#include "pnf/report.hpp"
#include "pnf/reps.hpp"

using namespace pnf;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pnf_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

long primitive_count(long p, int a) {
    if (a == 1) return p - 2;
    long out = (p - 1) * (p - 1);
    for (int i = 0; i < a - 2; ++i) out *= p;
    return out;
}

}  // namespace

TEST_CASE("table cache round trip, version and key checks, no temporaries left") {
    const auto dir = fresh_dir("cache");
    TableCache cache(dir);
    CHECK_FALSE(cache.load("alpha").has_value());
    const Json data = {{"x", 1}, {"y", Json::array({1, 2, 3})}};
    cache.store("alpha", data);
    auto hit = cache.load("alpha");
    REQUIRE(hit.has_value());
    CHECK(*hit == data);
    for (const auto& e : std::filesystem::directory_iterator(dir))
        CHECK(e.path().extension() == ".json");

    Json stale = Json::parse(std::ifstream(cache.path_for("alpha")));
    stale["version"] = TableCache::kVersion + 1;
    std::ofstream(cache.path_for("alpha")) << stale.dump();
    CHECK_FALSE(cache.load("alpha").has_value());

    std::ofstream(cache.path_for("beta")) << "{ not json";
    CHECK_FALSE(cache.load("beta").has_value());

    cache.store("gamma", data);
    std::filesystem::copy_file(cache.path_for("gamma"), cache.path_for("delta"));
    CHECK_FALSE(cache.load("delta").has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("character table counts primitive characters and is served from the cache") {
    const auto dir = fresh_dir("chars");
    TableCache cache(dir);
    for (long p : {3L, 5L})
        for (int a = 1; a <= 2; ++a) {
            const Json fresh = character_table(p, a, &cache);
            CHECK(static_cast<long>(fresh["characters"].size()) == primitive_count(p, a));
            CHECK(std::filesystem::exists(cache.path_for("chars_p" + std::to_string(p) + "_a" + std::to_string(a))));
            CHECK(character_table(p, a, &cache) == fresh);
            CHECK(character_table(p, a, nullptr) == fresh);
        }
    std::filesystem::remove_all(dir);
}

TEST_CASE("epsilon table lists the catalog and trivial-central forms have unit-free entries") {
    const Json t = epsilon_table(3, 2, nullptr);
    CHECK(t["representations"].size() == build_catalog(3, 2).size());
    bool saw_unramified = false;
    for (const auto& r : t["representations"])
        if (r["kind"] == "unramified_ps") {
            saw_unramified = true;
            CHECK(r["epsilon"] == "1|0:1");
        }
    CHECK(saw_unramified);
}

TEST_CASE("report fields, job order and determinism") {
    const std::vector<std::pair<std::string, Json>> jobs = {
        {"table", Json::object()},
        {"amplifier", {{"draws", 500}, {"seed", 3}}},
        {"caseorder", Json::object()},
        {"normalization", {{"p", 2}, {"n_max", 2}}},
    };
    const auto a = run_checks(jobs, 3);
    const auto b = run_checks(jobs, 1);
    REQUIRE(a.size() == jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) CHECK(a[i].check == jobs[i].first);
    CHECK(results_json(a).dump() == results_json(b).dump());
    const Json j = a[1].to_json();
    for (const char* key : {"check", "params", "status", "measured_constant", "locked_constant"})
        CHECK(j.contains(key));
    CHECK(j["status"] == "pass");
    CHECK(a[0].pass);
    CHECK(a[3].pass);
    CHECK(results_json(a)[2]["status"] == "fail");
    CHECK(results_json(a)[2]["details"]["corrected_split_closes"] == true);
}

TEST_CASE("seed changes sampled draws but not the verdict") {
    const auto a = run_check("amplifier", {{"draws", 2000}, {"seed", 1}});
    const auto b = run_check("amplifier", {{"draws", 2000}, {"seed", 2}});
    CHECK(a.pass);
    CHECK(b.pass);
    CHECK(a.details["zero_draws"] != b.details["zero_draws"]);
}

TEST_CASE("bad checks and parameters are rejected") {
    CHECK_THROWS_AS(run_check("nope", Json::object()), Error);
    CHECK_THROWS_AS(run_check("support", {{"p", "two"}}), Error);
    CHECK_THROWS_AS(run_check("support", Json::array()), Error);
    CHECK(std::find(check_names().begin(), check_names().end(), "idempotency") != check_names().end());
}

TEST_CASE("locked constants sit at or above the first-run measurements") {
    CHECK(locked::kAverageSize >= std::sqrt(2.0));
    CHECK(static_cast<double>(locked::kDeltaFloorNum) / locked::kDeltaFloorDen >= 1.0 / 8);
    const auto orth = run_check("orthogonality", Json::object());
    CHECK(orth.pass);
    REQUIRE(orth.measured.has_value());
    CHECK(*orth.measured == doctest::Approx(9.0 / 8));
}
