#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pnf {

using Json = nlohmann::ordered_json;

/// Regression-locked constants, recorded from the first full run.
namespace locked {
inline constexpr double kAverageSize = 1.4143;         ///< max rms * q^{r/4} over the catalog
inline constexpr long kDeltaFloorNum = 2;               ///< min delta * q^{n1 + m1} over the exact-mode list
inline constexpr long kDeltaFloorDen = 3;
inline constexpr long kOrthoLowNum = 9, kOrthoLowDen = 8;    ///< diagonal / q^{-2 n1}, p = 3, n = 2
inline constexpr long kOrthoHighNum = 9, kOrthoHighDen = 8;
inline constexpr double kCounting = 1.12;               ///< max N / comparison bound over the grid
inline constexpr double kBesselEnvelope = 6.25;         ///< max t e^{pi t} |K|^2 / f(y) over the grid
inline constexpr double kKernelFloor = 1.2;             ///< h(T) for T = 10
}  // namespace locked

struct CheckResult {
    std::string check;
    Json params = Json::object();
    bool pass = false;
    std::optional<double> measured;
    std::optional<double> locked_value;
    Json details = Json::object();

    Json to_json() const;
};

/// Names accepted by run_check.
const std::vector<std::string>& check_names();

/// Runs one named check; unknown names and bad parameters throw Error.
CheckResult run_check(const std::string& name, const Json& params);

/// Runs jobs on a pool of workers; results keep the job order.
std::vector<CheckResult> run_checks(const std::vector<std::pair<std::string, Json>>& jobs, int workers);

/// Array of results as one JSON document.
Json results_json(const std::vector<CheckResult>& results);

/// Versioned JSON files under a directory, written through a temporary file and a rename.
class TableCache {
public:
    static constexpr int kVersion = 1;

    explicit TableCache(std::filesystem::path dir);

    /// Contents stored under key, if present with the current version.
    std::optional<Json> load(const std::string& key) const;
    void store(const std::string& key, const Json& data) const;
    std::filesystem::path path_for(const std::string& key) const;

private:
    std::filesystem::path dir_;
};

/// Gauss sums and GL1 epsilon factors for the characters of exact conductor a.
Json character_table(long p, int a, const TableCache* cache = nullptr);

/// Catalog entries with their epsilon(1/2, pi) values.
Json epsilon_table(long p, int n_max, const TableCache* cache = nullptr);

}  // namespace pnf
