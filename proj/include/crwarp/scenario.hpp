#pragma once

#include "crwarp/chen.hpp"
#include "crwarp/immersion.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crwarp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "cr-warp-lab/1";
inline constexpr std::size_t kMaxGridPoints = 100000;

enum class ScenarioMode { kImmersion, kSynthetic, kLemmas };

struct SyntheticPayload {
  int n1 = 0;
  int n2 = 0;
  int m = 0;
  double c = 0.0;
  std::vector<Mat> h;  // 2m - n slices, n x n
  std::optional<Mat> tangent;
  bool split_dt = false;
  std::optional<WarpData> warp;
  std::optional<double> base_curvature;
  std::optional<double> fiber_curvature;
};

struct Scenario {
  std::string name;
  ScenarioMode mode = ScenarioMode::kImmersion;
  Tolerances tol;
  PlaneSearchBudget budget;
  std::optional<std::uint64_t> seed;

  // immersion
  std::optional<std::string> gallery_key;
  std::optional<ImmersionChart> chart;
  std::vector<std::vector<double>> points;
  std::vector<std::map<std::string, double>> point_parameters;  // gallery only

  std::optional<SyntheticPayload> synthetic;
  int lemma_count = 1000;
};

/// Validate a scenario document. Throws ConfigError naming the offending
/// field (dotted path).
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// Gallery scenario over a parameter grid (each entry: name -> values).
Scenario gallery_scenario(const std::string& key,
                          const std::vector<std::pair<std::string, std::vector<double>>>& grid,
                          std::optional<std::uint64_t> seed = std::nullopt);

struct ScenarioResult {
  Json report;
  std::size_t records = 0;
  std::size_t failures = 0;
  std::size_t boundary = 0;

  bool ok() const { return failures == 0; }
};

/// One record per point, in point order. Lemma-mode scenarios produce the
/// lemma-suite summary as their single record.
ScenarioResult run_scenario(const Scenario& scenario);

/// Aligned plain-text rendering of a report document.
std::string format_table(const Json& report);

struct LemmaSuiteSummary {
  Json document;
  bool ok = false;
};

/// Random constrained Lemma 1 instances, the constructed equality family,
/// and Lemma 2 / 3 residuals on random h for the dimension profiles
/// (2,1), (2,2), (4,2), (4,3); `count` instances of each.
LemmaSuiteSummary run_lemma_suite(std::uint64_t seed, int count,
                                  const Tolerances& tol = kDefaultTolerances);

}  // namespace crwarp
