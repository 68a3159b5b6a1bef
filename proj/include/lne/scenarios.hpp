#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lne/germs.hpp"
#include "lne/links.hpp"
#include "lne/medial.hpp"
#include "lne/tangency.hpp"

namespace lne {

struct RunConfig {
  TangencyConfig tangency = default_tangency_config();
  MedialParams medial;
  double grid_res = 1.0 / 128;  // grid spacing for plane medial extraction
  NormSpec norm = NormSpec::euclid();
  std::uint64_t seed = 0;
};

/// Throws InputError when an invariant of the configuration fails.
void validate(const RunConfig& config);

struct Scenario {
  std::string label;
  GermSet germ;
  bool has_expectations = true;
  Verdict expected_set = Verdict::LNE;
  Verdict expected_medial = Verdict::LNE;
  std::optional<double> expected_l_set;
  std::optional<double> expected_l_medial;
  std::string notes;
  Box medial_window;                        // plane grid extraction window
  std::optional<Point> medial_ray;          // expected axis direction, if a single ray
  std::function<Box(double)> medial_slab;   // per-scale window for space germs
};

std::vector<std::string> builtin_labels();
/// Throws RegistryError for an unknown label.
Scenario builtin(const std::string& label);
/// Scenario wrapper for a user germ: no expectations, window [-0.5, 0.5]^2.
Scenario custom_scenario(GermSet germ);

enum class Outcome { PASS, FAIL, INCONCLUSIVE };
std::string to_string(Outcome outcome);

struct Check {
  std::string name;
  Outcome status;
  std::string detail;
};

struct ScenarioResult {
  std::string label;
  std::size_t ambient_dim = 2;
  Verdict set_verdict = Verdict::UNDECIDED;
  Verdict medial_verdict = Verdict::UNDECIDED;
  std::optional<double> l_set;
  std::optional<double> l_medial;
  std::optional<GermExponent> set_exponent;  // curve germs
  LinkCriterion link;
  MedialAxisSample medial_axis;  // grid axis (plane) or slab axes (space)
  std::vector<MedialBranch> medial_branches;
  std::optional<GermExponent> medial_exponent;
  std::vector<Check> checks;
  Outcome outcome = Outcome::INCONCLUSIVE;
  bool has_expectations = true;
};

ScenarioResult run_scenario(const Scenario& scenario, const RunConfig& config);

nlohmann::json to_json(const ScenarioResult& result);
/// One row per scenario: label, verdicts, exponents, link verdict, outcome.
std::string scenarios_csv(const std::vector<ScenarioResult>& results);

}  // namespace lne
