#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"

#include "illustrate/assign.hpp"
#include "illustrate/corpus.hpp"
#include "illustrate/objectives.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

/// Everything a run depends on. Keys of the JSON form match the CLI flag
/// names with dashes replaced by underscores.
struct RunConfig {
  std::string corpus;
  std::string similarity;
  std::string bank;
  std::string output;

  Mode mode = Mode::joint;
  TauPolicy tau = TauPolicy::quantile(0.95);
  double beta = 1.0;
  std::string budget = "gold";
  AllocScore alloc_score = AllocScore::single_image;
  bool lazy = true;
  std::size_t window = 75;
  double overlap = 1.0 / 3.0;
  Aggregation agg = Aggregation::mean;
  Split split = Split::all;
  std::uint64_t seed = 42;
  std::size_t parallelism = 1;

  // analyze
  std::size_t topk = 10;

  // oracle
  std::size_t instances = 100;
  std::size_t images = 10;
  std::size_t concepts = 8;
  std::size_t phrases = 12;
  std::size_t oracle_budget = 3;
  Objective objective = Objective::global;
  std::size_t trials = 1000;
  double density = 0.25;

  WindowConfig window_config() const { return {window, overlap}; }
  ObjectiveConfig objective_config() const { return {tau, beta, mode}; }
  AssignConfig assign_config() const { return {objective_config(), alloc_score, lazy}; }

  void validate() const;
};

/// Overlays the keys present in `doc` onto `cfg`; unknown keys are a usage error.
void apply(RunConfig& cfg, const nlohmann::json& doc);
RunConfig run_config_from_json(const nlohmann::json& doc);

/// Full serialization.
nlohmann::json to_json(const RunConfig& cfg);
/// Serialization embedded in outputs. Output path and parallelism are left
/// out so reruns that differ only in those produce identical bytes.
nlohmann::json provenance(const RunConfig& cfg);

/// Accepts "1/3" style ratios as well as decimals.
double parse_ratio(const std::string& text);

}  // namespace illustrate
