#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "illustrate/analysis.hpp"
#include "illustrate/corpus.hpp"
#include "illustrate/objectives.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

struct BudgetPolicy {
  enum class Kind { gold, fixed, predicted };
  Kind kind = Kind::gold;
  std::size_t fixed_n = 0;
  std::optional<RegressionResult> model;  // required for `predicted`

  static BudgetPolicy gold() { return {}; }
  static BudgetPolicy fixed(std::size_t n) { return {Kind::fixed, n, std::nullopt}; }
  static BudgetPolicy predicted(RegressionResult m) { return {Kind::predicted, 0, std::move(m)}; }
};

/// "gold", "fixed:N" or "predicted" (the model is attached separately).
BudgetPolicy parse_budget(std::string_view text);
std::string to_string(const BudgetPolicy& policy);

/// Per-subsection image quotas for a section.
std::vector<std::size_t> quotas(const Section& s, const BudgetPolicy& policy);

enum class AllocScore { single_image, full_set };

const char* to_string(AllocScore a);
AllocScore parse_alloc_score(std::string_view name);

struct AssignConfig {
  ObjectiveConfig objective;
  AllocScore alloc_score = AllocScore::single_image;
  bool lazy = true;
};

struct GreedyStep {
  std::size_t candidate = 0;
  double gain = 0.0;
};

/// Greedy maximization under |A| <= budget. Each step adds the candidate with
/// the largest marginal gain (ties: smallest index); stops early once the best
/// gain is <= 0.
std::vector<GreedyStep> greedy_select_naive(const SetObjective& f, std::size_t budget);
/// Same trajectory as the naive variant, using stale-bound lazy evaluation.
/// Only valid for submodular objectives; falls back to naive for R.
std::vector<GreedyStep> greedy_select(const SetObjective& f, std::size_t budget);

struct ImageDiagnostic {
  std::string image_id;
  std::string subsection_id;
  double gain = 0.0;          // greedy marginal gain (local mode: S({i},u))
  std::size_t coverage = 0;   // C({i},u)
  double similarity = 0.0;    // S({i},u)
};

struct Assignment {
  std::string section_id;
  Mode mode = Mode::joint;
  double tau = 0.0;
  double beta = 0.0;
  AllocScore alloc_score = AllocScore::single_image;
  std::vector<std::size_t> quotas;
  std::vector<std::string> selected;
  /// Every subsection in document order with its allocated images.
  std::vector<std::pair<std::string, std::vector<std::string>>> allocation;
  std::vector<ImageDiagnostic> diagnostics;
};

/// Subsection index for each selected candidate, processed in pick order.
/// Quotas act as capacities; throws Error(allocation) when the selection does
/// not fit.
std::vector<std::size_t> allocate(const SectionModel& model, std::span<const std::size_t> selected,
                                  std::span<const std::size_t> quotas, Mode mode, double beta,
                                  AllocScore alloc_score = AllocScore::single_image);

Assignment assign_local(const SectionModel& model, std::span<const std::size_t> quotas);

Assignment assign(const SectionModel& model, const AssignConfig& cfg,
                  std::span<const std::size_t> quotas);

/// Runs every section of the split (possibly in parallel) and returns the
/// results ordered by section id.
std::vector<Assignment> assign_corpus(const Corpus& corpus, const SimMatrix& sim,
                                      const WindowConfig& window, const AssignConfig& cfg,
                                      const BudgetPolicy& policy, Split split,
                                      std::size_t parallelism);

}  // namespace illustrate
