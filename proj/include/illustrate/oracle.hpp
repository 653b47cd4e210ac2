#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "illustrate/objectives.hpp"
#include "illustrate/random.hpp"

namespace illustrate {

struct SyntheticSpec {
  std::size_t n_images = 10;
  std::size_t n_concepts = 8;
  std::size_t n_phrases = 12;
  double mention_density = 0.25;
  double logit_scale = 2.0;
  double tau_quantile = 0.8;
};

/// Small random section: phrase/concept mentions, phrase x image softmax
/// probabilities, and the coverage table they induce under tau.
struct SyntheticInstance {
  std::uint64_t seed = 0;
  std::size_t n_images = 0;
  std::size_t n_concepts = 0;
  std::size_t n_phrases = 0;
  std::vector<std::vector<bool>> mentions;  // phrase x concept
  std::vector<std::vector<double>> sim;     // phrase x image, rows sum to 1
  double tau = 0.0;
  CoverageData data;                        // cov table + S({i})
};

SyntheticInstance make_instance(std::uint64_t seed, const SyntheticSpec& spec = {});

/// Images sharing identical concept sets, so G drops when a duplicate is added.
SyntheticInstance overlap_heavy_instance();

inline constexpr std::size_t kMaxExhaustiveImages = 20;
inline constexpr std::uint64_t kMaxExhaustiveSubsets = 1'000'000;

struct OracleResult {
  std::vector<std::size_t> best_set;  // ascending candidate indices
  double best_value = 0.0;
  std::uint64_t evaluated = 0;
};

/// Number of subsets of size <= budget drawn from n items.
std::uint64_t subsets_up_to(std::size_t n, std::size_t budget);

/// Exact maximum over every subset of size <= budget. Ties resolve to the
/// lexicographically smallest candidate set. Throws Error(size) when the
/// instance is too large to enumerate.
OracleResult brute_force_opt(const SetObjective& f, std::size_t budget);

/// Random diminishing-returns trials on A ⊆ B, x ∉ B; returns the number of
/// trials where f(A+x)-f(A) < f(B+x)-f(B) - tol.
std::size_t check_submodular(const SetObjective& f, std::size_t trials, double tol, Rng& rng);

/// Random A ⊆ B trials; counts f(A) > f(B) + tol.
std::size_t check_monotone(const SetObjective& f, std::size_t trials, Rng& rng, double tol = 0.0);

/// True iff f(A + x) >= f(A) - tol for every A and x (exhaustive; n <= 20).
bool verify_monotone_exhaustive(const SetObjective& f, double tol = 0.0);

struct RatioEntry {
  std::uint64_t seed = 0;
  double opt = 0.0;
  double greedy = 0.0;
  double ratio = 1.0;
  bool monotone = false;
  std::size_t submodular_violations = 0;
  bool bound_checked = false;  // set when the (1 - 1/e) guarantee applies
  bool bound_holds = true;
};

struct RatioReport {
  std::vector<RatioEntry> entries;
  double min_ratio = 1.0;     // over monotone instances
  double median_ratio = 1.0;  // over monotone instances
  std::size_t monotone_instances = 0;
  std::size_t bound_failures = 0;
};

inline const double kGreedyBound = 1.0 - 1.0 / std::exp(1.0);

RatioReport greedy_ratio_report(std::span<const SyntheticInstance> instances, Objective objective,
                                std::size_t budget, double beta = 1.0, std::size_t trials = 200,
                                double tol = 1e-9);

}  // namespace illustrate
