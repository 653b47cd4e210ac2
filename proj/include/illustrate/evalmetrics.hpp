#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "illustrate/corpus.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

inline constexpr std::array<std::size_t, 4> kCutoffs = {1, 5, 20, 100};

/// Image ids by descending relevance; equal relevance falls back to ascending id.
std::vector<std::string> rank_images(std::span<const double> relevance,
                                     std::span<const std::string> image_ids);
std::vector<std::string> rank_images(const Subsection& u, const SimMatrix& m,
                                     const WindowConfig& window);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Throws Error(empty_input) for an empty gold set and Error(usage) for k == 0.
PrecisionRecall precision_recall_at(std::span<const std::string> ranking,
                                    std::span<const std::string> gold, std::size_t k);

/// Mean 1-based rank of the gold images; throws Error(lookup) if one is absent.
double mean_gold_rank(std::span<const std::string> ranking, std::span<const std::string> gold);

struct SubsectionMetrics {
  std::string subsection_id;
  std::size_t gold = 0;
  std::array<double, kCutoffs.size()> precision{};
  std::array<double, kCutoffs.size()> recall{};
  double precision_r = 0.0;
  double recall_r = 0.0;
  double mean_gold_rank = 0.0;
};

struct EvalReport {
  std::size_t bank_size = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // subsections without gold images
  std::array<double, kCutoffs.size()> precision{};
  std::array<double, kCutoffs.size()> recall{};
  double precision_r = 0.0;
  double recall_r = 0.0;
  double mean_gold_rank = 0.0;
  std::vector<SubsectionMetrics> subsections;
};

SubsectionMetrics evaluate_ranking(const std::string& subsection_id,
                                   std::span<const std::string> ranking,
                                   std::span<const std::string> gold);

/// Macro average over subsections of the split that have at least one gold image.
EvalReport evaluate(const Corpus& corpus, const SimMatrix& m, const WindowConfig& window,
                    Split split = Split::all, std::size_t parallelism = 1);

}  // namespace illustrate
