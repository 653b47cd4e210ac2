#include "illustrate/evalmetrics.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "illustrate/error.hpp"
#include "illustrate/parallel.hpp"

namespace illustrate {

std::vector<std::string> rank_images(std::span<const double> relevance,
                                     std::span<const std::string> image_ids) {
  if (relevance.size() != image_ids.size()) {
    throw Error(ErrorKind::dimension, "relevance vector does not match image ids");
  }
  std::vector<std::size_t> idx(relevance.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (relevance[a] != relevance[b]) return relevance[a] > relevance[b];
    return image_ids[a] < image_ids[b];
  });
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(image_ids[i]);
  return out;
}

std::vector<std::string> rank_images(const Subsection& u, const SimMatrix& m,
                                     const WindowConfig& window) {
  auto rel = aggregate_relevance(u, m, window);
  return rank_images(rel, m.image_ids());
}

PrecisionRecall precision_recall_at(std::span<const std::string> ranking,
                                    std::span<const std::string> gold, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::usage, "cutoff K must be at least 1");
  if (gold.empty()) throw Error(ErrorKind::empty_input, "empty gold set");
  std::unordered_set<std::string> g(gold.begin(), gold.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) hits += g.count(ranking[i]);
  return {static_cast<double>(hits) / static_cast<double>(k),
          static_cast<double>(hits) / static_cast<double>(g.size())};
}

double mean_gold_rank(std::span<const std::string> ranking, std::span<const std::string> gold) {
  if (gold.empty()) throw Error(ErrorKind::empty_input, "empty gold set");
  std::unordered_map<std::string_view, std::size_t> rank;
  rank.reserve(ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) rank.emplace(ranking[i], i + 1);
  double total = 0.0;
  for (const auto& g : gold) {
    auto it = rank.find(g);
    if (it == rank.end()) throw Error(ErrorKind::lookup, "gold image '" + g + "' is not ranked");
    total += static_cast<double>(it->second);
  }
  return total / static_cast<double>(gold.size());
}

SubsectionMetrics evaluate_ranking(const std::string& subsection_id,
                                   std::span<const std::string> ranking,
                                   std::span<const std::string> gold) {
  SubsectionMetrics s;
  s.subsection_id = subsection_id;
  s.gold = gold.size();
  for (std::size_t j = 0; j < kCutoffs.size(); ++j) {
    auto pr = precision_recall_at(ranking, gold, kCutoffs[j]);
    s.precision[j] = pr.precision;
    s.recall[j] = pr.recall;
  }
  auto pr = precision_recall_at(ranking, gold, gold.size());
  s.precision_r = pr.precision;
  s.recall_r = pr.recall;
  s.mean_gold_rank = mean_gold_rank(ranking, gold);
  return s;
}

EvalReport evaluate(const Corpus& corpus, const SimMatrix& m, const WindowConfig& window,
                    Split split, std::size_t parallelism) {
  EvalReport report;
  report.bank_size = m.cols();
  std::vector<const Subsection*> work;
  for (const Section* s : corpus.sections(split)) {
    for (const auto& u : s->subsections) {
      if (u.gold_images.empty()) {
        ++report.skipped;
      } else {
        work.push_back(&u);
      }
    }
  }
  report.subsections.resize(work.size());
  parallel_for(work.size(), parallelism, [&](std::size_t i) {
    auto ranking = rank_images(*work[i], m, window);
    report.subsections[i] = evaluate_ranking(work[i]->id, ranking, work[i]->gold_images);
  });
  report.evaluated = work.size();
  if (work.empty()) return report;
  // Reduction in document order keeps the sums identical for every degree.
  for (const auto& s : report.subsections) {
    for (std::size_t j = 0; j < kCutoffs.size(); ++j) {
      report.precision[j] += s.precision[j];
      report.recall[j] += s.recall[j];
    }
    report.precision_r += s.precision_r;
    report.recall_r += s.recall_r;
    report.mean_gold_rank += s.mean_gold_rank;
  }
  const double n = static_cast<double>(work.size());
  for (std::size_t j = 0; j < kCutoffs.size(); ++j) {
    report.precision[j] /= n;
    report.recall[j] /= n;
  }
  report.precision_r /= n;
  report.recall_r /= n;
  report.mean_gold_rank /= n;
  return report;
}

}  // namespace illustrate
