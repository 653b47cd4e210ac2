#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "illustrate/corpus.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

// ---------------------------------------------------------------------------
// Concept statistics

struct ConceptDistribution {
  double concepts_per_subsection = 0.0;
  double mentions_per_concept = 0.0;  // per (subsection, concept) pair
  double subsections_per_section_concept = 0.0;
  bool mentions_defined = true;  // false when no subsection has any concept
  std::size_t subsections = 0;
  std::size_t subsection_concepts = 0;
  std::size_t section_concepts = 0;
  std::map<std::size_t, std::size_t> concepts_histogram;
  std::map<std::size_t, std::size_t> mentions_histogram;
  std::map<std::size_t, std::size_t> spread_histogram;
};

ConceptDistribution concept_distribution(const Corpus& corpus, Split split = Split::all);

/// Occurrences of the concept's surface in the subsection text.
std::size_t mention_count(const Subsection& u, const Concept& c);

// ---------------------------------------------------------------------------
// Image-count regression

struct FeatureVector {
  double concepts = 0;
  double concept_mentions = 0;
  double words = 0;
  double paragraphs = 0;
  double pct_sec_concepts = 0;
  double pct_sec_concept_mentions = 0;
  double pct_sec_words = 0;
  double pct_sec_paragraphs = 0;
  double position = 0;
  Subject subject = Subject::business;

  static constexpr std::size_t kWidth = 12;
  /// Regressor column names; business is the reference subject level.
  static const std::array<const char*, kWidth>& names();
  std::array<double, kWidth> values() const;
};

FeatureVector extract_features(const Section& s, std::size_t u);

struct RegressionResult {
  std::vector<std::string> names;  // "intercept" first
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  double pearson_r = 0.0;
  double residual_variance = 0.0;
  std::size_t n = 0;
  std::size_t dof = 0;
  std::vector<std::string> dropped;  // regressors removed before fitting

  /// Prediction for one row given by regressor name (missing names read as 0).
  double predict(const std::map<std::string, double>& row) const;
  double predict(const FeatureVector& f) const;
};

/// Ordinary least squares with an intercept prepended. Fits through a
/// column-pivoted Householder QR; throws Error(numeric) naming collinear
/// columns when the design is rank deficient.
RegressionResult fit_ols(const std::vector<std::string>& names, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y);

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double t_test_p_value(double t, double dof);

struct FeatureTable {
  std::vector<std::string> subsection_ids;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

FeatureTable build_feature_table(const Corpus& corpus, Split split = Split::all);

/// Regression of gold image counts on the subsection features. Subject
/// columns that are constant zero across the corpus are dropped first.
RegressionResult fit_image_count_model(const Corpus& corpus, Split split = Split::all);

double pearson(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Similarity-based analyses

struct ExclusivityTally {
  std::size_t before = 0;
  std::size_t present = 0;
  std::size_t after = 0;
  std::size_t total() const { return before + present + after; }
  double share(std::size_t v) const { return total() ? static_cast<double>(v) / total() : 0.0; }
};

struct ExclusivityReport {
  std::map<std::string, ExclusivityTally> by_subject;  // plus "all"
};

/// For each gold image, the phrase with the highest similarity among the
/// phrases of the previous, own and next subsection (within the section)
/// decides the bucket. Ties go to the earliest phrase in document order.
ExclusivityReport exclusivity_analysis(const Corpus& corpus, const SimMatrix& m,
                                       const WindowConfig& window, Split split = Split::all);

struct TopKCoverage {
  std::size_t k = 0;
  double mean_fraction = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Fraction of subsection concepts mentioned in the union of the k phrases
/// most similar to any gold image of the subsection, averaged over
/// subsections with at least one gold image and one concept.
TopKCoverage topk_concept_coverage(const Corpus& corpus, const SimMatrix& m,
                                   const WindowConfig& window, std::size_t k,
                                   Split split = Split::all);

}  // namespace illustrate
