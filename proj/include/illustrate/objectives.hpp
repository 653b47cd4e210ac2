#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "illustrate/corpus.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

/// Fixed-width bit set over the concepts of one section.
class ConceptSet {
 public:
  ConceptSet() = default;
  explicit ConceptSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t universe() const { return n_; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  ConceptSet& operator|=(const ConceptSet& other);
  ConceptSet& operator&=(const ConceptSet& other);

  /// |this \ covered|
  std::size_t count_new(const ConceptSet& covered) const;
  /// |this ∩ covered|
  std::size_t count_common(const ConceptSet& covered) const;

  friend bool operator==(const ConceptSet&, const ConceptSet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class Mode { local, global, joint };

const char* to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// tau is either a fixed probability or a per-section quantile of the
/// section's similarity values.
struct TauPolicy {
  enum class Kind { fixed, quantile };
  Kind kind = Kind::quantile;
  double value = 0.95;

  static TauPolicy fixed(double tau) { return {Kind::fixed, tau}; }
  static TauPolicy quantile(double q) { return {Kind::quantile, q}; }
};

/// Parses "0.01" as a fixed threshold and "q0.95" as a quantile.
TauPolicy parse_tau(std::string_view text);
std::string to_string(const TauPolicy& tau);

struct ObjectiveConfig {
  TauPolicy tau;
  double beta = 1.0;
  Mode mode = Mode::joint;

  void validate() const;
};

/// Linear-interpolated sample quantile (the common "type 7" definition).
double quantile(std::vector<double> values, double q);

// ---------------------------------------------------------------------------
// Generic coverage set functions over candidate indices 0..n-1.

struct CoverageData {
  std::size_t n_concepts = 0;
  std::vector<double> modular;      // S({i}) per candidate
  std::vector<ConceptSet> covers;   // concepts covered by candidate i

  std::size_t size() const { return modular.size(); }
};

enum class Objective {
  local,           // S
  coverage,        // C
  redundancy,      // R
  neg_redundancy,  // -R
  global,          // G = C - R
  joint,           // J = S + beta * G
};

const char* to_string(Objective f);
Objective parse_objective(std::string_view name);

/// value(A) = w_s * S(A) + w_c * C(A) + w_r * R(A) over a CoverageData.
class SetObjective {
 public:
  SetObjective(Objective kind, const CoverageData& data, double beta = 1.0);

  Objective kind() const { return kind_; }
  const CoverageData& data() const { return *data_; }
  std::size_t size() const { return data_->size(); }
  bool integer_valued() const { return w_s_ == 0.0; }

  double value(std::span<const std::size_t> set) const;
  double combine(double s, std::size_t c, std::size_t r) const;

  /// Marginal-gain tracker for building a set one element at a time.
  class State {
   public:
    explicit State(const SetObjective& f);
    double gain(std::size_t x) const;
    void add(std::size_t x);
    double value() const { return value_; }

   private:
    const SetObjective* f_;
    ConceptSet covered_;
    double value_ = 0.0;
  };

 private:
  Objective kind_;
  const CoverageData* data_;
  double w_s_ = 0.0;
  double w_c_ = 0.0;
  double w_r_ = 0.0;
};

std::size_t coverage_count(const CoverageData& data, std::span<const std::size_t> set);
std::size_t total_coverings(const CoverageData& data, std::span<const std::size_t> set);

// ---------------------------------------------------------------------------
// One section against one similarity matrix.

/// Precomputes, for every bank image, its section-level similarity mass,
/// per-subsection similarity mass and the section concepts it covers under
/// the resolved tau. Candidates are indexed in ascending image-id order, so
/// a smaller candidate index always means a lexicographically smaller id.
class SectionModel {
 public:
  SectionModel(const Section& section, const SimMatrix& sim, const WindowConfig& window,
               const TauPolicy& tau);

  const Section& section() const { return *section_; }
  const SimMatrix& sim() const { return *sim_; }
  double tau() const { return tau_; }

  std::size_t n_images() const { return order_.size(); }
  std::size_t n_subsections() const { return section_->subsections.size(); }
  std::size_t n_concepts() const { return concepts_.size(); }

  const std::string& image_id(std::size_t k) const;
  std::size_t column(std::size_t k) const { return order_[k]; }
  std::size_t candidate(std::string_view image_id) const;  // throws Error(lookup)

  /// Distinct section concepts, deduplicated by normalized surface.
  const std::vector<TokenSeq>& concepts() const { return concepts_; }
  /// Section-concept indices belonging to subsection u.
  const ConceptSet& subsection_concepts(std::size_t u) const { return sub_concepts_[u]; }
  /// Sim-matrix rows of subsection u's phrases.
  const std::vector<std::size_t>& phrase_rows(std::size_t u) const { return rows_[u]; }
  /// Section concepts mentioned by the phrase at (u, l).
  const ConceptSet& phrase_mentions(std::size_t u, std::size_t l) const { return mentions_[u][l]; }

  double local_score(std::size_t k, std::size_t u) const;  // S({i}, u)
  double section_score(std::size_t k) const;               // S({i}, s)
  const ConceptSet& covers(std::size_t k) const { return data_.covers[k]; }

  /// Concepts of subsection u covered by image k through u's own phrases.
  ConceptSet subsection_covers(std::size_t k, std::size_t u) const;
  std::size_t subsection_coverage(std::size_t k, std::size_t u) const;  // C({i}, u)

  /// Generic form used by greedy selection and the exhaustive oracle.
  const CoverageData& coverage_data() const { return data_; }

 private:
  const Section* section_;
  const SimMatrix* sim_;
  double tau_ = 1.0;
  std::vector<std::size_t> order_;
  std::vector<TokenSeq> concepts_;
  std::vector<ConceptSet> sub_concepts_;
  std::vector<std::vector<std::size_t>> rows_;
  std::vector<std::vector<ConceptSet>> mentions_;
  std::vector<double> sub_scores_;  // n_images x n_subsections
  CoverageData data_;
};

// Direct evaluations of the scoring functions; image sets are candidate indices.
double score_local(const SectionModel& m, std::span<const std::size_t> images, std::size_t u);
double score_section(const SectionModel& m, std::span<const std::size_t> images);
bool cov(const SectionModel& m, std::size_t concept_index, std::size_t image);
std::size_t coverage(const SectionModel& m, std::span<const std::size_t> images);
std::size_t redundancy(const SectionModel& m, std::span<const std::size_t> images);
double score_global(const SectionModel& m, std::span<const std::size_t> images);
double score_joint(const SectionModel& m, std::span<const std::size_t> images, double beta);

}  // namespace illustrate
