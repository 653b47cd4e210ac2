#include "illustrate/objectives.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "illustrate/error.hpp"

namespace illustrate {

std::size_t ConceptSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

ConceptSet& ConceptSet::operator|=(const ConceptSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

ConceptSet& ConceptSet::operator&=(const ConceptSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

std::size_t ConceptSet::count_new(const ConceptSet& covered) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(words_[i] & ~covered.words_[i]));
  }
  return n;
}

std::size_t ConceptSet::count_common(const ConceptSet& covered) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(words_[i] & covered.words_[i]));
  }
  return n;
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::local: return "local";
    case Mode::global: return "global";
    case Mode::joint: return "joint";
  }
  return "joint";
}

Mode parse_mode(std::string_view name) {
  if (name == "local") return Mode::local;
  if (name == "global") return Mode::global;
  if (name == "joint") return Mode::joint;
  throw Error(ErrorKind::usage, "unknown mode '" + std::string(name) + "'");
}

namespace {

double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::usage, std::string("cannot parse ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

TauPolicy parse_tau(std::string_view text) {
  if (!text.empty() && text.front() == 'q') {
    return TauPolicy::quantile(parse_double(text.substr(1), "tau quantile"));
  }
  return TauPolicy::fixed(parse_double(text, "tau"));
}

std::string to_string(const TauPolicy& tau) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, tau.value);
  return (tau.kind == TauPolicy::Kind::quantile ? "q" : "") + std::string(buf, res.ptr);
}

void ObjectiveConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::usage, "beta must be a finite non-negative number");
  }
  if (tau.kind == TauPolicy::Kind::fixed && !(tau.value > 0.0 && tau.value < 1.0)) {
    throw Error(ErrorKind::usage, "fixed tau must lie strictly between 0 and 1");
  }
  if (tau.kind == TauPolicy::Kind::quantile && !(tau.value >= 0.0 && tau.value <= 1.0)) {
    throw Error(ErrorKind::usage, "tau quantile must lie in [0, 1]");
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "quantile of an empty sample");
  double h = static_cast<double>(values.size() - 1) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto lo_it = values.begin() + static_cast<std::ptrdiff_t>(lo);
  std::nth_element(values.begin(), lo_it, values.end());
  double lo_v = *lo_it;
  if (lo + 1 >= values.size()) return lo_v;
  double hi_v = *std::min_element(lo_it + 1, values.end());
  return lo_v + (h - static_cast<double>(lo)) * (hi_v - lo_v);
}

// ---------------------------------------------------------------------------

const char* to_string(Objective f) {
  switch (f) {
    case Objective::local: return "S";
    case Objective::coverage: return "C";
    case Objective::redundancy: return "R";
    case Objective::neg_redundancy: return "-R";
    case Objective::global: return "G";
    case Objective::joint: return "J";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  if (name == "S" || name == "local") return Objective::local;
  if (name == "C" || name == "coverage") return Objective::coverage;
  if (name == "R" || name == "redundancy") return Objective::redundancy;
  if (name == "-R" || name == "neg_redundancy") return Objective::neg_redundancy;
  if (name == "G" || name == "global") return Objective::global;
  if (name == "J" || name == "joint") return Objective::joint;
  throw Error(ErrorKind::usage, "unknown objective '" + std::string(name) + "'");
}

SetObjective::SetObjective(Objective kind, const CoverageData& data, double beta)
    : kind_(kind), data_(&data) {
  switch (kind) {
    case Objective::local: w_s_ = 1.0; break;
    case Objective::coverage: w_c_ = 1.0; break;
    case Objective::redundancy: w_r_ = 1.0; break;
    case Objective::neg_redundancy: w_r_ = -1.0; break;
    case Objective::global: w_c_ = 1.0; w_r_ = -1.0; break;
    case Objective::joint:
      w_s_ = 1.0;
      w_c_ = beta;
      w_r_ = -beta;
      break;
  }
}

double SetObjective::combine(double s, std::size_t c, std::size_t r) const {
  return w_s_ * s + (w_c_ * static_cast<double>(c) + w_r_ * static_cast<double>(r));
}

std::size_t coverage_count(const CoverageData& data, std::span<const std::size_t> set) {
  ConceptSet covered(data.n_concepts);
  for (std::size_t x : set) covered |= data.covers[x];
  return covered.count();
}

std::size_t total_coverings(const CoverageData& data, std::span<const std::size_t> set) {
  std::size_t n = 0;
  for (std::size_t x : set) n += data.covers[x].count();
  return n;
}

double SetObjective::value(std::span<const std::size_t> set) const {
  double s = 0.0;
  for (std::size_t x : set) s += data_->modular[x];
  std::size_t c = coverage_count(*data_, set);
  std::size_t r = total_coverings(*data_, set) - c;
  return combine(s, c, r);
}

SetObjective::State::State(const SetObjective& f) : f_(&f), covered_(f.data().n_concepts) {}

double SetObjective::State::gain(std::size_t x) const {
  const auto& covers = f_->data().covers[x];
  std::size_t fresh = covers.count_new(covered_);
  std::size_t repeat = covers.count_common(covered_);
  return f_->combine(f_->data().modular[x], fresh, repeat);
}

void SetObjective::State::add(std::size_t x) {
  value_ += gain(x);
  covered_ |= f_->data().covers[x];
}

// ---------------------------------------------------------------------------

SectionModel::SectionModel(const Section& section, const SimMatrix& sim,
                           const WindowConfig& window, const TauPolicy& tau)
    : section_(&section), sim_(&sim) {
  order_.resize(sim.cols());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return sim.image_ids()[a] < sim.image_ids()[b];
  });

  std::map<TokenSeq, std::size_t> concept_index;
  std::vector<std::vector<std::size_t>> sub_concept_idx(section.subsections.size());
  for (std::size_t u = 0; u < section.subsections.size(); ++u) {
    for (const auto& c : section.subsections[u].concepts) {
      auto [it, inserted] = concept_index.emplace(c.surface, concepts_.size());
      if (inserted) concepts_.push_back(c.surface);
      sub_concept_idx[u].push_back(it->second);
    }
  }
  const std::size_t n_concepts = concepts_.size();

  rows_.resize(section.subsections.size());
  mentions_.resize(section.subsections.size());
  sub_concepts_.assign(section.subsections.size(), ConceptSet(n_concepts));
  for (std::size_t u = 0; u < section.subsections.size(); ++u) {
    const auto& sub = section.subsections[u];
    for (std::size_t c : sub_concept_idx[u]) sub_concepts_[u].set(c);
    auto ranges = window_ranges(sub.tokens.size(), window);
    for (std::size_t l = 0; l < ranges.size(); ++l) {
      rows_[u].push_back(sim.phrase_row(phrase_id(sub.id, l)));
      std::span<const std::string> tokens(sub.tokens.data() + ranges[l].begin,
                                          ranges[l].end - ranges[l].begin);
      ConceptSet mentioned(n_concepts);
      for (std::size_t c = 0; c < n_concepts; ++c) {
        if (contains_run(tokens, concepts_[c])) mentioned.set(c);
      }
      mentions_[u].push_back(std::move(mentioned));
    }
  }

  if (tau.kind == TauPolicy::Kind::fixed) {
    tau_ = tau.value;
  } else {
    std::vector<double> values;
    for (const auto& rows : rows_) {
      for (std::size_t r : rows) {
        auto p = sim.prob_row(r);
        values.insert(values.end(), p.begin(), p.end());
      }
    }
    tau_ = values.empty() ? 1.0 : quantile(std::move(values), tau.value);
  }

  const std::size_t n = order_.size();
  const std::size_t n_sub = section.subsections.size();
  sub_scores_.assign(n * n_sub, 0.0);
  data_.n_concepts = n_concepts;
  data_.covers.assign(n, ConceptSet(n_concepts));
  for (std::size_t u = 0; u < n_sub; ++u) {
    for (std::size_t l = 0; l < rows_[u].size(); ++l) {
      auto p = sim.prob_row(rows_[u][l]);
      const ConceptSet& mentioned = mentions_[u][l];
      bool any_mention = !mentioned.empty();
      for (std::size_t k = 0; k < n; ++k) {
        double v = p[order_[k]];
        sub_scores_[k * n_sub + u] += v;
        if (any_mention && v >= tau_) data_.covers[k] |= mentioned;
      }
    }
  }
  data_.modular.resize(n);
  for (std::size_t k = 0; k < n; ++k) data_.modular[k] = section_score(k);
}

const std::string& SectionModel::image_id(std::size_t k) const {
  return sim_->image_ids()[order_[k]];
}

std::size_t SectionModel::candidate(std::string_view image_id) const {
  const auto& ids = sim_->image_ids();
  auto it = std::lower_bound(order_.begin(), order_.end(), image_id,
                             [&](std::size_t c, std::string_view id) { return ids[c] < id; });
  if (it == order_.end() || ids[*it] != image_id) {
    throw Error(ErrorKind::lookup, "unknown image id '" + std::string(image_id) + "'");
  }
  return static_cast<std::size_t>(it - order_.begin());
}

double SectionModel::local_score(std::size_t k, std::size_t u) const {
  return sub_scores_[k * n_subsections() + u];
}

double SectionModel::section_score(std::size_t k) const {
  double total = 0.0;
  for (std::size_t u = 0; u < n_subsections(); ++u) total += local_score(k, u);
  return total;
}

ConceptSet SectionModel::subsection_covers(std::size_t k, std::size_t u) const {
  ConceptSet out(n_concepts());
  std::size_t col = order_[k];
  for (std::size_t l = 0; l < rows_[u].size(); ++l) {
    if (sim_->prob(rows_[u][l], col) >= tau_) out |= mentions_[u][l];
  }
  out &= sub_concepts_[u];
  return out;
}

std::size_t SectionModel::subsection_coverage(std::size_t k, std::size_t u) const {
  return subsection_covers(k, u).count();
}

// ---------------------------------------------------------------------------

double score_local(const SectionModel& m, std::span<const std::size_t> images, std::size_t u) {
  double total = 0.0;
  for (std::size_t k : images) total += m.local_score(k, u);
  return total;
}

double score_section(const SectionModel& m, std::span<const std::size_t> images) {
  double total = 0.0;
  for (std::size_t k : images) total += m.section_score(k);
  return total;
}

bool cov(const SectionModel& m, std::size_t concept_index, std::size_t image) {
  return m.covers(image).test(concept_index);
}

std::size_t coverage(const SectionModel& m, std::span<const std::size_t> images) {
  return coverage_count(m.coverage_data(), images);
}

std::size_t redundancy(const SectionModel& m, std::span<const std::size_t> images) {
  return total_coverings(m.coverage_data(), images) - coverage(m, images);
}

double score_global(const SectionModel& m, std::span<const std::size_t> images) {
  return static_cast<double>(coverage(m, images)) - static_cast<double>(redundancy(m, images));
}

double score_joint(const SectionModel& m, std::span<const std::size_t> images, double beta) {
  return score_section(m, images) + beta * score_global(m, images);
}

}  // namespace illustrate
