#include "illustrate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "illustrate/error.hpp"

namespace illustrate {

std::size_t mention_count(const Subsection& u, const Concept& c) {
  return count_occurrences(u.tokens, c.surface);
}

ConceptDistribution concept_distribution(const Corpus& corpus, Split split) {
  ConceptDistribution d;
  double concept_total = 0.0;
  double mention_total = 0.0;
  double spread_total = 0.0;
  for (const Section* s : corpus.sections(split)) {
    std::set<TokenSeq> section_concepts;
    for (const auto& u : s->subsections) {
      ++d.subsections;
      concept_total += static_cast<double>(u.concepts.size());
      ++d.concepts_histogram[u.concepts.size()];
      for (const auto& c : u.concepts) {
        std::size_t m = mention_count(u, c);
        ++d.subsection_concepts;
        mention_total += static_cast<double>(m);
        ++d.mentions_histogram[m];
        section_concepts.insert(c.surface);
      }
    }
    for (const auto& surface : section_concepts) {
      std::size_t spread = 0;
      for (const auto& u : s->subsections) {
        if (contains_run(u.tokens, surface)) ++spread;
      }
      ++d.section_concepts;
      spread_total += static_cast<double>(spread);
      ++d.spread_histogram[spread];
    }
  }
  if (d.subsections) d.concepts_per_subsection = concept_total / static_cast<double>(d.subsections);
  if (d.subsection_concepts) {
    d.mentions_per_concept = mention_total / static_cast<double>(d.subsection_concepts);
  } else {
    d.mentions_defined = false;
  }
  if (d.section_concepts) {
    d.subsections_per_section_concept = spread_total / static_cast<double>(d.section_concepts);
  }
  return d;
}

// ---------------------------------------------------------------------------

const std::array<const char*, FeatureVector::kWidth>& FeatureVector::names() {
  static const std::array<const char*, kWidth> n = {
      "concepts",       "concept_mentions",         "words",         "paragraphs",
      "pct_sec_concepts", "pct_sec_concept_mentions", "pct_sec_words", "pct_sec_paragraphs",
      "position",       "subject_math",             "subject_science", "subject_social"};
  return n;
}

std::array<double, FeatureVector::kWidth> FeatureVector::values() const {
  return {concepts,
          concept_mentions,
          words,
          paragraphs,
          pct_sec_concepts,
          pct_sec_concept_mentions,
          pct_sec_words,
          pct_sec_paragraphs,
          position,
          subject == Subject::math ? 1.0 : 0.0,
          subject == Subject::science ? 1.0 : 0.0,
          subject == Subject::social_science ? 1.0 : 0.0};
}

namespace {

double pct(double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; }

double subsection_mentions(const Subsection& u) {
  double total = 0.0;
  for (const auto& c : u.concepts) total += static_cast<double>(mention_count(u, c));
  return total;
}

}  // namespace

FeatureVector extract_features(const Section& s, std::size_t u) {
  if (u >= s.subsections.size()) {
    throw Error(ErrorKind::lookup, "subsection index out of range in '" + s.id + "'");
  }
  const Subsection& sub = s.subsections[u];
  FeatureVector f;
  f.subject = s.subject;
  f.concepts = static_cast<double>(sub.concepts.size());
  f.concept_mentions = subsection_mentions(sub);
  f.words = static_cast<double>(sub.tokens.size());
  f.paragraphs = static_cast<double>(sub.paragraphs().size());

  std::set<TokenSeq> sec_concepts;
  std::set<TokenSeq> own_concepts;
  double sec_mentions = 0.0, sec_words = 0.0, sec_paragraphs = 0.0;
  for (const auto& other : s.subsections) {
    for (const auto& c : other.concepts) sec_concepts.insert(c.surface);
    sec_mentions += subsection_mentions(other);
    sec_words += static_cast<double>(other.tokens.size());
    sec_paragraphs += static_cast<double>(other.paragraphs().size());
  }
  for (const auto& c : sub.concepts) own_concepts.insert(c.surface);
  f.pct_sec_concepts = pct(static_cast<double>(own_concepts.size()),
                           static_cast<double>(sec_concepts.size()));
  f.pct_sec_concept_mentions = pct(f.concept_mentions, sec_mentions);
  f.pct_sec_words = pct(f.words, sec_words);
  f.pct_sec_paragraphs = pct(f.paragraphs, sec_paragraphs);
  std::size_t n = s.subsections.size();
  f.position = n > 1 ? static_cast<double>(u) / static_cast<double>(n - 1) : 0.0;
  return f;
}

double t_test_p_value(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double n = static_cast<double>(a.size());
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

RegressionResult fit_ols(const std::vector<std::string>& names, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(x.cols()) != names.size()) {
    throw Error(ErrorKind::dimension, "regressor names do not match design columns");
  }
  if (x.rows() != y.size()) throw Error(ErrorKind::dimension, "design rows do not match response");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols() + 1;
  if (n <= p) {
    throw Error(ErrorKind::numeric, "OLS needs more rows (" + std::to_string(n) +
                                        ") than parameters (" + std::to_string(p) + ")");
  }
  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  design.rightCols(p - 1) = x;
  std::vector<std::string> all_names{"intercept"};
  all_names.insert(all_names.end(), names.begin(), names.end());

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < p; ++j) {
      if (!cols.empty()) cols += ", ";
      cols += all_names[static_cast<std::size_t>(perm[j])];
    }
    throw Error(ErrorKind::numeric, "singular design matrix; collinear columns: " + cols);
  }
  Eigen::VectorXd coef = qr.solve(y);
  Eigen::VectorXd fitted = design * coef;
  Eigen::VectorXd resid = y - fitted;
  const double dof = static_cast<double>(n - p);
  const double sigma2 = resid.squaredNorm() / dof;

  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
  Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

  RegressionResult out;
  out.names = all_names;
  out.n = static_cast<std::size_t>(n);
  out.dof = static_cast<std::size_t>(n - p);
  out.residual_variance = sigma2;
  for (Eigen::Index j = 0; j < p; ++j) {
    double b = coef[j];
    double se = std::sqrt(sigma2 * cov(j, j));
    double t = se > 0.0 ? b / se : (b == 0.0 ? 0.0 : std::copysign(INFINITY, b));
    out.coefficients.push_back(b);
    out.std_errors.push_back(se);
    out.t_values.push_back(t);
    out.p_values.push_back(t_test_p_value(t, dof));
  }
  std::vector<double> f(fitted.data(), fitted.data() + n);
  std::vector<double> obs(y.data(), y.data() + n);
  out.pearson_r = pearson(f, obs);
  return out;
}

double RegressionResult::predict(const std::map<std::string, double>& row) const {
  double v = 0.0;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j == 0) {
      v += coefficients[0];
      continue;
    }
    auto it = row.find(names[j]);
    if (it != row.end()) v += coefficients[j] * it->second;
  }
  return v;
}

double RegressionResult::predict(const FeatureVector& f) const {
  std::map<std::string, double> row;
  auto vals = f.values();
  for (std::size_t j = 0; j < FeatureVector::kWidth; ++j) row[FeatureVector::names()[j]] = vals[j];
  return predict(row);
}

FeatureTable build_feature_table(const Corpus& corpus, Split split) {
  FeatureTable t;
  std::vector<std::array<double, FeatureVector::kWidth>> rows;
  std::vector<double> ys;
  for (const Section* s : corpus.sections(split)) {
    for (std::size_t u = 0; u < s->subsections.size(); ++u) {
      t.subsection_ids.push_back(s->subsections[u].id);
      rows.push_back(extract_features(*s, u).values());
      ys.push_back(static_cast<double>(s->subsections[u].gold_images.size()));
    }
  }
  t.x.resize(static_cast<Eigen::Index>(rows.size()), FeatureVector::kWidth);
  t.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < FeatureVector::kWidth; ++j) {
      t.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    t.y[static_cast<Eigen::Index>(i)] = ys[i];
  }
  return t;
}

RegressionResult fit_image_count_model(const Corpus& corpus, Split split) {
  FeatureTable t = build_feature_table(corpus, split);
  std::vector<std::string> names;
  std::vector<Eigen::Index> keep;
  std::vector<std::string> dropped;
  for (std::size_t j = 0; j < FeatureVector::kWidth; ++j) {
    std::string name = FeatureVector::names()[j];
    auto col = t.x.col(static_cast<Eigen::Index>(j));
    bool is_subject = name.rfind("subject_", 0) == 0;
    if (is_subject && (col.array() == 0.0).all()) {
      dropped.push_back(name);
      continue;
    }
    names.push_back(name);
    keep.push_back(static_cast<Eigen::Index>(j));
  }
  Eigen::MatrixXd x(t.x.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = t.x.col(keep[j]);
  RegressionResult r = fit_ols(names, x, t.y);
  r.dropped = std::move(dropped);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> rows_or_empty(const Subsection& u, const SimMatrix& m,
                                       const WindowConfig& window) {
  if (u.tokens.empty()) return {};
  return phrase_rows(u, m, window);
}

}  // namespace

ExclusivityReport exclusivity_analysis(const Corpus& corpus, const SimMatrix& m,
                                       const WindowConfig& window, Split split) {
  ExclusivityReport report;
  report.by_subject["all"];
  for (const Section* s : corpus.sections(split)) {
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& u : s->subsections) rows.push_back(rows_or_empty(u, m, window));
    for (std::size_t k = 0; k < s->subsections.size(); ++k) {
      for (const auto& gold : s->subsections[k].gold_images) {
        auto col = m.find_image(gold);
        if (!col) {
          throw Error(ErrorKind::lookup, "gold image '" + gold + "' of subsection '" +
                                             s->subsections[k].id + "' is not in the bank");
        }
        double best = -1.0;
        int winner = 0;
        bool found = false;
        for (int offset = -1; offset <= 1; ++offset) {
          long j = static_cast<long>(k) + offset;
          if (j < 0 || j >= static_cast<long>(s->subsections.size())) continue;
          for (std::size_t r : rows[static_cast<std::size_t>(j)]) {
            double v = m.prob(r, *col);
            if (v > best) {
              best = v;
              winner = offset;
              found = true;
            }
          }
        }
        if (!found) continue;
        for (const char* key : {"all", to_string(s->subject)}) {
          auto& tally = report.by_subject[key];
          if (winner < 0) ++tally.before;
          else if (winner == 0) ++tally.present;
          else ++tally.after;
        }
      }
    }
  }
  return report;
}

TopKCoverage topk_concept_coverage(const Corpus& corpus, const SimMatrix& m,
                                   const WindowConfig& window, std::size_t k, Split split) {
  TopKCoverage out;
  out.k = k;
  double total = 0.0;
  for (const Section* s : corpus.sections(split)) {
    for (const auto& u : s->subsections) {
      if (u.gold_images.empty() || u.concepts.empty() || u.tokens.empty()) {
        ++out.skipped;
        continue;
      }
      auto rows = phrase_rows(u, m, window);
      std::vector<std::size_t> cols;
      for (const auto& g : u.gold_images) cols.push_back(m.image_col(g));
      std::vector<double> score(rows.size(), 0.0);
      for (std::size_t l = 0; l < rows.size(); ++l) {
        double best = 0.0;
        for (std::size_t c : cols) best = std::max(best, m.prob(rows[l], c));
        score[l] = best;
      }
      std::vector<std::size_t> order(rows.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
      auto ranges = window_ranges(u.tokens.size(), window);
      std::size_t take = std::min(k, order.size());
      std::size_t hit = 0;
      for (const auto& c : u.concepts) {
        for (std::size_t i = 0; i < take; ++i) {
          const auto& rg = ranges[order[i]];
          std::span<const std::string> tokens(u.tokens.data() + rg.begin, rg.end - rg.begin);
          if (contains_run(tokens, c.surface)) {
            ++hit;
            break;
          }
        }
      }
      total += static_cast<double>(hit) / static_cast<double>(u.concepts.size());
      ++out.evaluated;
    }
  }
  if (out.evaluated) out.mean_fraction = total / static_cast<double>(out.evaluated);
  return out;
}

}  // namespace illustrate
