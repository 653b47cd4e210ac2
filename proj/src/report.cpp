#include "illustrate/report.hpp"

#include <array>
#include <string>

#include "illustrate/error.hpp"
#include "illustrate/text.hpp"

namespace illustrate {

using nlohmann::json;

namespace {

json counts_json(const CorpusCounts& c) {
  return {{"sections", c.sections}, {"subsections", c.subsections}, {"images", c.images}};
}

json histogram(const std::map<std::size_t, std::size_t>& h) {
  json out = json::array();
  for (const auto& [value, count] : h) out.push_back({{"value", value}, {"count", count}});
  return out;
}

json cutoff_table(const std::array<double, kCutoffs.size()>& v, double at_r, double scale) {
  json out = json::object();
  for (std::size_t j = 0; j < kCutoffs.size(); ++j) {
    out["@" + std::to_string(kCutoffs[j])] = v[j] * scale;
  }
  out["@R"] = at_r * scale;
  return out;
}

constexpr std::array<Subject, 4> kSubjects = {Subject::science, Subject::math, Subject::social_science,
                                              Subject::business};
constexpr std::array<Split, 3> kSplits = {Split::train, Split::dev, Split::test};

}  // namespace

json to_json(const Assignment& a) {
  json allocation = json::array();
  for (const auto& [sub, images] : a.allocation) {
    allocation.push_back({{"subsection_id", sub}, {"images", images}});
  }
  json diagnostics = json::array();
  for (const auto& d : a.diagnostics) {
    diagnostics.push_back({{"image_id", d.image_id},
                           {"subsection_id", d.subsection_id},
                           {"gain", d.gain},
                           {"coverage", d.coverage},
                           {"similarity", d.similarity}});
  }
  return {{"section_id", a.section_id},
          {"mode", to_string(a.mode)},
          {"tau", a.tau},
          {"beta", a.beta},
          {"alloc_score", to_string(a.alloc_score)},
          {"quotas", a.quotas},
          {"selected", a.selected},
          {"allocation", allocation},
          {"diagnostics", diagnostics}};
}

json to_json(const EvalReport& r) {
  json subs = json::array();
  for (const auto& s : r.subsections) {
    subs.push_back({{"subsection_id", s.subsection_id},
                    {"gold", s.gold},
                    {"precision", cutoff_table(s.precision, s.precision_r, 100.0)},
                    {"recall", cutoff_table(s.recall, s.recall_r, 100.0)},
                    {"gold_rank", s.mean_gold_rank}});
  }
  return {{"averaging", "macro over subsections with at least one gold image"},
          {"scale", "precision and recall x100"},
          {"bank_size", r.bank_size},
          {"evaluated", r.evaluated},
          {"skipped", r.skipped},
          {"precision", cutoff_table(r.precision, r.precision_r, 100.0)},
          {"recall", cutoff_table(r.recall, r.recall_r, 100.0)},
          {"gold_rank", r.mean_gold_rank},
          {"subsections", subs}};
}

json to_json(const ConceptDistribution& d) {
  json mentions = d.mentions_defined ? json(d.mentions_per_concept) : json(nullptr);
  return {{"subsections", d.subsections},
          {"subsection_concepts", d.subsection_concepts},
          {"section_concepts", d.section_concepts},
          {"concepts_per_subsection", d.concepts_per_subsection},
          {"mentions_per_concept", mentions},
          {"subsections_per_section_concept", d.subsections_per_section_concept},
          {"concepts_histogram", histogram(d.concepts_histogram)},
          {"mentions_histogram", histogram(d.mentions_histogram)},
          {"spread_histogram", histogram(d.spread_histogram)}};
}

json to_json(const RegressionResult& r) {
  json rows = json::array();
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    rows.push_back({{"name", r.names[j]},
                    {"coefficient", r.coefficients[j]},
                    {"std_error", r.std_errors[j]},
                    {"t", r.t_values[j]},
                    {"p", r.p_values[j]}});
  }
  return {{"status", "ok"},
          {"n", r.n},
          {"dof", r.dof},
          {"pearson_r", r.pearson_r},
          {"residual_variance", r.residual_variance},
          {"dropped", r.dropped},
          {"coefficients", rows}};
}

json to_json(const ExclusivityReport& r) {
  json out = json::object();
  for (const auto& [subject, t] : r.by_subject) {
    out[subject] = {{"before", t.before},
                    {"present", t.present},
                    {"after", t.after},
                    {"total", t.total()},
                    {"share_before", t.share(t.before)},
                    {"share_present", t.share(t.present)},
                    {"share_after", t.share(t.after)}};
  }
  return out;
}

json to_json(const RatioReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"seed", e.seed},
                       {"opt", e.opt},
                       {"greedy", e.greedy},
                       {"ratio", e.ratio},
                       {"monotone", e.monotone},
                       {"submodular_violations", e.submodular_violations},
                       {"bound_checked", e.bound_checked},
                       {"bound_holds", e.bound_holds}});
  }
  return {{"bound", kGreedyBound},
          {"monotone_instances", r.monotone_instances},
          {"bound_failures", r.bound_failures},
          {"min_ratio", r.min_ratio},
          {"median_ratio", r.median_ratio},
          {"instances", entries}};
}

json corpus_summary(const Corpus& corpus) {
  json by_subject = json::object();
  for (Subject s : kSubjects) by_subject[to_string(s)] = counts_json(corpus.counts(s));
  json by_split = json::object();
  for (Split s : kSplits) by_split[to_string(s)] = counts_json(corpus.counts(s));
  return {{"books", corpus.books.size()},
          {"all", counts_json(corpus.counts(Split::all))},
          {"by_subject", by_subject},
          {"by_split", by_split}};
}

json phrase_table(const Corpus& corpus, const WindowConfig& window, Split split) {
  json out = json::array();
  for (const Section* s : corpus.sections(split)) {
    for (const auto& u : s->subsections) {
      auto ranges = window_ranges(u.tokens.size(), window);
      for (std::size_t k = 0; k < ranges.size(); ++k) {
        out.push_back({{"id", phrase_id(u.id, k)},
                       {"subsection_id", u.id},
                       {"section_id", s->id},
                       {"start", ranges[k].begin},
                       {"end", ranges[k].end},
                       {"text", join_tokens(std::span<const std::string>(u.tokens).subspan(
                                    ranges[k].begin, ranges[k].end - ranges[k].begin))}});
      }
    }
  }
  return out;
}

json run_ingest(const Corpus& corpus, const RunConfig& cfg) {
  std::size_t phrases = 0;
  for (const Section* s : corpus.sections(cfg.split)) {
    for (const auto& u : s->subsections) phrases += window_ranges(u.tokens.size(), cfg.window_config()).size();
  }
  json summary = corpus_summary(corpus);
  summary["phrases"] = phrases;
  return {{"command", "ingest"}, {"config", provenance(cfg)}, {"corpus", summary}};
}

json run_analyze(const Corpus& corpus, const SimMatrix* sim, const RunConfig& cfg) {
  json doc = {{"command", "analyze"}, {"config", provenance(cfg)}};
  doc["counts"] = corpus_summary(corpus);
  doc["concepts"] = to_json(concept_distribution(corpus, cfg.split));
  try {
    doc["regression"] = to_json(fit_image_count_model(corpus, cfg.split));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numeric && e.kind() != ErrorKind::empty_input) throw;
    doc["regression"] = {{"status", "unavailable"}, {"reason", e.what()}};
  }
  if (sim) {
    const auto window = cfg.window_config();
    doc["exclusivity"] = to_json(exclusivity_analysis(corpus, *sim, window, cfg.split));
    json curve = json::array();
    for (std::size_t k = 1; k <= cfg.topk; ++k) {
      auto c = topk_concept_coverage(corpus, *sim, window, k, cfg.split);
      curve.push_back({{"k", c.k},
                       {"mean_fraction", c.mean_fraction},
                       {"evaluated", c.evaluated},
                       {"skipped", c.skipped}});
    }
    doc["topk_concept_coverage"] = curve;
  }
  return doc;
}

BudgetPolicy resolve_budget(const Corpus& corpus, const RunConfig& cfg) {
  BudgetPolicy policy = parse_budget(cfg.budget);
  if (policy.kind == BudgetPolicy::Kind::predicted) {
    policy.model = fit_image_count_model(corpus, Split::all);
  }
  return policy;
}

json run_assign(const Corpus& corpus, const SimMatrix& sim, const RunConfig& cfg) {
  auto policy = resolve_budget(corpus, cfg);
  auto results = assign_corpus(corpus, sim, cfg.window_config(), cfg.assign_config(), policy,
                               cfg.split, cfg.parallelism);
  json sections = json::array();
  for (const auto& a : results) sections.push_back(to_json(a));
  return {{"command", "assign"}, {"config", provenance(cfg)}, {"sections", sections}};
}

json run_evaluate(const Corpus& corpus, const SimMatrix& sim, const RunConfig& cfg) {
  auto report = evaluate(corpus, sim, cfg.window_config(), cfg.split, cfg.parallelism);
  return {{"command", "evaluate"}, {"config", provenance(cfg)}, {"evaluation", to_json(report)}};
}

json run_oracle(const RunConfig& cfg) {
  SyntheticSpec spec;
  spec.n_images = cfg.images;
  spec.n_concepts = cfg.concepts;
  spec.n_phrases = cfg.phrases;
  spec.mention_density = cfg.density;
  std::vector<SyntheticInstance> instances;
  instances.reserve(cfg.instances);
  for (std::size_t i = 0; i < cfg.instances; ++i) instances.push_back(make_instance(cfg.seed + i, spec));
  auto report = greedy_ratio_report(instances, cfg.objective, cfg.oracle_budget, cfg.beta, cfg.trials);
  return {{"command", "oracle"},
          {"config", provenance(cfg)},
          {"objective", to_string(cfg.objective)},
          {"budget", cfg.oracle_budget},
          {"report", to_json(report)}};
}

void check_bank(const SimMatrix& sim, const ImageBank& bank) {
  if (sim.cols() != bank.size()) {
    throw Error(ErrorKind::dimension, "similarity matrix has " + std::to_string(sim.cols()) +
                                          " images but the bank lists " + std::to_string(bank.size()));
  }
  for (std::size_t i = 0; i < sim.cols(); ++i) {
    if (sim.image_ids()[i] != bank.images()[i].id) {
      throw Error(ErrorKind::dimension, "similarity column " + std::to_string(i) + " is '" +
                                            sim.image_ids()[i] + "' but the bank lists '" +
                                            bank.images()[i].id + "'");
    }
  }
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace illustrate
