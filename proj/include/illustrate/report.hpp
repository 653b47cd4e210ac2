#pragma once

#include <optional>
#include <vector>

#include "json.hpp"

#include "illustrate/analysis.hpp"
#include "illustrate/assign.hpp"
#include "illustrate/config.hpp"
#include "illustrate/corpus.hpp"
#include "illustrate/evalmetrics.hpp"
#include "illustrate/oracle.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

nlohmann::json to_json(const Assignment& a);
nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const ConceptDistribution& d);
nlohmann::json to_json(const RegressionResult& r);
nlohmann::json to_json(const ExclusivityReport& r);
nlohmann::json to_json(const RatioReport& r);

/// Section/subsection/image counts overall, per subject and per split.
nlohmann::json corpus_summary(const Corpus& corpus);
/// Every phrase of the split with its id and token range.
nlohmann::json phrase_table(const Corpus& corpus, const WindowConfig& window, Split split);

// Top-level documents. Each embeds the provenance form of the config.

nlohmann::json run_ingest(const Corpus& corpus, const RunConfig& cfg);
nlohmann::json run_analyze(const Corpus& corpus, const SimMatrix* sim, const RunConfig& cfg);
nlohmann::json run_assign(const Corpus& corpus, const SimMatrix& sim, const RunConfig& cfg);
nlohmann::json run_evaluate(const Corpus& corpus, const SimMatrix& sim, const RunConfig& cfg);
nlohmann::json run_oracle(const RunConfig& cfg);

/// Resolves the budget flag; `predicted` fits the image-count model on the corpus.
BudgetPolicy resolve_budget(const Corpus& corpus, const RunConfig& cfg);

/// Throws Error(dimension) when the matrix columns do not match the bank ids.
void check_bank(const SimMatrix& sim, const ImageBank& bank);

/// Canonical text for a document: two-space indentation plus a trailing newline.
std::string render(const nlohmann::json& doc);

}  // namespace illustrate
