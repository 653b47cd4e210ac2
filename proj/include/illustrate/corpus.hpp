#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "illustrate/text.hpp"

namespace illustrate {

enum class Subject { science, math, social_science, business };
enum class Split { train, dev, test, all };

const char* to_string(Subject subject);
const char* to_string(Split split);
Subject parse_subject(std::string_view name);
Split parse_split(std::string_view name);

struct Concept {
  std::string id;
  TokenSeq surface;  // normalized, never empty
};

struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Subsection {
  std::string id;
  TokenSeq tokens;
  std::vector<std::size_t> paragraph_offsets;  // token index where each paragraph starts
  std::vector<Concept> concepts;
  std::vector<std::string> gold_images;

  /// Paragraph ranges; they partition [0, tokens.size()).
  std::vector<TokenRange> paragraphs() const;
};

struct Section {
  std::string id;
  Subject subject = Subject::science;
  std::vector<Subsection> subsections;
};

struct Chapter {
  std::string id;
  std::vector<Section> sections;
};

struct Book {
  std::string id;
  std::string title;
  Subject subject = Subject::science;
  std::optional<Split> split;
  std::vector<Chapter> chapters;
};

struct CorpusCounts {
  std::size_t sections = 0;
  std::size_t subsections = 0;
  std::size_t images = 0;
};

class Corpus {
 public:
  Split split = Split::all;
  std::vector<Book> books;

  /// Sections in document order. With a split other than `all`, only books
  /// belonging to that split are visited; a book without its own split tag
  /// inherits the corpus-level one.
  std::vector<const Section*> sections(Split filter = Split::all) const;

  CorpusCounts counts(Split filter = Split::all) const;
  CorpusCounts counts(Subject subject) const;
};

/// Validates every structural invariant; throws Error(integrity) on duplicate ids.
void validate(const Corpus& corpus);

Corpus parse_corpus(const nlohmann::json& document);
Corpus parse_corpus_string(std::string_view text);
Corpus load_corpus(const std::string& path);
nlohmann::json to_json(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Phrase windowing

struct WindowConfig {
  std::size_t window = 75;
  double overlap_ratio = 1.0 / 3.0;

  /// round-half-up of window * (1 - overlap); throws if < 1 or parameters invalid.
  std::size_t stride() const;
};

struct Phrase {
  std::string subsection_id;
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  TokenSeq text;

  std::string id() const;
};

std::string phrase_id(std::string_view subsection_id, std::size_t index);

std::vector<Phrase> window_phrases(const Subsection& subsection, const WindowConfig& cfg);

/// Start/end offsets only, for callers that do not need the token copies.
std::vector<TokenRange> window_ranges(std::size_t n_tokens, const WindowConfig& cfg);

bool mention(const Phrase& phrase, const Concept& concept_);
bool mention(std::span<const std::string> tokens, const Concept& concept_);

}  // namespace illustrate
