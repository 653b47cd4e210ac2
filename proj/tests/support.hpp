#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "illustrate/corpus.hpp"
#include "illustrate/error.hpp"
#include "illustrate/random.hpp"
#include "illustrate/simstore.hpp"

namespace testing {

inline std::string fixture(const std::string& name) {
  return std::string(ILLUSTRATE_FIXTURES) + "/" + name;
}

inline illustrate::Subsection make_sub(const std::string& id, const std::string& text,
                                       const std::vector<std::string>& concepts = {},
                                       const std::vector<std::string>& gold = {}) {
  illustrate::Subsection u;
  u.id = id;
  u.tokens = illustrate::tokenize(text);
  u.paragraph_offsets = {0};
  for (std::size_t k = 0; k < concepts.size(); ++k) {
    u.concepts.push_back({id + ":c" + std::to_string(k), illustrate::tokenize(concepts[k])});
  }
  u.gold_images = gold;
  return u;
}

inline illustrate::Corpus single_section(illustrate::Section s) {
  illustrate::Corpus c;
  illustrate::Book b;
  b.id = "book";
  b.subject = s.subject;
  b.chapters.push_back({"ch", {std::move(s)}});
  c.books.push_back(std::move(b));
  return c;
}

/// Logits whose softmax reproduces the given probability rows.
inline illustrate::SimMatrix from_probs(const std::vector<std::string>& phrases,
                                        const std::vector<std::string>& images,
                                        const std::vector<std::vector<double>>& probs) {
  std::vector<float> logits;
  for (const auto& row : probs) {
    for (double p : row) logits.push_back(static_cast<float>(std::log(p)));
  }
  return illustrate::SimMatrix(phrases, images, logits);
}

/// Independent long-double softmax used as a reference.
inline std::vector<double> reference_softmax(const std::vector<float>& row) {
  long double mx = row[0];
  for (float v : row) mx = std::max<long double>(mx, v);
  long double total = 0;
  for (float v : row) total += std::exp(static_cast<long double>(v) - mx);
  std::vector<double> out;
  for (float v : row) out.push_back(static_cast<double>(std::exp(static_cast<long double>(v) - mx) / total));
  return out;
}

struct SyntheticCorpus {
  illustrate::Corpus corpus;
  illustrate::SimMatrix sim;
};

/// Random textbook over a 300-word vocabulary: single-token concepts, unique
/// gold images, and logits that favour each subsection's gold images.
inline SyntheticCorpus synthetic_corpus(std::uint64_t seed, std::size_t sections,
                                        std::size_t max_subsections, std::size_t distractors) {
  using namespace illustrate;
  Rng rng(seed);
  Corpus corpus;
  Book book;
  book.id = "synthetic";
  book.subject = Subject::science;
  Chapter chapter{"ch", {}};
  std::vector<std::string> images;
  for (std::size_t s = 0; s < sections; ++s) {
    Section section;
    section.id = "s" + std::to_string(1000 + s);
    section.subject = static_cast<Subject>(rng.index(4));
    std::size_t n_sub = 1 + rng.index(max_subsections);
    for (std::size_t u = 0; u < n_sub; ++u) {
      Subsection sub;
      sub.id = section.id + "-" + std::to_string(u);
      std::size_t n_tokens = 10 + rng.index(160);
      for (std::size_t t = 0; t < n_tokens; ++t) sub.tokens.push_back("w" + std::to_string(rng.index(300)));
      sub.paragraph_offsets = {0};
      if (n_tokens > 60) sub.paragraph_offsets.push_back(n_tokens / 2);
      std::size_t n_concepts = rng.index(6);
      for (std::size_t c = 0; c < n_concepts; ++c) {
        sub.concepts.push_back({sub.id + ":c" + std::to_string(c), {sub.tokens[rng.index(n_tokens)]}});
      }
      std::size_t n_gold = rng.index(3);
      for (std::size_t g = 0; g < n_gold; ++g) {
        sub.gold_images.push_back("img-" + sub.id + "-" + std::to_string(g));
        images.push_back(sub.gold_images.back());
      }
      section.subsections.push_back(std::move(sub));
    }
    chapter.sections.push_back(std::move(section));
  }
  for (std::size_t d = 0; d < distractors; ++d) images.push_back("img-x" + std::to_string(d));
  book.chapters.push_back(std::move(chapter));
  corpus.books.push_back(std::move(book));

  std::vector<std::string> phrases;
  std::vector<float> logits;
  const WindowConfig window;
  for (const Section* s : corpus.sections()) {
    for (const auto& u : s->subsections) {
      std::size_t n = window_ranges(u.tokens.size(), window).size();
      for (std::size_t k = 0; k < n; ++k) {
        phrases.push_back(phrase_id(u.id, k));
        for (const auto& img : images) {
          bool gold = std::find(u.gold_images.begin(), u.gold_images.end(), img) != u.gold_images.end();
          logits.push_back(static_cast<float>(rng.normal() + (gold ? 2.5 : 0.0)));
        }
      }
    }
  }
  return {std::move(corpus), SimMatrix(std::move(phrases), std::move(images), std::move(logits))};
}

template <typename Fn>
illustrate::ErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const illustrate::Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected an illustrate::Error");
}

}  // namespace testing
