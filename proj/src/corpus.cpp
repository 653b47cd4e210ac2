#include "illustrate/corpus.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "illustrate/error.hpp"

namespace illustrate {

using nlohmann::json;

const char* to_string(Subject subject) {
  switch (subject) {
    case Subject::science: return "science";
    case Subject::math: return "math";
    case Subject::social_science: return "social_science";
    case Subject::business: return "business";
  }
  return "science";
}

const char* to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    case Split::all: return "all";
  }
  return "all";
}

Subject parse_subject(std::string_view name) {
  if (name == "science") return Subject::science;
  if (name == "math") return Subject::math;
  if (name == "social_science") return Subject::social_science;
  if (name == "business") return Subject::business;
  throw Error(ErrorKind::parse, "unknown subject '" + std::string(name) + "'");
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  if (name == "all") return Split::all;
  throw Error(ErrorKind::parse, "unknown split '" + std::string(name) + "'");
}

std::vector<TokenRange> Subsection::paragraphs() const {
  std::vector<TokenRange> out;
  if (tokens.empty()) return out;
  if (paragraph_offsets.empty()) {
    out.push_back({0, tokens.size()});
    return out;
  }
  for (std::size_t i = 0; i < paragraph_offsets.size(); ++i) {
    std::size_t end = i + 1 < paragraph_offsets.size() ? paragraph_offsets[i + 1] : tokens.size();
    out.push_back({paragraph_offsets[i], end});
  }
  return out;
}

std::vector<const Section*> Corpus::sections(Split filter) const {
  std::vector<const Section*> out;
  for (const auto& book : books) {
    Split book_split = book.split.value_or(split);
    if (filter != Split::all && book_split != filter) continue;
    for (const auto& chapter : book.chapters) {
      for (const auto& section : chapter.sections) out.push_back(&section);
    }
  }
  return out;
}

CorpusCounts Corpus::counts(Split filter) const {
  CorpusCounts c;
  for (const Section* s : sections(filter)) {
    ++c.sections;
    for (const auto& u : s->subsections) {
      ++c.subsections;
      c.images += u.gold_images.size();
    }
  }
  return c;
}

CorpusCounts Corpus::counts(Subject subject) const {
  CorpusCounts c;
  for (const Section* s : sections()) {
    if (s->subject != subject) continue;
    ++c.sections;
    for (const auto& u : s->subsections) {
      ++c.subsections;
      c.images += u.gold_images.size();
    }
  }
  return c;
}

void validate(const Corpus& corpus) {
  std::set<std::string> books, chapters, sections, subsections, images;
  auto claim = [](std::set<std::string>& seen, const std::string& id, const char* what) {
    if (id.empty()) throw Error(ErrorKind::parse, std::string(what) + " with empty id");
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::integrity, std::string("duplicate ") + what + " id '" + id + "'");
    }
  };
  for (const auto& book : corpus.books) {
    claim(books, book.id, "book");
    for (const auto& chapter : book.chapters) {
      if (!chapter.id.empty()) claim(chapters, chapter.id, "chapter");
      for (const auto& section : chapter.sections) {
        claim(sections, section.id, "section");
        if (section.subsections.empty()) {
          throw Error(ErrorKind::integrity, "section '" + section.id + "' has no subsections");
        }
        for (const auto& u : section.subsections) {
          claim(subsections, u.id, "subsection");
          for (const auto& img : u.gold_images) claim(images, img, "image");
          for (const auto& c : u.concepts) {
            if (c.surface.empty()) {
              throw Error(ErrorKind::integrity,
                          "concept '" + c.id + "' in '" + u.id + "' has an empty surface");
            }
          }
          const auto& offs = u.paragraph_offsets;
          for (std::size_t i = 0; i < offs.size(); ++i) {
            bool ok = (i == 0 ? offs[0] == 0 : offs[i] > offs[i - 1]) && offs[i] < u.tokens.size();
            if (!ok) {
              throw Error(ErrorKind::integrity,
                          "subsection '" + u.id + "': paragraph_offsets must start at 0, "
                          "increase strictly and stay below the token count");
            }
          }
        }
      }
    }
  }
}

namespace {

class Reader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::parse, path + ": " + what);
  }

  static const json& field(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
  }

  static std::string str(const json& obj, const std::string& path, const char* key) {
    const json& v = field(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected string");
    return v.get<std::string>();
  }

  static std::optional<std::string> opt_str(const json& obj, const std::string& path,
                                            const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(path + "." + key, "expected string");
    return it->get<std::string>();
  }

  static const json& array(const json& obj, const std::string& path, const char* key,
                           bool required = true) {
    static const json empty = json::array();
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "." + key, "missing required field");
      return empty;
    }
    if (!it->is_array()) fail(path + "." + key, "expected array");
    return *it;
  }
};

std::string idx(const std::string& base, const char* key, std::size_t i) {
  return base + "." + key + "[" + std::to_string(i) + "]";
}

Subject subject_at(const std::string& path, const std::string& name) {
  try {
    return parse_subject(name);
  } catch (const Error&) {
    Reader::fail(path, "unknown subject '" + name + "'");
  }
}

Subsection parse_subsection(const json& j, const std::string& path) {
  Subsection u;
  u.id = Reader::str(j, path, "id");
  u.tokens = tokenize(Reader::str(j, path, "text"));
  const json& offs = Reader::array(j, path, "paragraph_offsets", false);
  for (std::size_t i = 0; i < offs.size(); ++i) {
    if (!offs[i].is_number_integer() || offs[i].get<long long>() < 0) {
      Reader::fail(idx(path, "paragraph_offsets", i), "expected non-negative integer");
    }
    u.paragraph_offsets.push_back(offs[i].get<std::size_t>());
  }
  const json& concepts = Reader::array(j, path, "concepts", false);
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    std::string cpath = idx(path, "concepts", i);
    Concept c;
    c.id = Reader::str(concepts[i], cpath, "id");
    c.surface = tokenize(Reader::str(concepts[i], cpath, "surface"));
    if (c.surface.empty()) Reader::fail(cpath + ".surface", "empty after normalization");
    u.concepts.push_back(std::move(c));
  }
  const json& gold = Reader::array(j, path, "gold_images", false);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i].is_string()) Reader::fail(idx(path, "gold_images", i), "expected string");
    u.gold_images.push_back(gold[i].get<std::string>());
  }
  return u;
}

}  // namespace

Corpus parse_corpus(const json& doc) {
  if (!doc.is_object()) Reader::fail("$", "expected object at top level");
  Corpus corpus;
  if (auto s = Reader::opt_str(doc, "$", "split")) {
    try {
      corpus.split = parse_split(*s);
    } catch (const Error&) {
      Reader::fail("$.split", "unknown split '" + *s + "'");
    }
  }
  const json& books = Reader::array(doc, "$", "books");
  for (std::size_t b = 0; b < books.size(); ++b) {
    std::string bpath = idx("$", "books", b);
    Book book;
    book.id = Reader::str(books[b], bpath, "id");
    book.title = Reader::opt_str(books[b], bpath, "title").value_or("");
    book.subject = subject_at(bpath + ".subject", Reader::str(books[b], bpath, "subject"));
    if (auto s = Reader::opt_str(books[b], bpath, "split")) {
      try {
        book.split = parse_split(*s);
      } catch (const Error&) {
        Reader::fail(bpath + ".split", "unknown split '" + *s + "'");
      }
    }
    const json& chapters = Reader::array(books[b], bpath, "chapters");
    for (std::size_t c = 0; c < chapters.size(); ++c) {
      std::string cpath = idx(bpath, "chapters", c);
      Chapter chapter;
      chapter.id = Reader::opt_str(chapters[c], cpath, "id").value_or("");
      const json& sections = Reader::array(chapters[c], cpath, "sections");
      for (std::size_t s = 0; s < sections.size(); ++s) {
        std::string spath = idx(cpath, "sections", s);
        Section section;
        section.id = Reader::str(sections[s], spath, "id");
        auto subj = Reader::opt_str(sections[s], spath, "subject");
        section.subject = subj ? subject_at(spath + ".subject", *subj) : book.subject;
        const json& subs = Reader::array(sections[s], spath, "subsections");
        if (subs.empty()) Reader::fail(spath + ".subsections", "must not be empty");
        for (std::size_t k = 0; k < subs.size(); ++k) {
          section.subsections.push_back(parse_subsection(subs[k], idx(spath, "subsections", k)));
        }
        chapter.sections.push_back(std::move(section));
      }
      book.chapters.push_back(std::move(chapter));
    }
    corpus.books.push_back(std::move(book));
  }
  validate(corpus);
  return corpus;
}

Corpus parse_corpus_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("corpus document is not valid JSON: ") + e.what());
  }
  return parse_corpus(doc);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_corpus_string(buf.str());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw Error(ErrorKind::parse, path + ": " + e.what());
    throw;
  }
}

json to_json(const Corpus& corpus) {
  json books = json::array();
  for (const auto& book : corpus.books) {
    json chapters = json::array();
    for (const auto& chapter : book.chapters) {
      json sections = json::array();
      for (const auto& section : chapter.sections) {
        json subs = json::array();
        for (const auto& u : section.subsections) {
          json concepts = json::array();
          for (const auto& c : u.concepts) {
            concepts.push_back({{"id", c.id}, {"surface", join_tokens(c.surface)}});
          }
          subs.push_back({{"id", u.id},
                          {"text", join_tokens(u.tokens)},
                          {"paragraph_offsets", u.paragraph_offsets},
                          {"concepts", concepts},
                          {"gold_images", u.gold_images}});
        }
        sections.push_back(
            {{"id", section.id}, {"subject", to_string(section.subject)}, {"subsections", subs}});
      }
      json ch = {{"sections", sections}};
      if (!chapter.id.empty()) ch["id"] = chapter.id;
      chapters.push_back(std::move(ch));
    }
    json jb = {{"id", book.id}, {"subject", to_string(book.subject)}, {"chapters", chapters}};
    if (!book.title.empty()) jb["title"] = book.title;
    if (book.split) jb["split"] = to_string(*book.split);
    books.push_back(std::move(jb));
  }
  return {{"split", to_string(corpus.split)}, {"books", books}};
}

// ---------------------------------------------------------------------------

std::size_t WindowConfig::stride() const {
  if (window == 0) throw Error(ErrorKind::usage, "window must be positive");
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
    throw Error(ErrorKind::usage, "overlap ratio must lie in [0, 1)");
  }
  // The epsilon absorbs representation error in ratios like 1/3.
  double raw = static_cast<double>(window) * (1.0 - overlap_ratio);
  auto stride = static_cast<std::size_t>(std::floor(raw + 0.5 + 1e-9));
  if (stride < 1) throw Error(ErrorKind::usage, "window/overlap yield a stride below 1");
  return stride;
}

std::string phrase_id(std::string_view subsection_id, std::size_t index) {
  return std::string(subsection_id) + "#" + std::to_string(index);
}

std::string Phrase::id() const { return phrase_id(subsection_id, index); }

std::vector<TokenRange> window_ranges(std::size_t n_tokens, const WindowConfig& cfg) {
  std::size_t stride = cfg.stride();
  std::vector<TokenRange> out;
  if (n_tokens == 0) return out;
  for (std::size_t start = 0;; start += stride) {
    std::size_t end = std::min(start + cfg.window, n_tokens);
    out.push_back({start, end});
    if (end == n_tokens) break;
  }
  return out;
}

std::vector<Phrase> window_phrases(const Subsection& subsection, const WindowConfig& cfg) {
  if (subsection.tokens.empty()) {
    throw Error(ErrorKind::empty_input, "subsection '" + subsection.id + "' has no tokens");
  }
  std::vector<Phrase> out;
  auto ranges = window_ranges(subsection.tokens.size(), cfg);
  out.reserve(ranges.size());
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    Phrase p;
    p.subsection_id = subsection.id;
    p.index = k;
    p.start = ranges[k].begin;
    p.end = ranges[k].end;
    p.text.assign(subsection.tokens.begin() + static_cast<std::ptrdiff_t>(p.start),
                  subsection.tokens.begin() + static_cast<std::ptrdiff_t>(p.end));
    out.push_back(std::move(p));
  }
  return out;
}

bool mention(std::span<const std::string> tokens, const Concept& concept_) {
  return contains_run(tokens, concept_.surface);
}

bool mention(const Phrase& phrase, const Concept& concept_) {
  return mention(phrase.text, concept_);
}

}  // namespace illustrate
