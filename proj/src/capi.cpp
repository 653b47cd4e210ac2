#include "illustrate/illustrate.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "illustrate/config.hpp"
#include "illustrate/corpus.hpp"
#include "illustrate/error.hpp"
#include "illustrate/report.hpp"
#include "illustrate/simstore.hpp"

struct ill_corpus {
  illustrate::Corpus value;
};

struct ill_simmatrix {
  illustrate::SimMatrix value;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_kind;

ill_status status_of(illustrate::ErrorKind kind) {
  using illustrate::ErrorKind;
  switch (kind) {
    case ErrorKind::usage:
      return ILL_ERR_USAGE;
    case ErrorKind::io:
    case ErrorKind::parse:
    case ErrorKind::dimension:
    case ErrorKind::lookup:
    case ErrorKind::empty_input:
      return ILL_ERR_DATA;
    case ErrorKind::integrity:
    case ErrorKind::numeric:
    case ErrorKind::allocation:
    case ErrorKind::size:
      return ILL_ERR_NUMERIC;
  }
  return ILL_ERR_INTERNAL;
}

template <typename Fn>
ill_status guarded(Fn&& fn) {
  last_error.clear();
  last_kind.clear();
  try {
    fn();
    return ILL_OK;
  } catch (const illustrate::Error& e) {
    last_error = e.what();
    last_kind = illustrate::to_string(e.kind());
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("parse error: ") + e.what();
    last_kind = "parse";
    return ILL_ERR_DATA;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    last_kind = "internal";
    return ILL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    last_kind = "internal";
    return ILL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw illustrate::Error(illustrate::ErrorKind::usage, std::string(what) + " is null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

illustrate::RunConfig config_from(const char* text) {
  nlohmann::json doc = nlohmann::json::object();
  if (text && *text) {
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw illustrate::Error(illustrate::ErrorKind::usage,
                              std::string("configuration is not valid JSON: ") + e.what());
    }
  }
  return illustrate::run_config_from_json(doc);
}

void emit(const nlohmann::json& doc, char** out) { *out = duplicate(illustrate::render(doc)); }

}  // namespace

extern "C" {

const char* ill_last_error(void) { return last_error.c_str(); }
const char* ill_last_error_kind(void) { return last_kind.c_str(); }
const char* ill_version(void) { return "1.0.0"; }
void ill_string_free(char* s) { std::free(s); }

ill_status ill_corpus_load(const char* path, ill_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ill_corpus{illustrate::load_corpus(path)};
  });
}

ill_status ill_corpus_parse(const char* json_text, ill_corpus** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new ill_corpus{illustrate::parse_corpus_string(json_text)};
  });
}

void ill_corpus_free(ill_corpus* corpus) { delete corpus; }

ill_status ill_corpus_counts(const ill_corpus* corpus, size_t* sections, size_t* subsections,
                             size_t* images) {
  return guarded([&] {
    require(corpus, "corpus");
    auto c = corpus->value.counts(illustrate::Split::all);
    if (sections) *sections = c.sections;
    if (subsections) *subsections = c.subsections;
    if (images) *images = c.images;
  });
}

ill_status ill_corpus_summary(const ill_corpus* corpus, char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out_json, "out_json");
    emit(illustrate::corpus_summary(corpus->value), out_json);
  });
}

ill_status ill_corpus_phrases(const ill_corpus* corpus, const char* config_json, char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out_json, "out_json");
    auto cfg = config_from(config_json);
    emit(illustrate::phrase_table(corpus->value, cfg.window_config(), cfg.split), out_json);
  });
}

ill_status ill_sim_load(const char* path, ill_simmatrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ill_simmatrix{illustrate::load_similarity(path)};
  });
}

ill_status ill_sim_save(const ill_simmatrix* sim, const char* path, const char* format) {
  return guarded([&] {
    require(sim, "sim");
    require(path, "path");
    require(format, "format");
    std::string f = format;
    illustrate::SimFormat fmt;
    if (f == "binary") {
      fmt = illustrate::SimFormat::binary;
    } else if (f == "text") {
      fmt = illustrate::SimFormat::text;
    } else {
      throw illustrate::Error(illustrate::ErrorKind::usage, "unknown similarity format '" + f + "'");
    }
    illustrate::save_similarity(sim->value, path, fmt);
  });
}

ill_status ill_sim_shape(const ill_simmatrix* sim, size_t* n_phrases, size_t* n_images) {
  return guarded([&] {
    require(sim, "sim");
    if (n_phrases) *n_phrases = sim->value.rows();
    if (n_images) *n_images = sim->value.cols();
  });
}

ill_status ill_sim_prob(const ill_simmatrix* sim, const char* image_id, const char* phrase_id,
                        double* out) {
  return guarded([&] {
    require(sim, "sim");
    require(image_id, "image_id");
    require(phrase_id, "phrase_id");
    require(out, "out");
    *out = sim->value.sim(image_id, phrase_id);
  });
}

ill_status ill_sim_check_bank(const ill_simmatrix* sim, const char* bank_path) {
  return guarded([&] {
    require(sim, "sim");
    require(bank_path, "bank_path");
    illustrate::check_bank(sim->value, illustrate::load_image_bank(bank_path));
  });
}

void ill_sim_free(ill_simmatrix* sim) { delete sim; }

ill_status ill_ingest(const ill_corpus* corpus, const char* config_json, char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out_json, "out_json");
    emit(illustrate::run_ingest(corpus->value, config_from(config_json)), out_json);
  });
}

ill_status ill_analyze(const ill_corpus* corpus, const ill_simmatrix* sim, const char* config_json,
                       char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out_json, "out_json");
    emit(illustrate::run_analyze(corpus->value, sim ? &sim->value : nullptr,
                                 config_from(config_json)),
         out_json);
  });
}

ill_status ill_assign(const ill_corpus* corpus, const ill_simmatrix* sim, const char* config_json,
                      char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(sim, "sim");
    require(out_json, "out_json");
    emit(illustrate::run_assign(corpus->value, sim->value, config_from(config_json)), out_json);
  });
}

ill_status ill_evaluate(const ill_corpus* corpus, const ill_simmatrix* sim,
                        const char* config_json, char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(sim, "sim");
    require(out_json, "out_json");
    emit(illustrate::run_evaluate(corpus->value, sim->value, config_from(config_json)), out_json);
  });
}

ill_status ill_oracle(const char* config_json, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    emit(illustrate::run_oracle(config_from(config_json)), out_json);
  });
}

ill_status ill_config_normalize(const char* config_json, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    emit(illustrate::to_json(config_from(config_json)), out_json);
  });
}

}  // extern "C"
