#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "illustrate/illustrate.h"

namespace {

std::string fixture(const std::string& name) { return std::string(ILLUSTRATE_FIXTURES) + "/" + name; }

std::string take(char* s) {
  std::string out = s ? s : "";
  ill_string_free(s);
  return out;
}

struct Loaded {
  ill_corpus* corpus = nullptr;
  ill_simmatrix* sim = nullptr;
  Loaded() {
    REQUIRE(ill_corpus_load(fixture("corpus_small.json").c_str(), &corpus) == ILL_OK);
    REQUIRE(ill_sim_load(fixture("sim_small.json").c_str(), &sim) == ILL_OK);
  }
  ~Loaded() {
    ill_corpus_free(corpus);
    ill_sim_free(sim);
  }
};

}  // namespace

TEST_CASE("fixture corpus and similarity load through the C surface") {
  Loaded f;
  size_t sections = 0, subsections = 0, images = 0;
  CHECK(ill_corpus_counts(f.corpus, &sections, &subsections, &images) == ILL_OK);
  CHECK(sections == 3);
  CHECK(subsections == 7);
  CHECK(images == 8);

  size_t rows = 0, cols = 0;
  CHECK(ill_sim_shape(f.sim, &rows, &cols) == ILL_OK);
  CHECK(rows == 8);
  CHECK(cols == 10);
  double p = 0.0;
  CHECK(ill_sim_prob(f.sim, "img-mito", "bio-1.1-a#0", &p) == ILL_OK);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  CHECK(ill_sim_check_bank(f.sim, fixture("bank_small.json").c_str()) == ILL_OK);
  CHECK(std::string(ill_version()) == "1.0.0");
}

TEST_CASE("assign and evaluate return JSON documents") {
  Loaded f;
  char* out = nullptr;
  REQUIRE(ill_assign(f.corpus, f.sim, "{\"mode\": \"joint\", \"beta\": 1}", &out) == ILL_OK);
  std::string doc = take(out);
  CHECK(doc.find("\"command\": \"assign\"") != std::string::npos);
  CHECK(doc.back() == '\n');

  out = nullptr;
  REQUIRE(ill_evaluate(f.corpus, f.sim, nullptr, &out) == ILL_OK);
  CHECK(take(out).find("\"evaluation\"") != std::string::npos);

  out = nullptr;
  REQUIRE(ill_analyze(f.corpus, nullptr, "", &out) == ILL_OK);
  CHECK(take(out).find("\"concepts\"") != std::string::npos);

  out = nullptr;
  REQUIRE(ill_corpus_phrases(f.corpus, nullptr, &out) == ILL_OK);
  CHECK(take(out).find("bio-1.1-b#1") != std::string::npos);

  out = nullptr;
  REQUIRE(ill_oracle("{\"instances\": 3}", &out) == ILL_OK);
  CHECK(take(out).find("\"report\"") != std::string::npos);
}

TEST_CASE("missing files report a data error naming the path") {
  ill_simmatrix* sim = nullptr;
  CHECK(ill_sim_load("/nonexistent/sim.simm", &sim) == ILL_ERR_DATA);
  CHECK(sim == nullptr);
  CHECK(std::string(ill_last_error()).find("/nonexistent/sim.simm") != std::string::npos);
  CHECK(std::string(ill_last_error_kind()) == "io");

  ill_corpus* corpus = nullptr;
  CHECK(ill_corpus_parse("{\"books\": 1}", &corpus) == ILL_ERR_DATA);
  CHECK(std::string(ill_last_error_kind()) == "parse");

  CHECK(ill_corpus_parse("{\"books\": []}", &corpus) == ILL_OK);
  CHECK(std::string(ill_last_error()).empty());
  ill_corpus_free(corpus);
}

TEST_CASE("configuration errors are usage errors") {
  char* out = nullptr;
  CHECK(ill_config_normalize("{\"no_such_key\": 1}", &out) == ILL_ERR_USAGE);
  CHECK(out == nullptr);
  CHECK(std::string(ill_last_error()).find("no_such_key") != std::string::npos);
  CHECK(ill_config_normalize("{\"mode\": \"sideways\"}", &out) == ILL_ERR_USAGE);
  CHECK(ill_config_normalize("not json", &out) == ILL_ERR_USAGE);
  REQUIRE(ill_config_normalize("{\"overlap\": \"1/3\", \"beta\": \"2\"}", &out) == ILL_OK);
  std::string normalized = take(out);
  CHECK(normalized.find("\"beta\": 2") != std::string::npos);

  Loaded f;
  out = nullptr;
  CHECK(ill_assign(f.corpus, f.sim, "{\"tau\": \"q1.5\"}", &out) == ILL_ERR_USAGE);
}

TEST_CASE("null arguments are rejected without crashing") {
  CHECK(ill_corpus_load(nullptr, nullptr) == ILL_ERR_USAGE);
  char* out = nullptr;
  CHECK(ill_assign(nullptr, nullptr, nullptr, &out) == ILL_ERR_USAGE);
  CHECK(ill_sim_shape(nullptr, nullptr, nullptr) == ILL_ERR_USAGE);
  ill_corpus_free(nullptr);
  ill_sim_free(nullptr);
  ill_string_free(nullptr);
}

TEST_CASE("similarity matrices round trip through both encodings") {
  Loaded f;
  std::string bin = (std::filesystem::temp_directory_path() / "illustrate_capi_roundtrip.simm").string();
  REQUIRE(ill_sim_save(f.sim, bin.c_str(), "binary") == ILL_OK);
  ill_simmatrix* back = nullptr;
  REQUIRE(ill_sim_load(bin.c_str(), &back) == ILL_OK);
  double a = 0.0, b = 0.0;
  ill_sim_prob(f.sim, "img-dna", "alg-1.1-a#0", &a);
  ill_sim_prob(back, "img-dna", "alg-1.1-a#0", &b);
  CHECK(a == b);
  CHECK(ill_sim_save(back, bin.c_str(), "yaml") == ILL_ERR_USAGE);
  ill_sim_free(back);
  std::remove(bin.c_str());
}
