#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "illustrate/evalmetrics.hpp"
#include "illustrate/random.hpp"
#include "illustrate/report.hpp"
#include "support.hpp"

using namespace illustrate;
using testing::error_kind;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("i" + std::to_string(100 + i));
  return out;
}

}  // namespace

TEST_CASE("ranking breaks ties by ascending id") {
  std::vector<std::string> names{"c", "a", "b", "d"};
  std::vector<double> rel{0.2, 0.5, 0.2, 0.9};
  CHECK(rank_images(rel, names) == std::vector<std::string>{"d", "a", "b", "c"});
  std::vector<double> short_rel{1.0};
  CHECK(error_kind([&] { rank_images(short_rel, names); }) == ErrorKind::dimension);
}

TEST_CASE("precision and recall examples") {
  std::vector<std::string> ranking{"a", "b", "c", "d", "e"};
  std::vector<std::string> gold{"b", "e"};
  auto at1 = precision_recall_at(ranking, gold, 1);
  CHECK(at1.precision == 0.0);
  CHECK(at1.recall == 0.0);
  auto at2 = precision_recall_at(ranking, gold, 2);
  CHECK(at2.precision == 0.5);
  CHECK(at2.recall == 0.5);
  auto at5 = precision_recall_at(ranking, gold, 5);
  CHECK(at5.precision == doctest::Approx(0.4));
  CHECK(at5.recall == 1.0);
  // K beyond the ranking still divides by K
  auto at10 = precision_recall_at(ranking, gold, 10);
  CHECK(at10.precision == doctest::Approx(0.2));
  CHECK(at10.recall == 1.0);
  CHECK(mean_gold_rank(ranking, gold) == 3.5);
}

TEST_CASE("metric error kinds") {
  std::vector<std::string> ranking{"a", "b"};
  std::vector<std::string> none;
  std::vector<std::string> missing{"z"};
  CHECK(error_kind([&] { precision_recall_at(ranking, none, 1); }) == ErrorKind::empty_input);
  CHECK(error_kind([&] { precision_recall_at(ranking, ranking, 0); }) == ErrorKind::usage);
  CHECK(error_kind([&] { mean_gold_rank(ranking, none); }) == ErrorKind::empty_input);
  CHECK(error_kind([&] { mean_gold_rank(ranking, missing); }) == ErrorKind::lookup);
}

TEST_CASE("macro averages over a hand-computed table") {
  // Bank of 6 images, one phrase per subsection, relevance set by the logits.
  Section s;
  s.id = "s";
  s.subsections.push_back(testing::make_sub("u1", "one", {}, {"a"}));
  s.subsections.push_back(testing::make_sub("u2", "two", {}, {"b", "c"}));
  s.subsections.push_back(testing::make_sub("u3", "three", {}, {"d"}));
  s.subsections.push_back(testing::make_sub("u4", "four", {}, {"e", "f"}));
  s.subsections.push_back(testing::make_sub("u5", "five", {}, {}));
  std::vector<std::string> bank{"a", "b", "c", "d", "e", "f"};
  // rankings: u1 a.. | u2 b,a,c.. | u3 .. d last | u4 e,f first
  SimMatrix sim = testing::from_probs(
      {"u1#0", "u2#0", "u3#0", "u4#0", "u5#0"}, bank,
      {{0.5, 0.1, 0.1, 0.1, 0.1, 0.1},
       {0.25, 0.3, 0.2, 0.1, 0.1, 0.05},
       {0.3, 0.2, 0.2, 0.05, 0.15, 0.1},
       {0.05, 0.05, 0.05, 0.05, 0.4, 0.4},
       {0.2, 0.2, 0.2, 0.2, 0.1, 0.1}});
  auto r = evaluate(testing::single_section(s), sim, WindowConfig{});
  CHECK(r.evaluated == 4);
  CHECK(r.skipped == 1);
  CHECK(r.bank_size == 6);
  // per subsection P@1: 1, 1, 0, 1
  CHECK(r.precision[0] == doctest::Approx(0.75));
  // R@1: 1, 0.5, 0, 0.5
  CHECK(r.recall[0] == doctest::Approx(0.5));
  // P@5: 1/5, 2/5, 0, 2/5; R@5: 1, 1, 0, 1
  CHECK(r.precision[1] == doctest::Approx(0.25));
  CHECK(r.recall[1] == doctest::Approx(0.75));
  // all six images ranked: R@20 = 1, P@20 = |g|/20
  CHECK(r.recall[2] == 1.0);
  CHECK(r.precision[2] == doctest::Approx((1 + 2 + 1 + 2) / 80.0));
  // P@R: 1, 1/2, 0, 1
  CHECK(r.precision_r == doctest::Approx(0.625));
  CHECK(r.recall_r == doctest::Approx(0.625));
  // gold ranks: 1 | (1+3)/2 | 6 | (1+2)/2
  CHECK(r.mean_gold_rank == doctest::Approx((1.0 + 2.0 + 6.0 + 1.5) / 4.0));

  auto doc = to_json(r);
  CHECK(doc["precision"]["@1"].get<double>() == doctest::Approx(75.0));
  CHECK(doc["recall"]["@R"].get<double>() == doctest::Approx(62.5));
}

TEST_CASE("perfect rankings saturate recall and R-precision") {
  auto data = testing::synthetic_corpus(4, 20, 4, 10);
  // Gold images get a huge logit everywhere they belong.
  std::vector<float> logits;
  const auto& images = data.sim.image_ids();
  for (std::size_t r = 0; r < data.sim.rows(); ++r) {
    std::string sub = data.sim.phrase_ids()[r].substr(0, data.sim.phrase_ids()[r].find('#'));
    for (const auto& img : images) logits.push_back(img.rfind("img-" + sub + "-", 0) == 0 ? 20.0f : 0.0f);
  }
  SimMatrix perfect(data.sim.phrase_ids(), images, logits);
  auto r = evaluate(data.corpus, perfect, WindowConfig{});
  REQUIRE(r.evaluated > 0);
  CHECK(r.precision_r == doctest::Approx(1.0));
  CHECK(r.recall_r == doctest::Approx(1.0));
  // Gold sets hold at most two images, so recall saturates from K = 5 on.
  for (std::size_t j = 1; j < kCutoffs.size(); ++j) CHECK(r.recall[j] == doctest::Approx(1.0));
  double expected_rank = 0.0;
  for (const auto& s : r.subsections) expected_rank += (static_cast<double>(s.gold) + 1.0) / 2.0;
  CHECK(r.mean_gold_rank == doctest::Approx(expected_rank / static_cast<double>(r.evaluated)));
}

TEST_CASE("random rankings place gold at the middle on average") {
  Rng rng(17);
  const std::size_t n = 50;
  auto bank = ids(n);
  double total = 0.0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> rel(n);
    for (auto& v : rel) v = rng.uniform();
    auto ranking = rank_images(rel, bank);
    std::vector<std::string> gold{bank[rng.index(n)]};
    total += mean_gold_rank(ranking, gold);
  }
  CHECK(total / trials == doctest::Approx((n + 1) / 2.0).epsilon(0.02));
}

TEST_CASE("recall is non-decreasing in K and precision times K counts hits") {
  Rng rng(23);
  auto bank = ids(30);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> rel(bank.size());
    for (auto& v : rel) v = rng.uniform();
    auto ranking = rank_images(rel, bank);
    std::vector<std::string> gold;
    for (const auto& id : bank) {
      if (rng.bernoulli(0.15)) gold.push_back(id);
    }
    if (gold.empty()) gold.push_back(bank[0]);
    double last = 0.0;
    for (std::size_t k = 1; k <= 40; ++k) {
      auto pr = precision_recall_at(ranking, gold, k);
      CHECK(pr.recall >= last);
      last = pr.recall;
      double hits = pr.precision * static_cast<double>(k);
      CHECK(hits == doctest::Approx(pr.recall * static_cast<double>(gold.size())));
    }
    CHECK(last == 1.0);
    auto at_r = precision_recall_at(ranking, gold, gold.size());
    CHECK(at_r.precision == doctest::Approx(at_r.recall));
  }
}

TEST_CASE("evaluation output does not depend on the worker count") {
  auto data = testing::synthetic_corpus(61, 50, 5, 25);
  RunConfig cfg;
  std::string one = render(run_evaluate(data.corpus, data.sim, cfg));
  for (std::size_t workers : {2u, 8u}) {
    cfg.parallelism = workers;
    CHECK(render(run_evaluate(data.corpus, data.sim, cfg)) == one);
  }
}
