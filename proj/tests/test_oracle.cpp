#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "illustrate/assign.hpp"
#include "illustrate/oracle.hpp"
#include "illustrate/report.hpp"
#include "support.hpp"

using namespace illustrate;
using testing::error_kind;

namespace {

CoverageData modular_data(const std::vector<double>& scores) {
  CoverageData d;
  d.n_concepts = 1;
  d.modular = scores;
  d.covers.assign(scores.size(), ConceptSet(1));
  return d;
}

std::vector<SyntheticInstance> instances(std::uint64_t first, std::size_t count,
                                         const SyntheticSpec& spec = {}) {
  std::vector<SyntheticInstance> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(make_instance(first + i, spec));
  return out;
}

}  // namespace

TEST_CASE("subset counting") {
  CHECK(subsets_up_to(10, 3) == 176);
  CHECK(subsets_up_to(4, 4) == 16);
  CHECK(subsets_up_to(20, 20) > kMaxExhaustiveSubsets);
  CHECK(subsets_up_to(20, 5) == 21700);
}

TEST_CASE("a budget covering the whole bank returns every image when f is monotone") {
  auto inst = make_instance(3, {6, 5, 8, 0.3, 2.0, 0.8});
  SetObjective c(Objective::coverage, inst.data);
  SetObjective s(Objective::local, inst.data);
  auto r = brute_force_opt(s, 6);
  CHECK(r.best_set == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
  CHECK(brute_force_opt(c, 6).best_value == c.value(all));
  CHECK(r.evaluated == 64);
}

TEST_CASE("modular objectives are maximised by the top-B scores") {
  CoverageData d = modular_data({0.1, 0.7, 0.3, 0.9, 0.2});
  SetObjective f(Objective::local, d);
  auto r = brute_force_opt(f, 2);
  CHECK(r.best_set == std::vector<std::size_t>{1, 3});
  CHECK(r.best_value == doctest::Approx(1.6));
}

TEST_CASE("ties resolve to the lexicographically smallest set") {
  CoverageData d = modular_data({0.5, 0.5, 0.5});
  SetObjective f(Objective::local, d);
  CHECK(brute_force_opt(f, 2).best_set == std::vector<std::size_t>{0, 1});
  CoverageData zero = modular_data({0.0, 0.0});
  SetObjective z(Objective::coverage, zero);
  CHECK(brute_force_opt(z, 2).best_set.empty());
}

TEST_CASE("oversized instances are refused") {
  SyntheticSpec big;
  big.n_images = 21;
  auto inst21 = make_instance(1, big);
  SetObjective f21(Objective::coverage, inst21.data);
  CHECK(error_kind([&] { brute_force_opt(f21, 2); }) == ErrorKind::size);
  big.n_images = 20;
  auto inst20 = make_instance(1, big);
  SetObjective f20(Objective::coverage, inst20.data);
  CHECK(error_kind([&] { brute_force_opt(f20, 20); }) == ErrorKind::size);
  CHECK_NOTHROW(brute_force_opt(f20, 3));
}

TEST_CASE("golden seed-42 coverage instance") {
  SyntheticSpec spec;
  spec.n_images = 8;
  auto inst = make_instance(42, spec);
  SetObjective f(Objective::coverage, inst.data);
  auto r = brute_force_opt(f, 3);
  // Image 3 alone covers all eight concepts; among the optimal sets the
  // lexicographically smallest id sequence is {0, 1, 3}.
  CHECK(r.best_set == std::vector<std::size_t>{0, 1, 3});
  CHECK(r.best_value == 8.0);
  CHECK(r.evaluated == 93);
}

TEST_CASE("coverage objectives are submodular and monotone; G is submodular") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = make_instance(seed);
    Rng rng(seed);
    for (Objective kind : {Objective::local, Objective::coverage, Objective::neg_redundancy,
                           Objective::global, Objective::joint}) {
      SetObjective f(kind, inst.data, 0.7);
      CHECK(check_submodular(f, 200, f.integer_valued() ? 0.0 : 1e-12, rng) == 0);
    }
    SetObjective s(Objective::local, inst.data);
    SetObjective c(Objective::coverage, inst.data);
    SetObjective r(Objective::redundancy, inst.data);
    CHECK(check_monotone(s, 200, rng, 1e-12) == 0);
    CHECK(check_monotone(c, 200, rng) == 0);
    CHECK(check_monotone(r, 200, rng) == 0);
    CHECK(verify_monotone_exhaustive(c));
  }
}

TEST_CASE("redundancy is supermodular on overlap-heavy instances") {
  auto inst = overlap_heavy_instance();
  SetObjective r(Objective::redundancy, inst.data);
  Rng rng(1);
  CHECK(check_submodular(r, 500, 0.0, rng) > 0);
}

TEST_CASE("G is not monotone when images repeat concepts") {
  auto inst = overlap_heavy_instance();
  SetObjective g(Objective::global, inst.data);
  CHECK_FALSE(verify_monotone_exhaustive(g));
  std::vector<std::size_t> one{0}, two{0, 1};
  CHECK(g.value(one) == 2.0);
  CHECK(g.value(two) == 0.0);
  Rng rng(2);
  CHECK(check_monotone(g, 500, rng) > 0);
}

TEST_CASE("greedy is optimal for modular objectives") {
  auto set = instances(100, 30);
  auto report = greedy_ratio_report(set, Objective::local, 3);
  CHECK(report.monotone_instances == 30);
  for (const auto& e : report.entries) CHECK(e.ratio == doctest::Approx(1.0).epsilon(1e-12));
  auto joint0 = greedy_ratio_report(set, Objective::joint, 4, 0.0);
  CHECK(joint0.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("greedy meets the (1 - 1/e) bound on random coverage instances") {
  auto set = instances(7, 100);
  auto report = greedy_ratio_report(set, Objective::coverage, 3);
  CHECK(report.monotone_instances == 100);
  CHECK(report.bound_failures == 0);
  CHECK(report.min_ratio >= kGreedyBound);
  CHECK(report.median_ratio <= 1.0);
  for (const auto& e : report.entries) {
    CHECK(e.greedy <= e.opt);
    CHECK(e.submodular_violations == 0);
  }
}

TEST_CASE("the ratio report is deterministic") {
  auto set = instances(11, 20);
  auto a = greedy_ratio_report(set, Objective::joint, 3, 1.0);
  auto b = greedy_ratio_report(set, Objective::joint, 3, 1.0);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(make_instance(5).data.covers == make_instance(5).data.covers);
}

TEST_CASE("oracle run document") {
  RunConfig cfg;
  cfg.instances = 5;
  auto doc = run_oracle(cfg);
  CHECK(doc["command"] == "oracle");
  CHECK(render(doc) == render(run_oracle(cfg)));
}
