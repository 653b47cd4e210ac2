#include "illustrate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "illustrate/assign.hpp"
#include "illustrate/error.hpp"
#include "illustrate/simstore.hpp"

namespace illustrate {

SyntheticInstance make_instance(std::uint64_t seed, const SyntheticSpec& spec) {
  Rng rng(seed);
  SyntheticInstance inst;
  inst.seed = seed;
  inst.n_images = spec.n_images;
  inst.n_concepts = spec.n_concepts;
  inst.n_phrases = spec.n_phrases;
  inst.mentions.assign(spec.n_phrases, std::vector<bool>(spec.n_concepts, false));
  inst.sim.resize(spec.n_phrases);
  std::vector<double> all;
  for (std::size_t t = 0; t < spec.n_phrases; ++t) {
    for (std::size_t c = 0; c < spec.n_concepts; ++c) inst.mentions[t][c] = rng.bernoulli(spec.mention_density);
    std::vector<double> logits(spec.n_images);
    for (auto& l : logits) l = spec.logit_scale * rng.normal();
    inst.sim[t] = row_softmax(std::span<const double>(logits));
    all.insert(all.end(), inst.sim[t].begin(), inst.sim[t].end());
  }
  inst.tau = all.empty() ? 1.0 : quantile(all, spec.tau_quantile);

  inst.data.n_concepts = spec.n_concepts;
  inst.data.modular.assign(spec.n_images, 0.0);
  inst.data.covers.assign(spec.n_images, ConceptSet(spec.n_concepts));
  for (std::size_t i = 0; i < spec.n_images; ++i) {
    for (std::size_t t = 0; t < spec.n_phrases; ++t) {
      inst.data.modular[i] += inst.sim[t][i];
      if (inst.sim[t][i] < inst.tau) continue;
      for (std::size_t c = 0; c < spec.n_concepts; ++c) {
        if (inst.mentions[t][c]) inst.data.covers[i].set(c);
      }
    }
  }
  return inst;
}

SyntheticInstance overlap_heavy_instance() {
  SyntheticInstance inst;
  inst.n_images = 4;
  inst.n_concepts = 3;
  inst.data.n_concepts = 3;
  inst.data.modular = {0.25, 0.25, 0.25, 0.25};
  inst.data.covers.assign(4, ConceptSet(3));
  for (std::size_t i = 0; i < 3; ++i) {
    inst.data.covers[i].set(0);
    inst.data.covers[i].set(1);
  }
  inst.data.covers[3].set(2);
  return inst;
}

std::uint64_t subsets_up_to(std::size_t n, std::size_t budget) {
  std::uint64_t total = 0;
  std::uint64_t term = 1;  // C(n, k)
  for (std::size_t k = 0; k <= std::min(budget, n); ++k) {
    if (k > 0) term = term * (n - k + 1) / k;
    total += term;
    if (total > kMaxExhaustiveSubsets * 16) break;
  }
  return total;
}

OracleResult brute_force_opt(const SetObjective& f, std::size_t budget) {
  const std::size_t n = f.size();
  budget = std::min(budget, n);
  if (n > kMaxExhaustiveImages) {
    throw Error(ErrorKind::size, "exhaustive search limited to " +
                                     std::to_string(kMaxExhaustiveImages) + " images, got " +
                                     std::to_string(n));
  }
  if (subsets_up_to(n, budget) > kMaxExhaustiveSubsets) {
    throw Error(ErrorKind::size, "more than 10^6 candidate subsets");
  }
  OracleResult best;
  best.best_value = f.value({});
  best.evaluated = 1;
  std::vector<std::size_t> combo;
  for (std::size_t k = 1; k <= budget; ++k) {
    combo.resize(k);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    for (;;) {
      double v = f.value(combo);
      ++best.evaluated;
      if (v > best.best_value ||
          (v == best.best_value && std::lexicographical_compare(combo.begin(), combo.end(),
                                                                best.best_set.begin(),
                                                                best.best_set.end()))) {
        best.best_value = v;
        best.best_set = combo;
      }
      // next combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return best;
}

namespace {

std::vector<std::size_t> with(std::vector<std::size_t> set, std::size_t x) {
  set.insert(std::upper_bound(set.begin(), set.end(), x), x);
  return set;
}

}  // namespace

std::size_t check_submodular(const SetObjective& f, std::size_t trials, double tol, Rng& rng) {
  const std::size_t n = f.size();
  if (n == 0) return 0;
  std::size_t violations = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<std::size_t> a, b, rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(0.5)) {
        b.push_back(i);
        if (rng.bernoulli(0.5)) a.push_back(i);
      } else {
        rest.push_back(i);
      }
    }
    if (rest.empty()) {
      // B is the whole ground set; move one element out so x exists.
      std::size_t drop = static_cast<std::size_t>(rng.index(n));
      b.erase(std::find(b.begin(), b.end(), drop));
      auto it = std::find(a.begin(), a.end(), drop);
      if (it != a.end()) a.erase(it);
      rest.push_back(drop);
    }
    std::size_t x = rest[static_cast<std::size_t>(rng.index(rest.size()))];
    double gain_a = f.value(with(a, x)) - f.value(a);
    double gain_b = f.value(with(b, x)) - f.value(b);
    if (gain_a < gain_b - tol) ++violations;
  }
  return violations;
}

std::size_t check_monotone(const SetObjective& f, std::size_t trials, Rng& rng, double tol) {
  const std::size_t n = f.size();
  std::size_t violations = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(0.5)) {
        b.push_back(i);
        if (rng.bernoulli(0.5)) a.push_back(i);
      }
    }
    if (f.value(a) > f.value(b) + tol) ++violations;
  }
  return violations;
}

bool verify_monotone_exhaustive(const SetObjective& f, double tol) {
  const std::size_t n = f.size();
  if (n > kMaxExhaustiveImages) {
    throw Error(ErrorKind::size, "exhaustive monotonicity check limited to 20 images");
  }
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> values(masks);
  std::vector<std::size_t> set;
  for (std::size_t m = 0; m < masks; ++m) {
    set.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1u) set.push_back(i);
    }
    values[m] = f.value(set);
  }
  for (std::size_t m = 0; m < masks; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1u) continue;
      if (values[m | (std::size_t{1} << i)] < values[m] - tol) return false;
    }
  }
  return true;
}

RatioReport greedy_ratio_report(std::span<const SyntheticInstance> instances, Objective objective,
                                std::size_t budget, double beta, std::size_t trials, double tol) {
  RatioReport report;
  std::vector<double> monotone_ratios;
  for (const auto& inst : instances) {
    SetObjective f(objective, inst.data, beta);
    RatioEntry e;
    e.seed = inst.seed;
    OracleResult opt = brute_force_opt(f, budget);
    auto steps = greedy_select(f, budget);
    std::vector<std::size_t> chosen;
    for (const auto& s : steps) chosen.push_back(s.candidate);
    std::sort(chosen.begin(), chosen.end());
    e.opt = opt.best_value;
    e.greedy = f.value(chosen);
    e.ratio = e.opt > 0.0 ? e.greedy / e.opt : 1.0;
    double check_tol = f.integer_valued() ? 0.0 : tol;
    e.monotone = verify_monotone_exhaustive(f, check_tol);
    Rng rng(inst.seed ^ 0x5bd1e995u);
    e.submodular_violations = check_submodular(f, trials, check_tol, rng);
    if (e.monotone) {
      e.bound_checked = true;
      e.bound_holds = e.greedy >= kGreedyBound * e.opt - tol;
      if (!e.bound_holds) ++report.bound_failures;
      monotone_ratios.push_back(e.ratio);
    }
    report.entries.push_back(e);
  }
  report.monotone_instances = monotone_ratios.size();
  if (!monotone_ratios.empty()) {
    std::sort(monotone_ratios.begin(), monotone_ratios.end());
    report.min_ratio = monotone_ratios.front();
    std::size_t m = monotone_ratios.size();
    report.median_ratio = m % 2 ? monotone_ratios[m / 2]
                                : 0.5 * (monotone_ratios[m / 2 - 1] + monotone_ratios[m / 2]);
  }
  return report;
}

}  // namespace illustrate
