#include "illustrate/assign.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "illustrate/error.hpp"
#include "illustrate/parallel.hpp"

namespace illustrate {

BudgetPolicy parse_budget(std::string_view text) {
  if (text == "gold") return BudgetPolicy::gold();
  if (text == "predicted") return BudgetPolicy{BudgetPolicy::Kind::predicted, 0, std::nullopt};
  for (std::string_view prefix : {"fixed:", "fixed="}) {
    if (text.substr(0, prefix.size()) == prefix) {
      auto digits = text.substr(prefix.size());
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
        return BudgetPolicy::fixed(n);
      }
    }
  }
  throw Error(ErrorKind::usage,
              "budget must be 'gold', 'fixed:N' or 'predicted', got '" + std::string(text) + "'");
}

std::string to_string(const BudgetPolicy& policy) {
  switch (policy.kind) {
    case BudgetPolicy::Kind::gold: return "gold";
    case BudgetPolicy::Kind::fixed: return "fixed:" + std::to_string(policy.fixed_n);
    case BudgetPolicy::Kind::predicted: return "predicted";
  }
  return "gold";
}

std::vector<std::size_t> quotas(const Section& s, const BudgetPolicy& policy) {
  std::vector<std::size_t> q;
  q.reserve(s.subsections.size());
  for (std::size_t u = 0; u < s.subsections.size(); ++u) {
    switch (policy.kind) {
      case BudgetPolicy::Kind::gold:
        q.push_back(s.subsections[u].gold_images.size());
        break;
      case BudgetPolicy::Kind::fixed:
        q.push_back(policy.fixed_n);
        break;
      case BudgetPolicy::Kind::predicted: {
        if (!policy.model) {
          throw Error(ErrorKind::usage, "predicted budget requires a fitted image-count model");
        }
        double v = policy.model->predict(extract_features(s, u));
        q.push_back(static_cast<std::size_t>(std::lround(std::max(0.0, v))));
        break;
      }
    }
  }
  return q;
}

const char* to_string(AllocScore a) {
  return a == AllocScore::single_image ? "single_image" : "full_set";
}

AllocScore parse_alloc_score(std::string_view name) {
  if (name == "single_image") return AllocScore::single_image;
  if (name == "full_set") return AllocScore::full_set;
  throw Error(ErrorKind::usage, "unknown allocation score '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

std::vector<GreedyStep> greedy_select_naive(const SetObjective& f, std::size_t budget) {
  const std::size_t n = f.size();
  std::vector<GreedyStep> steps;
  std::vector<bool> used(n, false);
  SetObjective::State state(f);
  while (steps.size() < std::min(budget, n)) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_x = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (used[x]) continue;
      double g = state.gain(x);
      if (g > best) {
        best = g;
        best_x = x;
      }
    }
    if (best_x == n || best <= 0.0) break;
    used[best_x] = true;
    state.add(best_x);
    steps.push_back({best_x, best});
  }
  return steps;
}

std::vector<GreedyStep> greedy_select(const SetObjective& f, std::size_t budget) {
  if (f.kind() == Objective::redundancy) return greedy_select_naive(f, budget);
  const std::size_t n = f.size();
  budget = std::min(budget, n);
  struct Entry {
    double bound;
    std::size_t x;
    std::size_t stamp;
  };
  // Max-heap on bound; equal bounds pop the smaller index first.
  auto lower = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.x > b.x;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
  SetObjective::State state(f);
  if (budget == 0) return {};
  for (std::size_t x = 0; x < n; ++x) heap.push({state.gain(x), x, 0});

  std::vector<GreedyStep> steps;
  while (steps.size() < budget) {
    const std::size_t round = steps.size();
    while (heap.top().stamp != round) {
      Entry e = heap.top();
      heap.pop();
      e.bound = state.gain(e.x);
      e.stamp = round;
      heap.push(e);
    }
    Entry best = heap.top();
    if (best.bound <= 0.0) break;
    heap.pop();
    state.add(best.x);
    steps.push_back({best.x, best.bound});
  }
  return steps;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> allocate(const SectionModel& model, std::span<const std::size_t> selected,
                                  std::span<const std::size_t> quota, Mode mode, double beta,
                                  AllocScore alloc_score) {
  if (mode == Mode::local) {
    throw Error(ErrorKind::usage, "local mode does not allocate a shared selection");
  }
  const std::size_t n_sub = model.n_subsections();
  if (quota.size() != n_sub) throw Error(ErrorKind::allocation, "quota count != subsection count");
  std::size_t capacity = std::accumulate(quota.begin(), quota.end(), std::size_t{0});
  if (selected.size() > capacity) {
    throw Error(ErrorKind::allocation, "section '" + model.section().id + "': " +
                                           std::to_string(selected.size()) +
                                           " selected images exceed the total quota of " +
                                           std::to_string(capacity));
  }
  std::vector<std::size_t> left(quota.begin(), quota.end());
  std::vector<double> mass(n_sub, 0.0);
  std::vector<ConceptSet> covered(n_sub, ConceptSet(model.n_concepts()));
  std::vector<std::size_t> out;
  out.reserve(selected.size());
  for (std::size_t k : selected) {
    std::size_t best_u = n_sub;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n_sub; ++u) {
      if (left[u] == 0) continue;
      double score = 0.0;
      if (alloc_score == AllocScore::full_set) {
        ConceptSet c = covered[u];
        c |= model.subsection_covers(k, u);
        double cov_count = static_cast<double>(c.count());
        double s = mass[u] + model.local_score(k, u);
        score = mode == Mode::global ? cov_count : s + beta * cov_count;
      } else {
        double cov_count = static_cast<double>(model.subsection_coverage(k, u));
        score = mode == Mode::global ? cov_count : model.local_score(k, u) + beta * cov_count;
      }
      if (score > best) {
        best = score;
        best_u = u;
      }
    }
    --left[best_u];
    mass[best_u] += model.local_score(k, best_u);
    covered[best_u] |= model.subsection_covers(k, best_u);
    out.push_back(best_u);
  }
  return out;
}

namespace {

Assignment empty_assignment(const SectionModel& model, Mode mode, double beta, AllocScore alloc,
                            std::span<const std::size_t> quota) {
  Assignment a;
  a.section_id = model.section().id;
  a.mode = mode;
  a.tau = model.tau();
  a.beta = beta;
  a.alloc_score = alloc;
  a.quotas.assign(quota.begin(), quota.end());
  for (const auto& u : model.section().subsections) a.allocation.emplace_back(u.id, std::vector<std::string>{});
  return a;
}

}  // namespace

Assignment assign_local(const SectionModel& model, std::span<const std::size_t> quota) {
  Assignment a = empty_assignment(model, Mode::local, 0.0, AllocScore::single_image, quota);
  const std::size_t n = model.n_images();
  std::set<std::size_t> seen;
  for (std::size_t u = 0; u < model.n_subsections(); ++u) {
    std::size_t q = quota[u];
    if (q > n) {
      throw Error(ErrorKind::allocation, "subsection '" + model.section().subsections[u].id +
                                             "' needs " + std::to_string(q) + " images but the bank holds " +
                                             std::to_string(n));
    }
    if (q == 0) continue;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(q), idx.end(),
                      [&](std::size_t x, std::size_t y) {
                        double sx = model.local_score(x, u), sy = model.local_score(y, u);
                        if (sx != sy) return sx > sy;
                        return x < y;
                      });
    for (std::size_t r = 0; r < q; ++r) {
      std::size_t k = idx[r];
      const std::string& id = model.image_id(k);
      a.allocation[u].second.push_back(id);
      if (seen.insert(k).second) a.selected.push_back(id);
      double s = model.local_score(k, u);
      a.diagnostics.push_back({id, a.allocation[u].first, s, model.subsection_coverage(k, u), s});
    }
  }
  return a;
}

Assignment assign(const SectionModel& model, const AssignConfig& cfg,
                  std::span<const std::size_t> quota) {
  const Mode mode = cfg.objective.mode;
  if (mode == Mode::local) return assign_local(model, quota);
  Assignment a = empty_assignment(model, mode, cfg.objective.beta, cfg.alloc_score, quota);
  std::size_t budget = std::accumulate(quota.begin(), quota.end(), std::size_t{0});
  SetObjective f(mode == Mode::global ? Objective::global : Objective::joint, model.coverage_data(),
                 cfg.objective.beta);
  auto steps = cfg.lazy ? greedy_select(f, budget) : greedy_select_naive(f, budget);
  std::vector<std::size_t> picked;
  for (const auto& s : steps) picked.push_back(s.candidate);
  auto where = allocate(model, picked, quota, mode, cfg.objective.beta, cfg.alloc_score);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::size_t k = steps[i].candidate;
    std::size_t u = where[i];
    const std::string& id = model.image_id(k);
    a.selected.push_back(id);
    a.allocation[u].second.push_back(id);
    a.diagnostics.push_back(
        {id, a.allocation[u].first, steps[i].gain, model.subsection_coverage(k, u), model.local_score(k, u)});
  }
  return a;
}

std::vector<Assignment> assign_corpus(const Corpus& corpus, const SimMatrix& sim,
                                      const WindowConfig& window, const AssignConfig& cfg,
                                      const BudgetPolicy& policy, Split split,
                                      std::size_t parallelism) {
  cfg.objective.validate();
  auto sections = corpus.sections(split);
  std::vector<Assignment> out(sections.size());
  parallel_for(sections.size(), parallelism, [&](std::size_t i) {
    SectionModel model(*sections[i], sim, window, cfg.objective.tau);
    auto q = quotas(*sections[i], policy);
    out[i] = assign(model, cfg, q);
  });
  std::sort(out.begin(), out.end(),
            [](const Assignment& a, const Assignment& b) { return a.section_id < b.section_id; });
  return out;
}

}  // namespace illustrate
