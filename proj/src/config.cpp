#include "illustrate/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "illustrate/error.hpp"

namespace illustrate {

using nlohmann::json;

double parse_ratio(const std::string& text) {
  auto parse = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorKind::usage, "cannot parse ratio '" + text + "'");
    }
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse(text);
  double den = parse(std::string_view(text).substr(slash + 1));
  if (den == 0.0) throw Error(ErrorKind::usage, "zero denominator in ratio '" + text + "'");
  return parse(std::string_view(text).substr(0, slash)) / den;
}

namespace {

template <typename T>
T number(const json& v, const std::string& key) {
  if constexpr (std::is_floating_point_v<T>) {
    if (v.is_number()) return v.get<T>();
    if (v.is_string()) return static_cast<T>(parse_ratio(v.get<std::string>()));
  } else {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
      return v.get<T>();
    }
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      T out{};
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return out;
    }
  }
  throw Error(ErrorKind::usage, "config key '" + key + "' has an invalid value " + v.dump());
}

std::string text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw Error(ErrorKind::usage, "config key '" + key + "' must be a string");
}

bool boolean(const json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  throw Error(ErrorKind::usage, "config key '" + key + "' must be a boolean");
}

}  // namespace

void apply(RunConfig& cfg, const json& doc) {
  if (doc.is_null()) return;
  if (!doc.is_object()) throw Error(ErrorKind::usage, "configuration must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "corpus") cfg.corpus = text(v, key);
    else if (key == "similarity") cfg.similarity = text(v, key);
    else if (key == "bank") cfg.bank = text(v, key);
    else if (key == "output") cfg.output = text(v, key);
    else if (key == "mode") cfg.mode = parse_mode(text(v, key));
    else if (key == "tau") cfg.tau = v.is_number() ? TauPolicy::fixed(v.get<double>()) : parse_tau(text(v, key));
    else if (key == "beta") cfg.beta = number<double>(v, key);
    else if (key == "budget") cfg.budget = text(v, key);
    else if (key == "alloc_score") cfg.alloc_score = parse_alloc_score(text(v, key));
    else if (key == "lazy") cfg.lazy = boolean(v, key);
    else if (key == "window") cfg.window = number<std::size_t>(v, key);
    else if (key == "overlap") cfg.overlap = number<double>(v, key);
    else if (key == "agg") cfg.agg = parse_aggregation(text(v, key));
    else if (key == "split") {
      try {
        cfg.split = parse_split(text(v, key));
      } catch (const Error&) {
        throw Error(ErrorKind::usage, "unknown split " + v.dump());
      }
    }
    else if (key == "seed") cfg.seed = number<std::uint64_t>(v, key);
    else if (key == "parallelism") cfg.parallelism = number<std::size_t>(v, key);
    else if (key == "topk") cfg.topk = number<std::size_t>(v, key);
    else if (key == "instances") cfg.instances = number<std::size_t>(v, key);
    else if (key == "images") cfg.images = number<std::size_t>(v, key);
    else if (key == "concepts") cfg.concepts = number<std::size_t>(v, key);
    else if (key == "phrases") cfg.phrases = number<std::size_t>(v, key);
    else if (key == "oracle_budget") cfg.oracle_budget = number<std::size_t>(v, key);
    else if (key == "objective") cfg.objective = parse_objective(text(v, key));
    else if (key == "trials") cfg.trials = number<std::size_t>(v, key);
    else if (key == "density") cfg.density = number<double>(v, key);
    else throw Error(ErrorKind::usage, "unknown configuration key '" + key + "'");
  }
}

RunConfig run_config_from_json(const json& doc) {
  RunConfig cfg;
  apply(cfg, doc);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  objective_config().validate();
  window_config().stride();
  parse_budget(budget);
  if (parallelism == 0) throw Error(ErrorKind::usage, "parallelism must be at least 1");
  if (topk == 0) throw Error(ErrorKind::usage, "topk must be at least 1");
  if (!(density >= 0.0 && density <= 1.0)) throw Error(ErrorKind::usage, "density must lie in [0, 1]");
}

json to_json(const RunConfig& c) {
  json j = provenance(c);
  j["output"] = c.output;
  j["parallelism"] = c.parallelism;
  return j;
}

json provenance(const RunConfig& c) {
  return {{"corpus", c.corpus},
          {"similarity", c.similarity},
          {"bank", c.bank},
          {"mode", to_string(c.mode)},
          {"tau", to_string(c.tau)},
          {"beta", c.beta},
          {"budget", c.budget},
          {"alloc_score", to_string(c.alloc_score)},
          {"lazy", c.lazy},
          {"window", c.window},
          {"overlap", c.overlap},
          {"agg", to_string(c.agg)},
          {"split", to_string(c.split)},
          {"seed", c.seed},
          {"topk", c.topk},
          {"instances", c.instances},
          {"images", c.images},
          {"concepts", c.concepts},
          {"phrases", c.phrases},
          {"oracle_budget", c.oracle_budget},
          {"objective", to_string(c.objective)},
          {"trials", c.trials},
          {"density", c.density}};
}

}  // namespace illustrate
