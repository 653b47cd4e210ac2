#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "illustrate/illustrate.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail_from_api(ill_status status) {
  throw Failure{static_cast<int>(status), ill_last_error_kind(), ill_last_error()};
}

void check(ill_status status) {
  if (status != ILL_OK) fail_from_api(status);
}

struct CorpusHandle {
  ill_corpus* p = nullptr;
  ~CorpusHandle() { ill_corpus_free(p); }
};

struct SimHandle {
  ill_simmatrix* p = nullptr;
  ~SimHandle() { ill_sim_free(p); }
};

std::string take(char* s) {
  std::string out(s);
  ill_string_free(s);
  return out;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{2, "io", "cannot write '" + tmp.string() + "'"};
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Failure{2, "io", "write failed for '" + tmp.string() + "'"};
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Failure{2, "io", "cannot move output into place at '" + path.string() + "'"};
  }
}

void deliver(const std::string& output, const std::string& text) {
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    write_atomic(output, text);
  }
}

std::string env_name(const std::string& key) {
  std::string out = "ILLUSTRATE_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Flag values collected per subcommand, keyed by configuration key.
struct Layered {
  std::string config_file;
  std::map<std::string, std::string> flags;
  std::vector<std::string> keys;  // keys this subcommand accepts from env
};

json resolve(const Layered& l) {
  json doc = json::object();
  if (!l.config_file.empty()) {
    std::ifstream in(l.config_file);
    if (!in) throw Failure{2, "io", "cannot open config file '" + l.config_file + "'"};
    json file;
    try {
      in >> file;
    } catch (const json::exception& e) {
      throw Failure{2, "parse", "config file '" + l.config_file + "': " + e.what()};
    }
    if (!file.is_object()) throw Failure{1, "usage", "config file must hold a JSON object"};
    doc.update(file);
  }
  for (const auto& key : l.keys) {
    if (const char* v = std::getenv(env_name(key).c_str())) doc[key] = v;
  }
  for (const auto& [key, value] : l.flags) doc[key] = value;
  return doc;
}

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help)
      : sub_(app.add_subcommand(name, help)) {
    sub_->add_option("--config", layered_.config_file, "JSON configuration file");
  }

  void option(const std::string& flag, const std::string& key, const std::string& help) {
    auto it = storage_.emplace(key, std::make_unique<std::string>()).first;
    auto* opt = sub_->add_option(flag, *it->second, help);
    options_.emplace_back(key, opt);
    layered_.keys.push_back(key);
  }

  void toggle(const std::string& flag, const std::string& key, const std::string& value,
              const std::string& help) {
    auto* opt = sub_->add_flag(flag, help);
    toggles_.push_back({key, value, opt});
    layered_.keys.push_back(key);
  }

  CLI::App* app() { return sub_; }

  json config() {
    layered_.flags.clear();
    for (auto& [key, opt] : options_) {
      if (opt->count() > 0) layered_.flags[key] = *storage_.at(key);
    }
    for (auto& t : toggles_) {
      if (t.opt->count() > 0) layered_.flags[t.key] = t.value;
    }
    return resolve(layered_);
  }

 private:
  struct Toggle {
    std::string key;
    std::string value;
    CLI::Option* opt;
  };
  CLI::App* sub_;
  Layered layered_;
  std::map<std::string, std::unique_ptr<std::string>> storage_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
  std::vector<Toggle> toggles_;
};

std::string required(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_string() || cfg[key].get<std::string>().empty()) {
    throw Failure{1, "usage", "missing --" + key};
  }
  return cfg[key].get<std::string>();
}

std::string optional_text(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_string()) return {};
  return cfg[key].get<std::string>();
}

void load_inputs(const json& cfg, CorpusHandle& corpus, SimHandle* sim, bool sim_required) {
  check(ill_corpus_load(required(cfg, "corpus").c_str(), &corpus.p));
  if (!sim) return;
  std::string path = sim_required ? required(cfg, "similarity") : optional_text(cfg, "similarity");
  if (path.empty()) return;
  check(ill_sim_load(path.c_str(), &sim->p));
  std::string bank = optional_text(cfg, "bank");
  if (!bank.empty()) check(ill_sim_check_bank(sim->p, bank.c_str()));
}

void validate(const json& cfg) {
  char* out = nullptr;
  check(ill_config_normalize(cfg.dump().c_str(), &out));
  ill_string_free(out);
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << "\n";
  }
  write_atomic(path, out.str());
}

std::string cell(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void write_tables(const fs::path& dir, const json& report) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{2, "io", "cannot create table directory '" + dir.string() + "'"};
  for (const char* name : {"concepts_histogram", "mentions_histogram", "spread_histogram"}) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["concepts"][name]) rows.push_back({cell(r["value"]), cell(r["count"])});
    write_csv(dir / (std::string(name) + ".csv"), {"value", "count"}, rows);
  }
  if (report["regression"].value("status", "") == "ok") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["regression"]["coefficients"]) {
      rows.push_back({cell(r["name"]), cell(r["coefficient"]), cell(r["std_error"]), cell(r["t"]),
                      cell(r["p"])});
    }
    write_csv(dir / "regression.csv", {"name", "coefficient", "std_error", "t", "p"}, rows);
  }
  if (report.contains("exclusivity")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [subject, t] : report["exclusivity"].items()) {
      rows.push_back({subject, cell(t["before"]), cell(t["present"]), cell(t["after"]),
                      cell(t["share_before"]), cell(t["share_present"]), cell(t["share_after"])});
    }
    write_csv(dir / "exclusivity.csv",
              {"subject", "before", "present", "after", "share_before", "share_present",
               "share_after"},
              rows);
  }
  if (report.contains("topk_concept_coverage")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["topk_concept_coverage"]) {
      rows.push_back({cell(r["k"]), cell(r["mean_fraction"]), cell(r["evaluated"])});
    }
    write_csv(dir / "topk_concept_coverage.csv", {"k", "mean_fraction", "evaluated"}, rows);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Textbook image assignment engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ill_version()));

  auto common = [](Command& c) {
    c.option("--corpus", "corpus", "corpus JSON file");
    c.option("-o,--output", "output", "output file (stdout when omitted)");
    c.option("--window", "window", "phrase window in tokens");
    c.option("--overlap", "overlap", "window overlap ratio, e.g. 1/3");
    c.option("--split", "split", "train, dev, test or all");
    c.option("--seed", "seed", "seed for all randomness");
    c.option("--parallelism", "parallelism", "worker threads");
  };

  Command ingest(app, "ingest", "validate a corpus and report its counts");
  common(ingest);
  std::string phrases_out;
  ingest.app()->add_option("--phrases", phrases_out, "also write the phrase table here");

  Command analyze(app, "analyze", "corpus statistics, image-count regression and phrase analyses");
  common(analyze);
  analyze.option("--similarity", "similarity", "similarity file (enables the phrase analyses)");
  analyze.option("--bank", "bank", "image bank manifest to check the columns against");
  analyze.option("--topk", "topk", "largest k of the concept coverage curve");
  std::string tables_dir;
  analyze.app()->add_option("--tables", tables_dir, "directory for flat CSV tables");

  Command assign(app, "assign", "select and allocate images per section");
  common(assign);
  assign.option("--similarity", "similarity", "similarity file");
  assign.option("--bank", "bank", "image bank manifest to check the columns against");
  assign.option("--mode", "mode", "local, global or joint");
  assign.option("--tau", "tau", "coverage threshold: a probability or qP for a section quantile");
  assign.option("--beta", "beta", "coverage weight of the joint objective");
  assign.option("--budget", "budget", "gold, fixed:N or predicted");
  assign.option("--alloc-score", "alloc_score", "single_image or full_set");
  assign.option("--agg", "agg", "phrase aggregation");
  assign.toggle("--no-lazy", "lazy", "false", "use the plain greedy loop");

  Command evaluate(app, "evaluate", "retrieval metrics against gold images");
  common(evaluate);
  evaluate.option("--similarity", "similarity", "similarity file");
  evaluate.option("--bank", "bank", "image bank manifest to check the columns against");
  evaluate.option("--agg", "agg", "phrase aggregation");

  Command oracle(app, "oracle", "greedy against exhaustive search on synthetic instances");
  oracle.option("-o,--output", "output", "output file (stdout when omitted)");
  oracle.option("--seed", "seed", "first instance seed");
  oracle.option("--instances", "instances", "number of instances");
  oracle.option("--images", "images", "images per instance");
  oracle.option("--concepts", "concepts", "concepts per instance");
  oracle.option("--phrases", "phrases", "phrases per instance");
  oracle.option("--density", "density", "mention probability");
  oracle.option("--budget", "oracle_budget", "selection budget");
  oracle.option("--objective", "objective", "S, C, R, -R, G or J");
  oracle.option("--beta", "beta", "coverage weight of J");
  oracle.option("--trials", "trials", "submodularity trials per instance");

  auto* convert = app.add_subcommand("sim-convert", "transcode similarity files");
  std::string conv_in, conv_out, conv_to;
  convert->add_option("input", conv_in, "input similarity file")->required();
  convert->add_option("output", conv_out, "output similarity file")->required();
  convert->add_option("--to", conv_to, "binary or text (default: the other format)")
      ->check(CLI::IsMember({"binary", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (ingest.app()->parsed()) {
    json cfg = ingest.config();
    validate(cfg);
    CorpusHandle corpus;
    load_inputs(cfg, corpus, nullptr, false);
    char* out = nullptr;
    check(ill_ingest(corpus.p, cfg.dump().c_str(), &out));
    std::string report = take(out);
    if (!phrases_out.empty()) {
      check(ill_corpus_phrases(corpus.p, cfg.dump().c_str(), &out));
      write_atomic(phrases_out, take(out));
    }
    deliver(optional_text(cfg, "output"), report);
  } else if (analyze.app()->parsed()) {
    json cfg = analyze.config();
    validate(cfg);
    CorpusHandle corpus;
    SimHandle sim;
    load_inputs(cfg, corpus, &sim, false);
    char* out = nullptr;
    check(ill_analyze(corpus.p, sim.p, cfg.dump().c_str(), &out));
    std::string report = take(out);
    if (!tables_dir.empty()) write_tables(tables_dir, json::parse(report));
    deliver(optional_text(cfg, "output"), report);
  } else if (assign.app()->parsed()) {
    json cfg = assign.config();
    validate(cfg);
    CorpusHandle corpus;
    SimHandle sim;
    load_inputs(cfg, corpus, &sim, true);
    char* out = nullptr;
    check(ill_assign(corpus.p, sim.p, cfg.dump().c_str(), &out));
    deliver(optional_text(cfg, "output"), take(out));
  } else if (evaluate.app()->parsed()) {
    json cfg = evaluate.config();
    validate(cfg);
    CorpusHandle corpus;
    SimHandle sim;
    load_inputs(cfg, corpus, &sim, true);
    char* out = nullptr;
    check(ill_evaluate(corpus.p, sim.p, cfg.dump().c_str(), &out));
    deliver(optional_text(cfg, "output"), take(out));
  } else if (oracle.app()->parsed()) {
    json cfg = oracle.config();
    char* out = nullptr;
    check(ill_oracle(cfg.dump().c_str(), &out));
    deliver(optional_text(cfg, "output"), take(out));
  } else if (convert->parsed()) {
    SimHandle sim;
    check(ill_sim_load(conv_in.c_str(), &sim.p));
    if (conv_to.empty()) {
      std::ifstream in(conv_in, std::ios::binary);
      char magic[4] = {};
      in.read(magic, 4);
      conv_to = std::string(magic, 4) == "SIMM" ? "text" : "binary";
    }
    fs::path target(conv_out);
    fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
    check(ill_sim_save(sim.p, tmp.string().c_str(), conv_to.c_str()));
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp, ec);
      throw Failure{2, "io", "cannot move output into place at '" + target.string() + "'"};
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& f) {
    json diag = {{"status", "error"}, {"exit", f.code}, {"kind", f.kind}, {"message", f.message}};
    std::cerr << diag.dump() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    json diag = {{"status", "error"}, {"exit", 4}, {"kind", "internal"}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return 4;
  }
}
