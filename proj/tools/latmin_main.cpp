// Command-line front end. Talks to the library only through latmin.h and
// prints exactly one JSON document per run.
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "latmin/latmin.h"

namespace {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kBudget = 3 };

struct Failure {
  latmin_status status;
  std::string message;
};

int exit_code(latmin_status s) {
  switch (s) {
    case LATMIN_OK: return kOk;
    case LATMIN_ERR_BUDGET_EXCEEDED:
    case LATMIN_ERR_UNDECIDABLE: return kBudget;
    default: return kUsage;
  }
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  latmin_string_free(s);
  return out;
}

void check(latmin_status s) {
  if (s != LATMIN_OK) throw Failure{s, latmin_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{LATMIN_ERR_INVALID_ARGUMENT, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Failure{LATMIN_ERR_PARSE, what + ": " + e.what()};
  }
}

struct ModuleHandle {
  latmin_module* ptr = nullptr;
  ~ModuleHandle() { latmin_module_free(ptr); }
};

struct Args {
  std::string module_path;
  std::string config_path;
  std::string suite = "sec2";
  std::string mode = "positive-genus";
  std::string theorem;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::uint64_t samples = 100000;
  unsigned max_rank = 4;
  unsigned threads = 1;
  unsigned g_max = 1000;
  unsigned kappa_max = 50;
  bool strict = false;
  bool emit_vectors = false;
  bool timing = false;
};

struct Outcome {
  Json result;
  Json config;
  std::optional<std::uint64_t> seed;
  std::uint64_t violations = 0;
};

Json module_options(const Args& a, const CLI::App& sub) {
  Json o;
  if (sub.count("--budget")) o["budget"] = a.budget;
  o["threads"] = a.threads;
  return o;
}

// The resolved config omits --threads: output must not depend on it.
Json module_config(const Args& a, const CLI::App& sub, const latmin_module* m) {
  char* raw = nullptr;
  check(latmin_module_to_json(m, &raw));
  Json c;
  c["module"] = Json::parse(take(raw));
  if (sub.count("--budget")) c["budget"] = a.budget;
  return c;
}

Outcome run_module_command(const std::string& name, const Args& a, const CLI::App& sub) {
  const std::string text = read_file(a.module_path);
  ModuleHandle m;
  check(latmin_module_from_json(text.c_str(), &m.ptr));

  Outcome out;
  out.config = module_config(a, sub, m.ptr);
  Json options = module_options(a, sub);
  char* raw = nullptr;
  if (name == "count") {
    options["strict"] = a.strict;
    options["emit_vectors"] = a.emit_vectors;
    out.config["strict"] = a.strict;
    out.config["emit_vectors"] = a.emit_vectors;
    check(latmin_count(m.ptr, options.dump().c_str(), &raw));
  } else if (name == "minima") {
    check(latmin_minima(m.ptr, options.dump().c_str(), &raw));
  } else {
    options["samples"] = a.samples;
    options["seed"] = a.seed;
    out.config["samples"] = a.samples;
    out.seed = a.seed;
    check(latmin_chi(m.ptr, options.dump().c_str(), &raw));
  }
  out.result = Json::parse(take(raw));
  return out;
}

Outcome run_verify(const Args& a, const CLI::App& sub) {
  if (a.suite != "sec2") throw Failure{LATMIN_ERR_INVALID_ARGUMENT, "unknown suite '" + a.suite + "'"};
  Json config = a.config_path.empty() ? Json::object() : parse(read_file(a.config_path), "config");
  if (!config.is_object()) throw Failure{LATMIN_ERR_SCHEMA, "config must be a JSON object"};
  if (sub.count("--trials") || !config.contains("trials")) config["trials"] = a.trials;
  if (sub.count("--seed") || !config.contains("seed")) config["seed"] = a.seed;
  if (sub.count("--max-rank")) config["rank_max"] = a.max_rank;
  if (sub.count("--budget")) config["budget"] = a.budget;
  if (sub.count("--samples")) config["samples"] = a.samples;
  config.erase("threads");
  Json with_threads = config;
  with_threads["threads"] = a.threads;

  Outcome out;
  char* raw = nullptr;
  check(latmin_verify(with_threads.dump().c_str(), &out.violations, &raw));
  out.result = Json::parse(take(raw));
  out.config = out.result["config"];
  out.seed = out.config["seed"].get<std::uint64_t>();
  return out;
}

Outcome run_ledger(const std::string& name, const Args& a, const CLI::App& sub) {
  Outcome out;
  char* raw = nullptr;
  if (name == "eval") {
    const Json config = parse(read_file(a.config_path), "config");
    out.config = {{"config", config}};
    if (!a.theorem.empty()) out.config["theorem"] = a.theorem;
    check(latmin_ledger_eval(config.dump().c_str(), a.theorem.empty() ? nullptr : a.theorem.c_str(),
                             &out.violations, &raw));
  } else if (name == "sweep") {
    out.config = {{"g_max", a.g_max}, {"kappa_max", a.kappa_max}};
    check(latmin_ledger_sweep(a.g_max, a.kappa_max, a.threads, &out.violations, &raw));
  } else {
    Json params = a.config_path.empty() ? Json::object() : parse(read_file(a.config_path), "config");
    if (!params.is_object()) throw Failure{LATMIN_ERR_SCHEMA, "config must be a JSON object"};
    if (sub.count("--mode") || !params.contains("mode")) params["mode"] = a.mode;
    if (sub.count("--trials") || !params.contains("trials")) params["trials"] = a.trials;
    out.config = params;
    out.seed = a.seed;
    check(latmin_ledger_simulate(params.dump().c_str(), a.seed, &out.violations, &raw));
  }
  out.result = Json::parse(take(raw));
  return out;
}

Json manifest(const std::string& subcommand, const Json& config, std::optional<std::uint64_t> seed,
              const std::string& result_digest) {
  Json m;
  m["version"] = latmin_version();
  m["subcommand"] = subcommand;
  m["config"] = config;
  m["seed"] = seed ? Json(*seed) : Json(nullptr);
  m["result_digest"] = result_digest;
  return m;
}

std::string digest_of(const Json& j) {
  char* raw = nullptr;
  if (latmin_digest(j.dump().c_str(), &raw) != LATMIN_OK) return "";
  return take(raw);
}

void emit(const Json& doc) { std::cout << doc.dump(2) << '\n'; }

int emit_error(const std::string& subcommand, latmin_status status, const std::string& message, int code) {
  Json doc;
  doc["error"] = {{"status", latmin_status_name(status)}, {"message", message}};
  doc["manifest"] = manifest(subcommand, Json::object(), std::nullopt, "");
  emit(doc);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting, minima and inequality checks for normed lattices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(latmin_version()));
  Args a;

  auto add_module = [&](CLI::App* s) {
    s->add_option("--module", a.module_path, "Module JSON file")->required();
    s->add_option("--budget", a.budget, "Enumeration budget (candidate points)");
    s->add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  };
  auto* count = app.add_subcommand("count", "Count effective sections");
  add_module(count);
  count->add_flag("--strict", a.strict, "Count strictly effective sections");
  count->add_flag("--emit-vectors", a.emit_vectors, "Include the vectors");
  auto* minima = app.add_subcommand("minima", "Successive minima");
  add_module(minima);
  auto* chi = app.add_subcommand("chi", "Euler characteristic");
  add_module(chi);
  chi->add_option("--samples", a.samples, "Monte Carlo samples");
  chi->add_option("--seed", a.seed, "Random seed");

  auto* verify = app.add_subcommand("verify", "Run the randomized inequality suite");
  verify->add_option("--suite", a.suite, "Suite name")->default_val("sec2");
  verify->add_option("--config", a.config_path, "Suite config JSON");
  verify->add_option("--trials", a.trials, "Random instances");
  verify->add_option("--seed", a.seed, "Random seed");
  verify->add_option("--max-rank", a.max_rank, "Largest rank")->check(CLI::Range(1u, 8u));
  verify->add_option("--budget", a.budget, "Enumeration budget");
  verify->add_option("--samples", a.samples, "Monte Carlo samples");
  verify->add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* ledger = app.add_subcommand("ledger", "Reduction ledgers and closed-form bounds");
  ledger->require_subcommand(1);
  auto* eval = ledger->add_subcommand("eval", "Evaluate a ledger or a theorem bound");
  eval->add_option("--config", a.config_path, "Ledger or parameter JSON")->required();
  eval->add_option("--theorem", a.theorem, "Bound to evaluate")
      ->check(CLI::IsMember({"B", "C", "D", "E", "deg1", "trivial"}));
  // Accepted for a uniform interface; evaluation is single-threaded.
  eval->add_option("--threads", a.threads, "Worker threads (no effect)")->check(CLI::Range(1u, 256u));
  auto* sweep = ledger->add_subcommand("sweep", "Constant-chain and Stirling sweeps");
  sweep->add_option("--g-max", a.g_max, "Largest genus")->check(CLI::Range(2u, 100000u));
  sweep->add_option("--kappa-max", a.kappa_max, "Largest field degree")->check(CLI::Range(1u, 10000u));
  sweep->add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  auto* simulate = ledger->add_subcommand("simulate", "Simulate reduction ledgers");
  simulate->add_option("--seed", a.seed, "Random seed");
  simulate->add_option("--mode", a.mode, "Ledger mode")
      ->check(CLI::IsMember({"positive-genus", "genus-zero", "clifford-hyperelliptic", "clifford-nonhyperelliptic"}));
  simulate->add_option("--trials", a.trials, "Number of ledgers")->default_val(1000);
  simulate->add_option("--config", a.config_path, "Simulation parameter JSON");
  simulate->add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  for (auto* s : {count, minima, chi, verify, ledger}) s->add_flag("--timing", a.timing, "Record wall-clock time");
  for (auto* s : {eval, sweep, simulate}) s->add_flag("--timing", a.timing, "Record wall-clock time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("", LATMIN_ERR_INVALID_ARGUMENT, e.what(), kUsage);
  }

  std::string subcommand;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome out;
    if (count->parsed()) {
      subcommand = "count";
      out = run_module_command("count", a, *count);
    } else if (minima->parsed()) {
      subcommand = "minima";
      out = run_module_command("minima", a, *minima);
    } else if (chi->parsed()) {
      subcommand = "chi";
      out = run_module_command("chi", a, *chi);
    } else if (verify->parsed()) {
      subcommand = "verify";
      out = run_verify(a, *verify);
    } else if (eval->parsed()) {
      subcommand = "ledger eval";
      out = run_ledger("eval", a, *eval);
    } else if (sweep->parsed()) {
      subcommand = "ledger sweep";
      out = run_ledger("sweep", a, *sweep);
    } else {
      subcommand = "ledger simulate";
      out = run_ledger("simulate", a, *simulate);
    }
    Json doc;
    doc["result"] = out.result;
    doc["manifest"] = manifest(subcommand, out.config, out.seed, digest_of(out.result));
    if (a.timing) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      doc["manifest"]["duration_seconds"] = elapsed.count();
    }
    emit(doc);
    return out.violations > 0 ? kViolation : kOk;
  } catch (const Failure& f) {
    return emit_error(subcommand, f.status, f.message, exit_code(f.status));
  } catch (const std::exception& e) {
    return emit_error(subcommand, LATMIN_ERR_INTERNAL, e.what(), kUsage);
  }
}
