#include "latmin/latmin.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <new>
#include <string>

#include "latmin/arakelov_ledger.hpp"
#include "latmin/counter_rng.hpp"
#include "latmin/digest.hpp"
#include "latmin/enumeration.hpp"
#include "latmin/error.hpp"
#include "latmin/inequality_suite.hpp"
#include "latmin/json_io.hpp"
#include "latmin/minima_volume.hpp"

struct latmin_module {
  latmin::NormedModule module;
};

namespace {

using latmin::Json;

thread_local std::string last_error;

latmin_status status_of(latmin::ErrorCode code) {
  using latmin::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return LATMIN_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvalidNorm: return LATMIN_ERR_INVALID_NORM;
    case ErrorCode::UnboundedBall: return LATMIN_ERR_UNBOUNDED_BALL;
    case ErrorCode::DimensionMismatch: return LATMIN_ERR_DIMENSION_MISMATCH;
    case ErrorCode::EnumerationBudgetExceeded: return LATMIN_ERR_BUDGET_EXCEEDED;
    case ErrorCode::Undecidable: return LATMIN_ERR_UNDECIDABLE;
    case ErrorCode::InfeasibleLedger: return LATMIN_ERR_INFEASIBLE_LEDGER;
    case ErrorCode::PreconditionViolated: return LATMIN_ERR_PRECONDITION;
    case ErrorCode::ParseError: return LATMIN_ERR_PARSE;
    case ErrorCode::SchemaViolation: return LATMIN_ERR_SCHEMA;
  }
  return LATMIN_ERR_INTERNAL;
}

template <typename F>
latmin_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LATMIN_OK;
  } catch (const latmin::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::parse_error& e) {
    last_error = e.what();
    return LATMIN_ERR_PARSE;
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return LATMIN_ERR_SCHEMA;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LATMIN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LATMIN_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return LATMIN_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require_ptr(const void* p, const char* what) {
  if (!p) latmin::fail(latmin::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

Json parse_json(const char* text, bool allow_null) {
  if (!text) {
    if (allow_null) return Json::object();
    latmin::fail(latmin::ErrorCode::InvalidArgument, "JSON input must not be NULL");
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    latmin::fail(latmin::ErrorCode::ParseError, e.what());
  }
}

struct RunOptions {
  latmin::EnumerationOptions enumeration;
  latmin::VolumeOptions volume;
  bool emit_vectors = false;
  bool strict = false;
};

std::uint64_t uint_option(const Json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
    latmin::fail(latmin::ErrorCode::SchemaViolation, std::string("option '") + key + "' must be a nonnegative integer");
  return j[key].get<std::uint64_t>();
}

RunOptions run_options(const char* text) {
  const Json j = parse_json(text, true);
  if (!j.is_object()) latmin::fail(latmin::ErrorCode::SchemaViolation, "options must be a JSON object");
  RunOptions o;
  o.enumeration.budget = uint_option(j, "budget", o.enumeration.budget);
  o.enumeration.threads = static_cast<unsigned>(uint_option(j, "threads", 1));
  if (o.enumeration.threads == 0) o.enumeration.threads = 1;
  o.volume.threads = o.enumeration.threads;
  o.volume.samples = uint_option(j, "samples", o.volume.samples);
  o.volume.seed = uint_option(j, "seed", 0);
  o.volume.force_monte_carlo = j.value("force_monte_carlo", false);
  o.emit_vectors = j.value("emit_vectors", false);
  o.strict = j.value("strict", false);
  return o;
}

Json norm_value_to_json(const latmin::NormValue& v) {
  Json j;
  j["raw"] = latmin::format_rational(v.raw);
  j["squared"] = v.squared;
  j["alpha"] = latmin::format_rational(v.alpha);
  j["value"] = latmin::format_real(v.approx());
  return j;
}

Json vectors_to_json(const std::vector<latmin::IntVector>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(latmin::vector_to_json(v));
  return a;
}

std::uint64_t count_failures(const std::vector<latmin::InequalityReport>& reports) {
  std::uint64_t n = 0;
  for (const auto& r : reports) n += r.holds ? 0 : 1;
  return n;
}

Json reports_to_json(const std::vector<latmin::InequalityReport>& reports) {
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(latmin::report_to_json(r));
  return a;
}

double real_field(const Json& j, const char* key) {
  if (!j.contains(key)) latmin::fail(latmin::ErrorCode::SchemaViolation, std::string("missing field '") + key + "'");
  try {
    return latmin::real_from_json(j[key]);
  } catch (const latmin::Error&) {
    latmin::fail(latmin::ErrorCode::SchemaViolation, std::string("field '") + key + "' is not a number");
  }
}

long long int_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    latmin::fail(latmin::ErrorCode::SchemaViolation, std::string("missing integer field '") + key + "'");
  return j[key].get<long long>();
}

unsigned uint_field(const Json& j, const char* key) {
  const long long v = int_field(j, key);
  if (v < 0) latmin::fail(latmin::ErrorCode::SchemaViolation, std::string("field '") + key + "' must be nonnegative");
  return static_cast<unsigned>(v);
}

Json ledger_report(const latmin::Ledger& ledger, std::uint64_t& violations) {
  Json out;
  out["ledger"] = latmin::ledger_to_json(ledger);
  out["digest"] = latmin::ledger_digest(ledger);
  const auto derived = latmin::derived_intersections(ledger);
  Json l2 = Json::array(), l2p = Json::array();
  for (double x : derived.L2) l2.push_back(latmin::format_real(x));
  for (double x : derived.L2_prime) l2p.push_back(latmin::format_real(x));
  out["derived"] = {{"L2", l2}, {"L2_prime", l2p}};

  std::vector<latmin::InequalityReport> reports;
  Json chain = Json::array();
  for (std::size_t j = 0; j < ledger.steps.size(); ++j) {
    const auto step = latmin::onestep_chain(ledger, j);
    reports.push_back(step.report);
    chain.push_back({{"report", latmin::report_to_json(step.report)},
                     {"count_increment", latmin::format_real(step.count_increment)}});
  }
  out["onestep_chain"] = chain;
  const auto sum_ci = latmin::sum_ci_bound(ledger);
  reports.push_back(sum_ci);
  out["sum_ci_bound"] = latmin::report_to_json(sum_ci);
  const auto thm = latmin::theorem_chain_check(ledger);
  reports.push_back(thm.report);
  out["theorem_chain"] = {{"theorem", thm.theorem},
                          {"value", latmin::format_real(thm.value)},
                          {"bound", latmin::format_real(thm.bound)},
                          {"report", latmin::report_to_json(thm.report)}};
  violations += count_failures(reports);
  return out;
}

Json theorem_value(const Json& config, const std::string& theorem, const latmin::Ledger* ledger,
                   std::uint64_t& violations) {
  // Parameters come from the ledger when one is given, otherwise from the config.
  auto g = [&] { return ledger ? ledger->g : uint_field(config, "g"); };
  auto kappa = [&] { return ledger ? ledger->kappa : (config.contains("kappa") ? uint_field(config, "kappa") : 1u); };
  auto d_circ = [&] {
    return ledger ? ledger->steps.front().d / static_cast<long long>(ledger->kappa) : int_field(config, "d_circ");
  };
  auto L2 = [&] { return ledger ? ledger->L2_0 : real_field(config, "L2"); };
  auto eps = [&] { return static_cast<int>(int_field(config, "eps")); };

  Json out;
  out["theorem"] = theorem;
  if (theorem == "B") {
    out["bound"] = latmin::format_real(latmin::theorem_b_bound(g(), d_circ(), kappa(), L2()));
  } else if (theorem == "C") {
    out["bound"] = latmin::format_real(latmin::theorem_c_bound(d_circ(), kappa(), eps(), L2()));
  } else if (theorem == "D") {
    const double omega2 = ledger ? ledger->L2_0 : real_field(config, "omega2");
    out["bound"] = latmin::format_real(latmin::theorem_d_bound(g(), kappa(), eps(), omega2));
  } else if (theorem == "deg1") {
    out["bound"] = latmin::format_real(latmin::deg_one_bound(g(), kappa(), L2()));
  } else if (theorem == "trivial") {
    const long long r = ledger ? ledger->steps.front().r : int_field(config, "r_minus");
    const long long d = ledger ? ledger->steps.front().d : int_field(config, "deg_LQ");
    out["bound"] = latmin::format_real(latmin::trivial_bound(r, d, L2()));
  } else if (theorem == "E") {
    const auto ctx = latmin::arithmetic_context_from_json(config.contains("context") ? config["context"] : config);
    const auto e = latmin::corollary_e(ctx);
    out["d"] = e.d;
    out["constant"] = latmin::format_real(e.constant);
    out["constant_coefficients"] = {{"log_absD", e.log_absD_coeff}, {"d_log_d", e.dlogd_coeff}, {"d", e.d_coeff}};
    out["chi_fal"] = latmin::format_real(e.chi_fal);
    out["rhs_omega"] = latmin::format_real(e.rhs_omega);
    out["rhs_chi_fal"] = latmin::format_real(e.rhs_chi);
    out["reports"] = reports_to_json({e.report_omega, e.report_chi});
    violations += count_failures({e.report_omega, e.report_chi});
  } else {
    latmin::fail(latmin::ErrorCode::InvalidArgument, "unknown theorem '" + theorem + "'");
  }
  return out;
}

}  // namespace

extern "C" {

const char* latmin_version(void) { return LATMIN_VERSION_STRING; }

const char* latmin_status_name(latmin_status status) {
  switch (status) {
    case LATMIN_OK: return "ok";
    case LATMIN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LATMIN_ERR_INVALID_NORM: return "invalid_norm";
    case LATMIN_ERR_UNBOUNDED_BALL: return "unbounded_ball";
    case LATMIN_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case LATMIN_ERR_BUDGET_EXCEEDED: return "enumeration_budget_exceeded";
    case LATMIN_ERR_UNDECIDABLE: return "undecidable";
    case LATMIN_ERR_INFEASIBLE_LEDGER: return "infeasible_ledger";
    case LATMIN_ERR_PRECONDITION: return "precondition_violated";
    case LATMIN_ERR_PARSE: return "parse_error";
    case LATMIN_ERR_SCHEMA: return "schema_violation";
    case LATMIN_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* latmin_last_error(void) { return last_error.c_str(); }

void latmin_string_free(char* s) { std::free(s); }

latmin_status latmin_module_from_json(const char* json, latmin_module** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = nullptr;
    const Json j = parse_json(json, false);
    *out = new latmin_module{latmin::module_from_json(j)};
  });
}

latmin_status latmin_module_to_json(const latmin_module* m, char** out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(out, "out");
    *out = copy_string(latmin::module_to_json(m->module).dump());
  });
}

latmin_status latmin_module_twist(const latmin_module* m, const char* alpha, latmin_module** out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(alpha, "alpha");
    require_ptr(out, "out");
    *out = nullptr;
    *out = new latmin_module{latmin::twist(m->module, latmin::parse_rational(alpha))};
  });
}

latmin_status latmin_module_rank(const latmin_module* m, size_t* out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(out, "out");
    *out = m->module.rank();
  });
}

latmin_status latmin_module_digest(const latmin_module* m, char** out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(out, "out");
    *out = copy_string(m->module.digest());
  });
}

void latmin_module_free(latmin_module* m) { delete m; }

latmin_status latmin_count(const latmin_module* m, const char* options, char** out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(out, "out");
    const RunOptions o = run_options(options);
    const auto set = o.strict ? latmin::strictly_effective_sections(m->module, o.enumeration, o.emit_vectors)
                              : latmin::effective_sections(m->module, o.enumeration, o.emit_vectors);
    Json j;
    j["count"] = set.count;
    j["log_count"] = latmin::format_real(set.log_count);
    j["log_count_exact"] = latmin::log_value_to_json(set.log_count_exact());
    j["kind"] = o.strict ? "strict" : "closed";
    j["rank"] = m->module.rank();
    j["span_rank"] = set.span_rank;
    if (o.strict) j["limit_epsilon"] = latmin::format_rational(latmin::sef_limit_epsilon(m->module, o.enumeration));
    if (o.emit_vectors) j["vectors"] = vectors_to_json(set.vectors);
    *out = copy_string(j.dump());
  });
}

latmin_status latmin_minima(const latmin_module* m, const char* options, char** out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(out, "out");
    const RunOptions o = run_options(options);
    const auto rep = latmin::successive_minima(m->module, o.enumeration);
    Json lambdas = Json::array(), mus = Json::array();
    for (const auto& l : rep.lambdas) lambdas.push_back(norm_value_to_json(l));
    for (const auto& mu : rep.mus)
      mus.push_back({{"value", latmin::format_real(mu.approx())}, {"exact", latmin::log_value_to_json(mu)}});
    Json j;
    j["rank"] = m->module.rank();
    j["lambdas"] = lambdas;
    j["mus"] = mus;
    j["witnesses"] = vectors_to_json(rep.witnesses);
    j["sum_mus"] = latmin::format_real(rep.sum_mus().approx());
    j["sum_positive_mus"] = latmin::format_real(rep.sum_positive_mus().approx());
    *out = copy_string(j.dump());
  });
}

latmin_status latmin_chi(const latmin_module* m, const char* options, char** out) {
  return guarded([&] {
    require_ptr(m, "module");
    require_ptr(out, "out");
    const RunOptions o = run_options(options);
    const auto chi = latmin::euler_characteristic(m->module, o.volume);
    Json j;
    j["rank"] = m->module.rank();
    j["chi"] = latmin::format_real(chi.value);
    j["stderr"] = latmin::format_real(chi.stderr_value);
    j["method"] = latmin::volume_method_name(chi.method);
    j["exact"] = chi.exact ? latmin::log_value_to_json(*chi.exact) : Json(nullptr);
    if (!chi.exact) j["samples"] = o.volume.samples;
    *out = copy_string(j.dump());
  });
}

latmin_status latmin_verify(const char* config, uint64_t* violations, char** out) {
  return guarded([&] {
    require_ptr(violations, "violations");
    require_ptr(out, "out");
    const auto cfg = latmin::suite_config_from_json(parse_json(config, true));
    const auto summary = latmin::run_suite(cfg);
    *violations = summary.total_violations();
    *out = copy_string(latmin::suite_summary_to_json(summary, cfg).dump());
  });
}

latmin_status latmin_ledger_eval(const char* config, const char* theorem, uint64_t* violations,
                                 char** out) {
  return guarded([&] {
    require_ptr(violations, "violations");
    require_ptr(out, "out");
    const Json j = parse_json(config, false);
    if (!j.is_object()) latmin::fail(latmin::ErrorCode::SchemaViolation, "config must be a JSON object");
    *violations = 0;
    Json result;
    if (j.contains("steps")) {
      const auto ledger = latmin::ledger_from_json(j);
      result = ledger_report(ledger, *violations);
      if (theorem) result["theorem"] = theorem_value(j, theorem, &ledger, *violations);
    } else {
      if (!theorem)
        latmin::fail(latmin::ErrorCode::InvalidArgument, "a theorem is required when the config is not a ledger");
      result = theorem_value(j, theorem, nullptr, *violations);
    }
    *out = copy_string(result.dump());
  });
}

latmin_status latmin_ledger_sweep(unsigned g_max, unsigned kappa_max, unsigned threads,
                                  uint64_t* violations, char** out) {
  return guarded([&] {
    require_ptr(violations, "violations");
    require_ptr(out, "out");
    const auto chain = latmin::verify_constant_chain(g_max, kappa_max, threads);
    const auto stirling = latmin::stirling_sweep(g_max, kappa_max);
    static const char* steps[] = {"i", "ii", "iii"};
    Json margins, argmin;
    for (std::size_t k = 0; k < 3; ++k) {
      margins[steps[k]] = latmin::format_real(chain.min_margin[k]);
      argmin[steps[k]] = {{"g", chain.argmin[k][0]}, {"kappa", chain.argmin[k][1]}};
    }
    Json cc;
    cc["g_max"] = g_max;
    cc["kappa_max"] = kappa_max;
    cc["points"] = chain.points;
    cc["checks"] = chain.checks;
    cc["violations"] = chain.violations;
    cc["min_margin_per_degree"] = margins;
    cc["argmin"] = argmin;
    cc["asymptotic_margin_ii"] = latmin::format_real(chain.asymptotic_margin);
    cc["failures"] = reports_to_json(chain.failures);
    Json eq = Json::array();
    for (const auto& c : stirling.equality_cases) eq.push_back({{"g", c[0]}, {"r1", c[1]}, {"r2", c[2]}});
    Json st;
    st["checks"] = stirling.checks;
    st["violations"] = stirling.violations;
    st["equality_cases"] = eq;
    st["min_strict_slack"] = latmin::format_real(stirling.min_strict_slack);
    *violations = chain.violations + stirling.violations;
    *out = copy_string(Json{{"constant_chain", cc}, {"stirling", st}}.dump());
  });
}

latmin_status latmin_ledger_simulate(const char* params, uint64_t seed, uint64_t* violations, char** out) {
  return guarded([&] {
    require_ptr(violations, "violations");
    require_ptr(out, "out");
    const Json j = parse_json(params, true);
    if (!j.is_object()) latmin::fail(latmin::ErrorCode::SchemaViolation, "params must be a JSON object");
    latmin::SimulationParams p;
    if (j.contains("mode")) p.mode = latmin::ledger_mode_from_name(j["mode"].get<std::string>());
    p.g = static_cast<unsigned>(uint_option(j, "g", p.g));
    p.kappa = static_cast<unsigned>(uint_option(j, "kappa", p.kappa));
    p.max_steps = static_cast<unsigned>(uint_option(j, "max_steps", p.max_steps));
    p.d_circ_max = static_cast<unsigned>(uint_option(j, "d_circ_max", p.d_circ_max));
    if (j.contains("c_max")) p.c_max = real_field(j, "c_max");
    if (j.contains("slack_max")) p.slack_max = real_field(j, "slack_max");
    if (j.contains("final_L2_max")) p.final_L2_max = real_field(j, "final_L2_max");
    const std::uint64_t trials = uint_option(j, "trials", 1000);

    const latmin::CounterRng seeds(latmin::CounterRng::derive_key(seed, "ledger-simulate"));
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tally;  // holds, violations
    Json failures = Json::array();
    std::string digests;
    Json first;
    auto record = [&](const latmin::InequalityReport& r, const latmin::Ledger& l) {
      auto& t = tally[r.name];
      if (r.holds) {
        ++t.first;
      } else {
        ++t.second;
        failures.push_back({{"report", latmin::report_to_json(r)}, {"ledger", latmin::ledger_to_json(l)}});
      }
    };
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto ledger = latmin::simulate_reduction(seeds.at(t), p);
      if (t == 0) first = latmin::ledger_to_json(ledger);
      digests += latmin::ledger_digest(ledger);
      for (std::size_t k = 0; k < ledger.steps.size(); ++k) record(latmin::onestep_chain(ledger, k).report, ledger);
      record(latmin::sum_ci_bound(ledger), ledger);
      record(latmin::theorem_chain_check(ledger).report, ledger);
      if (p.mode == latmin::LedgerMode::PositiveGenus) {
        double rc = 0, dc = 0;
        for (const auto& s : ledger.steps) {
          rc += static_cast<double>(s.r) * s.c;
          dc += static_cast<double>(s.d) * s.c;
        }
        record(latmin::interval_report("rc_le_dc", rc, dc, 0.0, latmin::ledger_digest(ledger)), ledger);
      }
    }
    Json checks = Json::object();
    std::uint64_t total = 0;
    for (const auto& [name, t] : tally) {
      checks[name] = {{"holds", t.first}, {"violations", t.second}};
      total += t.second;
    }
    Json result;
    result["mode"] = latmin::ledger_mode_name(p.mode);
    result["trials"] = trials;
    result["checks"] = checks;
    result["total_violations"] = total;
    result["ledgers_digest"] = latmin::sha256_hex(digests);
    result["first_ledger"] = first;
    result["failures"] = failures;
    *violations = total;
    *out = copy_string(result.dump());
  });
}

latmin_status latmin_digest(const char* text, char** out) {
  return guarded([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    *out = copy_string(latmin::sha256_hex(text));
  });
}

}  // extern "C"
