// Copyright 2026 The tickbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Exit codes: 0 success, 1 usage or parse error, 2 not converged,
// 3 invariant suite failed.

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tickbound/tickbound.hpp"

namespace tickbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitInvariantFailure = 3;

/// Settings shared by every subcommand.
struct Options {
  std::string model_path;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t n_traj = 10000;
  int max_ticks = 1;
  int n_models = 200;
  unsigned threads = 0;
  bool inject_bug = false;
  std::string method = "dopri5";
  std::optional<double> sample_every;

  // Integration.
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double survival_cutoff = 1e-9;
  std::optional<double> max_horizon;
  std::size_t max_steps = 1000000;

  // Builders.
  std::string builder;
  LadderParams ladder;
  double gamma = 1.0;
  double omega = 5.0;
  int stages = 2;
  int m = 1;
  double t0 = 0.0;
  int dim_min = 2, dim_max = 6;
  int max_notick_ops = 2, max_jumps = 2;
  std::string grid;
};

inline std::string fmt12(double v) { return format_real(v, 12); }

inline IntegrationConfig make_config(const Options& o) {
  IntegrationConfig c;
  c.abs_tol = o.abs_tol;
  c.rel_tol = o.rel_tol;
  c.survival_cutoff = o.survival_cutoff;
  c.max_horizon = o.max_horizon;
  c.max_steps = o.max_steps;
  if (o.method == "propagator") {
    c.method = EngineMethod::kPropagator;
  } else if (o.method != "dopri5") {
    throw CLI::ValidationError("--method", "expected dopri5 or propagator");
  }
  if (o.inject_bug) c.tick_sign = -1.0;
  return c;
}

inline Json config_json(const Options& o) {
  Json j = {{"abs_tol", o.abs_tol},
            {"rel_tol", o.rel_tol},
            {"survival_cutoff", o.survival_cutoff},
            {"max_horizon", o.max_horizon ? Json(*o.max_horizon) : Json(nullptr)},
            {"max_steps", o.max_steps},
            {"method", o.method}};
  return j;
}

inline Json ladder_json(const LadderParams& p) {
  return {{"d", p.d},           {"omega_c", p.omega_c}, {"omega_h", p.omega_h},
          {"omega_l", p.omega_l}, {"g", p.g},             {"gamma_c", p.gamma_c},
          {"gamma_h", p.gamma_h}, {"beta_c", std::isinf(p.beta_c) ? Json("inf") : Json(p.beta_c)},
          {"beta_h", std::isinf(p.beta_h) ? Json("inf") : Json(p.beta_h)},
          {"gamma_tick", p.gamma_tick}};
}

/// Collects manifest fields while a command runs.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["argv"] = argv;
    j_["tool_version"] = kVersion;
  }

  Json& operator[](const char* key) { return j_[key]; }

  Json finish() {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json out = j_;
    out["wall_time_seconds"] = wall;
    out["timestamp"] = static_cast<long long>(std::time(nullptr));
    return out;
  }

  void write(const std::string& path) { write_text_file(path, dump_json(finish(), 2, 12)); }

 private:
  Json j_;
  std::chrono::steady_clock::time_point start_;
};

struct LoadedModel {
  ClockModel model;
  Json document;
};

/// Reads a model file. `embedded` (from a manifest replay) takes precedence.
inline LoadedModel load_model(const std::string& path, const Json* embedded) {
  if (embedded && !embedded->is_null()) {
    ModelDocument doc = json_to_document(*embedded);
    return {parse_model(doc), *embedded};
  }
  if (path.empty()) throw CLI::RequiredError("--model");
  const std::string text = read_text_file(path);
  ModelDocument doc = parse_model_document(text);
  return {parse_model(doc), parse_json_text(text)};
}

inline ClockModel build_from_options(const Options& o, Json& provenance, Warnings* warnings) {
  provenance = {{"builder", o.builder}};
  if (o.builder == "exponential") {
    provenance["gamma"] = o.gamma;
    return build_exponential_clock(o.gamma);
  }
  if (o.builder == "rabi") {
    provenance["omega"] = o.omega;
    provenance["gamma"] = o.gamma;
    return build_rabi_clock(o.omega, o.gamma);
  }
  if (o.builder == "cascade") {
    provenance["gamma"] = o.gamma;
    provenance["stages"] = o.stages;
    return build_cascade_clock(o.gamma, o.stages);
  }
  if (o.builder == "ladder") {
    provenance["params"] = ladder_json(o.ladder);
    return build_ladder_clock(o.ladder, warnings);
  }
  if (o.builder == "random") {
    provenance["seed"] = o.seed;
    provenance["dim_range"] = {o.dim_min, o.dim_max};
    provenance["max_notick_ops"] = o.max_notick_ops;
    provenance["max_jumps"] = o.max_jumps;
    return build_random_clock(o.seed, {{o.dim_min, o.dim_max}, o.max_notick_ops, o.max_jumps});
  }
  throw CLI::ValidationError("--builder", "unknown builder \"" + o.builder + "\"");
}

inline std::vector<double> sample_times(const Options& o, double gamma) {
  std::vector<double> out;
  if (!o.sample_every) return out;
  const double dt = *o.sample_every;
  if (!(dt > 0.0)) throw CLI::ValidationError("--sample-every", "must be positive");
  const double horizon = o.max_horizon ? *o.max_horizon : 1e4 / gamma;
  const double count = std::floor(horizon / dt);
  if (count > 1e6) throw CLI::ValidationError("--sample-every", "more than 1e6 sample times");
  for (double k = 1; k <= count; ++k) out.push_back(k * dt);
  return out;
}

inline Json stats_json(const TickStatistics& s) {
  const TradeoffCheck c = check_tradeoff(s);
  return {{"mu", s.mu},
          {"sigma2", s.sigma2},
          {"N", s.accuracy_N},
          {"nu", s.resolution_nu},
          {"Gamma", s.gamma},
          {"bound_ratio", c.ratio},
          {"classical_ratio", c.classical_ratio},
          {"tradeoff_satisfied", c.satisfied},
          {"tail_bracket", {s.tail_bracket.first, s.tail_bracket.second}},
          {"converged", s.converged}};
}

// --- commands --------------------------------------------------------------

inline int cmd_build(const Options& o, Manifest& man, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw CLI::RequiredError("--out");
  Json provenance;
  Warnings warnings;
  const ClockModel model = build_from_options(o, provenance, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const std::string text = model_document_text(serialize_model(model, provenance));
  write_text_file(o.out, text);
  man["model"] = {{"path", o.out}, {"provenance", provenance}, {"dim", model.dim()}};
  man["outputs"] = {o.out};
  man.write(o.out + ".manifest.json");
  out << o.out << "\n";
  return kExitOk;
}

inline int cmd_simulate(const Options& o, Manifest& man, const Json* embedded, std::ostream& out,
                        std::ostream&) {
  if (o.out.empty()) throw CLI::RequiredError("--out");
  const LoadedModel lm = load_model(o.model_path, embedded);
  IntegrationConfig cfg = make_config(o);
  cfg.sample_times = sample_times(o, lm.model.gamma());
  man["model"] = {{"path", o.model_path}, {"document", lm.document}};
  man["config"] = config_json(o);
  const ConditionedEvolution ev = evolve_no_tick(lm.model, cfg);
  const std::vector<double> p = top_level_population(ev, lm.model.gamma());
  std::string csv = "t,survival,tick_pdf,conditional_rate,top_level_population\n";
  for (std::size_t k = 0; k < ev.size(); ++k) {
    csv += fmt12(ev.times[k]) + "," + fmt12(ev.survival[k]) + "," + fmt12(ev.tick_pdf[k]) + "," +
           fmt12(ev.conditional_rate[k]) + "," + fmt12(p[k]) + "\n";
  }
  const std::string series = o.out + "_timeseries.csv";
  write_text_file(series, csv);
  man["outputs"] = {series};
  man["converged"] = ev.converged;
  man["horizon"] = ev.horizon;
  man["survival_at_horizon"] = ev.survival_at_horizon;
  man.write(o.out + "_manifest.json");
  out << series << "\n";
  return ev.converged ? kExitOk : kExitNotConverged;
}

inline int cmd_stats(const Options& o, Manifest& man, const Json* embedded, std::ostream& out,
                     std::ostream&) {
  Json result;
  int code = kExitOk;
  man["config"] = config_json(o);
  const bool replay = embedded && !embedded->is_null();
  std::optional<AnyDocument> doc;
  if (!replay) {
    if (o.model_path.empty()) throw CLI::RequiredError("--model");
    doc = parse_any_document(read_text_file(o.model_path));
  }
  if (doc && std::holds_alternative<OracleDocument>(*doc)) {
    const auto& od = std::get<OracleDocument>(*doc);
    const TickStatistics s = od.family == "erlang" ? erlang_statistics(od.erlang)
                                                   : heaviside_statistics(od.heaviside);
    result = stats_json(s);
    result["source"] = "closed_form";
    result["family"] = od.family;
    man["model"] = {{"path", o.model_path}, {"oracle", oracle_to_json(od)}};
  } else {
    const LoadedModel lm = load_model(o.model_path, embedded);
    man["model"] = {{"path", o.model_path}, {"document", lm.document}};
    const ConditionedEvolution ev = evolve_no_tick(lm.model, make_config(o));
    if (ev.converged) {
      result = stats_json(tick_statistics(ev, lm.model));
      result["source"] = "no_tick_engine";
    } else {
      result = {{"converged", false},
                {"error", "NotConverged"},
                {"horizon", ev.horizon},
                {"survival_at_horizon", ev.survival_at_horizon},
                {"Gamma", lm.model.gamma()}};
      code = kExitNotConverged;
    }
  }
  man["result"] = result;
  result["manifest"] = man.finish();
  const std::string text = dump_json(result, 2, 12);
  out << text;
  if (!o.out.empty()) {
    write_text_file(o.out + "_stats.json", text);
    man["outputs"] = {o.out + "_stats.json"};
    man.write(o.out + "_manifest.json");
  }
  return code;
}

inline std::vector<double> parse_grid(const std::string& text) {
  // "a:b" (integer steps), "a:b:step", or "v1,v2,...".
  std::vector<double> out;
  if (text.empty()) throw CLI::RequiredError("--grid");
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
      if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("range");
      const double step = parts.size() == 3 ? parts[2] : 1.0;
      if (!(step > 0.0)) throw std::invalid_argument("step");
      const double n = std::floor((parts[1] - parts[0]) / step + 1e-9);
      for (double k = 0; k <= n; ++k) out.push_back(parts[0] + k * step);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid", "cannot parse \"" + text + "\"");
  }
  if (out.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return out;
}

inline int cmd_sweep(const Options& o, Manifest& man, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw CLI::RequiredError("--out");
  if (o.builder != "ladder" && o.builder != "erlang" && o.builder != "heaviside") {
    throw CLI::ValidationError("--builder", "sweep supports ladder, erlang and heaviside");
  }
  const std::vector<double> grid = parse_grid(o.grid);
  const char* param = o.builder == "ladder" ? "d" : (o.builder == "erlang" ? "m" : "t0");
  for (double v : grid) {
    if (o.builder != "heaviside" && (v != std::floor(v) || v < 1)) {
      throw CLI::ValidationError("--grid", std::string(param) + " must be a positive integer");
    }
  }
  struct Row {
    double param = 0.0;
    bool ok = false;
    TickStatistics s;
    std::string note;
  };
  std::vector<Row> rows(grid.size());
  const IntegrationConfig cfg = make_config(o);
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        Row& r = rows[i];
        r.param = grid[i];
        try {
          if (o.builder == "erlang") {
            r.s = erlang_statistics({o.gamma, static_cast<int>(grid[i])});
          } else if (o.builder == "heaviside") {
            r.s = heaviside_statistics({o.gamma, grid[i]});
          } else {
            LadderParams p = o.ladder;
            p.d = static_cast<int>(grid[i]);
            const ClockModel model = build_ladder_clock(p);
            const ConditionedEvolution ev = evolve_no_tick(model, cfg);
            if (!ev.converged) {
              r.note = "not_converged";
              return;
            }
            r.s = tick_statistics(ev, model);
          }
          r.ok = true;
        } catch (const Error& e) {
          r.note = e.kind() == ErrorKind::kNotConverged ? "not_converged" : "error";
        }
      },
      o.threads);
  std::string csv = std::string(param) + ",N,nu,Gamma,bound_ratio,classical_ratio,row_type\n";
  auto line = [&](double pv, double n, double nu, double g, const std::string& type) {
    csv += fmt12(pv) + "," + fmt12(n) + "," + fmt12(nu) + "," + fmt12(g) + "," +
           fmt12(n * nu * nu / (g * g)) + "," + fmt12(n * nu / g) + "," + type + "\n";
  };
  bool any_failed = false;
  for (const auto& r : rows) {
    if (r.ok) {
      line(r.param, r.s.accuracy_N, r.s.resolution_nu, r.s.gamma, "point");
    } else {
      any_failed = true;
      csv += fmt12(r.param) + ",,,,,," + r.note + "\n";
      err << "warning: " << param << " = " << fmt12(r.param) << ": " << r.note << "\n";
    }
  }
  // Reference curves at each computed resolution.
  for (const auto& r : rows) {
    if (!r.ok) continue;
    const double nu = r.s.resolution_nu, g = r.s.gamma;
    line(r.param, g * g / (nu * nu), nu, g, "bound_curve");
    line(r.param, g / nu, nu, g, "classical_curve");
  }
  write_text_file(o.out, csv);
  Json provenance = {{"builder", o.builder}, {"grid", o.grid}};
  if (o.builder == "ladder") provenance["params"] = ladder_json(o.ladder);
  else provenance["gamma"] = o.gamma;
  man["model"] = provenance;
  man["config"] = config_json(o);
  man["outputs"] = {o.out};
  man["all_converged"] = !any_failed;
  man.write(o.out + ".manifest.json");
  out << o.out << "\n";
  return kExitOk;
}

inline Json report_json(const InvariantReport& report, const Options& o) {
  Json checks = Json::object();
  for (const auto& name : invariant_names()) checks[name] = {{"passed", true}, {"failures", 0}};
  Json violations = Json::array();
  for (const auto& v : report.violations()) {
    checks[v.check]["passed"] = false;
    checks[v.check]["failures"] = checks[v.check]["failures"].get<int>() + 1;
    violations.push_back({{"check", v.check},
                          {"model_index", v.model_index},
                          {"model_name", v.model_name},
                          {"value", v.value},
                          {"limit", v.limit},
                          {"detail", v.detail}});
  }
  double worst_ratio = 0.0, worst_gap = 0.0;
  for (const auto& m : report.models) {
    if (!m.converged) continue;
    worst_ratio = std::max(worst_ratio, m.stats.bound_ratio);
    worst_gap = std::max(worst_gap, m.moment_gap);
  }
  return {{"passed", report.passed()},
          {"seed", o.seed},
          {"n_models", o.n_models},
          {"converged", report.converged},
          {"injected_bug", o.inject_bug},
          {"max_bound_ratio", worst_ratio},
          {"max_moment_gap", worst_gap},
          {"checks", checks},
          {"violations", violations}};
}

inline int cmd_verify(const Options& o, Manifest& man, std::ostream& out, std::ostream&) {
  if (o.n_models < 1) throw CLI::ValidationError("--n-models", "must be at least 1");
  const auto models = random_ensemble(o.seed, static_cast<std::size_t>(o.n_models),
                                      {{o.dim_min, o.dim_max}, o.max_notick_ops, o.max_jumps});
  const InvariantReport report = run_invariant_suite(models, make_config(o), o.threads);
  Json result = report_json(report, o);
  man["seed"] = o.seed;
  man["config"] = config_json(o);
  man["model"] = {{"builder", "random"},
                  {"dim_range", {o.dim_min, o.dim_max}},
                  {"max_notick_ops", o.max_notick_ops},
                  {"max_jumps", o.max_jumps}};
  man["passed"] = report.passed();
  result["manifest"] = man.finish();
  const std::string text = dump_json(result, 2, 12);
  out << text;
  if (!o.out.empty()) {
    write_text_file(o.out + "_report.json", text);
    man["outputs"] = {o.out + "_report.json"};
    man.write(o.out + "_manifest.json");
  }
  return report.passed() ? kExitOk : kExitInvariantFailure;
}

inline int cmd_trajectories(const Options& o, Manifest& man, const Json* embedded,
                            std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw CLI::RequiredError("--out");
  if (o.n_traj < 1) throw CLI::ValidationError("--n-traj", "must be at least 1");
  if (o.max_ticks < 1) throw CLI::ValidationError("--max-ticks", "must be at least 1");
  const LoadedModel lm = load_model(o.model_path, embedded);
  const IntegrationConfig cfg = make_config(o);
  man["model"] = {{"path", o.model_path}, {"document", lm.document}};
  man["config"] = config_json(o);
  man["seed"] = o.seed;
  man["n_traj"] = o.n_traj;
  man["max_ticks"] = o.max_ticks;
  const TrajectoryBatch batch =
      sample_trajectories(lm.model, o.n_traj, o.max_ticks, o.seed, cfg, o.threads);
  const std::string dump_path = o.out + "_ticks.csv";
  write_text_file(dump_path, raw_tick_dump(batch));

  std::optional<TickSequenceStatistics> det;
  try {
    det = multi_tick_statistics(lm.model, o.max_ticks, cfg);
  } catch (const Error& e) {
    err << "note: deterministic comparison unavailable: " << e.what() << "\n";
  }
  Json per_tick = Json::array();
  bool all_within = true;
  for (int n = 1; n <= o.max_ticks; ++n) {
    Json entry = {{"tick_index", n}};
    try {
      const TickEstimate e = estimate_statistics(batch, n);
      entry["n_samples"] = e.n_samples;
      entry["censored"] = e.censored;
      entry["mu_hat"] = e.mu_hat;
      entry["sigma2_hat"] = e.sigma2_hat;
      entry["N_hat"] = e.N_hat;
      entry["nu_hat"] = e.nu_hat;
      entry["se_mu"] = e.se_mu;
      entry["se_sigma2"] = e.se_sigma2;
      entry["se_N"] = e.se_N;
      entry["se_nu"] = e.se_nu;
      if (det && static_cast<std::size_t>(n) <= det->per_tick.size()) {
        const TickStatistics& s = det->per_tick[static_cast<std::size_t>(n - 1)];
        const double z_mu = (e.mu_hat - s.mu) / e.se_mu;
        const double z_n = (e.N_hat - s.accuracy_N) / e.se_N;
        const bool within = std::abs(z_mu) < 4.0 && std::abs(z_n) < 4.0;
        all_within = all_within && within;
        entry["comparison"] = {{"mu", s.mu},
                               {"N", s.accuracy_N},
                               {"z_mu", z_mu},
                               {"z_N", z_n},
                               {"abs_diff_N", std::abs(e.N_hat - s.accuracy_N)},
                               {"within_4se", within}};
      }
    } catch (const Error& e) {
      entry["error"] = std::string(to_string(e.kind()));
      entry["message"] = e.what();
    }
    per_tick.push_back(entry);
  }
  Json est = {{"seed", o.seed},
              {"n_traj", o.n_traj},
              {"max_ticks", o.max_ticks},
              {"censored_count", batch.censored_count},
              {"Gamma", lm.model.gamma()},
              {"deterministic_converged", det.has_value()},
              {"per_tick", per_tick}};
  if (det) est["comparison_within_4se"] = all_within;
  const std::string est_path = o.out + "_estimates.json";
  write_text_file(est_path, dump_json(est, 2, 12));
  man["outputs"] = {dump_path, est_path};
  man.write(o.out + "_manifest.json");
  out << dump_path << "\n" << est_path << "\n";
  return kExitOk;
}

// --- driver ----------------------------------------------------------------

inline void add_config_flags(CLI::App* app, Options& o) {
  app->add_option("--abs-tol", o.abs_tol, "absolute integrator tolerance");
  app->add_option("--rel-tol", o.rel_tol, "relative integrator tolerance");
  app->add_option("--survival-cutoff", o.survival_cutoff, "stop once survival drops below");
  app->add_option("--max-horizon", o.max_horizon, "integration horizon (default 1e4/Gamma)");
  app->add_option("--max-steps", o.max_steps, "accepted-step budget of the integrator");
  app->add_option("--method", o.method, "dopri5 (default) or propagator");
  app->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

inline void add_builder_flags(CLI::App* app, Options& o) {
  LadderParams& p = o.ladder;
  app->add_option("--d", p.d, "ladder dimension");
  app->add_option("--g", p.g, "ladder coupling");
  app->add_option("--beta-c", p.beta_c, "cold inverse temperature (inf allowed)");
  app->add_option("--beta-h", p.beta_h, "hot inverse temperature");
  app->add_option("--omega-c", p.omega_c, "cold qubit splitting");
  app->add_option("--omega-h", p.omega_h, "hot qubit splitting");
  app->add_option("--omega-l", p.omega_l, "ladder spacing");
  app->add_option("--gamma-c", p.gamma_c, "cold bath coupling");
  app->add_option("--gamma-h", p.gamma_h, "hot bath coupling");
  app->add_option("--gamma-tick", p.gamma_tick, "ladder decay (tick) rate");
  app->add_option("--gamma", o.gamma, "rate of the exponential, Rabi, cascade, Erlang or Heaviside clock");
}

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const Json* embedded_model = nullptr) {
  Options o;
  CLI::App app{"tickbound: ticking-clock simulator and accuracy-resolution checker"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CLI::App* build = app.add_subcommand("build", "write a model file from a builder");
  build->add_option("--builder", o.builder, "exponential, rabi, cascade, ladder or random")->required();
  build->add_option("--out", o.out, "output model path")->required();
  build->add_option("--omega", o.omega, "Rabi frequency");
  build->add_option("--stages", o.stages, "cascade length");
  build->add_option("--seed", o.seed, "random builder seed");
  build->add_option("--dim-min", o.dim_min);
  build->add_option("--dim-max", o.dim_max);
  build->add_option("--max-notick-ops", o.max_notick_ops);
  build->add_option("--max-jumps", o.max_jumps);
  add_builder_flags(build, o);

  CLI::App* simulate = app.add_subcommand("simulate", "no-tick evolution time series");
  simulate->add_option("--model", o.model_path, "model JSON");
  simulate->add_option("--out", o.out, "output prefix")->required();
  simulate->add_option("--sample-every", o.sample_every, "extra dense-output samples every DT");
  add_config_flags(simulate, o);

  CLI::App* stats = app.add_subcommand("stats", "tick statistics as JSON");
  stats->add_option("--model", o.model_path, "model or oracle JSON");
  stats->add_option("--out", o.out, "optional output prefix");
  add_config_flags(stats, o);

  CLI::App* sweep = app.add_subcommand("sweep", "accuracy and resolution over a parameter grid");
  sweep->add_option("--builder", o.builder, "ladder (over d), erlang (over m) or heaviside (over t0)")
      ->required();
  sweep->add_option("--grid", o.grid, "a:b, a:b:step or v1,v2,...")->required();
  sweep->add_option("--out", o.out, "output CSV path")->required();
  add_builder_flags(sweep, o);
  add_config_flags(sweep, o);

  CLI::App* verify = app.add_subcommand("verify", "invariant suite over random models");
  verify->add_option("--seed", o.seed, "ensemble seed");
  verify->add_option("--n-models", o.n_models, "ensemble size");
  verify->add_option("--out", o.out, "optional output prefix");
  verify->add_option("--dim-min", o.dim_min);
  verify->add_option("--dim-max", o.dim_max);
  verify->add_flag("--inject-bug", o.inject_bug, "flip the sign of the tick anticommutator");
  add_config_flags(verify, o);

  CLI::App* traj = app.add_subcommand("trajectories", "quantum-jump Monte Carlo tick times");
  traj->add_option("--model", o.model_path, "model JSON");
  traj->add_option("--n-traj", o.n_traj, "number of trajectories");
  traj->add_option("--seed", o.seed, "seed");
  traj->add_option("--max-ticks", o.max_ticks, "ticks per trajectory");
  traj->add_option("--out", o.out, "output prefix")->required();
  add_config_flags(traj, o);

  std::string manifest_path;
  CLI::App* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest_path, "manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os, es;
    const int code = app.exit(e, os, es);
    out << os.str();
    err << es.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay->parsed()) {
      const Json m = parse_json_text(read_text_file(manifest_path));
      if (!m.contains("argv") || !m["argv"].is_array()) {
        throw Error(ErrorKind::kMalformedDocument, "manifest has no argv");
      }
      const auto argv = m["argv"].get<std::vector<std::string>>();
      const Json* doc = nullptr;
      if (m.contains("model") && m["model"].is_object() && m["model"].contains("document")) {
        doc = &m["model"]["document"];
      }
      return run(argv, out, err, doc);
    }
    CLI::App* cmd = app.get_subcommands().front();
    Manifest man(cmd->get_name(), args);
    if (cmd == build) return cmd_build(o, man, out, err);
    if (cmd == simulate) return cmd_simulate(o, man, embedded_model, out, err);
    if (cmd == stats) return cmd_stats(o, man, embedded_model, out, err);
    if (cmd == sweep) return cmd_sweep(o, man, out, err);
    if (cmd == verify) return cmd_verify(o, man, out, err);
    if (cmd == traj) return cmd_trajectories(o, man, embedded_model, out, err);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kNotConverged ? kExitNotConverged : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tickbound::cli
