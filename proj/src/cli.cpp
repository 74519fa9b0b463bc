#include "proxmin/cli.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <thread>

#include "proxmin/diagnostics.hpp"
#include "proxmin/instances.hpp"
#include "proxmin/rng.hpp"
#include "proxmin/trace_io.hpp"

namespace proxmin::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct LoadedConfig {
  json raw;
  InstanceSpec spec;
  std::string scheme;  // "prox" | "accel"
};

LoadedConfig load_config(const std::string& path, const Overrides& ov) {
  LoadedConfig lc;
  lc.raw = json::parse(read_file(path));
  require(lc.raw.contains("instance"), "config: missing \"instance\" block");
  lc.spec = InstanceSpec::from_json(lc.raw.at("instance"));
  if (ov.seed) lc.spec.seed = *ov.seed;
  lc.scheme = ov.scheme ? *ov.scheme : lc.raw.value("scheme", "prox");
  require(lc.scheme == "prox" || lc.scheme == "accel",
          "config: scheme must be \"prox\" or \"accel\"");
  return lc;
}

ProxConfig prox_config_from(const json& raw, bool store_iterates) {
  ProxConfig cfg;
  const json j = raw.value("prox", json::object());
  const std::string variant = j.value("variant", "p1");
  require(variant == "p1" || variant == "p2", "config: prox.variant must be p1 or p2");
  cfg.variant = variant == "p1" ? SubproblemVariant::P1 : SubproblemVariant::P2;
  cfg.L0 = j.value("L0", 0.0);
  cfg.rho_init = j.value("rho_init", 0.0);
  cfg.backtrack_factor = j.value("backtrack_factor", 2.0);
  cfg.max_outer_iters = j.value("max_outer_iters", 1000);
  cfg.stop_r_tol = j.value("stop_r_tol", 1e-8);
  cfg.inner_tol = j.value("inner_tol", kDefaultInnerTol);
  cfg.warm_start_dual = j.value("warm_start_dual", false);
  cfg.record_timing = raw.value("timing_in_trace", false);
  cfg.store_iterates = store_iterates;
  return cfg;
}

AccelConfig accel_config_from(const json& raw, bool store_iterates) {
  AccelConfig cfg;
  const json j = raw.value("accel", json::object());
  cfg.max_iters = j.value("max_iters", 500);
  cfg.stop_r_tol = j.value("stop_r_tol", 0.0);
  cfg.inner_tol = j.value("inner_tol", kDefaultInnerTol);
  cfg.record_timing = raw.value("timing_in_trace", false);
  cfg.store_iterates = store_iterates;
  return cfg;
}

bool needs_f_star(const std::string& check) {
  return check == "thm31_tail" || check == "thm41" || check == "rate_thm51" ||
         check == "fit_rate";
}

bool needs_iterates(const std::string& check) {
  return check == "thm41" || check == "thm32";
}

std::vector<Vector> sample_points_near(const ConvexSet& omega, const Vector& center,
                                       int count, std::uint64_t seed) {
  Rng rng(seed ^ 0x73616d70ULL);
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i)
    pts.push_back(omega.project(center + rng.vector(static_cast<int>(center.size()))));
  return pts;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::stationary: return "stationary";
    case StopReason::max_iters: return "max_iters";
    case StopReason::cap_acceptance_failure: return "cap_acceptance_failure";
    case StopReason::inner_failure: return "inner_failure";
  }
  return "?";
}

std::string iterates_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "k";
  if (!trace.empty() && trace.front().x) {
    for (int j = 0; j < trace.front().x->size(); ++j)
      out += ",x" + std::to_string(j);
  }
  out += '\n';
  for (const auto& row : trace) {
    out += std::to_string(row.k);
    if (row.x)
      for (int j = 0; j < row.x->size(); ++j) out += "," + format_double((*row.x)[j]);
    out += '\n';
  }
  return out;
}

}  // namespace

int run_solve(const std::string& config_path, const Overrides& ov) {
  LoadedConfig lc;
  CompositeProblem* problem = nullptr;
  std::optional<CompositeProblem> prob;
  Vector x0;
  std::vector<std::string> checks;
  fs::path out_dir;
  try {
    lc = load_config(config_path, ov);
    prob.emplace(build_instance(lc.spec));
    problem = &*prob;
    if (lc.raw.contains("x0")) {
      x0 = Vector(lc.raw.at("x0").size());
      for (int i = 0; i < x0.size(); ++i) x0[i] = lc.raw.at("x0")[i].get<double>();
      require(x0.size() == problem->n(), "config: x0 has wrong dimension");
      x0 = problem->omega().project(x0);
    } else {
      x0 = default_x0(*problem, lc.spec);
    }
    checks = ov.checks.empty()
                 ? lc.raw.value("checks", std::vector<std::string>{})
                 : ov.checks;
    out_dir = ov.out_dir ? fs::path(*ov.out_dir)
                         : fs::path(lc.raw.value("output_dir", "out"));
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const bool store_iterates =
      lc.raw.value("emit_iterates", false) ||
      std::any_of(checks.begin(), checks.end(), needs_iterates);

  // f* / x* used by the requested diagnostics.
  try {
    if (lc.raw.contains("f_star")) {
      Vector xs = problem->known_x_star() ? *problem->known_x_star() : x0;
      problem->set_known_solution(xs, lc.raw.at("f_star").get<double>(), true);
    } else if (!problem->known_f_star() &&
               (lc.raw.value("reference_solve", false) ||
                std::any_of(checks.begin(), checks.end(), needs_f_star))) {
      if (!lc.raw.value("reference_solve", false) &&
          std::any_of(checks.begin(), checks.end(), needs_f_star)) {
        std::cerr << "config error: requested checks need f_star; supply "
                     "\"f_star\" or set \"reference_solve\": true\n";
        return 2;
      }
      const Vector xr = reference_minimizer(*problem, x0);
      problem->set_known_solution(xr, problem->objective(xr), true);
    }
  } catch (const std::exception& e) {
    std::cerr << "reference solve failed: " << e.what() << "\n";
    return 3;
  }

  json report;
  report["config"] = lc.raw;
  report["seed"] = lc.spec.seed;
  report["scheme"] = lc.scheme;
  report["instance"] = problem->label;
  json check_json = json::array();
  bool all_pass = true;
  double final_f = 0;
  std::size_t iters = 0;
  std::string stop_reason;
  bool solver_failed = false;

  auto run_check_common = [&](const CheckReport& rep) {
    check_json.push_back(rep.to_json());
    all_pass = all_pass && rep.pass;
  };

  try {
    if (lc.scheme == "prox") {
      ProxConfig cfg = prox_config_from(lc.raw, store_iterates);
      ProxResult res = run_prox(*problem, x0, cfg);
      write_file((out_dir / "trace.csv").string(), prox_trace_csv(res.trace));
      if (store_iterates)
        write_file((out_dir / "iterates.csv").string(), iterates_csv(res.trace));
      final_f = problem->objective(res.x_final);
      iters = res.trace.size();
      stop_reason = stop_reason_name(res.reason);
      solver_failed = res.reason == StopReason::cap_acceptance_failure ||
                      res.reason == StopReason::inner_failure;
      if (!solver_failed) {
        for (const std::string& c : checks) {
          if (c == "sufficient_decrease") {
            DecreaseReport rep =
                check_sufficient_decrease(res.trace, res.L0, 10.0 * cfg.inner_tol);
            CheckReport cr;
            cr.check = c;
            cr.pass = rep.pass;
            for (const auto& v : rep.violations)
              cr.note(v.k, v.slack, "per-step decrease");
            cr.details.push_back("tail_max_r=" + format_double(rep.tail_max_r));
            run_check_common(cr);
          } else if (c == "thm31_tail") {
            run_check_common(check_theorem31_tail(res.trace, res.L0,
                                                  *problem->known_f_star(),
                                                  10.0 * cfg.inner_tol));
          } else if (c == "thm41") {
            Thm41Options opts;
            opts.variant_b = lc.raw.value("thm41_variant_b", false);
            Thm41Report rep =
                check_theorem41(*problem, res.trace, *problem->known_f_star(), opts);
            json j = rep.report.to_json();
            j["sigma_M"] = rep.sigma_M;
            j["N_min"] = rep.N_min;
            j["entry_iteration"] = rep.entry_iteration;
            j["linear_steps"] = rep.linear_steps;
            j["quadratic_steps"] = rep.quadratic_steps;
            check_json.push_back(j);
            all_pass = all_pass && rep.report.pass;
          } else if (c == "thm32") {
            require(static_cast<bool>(problem->known_x_star()),
                    "thm32 needs a known x*");
            run_check_common(check_theorem32(*problem, res.trace,
                                             *problem->known_x_star(),
                                             10.0 * cfg.inner_tol));
          } else if (c == "lemma_suite") {
            const auto pts = sample_points_near(
                problem->omega(), x0, lc.raw.value("lemma_points", 10), lc.spec.seed);
            LemmaSuiteConfig lcfg;
            run_check_common(run_lemma_suite(*problem, pts, lcfg));
          } else if (c == "fit_rate") {
            FitReport fit = fit_rate(res.trace, *problem->known_f_star(),
                                     RateModel::linear);
            json j{{"check", "fit_rate"},
                   {"pass", true},
                   {"model", "linear"},
                   {"coefficient", fit.coefficient},
                   {"rate", fit.rate},
                   {"residual", fit.residual}};
            check_json.push_back(j);
          } else {
            std::cerr << "config error: unknown check for prox scheme: " << c << "\n";
            return 2;
          }
        }
      }
    } else {
      AccelConfig cfg = accel_config_from(lc.raw, store_iterates);
      AccelResult res = run_accel(*problem, x0, cfg);
      write_file((out_dir / "trace.csv").string(), accel_trace_csv(res));
      if (store_iterates)
        write_file((out_dir / "iterates.csv").string(), iterates_csv(res.trace));
      final_f = problem->objective(res.x_final);
      iters = res.trace.size();
      stop_reason = stop_reason_name(res.reason);
      solver_failed = res.reason == StopReason::inner_failure;
      if (!solver_failed) {
        for (const std::string& c : checks) {
          if (c == "rules") {
            const auto pts = sample_points_near(problem->omega(), x0, 8, lc.spec.seed);
            RulesReport rr = check_rules(*problem, res, pts, 10.0 * cfg.inner_tol);
            CheckReport cr;
            cr.check = "rules";
            cr.pass = rr.pass;
            for (const auto& v : rr.violations) cr.note(v.k, v.slack, v.rule);
            run_check_common(cr);
          } else if (c == "rate_thm51") {
            const double f_star = *problem->known_f_star();
            const double D2 = (x0 - *problem->known_x_star()).squaredNorm();
            CheckReport cr;
            cr.check = "rate_thm51";
            for (const auto& row : res.trace) {
              if (row.k < 1) continue;
              const double bound = 4.0 * problem->L_hat() * D2 /
                                   (static_cast<double>(row.k) * (row.k + 1.0));
              const double slack = (row.f - f_star) - bound;
              if (slack > 10.0 * cfg.inner_tol)
                cr.note(row.k, slack, "O(1/k^2) bound");
            }
            run_check_common(cr);
          } else {
            std::cerr << "config error: unknown check for accel scheme: " << c << "\n";
            return 2;
          }
        }
      }
    }
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }

  report["final_f"] = final_f;
  report["iterations"] = iters;
  report["stop_reason"] = stop_reason;
  report["checks"] = check_json;
  report["all_checks_pass"] = all_pass;
  write_file((out_dir / "report.json").string(), report.dump(2) + "\n");

  std::cout << "final_f=" << format_double(final_f) << " iterations=" << iters
            << " stop=" << stop_reason
            << " checks=" << (checks.empty() ? "none" : (all_pass ? "pass" : "FAIL"))
            << "\n";
  if (solver_failed) return 3;
  return all_pass ? 0 : 1;
}

int run_verify(const std::string& trace_path, const std::string& config_path,
               const std::vector<std::string>& checks) {
  try {
    const Overrides ov;
    LoadedConfig lc = load_config(config_path, ov);
    CompositeProblem problem = build_instance(lc.spec);
    const std::string text = read_file(trace_path);
    const bool accel = lc.scheme == "accel";
    const std::vector<TraceRecord> trace =
        accel ? parse_accel_trace_csv(text) : parse_prox_trace_csv(text);

    std::optional<double> f_star;
    if (lc.raw.contains("f_star"))
      f_star = lc.raw.at("f_star").get<double>();
    else if (problem.known_f_star())
      f_star = problem.known_f_star();

    bool all_pass = true;
    for (const std::string& c : checks) {
      CheckReport cr;
      if (c == "sufficient_decrease") {
        ProxConfig cfg = prox_config_from(lc.raw, false);
        const double cap =
            cfg.variant == SubproblemVariant::P1 ? problem.L_bar() : problem.L_hat();
        const double L0 = cfg.L0 > 0 ? cfg.L0 : cap;
        DecreaseReport rep = check_sufficient_decrease(trace, L0, 10.0 * cfg.inner_tol);
        cr.check = c;
        cr.pass = rep.pass;
        for (const auto& v : rep.violations) cr.note(v.k, v.slack, "per-step decrease");
      } else if (c == "thm31_tail") {
        require(f_star.has_value(), "thm31_tail needs f_star in the config");
        ProxConfig cfg = prox_config_from(lc.raw, false);
        const double cap =
            cfg.variant == SubproblemVariant::P1 ? problem.L_bar() : problem.L_hat();
        cr = check_theorem31_tail(trace, cfg.L0 > 0 ? cfg.L0 : cap, *f_star,
                                  10.0 * cfg.inner_tol);
      } else if (c == "rate_thm51") {
        require(accel, "rate_thm51 applies to accel traces");
        require(f_star.has_value() && problem.known_x_star().has_value(),
                "rate_thm51 needs f_star and x_star");
        const Vector x0 = default_x0(problem, lc.spec);
        const double D2 = (x0 - *problem.known_x_star()).squaredNorm();
        cr.check = c;
        for (const auto& row : trace) {
          if (row.k < 1) continue;
          const double bound = 4.0 * problem.L_hat() * D2 /
                               (static_cast<double>(row.k) * (row.k + 1.0));
          const double slack = (row.f - *f_star) - bound;
          if (slack > 1e-6) cr.note(row.k, slack, "O(1/k^2) bound");
        }
      } else {
        std::cerr << "config error: check not supported by verify: " << c << "\n";
        return 2;
      }
      std::cout << (cr.pass ? "[PASS] " : "[FAIL] ") << c << "\n";
      all_pass = all_pass && cr.pass;
    }
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "verify error: " << e.what() << "\n";
    return 2;
  }
}

int run_batch(const std::string& dir, const Overrides& ov) {
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << "batch: no *.json configs in " << dir << "\n";
    return 2;
  }
  std::vector<int> codes(configs.size(), 0);
  std::vector<std::thread> workers;
  const fs::path base_out = ov.out_dir ? fs::path(*ov.out_dir) : fs::path("out");
  for (std::size_t i = 0; i < configs.size(); ++i) {
    workers.emplace_back([&, i]() {
      Overrides local = ov;
      local.out_dir = (base_out / configs[i].stem()).string();
      codes[i] = run_solve(configs[i].string(), local);
    });
  }
  for (auto& w : workers) w.join();
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace proxmin::cli
