#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpe/dynamics.hpp"
#include "gpe/error.hpp"
#include "gpe/fibering.hpp"
#include "gpe/io.hpp"
#include "gpe/solver.hpp"
#include "gpe/thresholds.hpp"

namespace gpe {

enum ExitCode : int { kExitOk = 0, kExitNotConverged = 1, kExitInputError = 2 };

inline constexpr const char* kGnNote =
    "c0 uses the configured Gagliardo-Nirenberg constant gn_c1, which is NOT the optimal one";
inline constexpr const char* kKernelNote =
    "dipolar multiplier K^(0) := 0 (spherical mean; the lambda2 term ignores the mean density)";

namespace detail {

struct CouplingFlags {
  std::optional<double> lambda1, lambda2, lambda3, mass;

  void add_to(CLI::App* app) {
    app->add_option("--lambda1", lambda1, "cubic coupling");
    app->add_option("--lambda2", lambda2, "dipolar coupling");
    app->add_option("--lambda3", lambda3, "quintic coupling (negative)");
    app->add_option("--mass", mass, "target mass c");
  }
  void apply(CouplingParams& p) const {
    if (lambda1) p.lambda1 = *lambda1;
    if (lambda2) p.lambda2 = *lambda2;
    if (lambda3) p.lambda3 = *lambda3;
    if (mass) p.mass_c = *mass;
  }
};

inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return format_real(v);
}

}  // namespace detail

/**
 * Runs one subcommand (solve, fiber, dynamics, thresholds, verify).
 * `args` excludes the program name. Returns 0 on success, 1 when a solve did
 * not converge (or a verification failed), 2 on input errors.
 */
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of a dipolar Gross-Pitaevskii energy with quintic focusing", "gpe"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "minimize the energy on the virial manifold");
  std::string config_path, field_out, report_out, history_out;
  detail::CouplingFlags solve_couplings;
  std::optional<int> max_iters;
  std::optional<std::uint64_t> seed;
  bool solve_verify = false;
  solve->add_option("--config", config_path, "key=value configuration file");
  solve->add_option("--output", field_out, "write the final field (GPEF)");
  solve->add_option("--report", report_out, "write the JSON report here instead of stdout");
  solve->add_option("--history", history_out, "write the iteration log (CSV)");
  solve->add_option("--max-iters", max_iters, "override max_iters");
  solve->add_option("--seed", seed, "override seed");
  solve->add_flag("--verify", solve_verify, "verify the result and include the report");
  solve_couplings.add_to(solve);

  // fiber
  auto* fiber = app.add_subcommand("fiber", "fiber maximum and path table for a triple (A, B, C)");
  double fa = 0.0, fb = 0.0, fc = 0.0, theta1 = 0.1, theta2 = 3.0;
  int samples = 41;
  fiber->add_option("--a", fa, "A = ||grad u||^2")->required();
  fiber->add_option("--b", fb, "interaction term B")->required();
  fiber->add_option("--c", fc, "C = lambda3 ||u||_5^5")->required();
  fiber->add_option("--theta1", theta1, "left path end (multiple of t*)");
  fiber->add_option("--theta2", theta2, "right path end (multiple of t*)");
  fiber->add_option("--samples", samples, "path samples");

  // dynamics
  auto* dyn = app.add_subcommand("dynamics", "split-step propagation of a stored field");
  std::string dyn_in, dyn_out;
  double dt = 1e-3;
  int steps = 1000;
  detail::CouplingFlags dyn_couplings;
  dyn->add_option("--input", dyn_in, "input field (GPEF)")->required();
  dyn->add_option("--output", dyn_out, "write the propagated field");
  dyn->add_option("--dt", dt, "time step");
  dyn->add_option("--steps", steps, "number of steps");
  dyn_couplings.add_to(dyn);

  // thresholds
  auto* thr = app.add_subcommand("thresholds", "Xi, c0 and the sign-condition verdict");
  detail::CouplingFlags thr_couplings;
  double gn_c1 = 1.0;
  thr_couplings.add_to(thr);
  thr->add_option("--gn-c1", gn_c1, "Gagliardo-Nirenberg constant");

  // verify
  auto* ver = app.add_subcommand("verify", "ground-state checks on a stored field");
  std::string ver_in;
  detail::CouplingFlags ver_couplings;
  double ver_gn_c1 = 1.0;
  ver->add_option("--input", ver_in, "input field (GPEF)")->required();
  ver->add_option("--gn-c1", ver_gn_c1, "Gagliardo-Nirenberg constant");
  ver_couplings.add_to(ver);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gpe: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*solve) {
      SolverConfig cfg;
      if (!config_path.empty()) cfg = read_config_file(config_path);
      solve_couplings.apply(cfg.couplings);
      if (max_iters) cfg.max_iters = *max_iters;
      if (seed) cfg.seed = *seed;
      validate(cfg);
      SolverResult res = minimize_ground_state(cfg);
      std::optional<VerificationReport> rep;
      if (solve_verify) {
        rep = verify_field(res.field, KernelTable(cfg.grid), cfg.couplings,
                           VerifyOptions{.gn_c1 = cfg.gn_c1});
      }
      nlohmann::json report = to_json(make_run_report(res, cfg, rep));
      report["notes"] = {kKernelNote, kGnNote};
      const std::string json = report.dump(2);
      if (report_out.empty()) {
        out << json << '\n';
      } else {
        std::ofstream f(report_out);
        if (!f) throw IoError("cannot open '" + report_out + "'");
        f << json << '\n';
      }
      if (!field_out.empty()) write_field(res.field, field_out);
      if (!history_out.empty()) {
        std::ofstream f(history_out);
        if (!f) throw IoError("cannot open '" + history_out + "'");
        f << history_table(res.history);
      }
      if (!res.converged) {
        err << "gpe: solve did not converge after " << res.iterations
            << " iterations (residual " << detail::fmt(res.residual) << ")\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (*fiber) {
      const FiberTriple f{fa, fb, fc};
      const FiberResult r = solve_tstar(f);
      out << "t_star=" << detail::fmt(r.t_star) << '\n'
          << "energy_at_t_star=" << detail::fmt(r.e_at_star) << '\n'
          << "curvature=" << detail::fmt(r.curvature) << '\n';
      const FiberTriple on = f.scaled(r.t_star);
      out << fiber_table(mpg_path(on, theta1, theta2, samples));
      return kExitOk;
    }

    if (*dyn) {
      const Field psi0 = read_field(dyn_in);
      CouplingParams p;
      dyn_couplings.apply(p);
      validate_couplings(p, false);
      const KernelTable k(psi0.grid());
      const PropagationConfig pc{dt, steps, p};
      const Field psi = split_step_evolve(psi0, pc, k);
      const auto cons = conservation_report(psi0, psi, k, p);
      const Diagnostics d0 = compute_diagnostics(psi0, k, p);
      nlohmann::json j = {
          {"dt", dt},
          {"steps", steps},
          {"time", pc.total_time()},
          {"mass_drift", detail::real_json(cons.mass_drift)},
          {"energy_drift", detail::real_json(cons.energy_drift)},
          {"beta", detail::real_json(d0.beta)},
          {"standing_wave_error",
           detail::real_json(standing_wave_error(psi, psi0, d0.beta, pc.total_time()))},
          {"modulus_error", detail::real_json(modulus_error(psi, psi0))}};
      out << j.dump(2) << '\n';
      if (!dyn_out.empty()) write_field(psi, dyn_out);
      return kExitOk;
    }

    if (*thr) {
      CouplingParams p;
      thr_couplings.apply(p);
      const ThresholdReport r = threshold_report(p, GNConstants::with_c1(gn_c1));
      const nlohmann::json j = {{"lambda1", p.lambda1},
                                {"lambda2", p.lambda2},
                                {"lambda3", p.lambda3},
                                {"xi", detail::real_json(r.xi)},
                                {"branch_quartic", detail::real_json(r.branch_quartic)},
                                {"branch_gn", detail::real_json(r.branch_gn)},
                                {"c0", detail::real_json(r.c0)},
                                {"unconditional", r.unconditional},
                                {"gn_c1", gn_c1},
                                {"note", kGnNote}};
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*ver) {
      const Field u = read_field(ver_in);
      CouplingParams p;
      ver_couplings.apply(p);
      p.mass_c = mass(u);
      if (ver_couplings.mass) p.mass_c = *ver_couplings.mass;
      validate_couplings(p, true);
      const VerificationReport rep =
          verify_field(u, KernelTable(u.grid()), p, VerifyOptions{.gn_c1 = ver_gn_c1});
      out << to_json(rep).dump(2) << '\n';
      return rep.all_passed() ? kExitOk : kExitNotConverged;
    }
  } catch (const NumericalBlowup& e) {
    err << "gpe: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const Error& e) {
    err << "gpe: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace gpe
