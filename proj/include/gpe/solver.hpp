#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gpe/error.hpp"
#include "gpe/fibering.hpp"
#include "gpe/functionals.hpp"
#include "gpe/grid.hpp"
#include "gpe/kernel.hpp"
#include "gpe/thresholds.hpp"

namespace gpe {

struct SolverConfig {
  CouplingParams couplings{20.0, 5.0, -1.0, 0.5};
  GridSpec grid = GridSpec{{48, 48, 48}, {12.0, 12.0, 12.0}};
  double step_size = 0.1;
  double tol_residual = 1e-5;
  double tol_virial = 1e-6;
  int max_iters = 20000;
  std::uint64_t seed = 0;
  double init_sigma = 1.5;
  double init_anisotropy = 0.2;
  /// Relative amplitude of the seeded perturbation of the initial Gaussian.
  double init_noise = 1e-3;
  double gn_c1 = 1.0;
  /// Shell decay tolerance used when resampling along the fiber.
  double decay_tolerance = 1e-2;
  /// Precondition the descent direction with (mu - Lap/2)^{-1}.
  bool precondition = true;
  /// Independent solves from seeds seed, seed + 1, ...; the best one is kept.
  int restarts = 1;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

inline void validate(const SolverConfig& cfg) {
  validate_couplings(cfg.couplings, true);
  try {
    make_grid(cfg.grid.n, cfg.grid.l);
  } catch (const InvalidGrid& e) {
    throw ValidationError(e.what());
  }
  if (!(cfg.step_size > 0.0)) throw ValidationError("step_size must be positive");
  if (!(cfg.tol_residual > 0.0) || !(cfg.tol_virial > 0.0)) {
    throw ValidationError("tolerances must be positive");
  }
  if (cfg.max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(cfg.init_sigma > 0.0)) throw ValidationError("init_sigma must be positive");
  if (!(cfg.init_anisotropy >= 0.0 && cfg.init_anisotropy < 1.0)) {
    throw ValidationError("init_anisotropy must lie in [0, 1)");
  }
  if (!(cfg.init_noise >= 0.0)) throw ValidationError("init_noise must be >= 0");
  if (!(cfg.gn_c1 > 0.0)) throw ValidationError("gn_c1 must be positive");
  if (!(cfg.decay_tolerance > 0.0)) throw ValidationError("decay_tolerance must be positive");
  if (cfg.restarts < 1) throw ValidationError("restarts must be >= 1");
}

struct IterationRecord {
  int iteration = 0;
  double E = 0.0;
  double Q = 0.0;
  double residual = 0.0;
  double beta = 0.0;
  double step = 0.0;
  /// max_t E(u^t) from the scaling triple; non-increasing over iterations.
  double fiber_max = 0.0;
};

struct SolverResult {
  Field field;
  Diagnostics diagnostics;
  double gamma = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> history;
};

namespace detail {

// Uniform double in [-1, 1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

// (mu - Lap/2)^{-1} r, a Sobolev-type smoothing of the residual.
inline Field precondition(const Field& r, double mu) {
  auto rh = forward_transform(r);
  const auto ksq = kinetic_multiplier(r.grid());
  for (std::size_t i = 0; i < rh.size(); ++i) rh[i] /= mu + 0.5 * ksq[i];
  return inverse_transform(rh);
}

}  // namespace detail

/// Anisotropic Gaussian (sigma_perp = init_sigma, sigma_z = init_sigma (1 - a))
/// with a seeded multiplicative perturbation, projected to mass c.
inline Field init_field(const SolverConfig& cfg) {
  validate(cfg);
  const double sp = cfg.init_sigma;
  const double sz = cfg.init_sigma * (1.0 - cfg.init_anisotropy);
  Field u = sample_field(cfg.grid, [&](double x, double y, double z) {
    return std::exp(-(x * x + y * y) / (2.0 * sp * sp) - z * z / (2.0 * sz * sz));
  });
  if (cfg.init_noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    for (auto& v : u.values()) {
      const double re = detail::symmetric_unit(rng);
      const double im = detail::symmetric_unit(rng);
      v *= complex(1.0 + cfg.init_noise * re, cfg.init_noise * im);
    }
  }
  project_mass(u, cfg.couplings.mass_c);
  return u;
}

using IterationCallback = std::function<void(const IterationRecord&)>;

/**
 * Minimizes E over the virial manifold V(c).
 *
 * Each iteration takes the mass-tangent residual r = g + beta u (smoothed by
 * (mu - Lap/2)^{-1} when cfg.precondition is set), removes its radial part and
 * tries u - tau r with tau halved from step_size. A trial is projected to mass
 * c and rescaled onto V(c); it is accepted once its fiber maximum max_t E(v^t)
 * drops below that of the current iterate, so the fiber maximum decreases
 * monotonically. The loop ends on convergence (relative Euler-Lagrange
 * residual and |Q|/A below tolerance), at max_iters, or when no step size
 * gives a decrease.
 */
inline SolverResult minimize_ground_state(const SolverConfig& cfg, const Field& initial,
                                          const IterationCallback& on_iteration = {}) {
  validate(cfg);
  require_same_grid(cfg.grid, initial.grid(), "minimize_ground_state");
  const CouplingParams& p = cfg.couplings;
  const KernelTable kernel(cfg.grid);
  const ResampleOptions resample{cfg.decay_tolerance, 0.9};
  constexpr int kMaxHalvings = 60;

  Field u = initial;
  project_mass(u, p.mass_c);
  u = rescale_to_manifold(u, kernel, p, resample).field;
  Evaluation ev = evaluate(u, kernel, p);

  SolverResult result;
  double last_step = 0.0;
  for (int iter = 0;; ++iter) {
    const Diagnostics& d = ev.diagnostics;
    if (!u.all_finite() || !std::isfinite(d.E)) {
      throw NumericalBlowup("minimize_ground_state: non-finite state at iteration " +
                            std::to_string(iter));
    }
    const double residual = el_residual(u, ev.gradient, d.beta);
    const double reference = solve_tstar(FiberTriple::from(d)).e_at_star;
    const IterationRecord rec{iter, d.E, d.Q, residual, d.beta, last_step, reference};
    result.history.push_back(rec);
    if (on_iteration) on_iteration(rec);
    result.iterations = iter;
    result.residual = residual;
    if (residual <= cfg.tol_residual && std::abs(d.Q) <= cfg.tol_virial * d.A) {
      result.converged = true;
      break;
    }
    if (iter >= cfg.max_iters) break;

    Field r = ev.gradient;
    for (std::size_t i = 0; i < u.size(); ++i) r[i] += d.beta * u[i];
    if (cfg.precondition) r = detail::precondition(r, std::max(d.beta, 1e-2 * d.A / d.D));
    const double radial = real_inner(r, u) / d.D;
    for (std::size_t i = 0; i < u.size(); ++i) r[i] -= radial * u[i];

    double tau = cfg.step_size;
    std::optional<ManifoldProjection> accepted;
    for (int h = 0; h < kMaxHalvings && !accepted; ++h, tau *= 0.5) {
      Field trial = u;
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] -= tau * r[i];
      project_mass(trial, p.mass_c);
      try {
        auto projected = rescale_to_manifold(trial, kernel, p, resample);
        const FiberTriple triple = FiberTriple::from(projected.diagnostics);
        if (triple.valid() && solve_tstar(triple).e_at_star < reference) {
          accepted = std::move(projected);
          last_step = tau;
        }
      } catch (const DecayViolation&) {
        // trial spread into the shell; a shorter step keeps it inside
      } catch (const InvalidTriple&) {
      }
    }
    if (!accepted) break;  // no representable decrease: stagnated
    u = std::move(accepted->field);
    ev = evaluate(u, kernel, p);
  }

  result.field = std::move(u);
  result.diagnostics = ev.diagnostics;
  result.gamma = ev.diagnostics.E;
  return result;
}

/// Solves from init_field for each of cfg.restarts seeds and keeps the
/// lowest-energy converged result (the lowest-energy one if none converged).
inline SolverResult minimize_ground_state(const SolverConfig& cfg,
                                          const IterationCallback& on_iteration = {}) {
  validate(cfg);
  std::optional<SolverResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    SolverConfig local = cfg;
    local.seed = cfg.seed + static_cast<std::uint64_t>(r);
    SolverResult res = minimize_ground_state(local, init_field(local), on_iteration);
    const bool better = !best || (res.converged && !best->converged) ||
                        (res.converged == best->converged && res.gamma < best->gamma);
    if (better) best = std::move(res);
  }
  return std::move(*best);
}

struct VerifyOptions {
  double phase_tolerance = 1e-6;
  double virial_tolerance = 1e-6;
  double pohozaev_tolerance = 1e-4;
  /// Relative amplitude below which samples are excluded from the phase check.
  double phase_mask = 1e-6;
  double gn_c1 = 1.0;
};

struct VerificationReport {
  double min_abs = 0.0;                ///< min |u| over the grid
  double min_gauge_real = 0.0;         ///< min Re(e^{-i theta} u) / max |u|
  bool positive = false;               ///< (a)
  double phase_std = 0.0;              ///< (b), radians
  bool phase_constant = false;
  double virial_ratio = 0.0;           ///< (c) |Q| / A
  bool virial_ok = false;
  double curvature = 0.0;              ///< (d) -A + 27/10 C on the rescaled triple
  bool saddle_ok = false;
  double eq1_residual = 0.0;           ///< A/2 + B + C + beta D, relative
  double eq12_residual = 0.0;          ///< A/4 + 3B/4 + 3C/5 + 3/2 beta D, relative
  double eq22_residual = 0.0;          ///< 18 beta D - (A - 3B), relative
  bool pohozaev_ok = false;            ///< (e)
  double beta = 0.0;
  bool beta_positive = false;
  bool beta_expected_positive = false; ///< c below c0 (with the configured GN constant)
  double radial_moment = 0.0;          ///< (f) <x1^2 + x2^2>
  double axial_moment = 0.0;           ///< (f) <2 x3^2>
  double gn_ratio = 0.0;
  bool gn_consistent = true;
  double residual = 0.0;
  double residual_weighted = 0.0;
  Diagnostics diagnostics;

  bool all_passed() const {
    return positive && phase_constant && virial_ok && saddle_ok && pohozaev_ok &&
           (!beta_expected_positive || beta_positive);
  }
};

/// Ground-state property checks on an arbitrary nonzero field.
inline VerificationReport verify_field(const Field& u, const KernelTable& k,
                                       const CouplingParams& p, const VerifyOptions& opt = {}) {
  const Evaluation ev = evaluate(u, k, p);
  const Diagnostics& d = ev.diagnostics;
  if (!(d.D > 0.0)) throw ZeroMass("verify_field: zero field");
  VerificationReport rep;
  rep.diagnostics = d;
  rep.beta = d.beta;

  // Gauge: the amplitude-weighted mean phase.
  complex acc{0.0, 0.0};
  double max_abs = 0.0;
  rep.min_abs = std::numeric_limits<double>::infinity();
  for (const auto& v : u.values()) {
    const double a = std::abs(v);
    acc += v * a;
    max_abs = std::max(max_abs, a);
    rep.min_abs = std::min(rep.min_abs, a);
  }
  const complex gauge = std::abs(acc) > 0.0 ? std::conj(acc) / std::abs(acc) : complex{1.0, 0.0};
  double min_real = std::numeric_limits<double>::infinity();
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& v : u.values()) {
    const complex w = v * gauge;
    min_real = std::min(min_real, w.real());
    if (std::abs(v) > opt.phase_mask * max_abs) {
      const double ph = std::arg(w);
      sum += ph;
      sum_sq += ph * ph;
      ++count;
    }
  }
  rep.min_gauge_real = min_real / max_abs;
  rep.positive = rep.min_abs > 0.0 && min_real > 0.0;
  const double mean = count ? sum / count : 0.0;
  rep.phase_std = count ? std::sqrt(std::max(0.0, sum_sq / count - mean * mean)) : 0.0;
  rep.phase_constant = rep.phase_std <= opt.phase_tolerance;

  rep.virial_ratio = std::abs(d.Q) / d.A;
  rep.virial_ok = rep.virial_ratio <= opt.virial_tolerance;

  const FiberTriple triple = FiberTriple::from(d);
  if (triple.valid()) {
    const auto fiber = solve_tstar(triple);
    rep.curvature = fiber_curvature_at_root(triple.scaled(fiber.t_star));
    rep.saddle_ok = rep.curvature < 0.0;
  }

  const double bd = d.beta * d.D;
  rep.eq1_residual = std::abs(0.5 * d.A + d.B + d.C + bd) /
                     (0.5 * d.A + std::abs(d.B) + std::abs(d.C) + std::abs(bd));
  rep.eq12_residual = std::abs(0.25 * d.A + 0.75 * d.B + 0.6 * d.C + 1.5 * bd) /
                      (0.25 * d.A + 0.75 * std::abs(d.B) + 0.6 * std::abs(d.C) + 1.5 * std::abs(bd));
  rep.eq22_residual = std::abs(18.0 * bd - (d.A - 3.0 * d.B)) / (d.A + 3.0 * std::abs(d.B));
  rep.pohozaev_ok = rep.eq1_residual <= opt.pohozaev_tolerance &&
                    rep.eq12_residual <= opt.pohozaev_tolerance &&
                    rep.eq22_residual <= opt.pohozaev_tolerance;

  rep.beta_positive = d.beta > 0.0;
  if (p.lambda3 < 0.0) {
    rep.beta_expected_positive = p.mass_c < c0_threshold(p, GNConstants::with_c1(opt.gn_c1));
  }

  const GridSpec& g = u.grid();
  double radial = 0.0, axial = 0.0;
  for (int i = 0; i < g.n[0]; ++i) {
    const double x = g.coordinate(0, i);
    for (int j = 0; j < g.n[1]; ++j) {
      const double y = g.coordinate(1, j);
      for (int kk = 0; kk < g.n[2]; ++kk) {
        const double z = g.coordinate(2, kk);
        const double rho = std::norm(u.at(i, j, kk));
        radial += (x * x + y * y) * rho;
        axial += 2.0 * z * z * rho;
      }
    }
  }
  const double h = g.cell_volume();
  rep.radial_moment = radial * h / d.D;
  rep.axial_moment = axial * h / d.D;

  rep.gn_ratio = gagliardo_nirenberg_ratio(u, d);
  rep.gn_consistent = rep.gn_ratio <= opt.gn_c1;
  rep.residual = el_residual(u, ev.gradient, d.beta);
  rep.residual_weighted = el_residual_weighted(u, ev.gradient, d.beta);
  return rep;
}

/// verify_field on a converged solver result.
inline VerificationReport verify_ground_state(const SolverResult& res, const KernelTable& k,
                                              const CouplingParams& p,
                                              const VerifyOptions& opt = {}) {
  if (!res.converged) throw NotConvergedInput("verify_ground_state: result did not converge");
  return verify_field(res.field, k, p, opt);
}

struct GammaPoint {
  double mass = 0.0;
  double gamma = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Whether beta > 0 is guaranteed for every mass (c0 = infinity).
inline bool gamma_curve_regime_ok(const SolverConfig& cfg) {
  return is_unconditional(cfg.couplings.lambda1, cfg.couplings.lambda2);
}

/// gamma(c) for ascending masses, each solve warm-started from the previous
/// ground state (re-projected to the new mass). Falls back to init_field when
/// the warm start cannot be rescaled onto the manifold.
inline std::vector<GammaPoint> gamma_curve(const SolverConfig& cfg,
                                           const std::vector<double>& masses) {
  if (!std::is_sorted(masses.begin(), masses.end())) {
    throw ValidationError("gamma_curve: masses must be sorted ascending");
  }
  std::vector<GammaPoint> out;
  std::optional<Field> warm;
  for (double c : masses) {
    SolverConfig local = cfg;
    local.couplings.mass_c = c;
    std::optional<SolverResult> res;
    if (warm) {
      Field start = *warm;
      project_mass(start, c);
      try {
        res = minimize_ground_state(local, start);
      } catch (const DecayViolation&) {
        // the rescaled warm start spills into the shell; start cold instead
      }
    }
    if (!res) res = minimize_ground_state(local);
    out.push_back({c, res->gamma, res->converged, res->iterations});
    warm = std::move(res->field);
  }
  return out;
}

}  // namespace gpe
