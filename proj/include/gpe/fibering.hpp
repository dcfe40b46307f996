#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gpe/error.hpp"
#include "gpe/functionals.hpp"
#include "gpe/spectral.hpp"

namespace gpe {

/// Scaling coefficients of a field along u -> u^t = t^{3/2} u(t x):
/// A(u^t) = t^2 A, B(u^t) = t^3 B, C(u^t) = t^{9/2} C.
struct FiberTriple {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;

  static FiberTriple from(const Diagnostics& d) { return {d.A, d.B, d.C}; }

  /// Triple of u^t.
  FiberTriple scaled(double t) const {
    return {t * t * A, t * t * t * B, std::pow(t, 4.5) * C};
  }
  bool valid() const noexcept { return A > 0.0 && C < 0.0 && std::isfinite(B); }
};

struct FiberResult {
  double t_star = 1.0;
  double e_at_star = 0.0;
  /// d^2/dt^2 E(u^t) at t*.
  double curvature = 0.0;
};

/// E(u^t) = t^2/2 A + t^3/2 B + 2/5 t^{9/2} C.
inline double fiber_energy(const FiberTriple& f, double t) {
  return 0.5 * t * t * f.A + 0.5 * t * t * t * f.B + 0.4 * std::pow(t, 4.5) * f.C;
}

/// Q(u^t) = t^2 A + 3/2 t^3 B + 9/5 t^{9/2} C.
inline double fiber_virial(const FiberTriple& f, double t) {
  return t * t * f.A + 1.5 * t * t * t * f.B + 1.8 * std::pow(t, 4.5) * f.C;
}

/// d^2/dt^2 E(u^t) = A + 3 t B + 63/10 t^{5/2} C.
inline double fiber_second_derivative(const FiberTriple& f, double t) {
  return f.A + 3.0 * t * f.B + 6.3 * std::pow(t, 2.5) * f.C;
}

namespace detail {

// Q(u^t) / t^2: positive at 0+, -> -inf, exactly one sign change.
inline double reduced_virial(const FiberTriple& f, double t) {
  return f.A + 1.5 * t * f.B + 1.8 * std::pow(t, 2.5) * f.C;
}

}  // namespace detail

/// Unique t* > 0 with Q(u^{t*}) = 0, located by bracketing and bisection.
inline FiberResult solve_tstar(const FiberTriple& f) {
  if (!f.valid()) {
    throw InvalidTriple("solve_tstar: need A > 0 and C < 0 (A=" + std::to_string(f.A) +
                        ", C=" + std::to_string(f.C) + ")");
  }
  constexpr int kMaxBracketSteps = 200;
  double lo = 1.0, hi = 1.0;
  const double at_one = detail::reduced_virial(f, 1.0);
  if (at_one == 0.0) {
    return {1.0, fiber_energy(f, 1.0), fiber_second_derivative(f, 1.0)};
  }
  int steps = 0;
  if (at_one > 0.0) {
    while (detail::reduced_virial(f, hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++steps > kMaxBracketSteps) throw NumericalBlowup("solve_tstar: bracketing failed");
    }
  } else {
    while (!(detail::reduced_virial(f, lo) > 0.0)) {
      hi = lo;
      lo *= 0.5;
      if (++steps > kMaxBracketSteps) throw NumericalBlowup("solve_tstar: bracketing failed");
    }
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::reduced_virial(f, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // One secant step inside the final bracket removes the leftover linear error.
  const double plo = detail::reduced_virial(f, lo), phi = detail::reduced_virial(f, hi);
  double t = std::abs(plo) <= std::abs(phi) ? lo : hi;
  if (plo != phi) {
    const double sec = lo - plo * (hi - lo) / (phi - plo);
    if (sec > lo && sec < hi &&
        std::abs(detail::reduced_virial(f, sec)) < std::abs(detail::reduced_virial(f, t))) {
      t = sec;
    }
  }
  return {t, fiber_energy(f, t), fiber_second_derivative(f, t)};
}

/// -A + 27/10 C, the fiber curvature of a triple that already sits on the
/// virial manifold (t* = 1).
inline double fiber_curvature_at_root(const FiberTriple& f) {
  if (std::abs(fiber_virial(f, 1.0)) > 1e-10 * std::abs(f.A)) {
    throw NotOnManifold("fiber_curvature_at_root: |Q| = " +
                        std::to_string(std::abs(fiber_virial(f, 1.0))) +
                        " exceeds 1e-10 A");
  }
  return -f.A + 2.7 * f.C;
}

struct FiberSample {
  double t = 0.0;
  double E = 0.0;
  double Q = 0.0;
};

/// Samples (m, E(u^m), Q(u^m)) along m(s) = (1-s) theta1 + s theta2, s in [0, 1].
inline std::vector<FiberSample> mpg_path(const FiberTriple& f, double theta1, double theta2,
                                         int samples) {
  if (!(theta1 > 0.0) || !(theta2 > theta1) || samples < 3) {
    throw BadEndpoints("mpg_path: need 0 < theta1 < theta2 and samples >= 3");
  }
  std::vector<FiberSample> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    const double m = (1.0 - s) * theta1 + s * theta2;
    out.push_back({m, fiber_energy(f, m), fiber_virial(f, m)});
  }
  return out;
}

struct ManifoldProjection {
  Field field;
  double t_star = 1.0;
  Diagnostics diagnostics;
};

/**
 * Moves u onto the virial manifold: solves t* from the triple of u and
 * resamples u^{t*}. Resampling is only spectrally accurate, so on coarse grids
 * the grid value of Q at the predicted t* is not zero; the scale is then
 * refined by secant steps on s -> Q(u^s) measured on the grid (each pass
 * resamples u itself, at most `max_passes` passes) until |Q|/A <= target.
 * The best scale found is returned either way.
 */
inline ManifoldProjection rescale_to_manifold(const Field& u, const KernelTable& k,
                                              const CouplingParams& p,
                                              const ResampleOptions& opt = {},
                                              double target = 1e-10, int max_passes = 8) {
  ManifoldProjection best{u, 1.0, compute_diagnostics(u, k, p)};
  if (!(best.diagnostics.D > 0.0)) throw ZeroMass("rescale_to_manifold: zero field");
  auto ratio = [](const Diagnostics& d) { return d.Q / d.A; };
  if (std::abs(ratio(best.diagnostics)) <= target) return best;

  double s_prev = 1.0, q_prev = ratio(best.diagnostics);
  double s = solve_tstar(FiberTriple::from(best.diagnostics)).t_star;
  for (int pass = 0; pass < max_passes; ++pass) {
    if (!(s > 0.0) || !std::isfinite(s) || s == s_prev) break;
    ManifoldProjection trial{resample_scaled(u, s, opt), s, {}};
    trial.diagnostics = compute_diagnostics(trial.field, k, p);
    const double q = ratio(trial.diagnostics);
    if (std::abs(q) < std::abs(ratio(best.diagnostics))) best = std::move(trial);
    if (std::abs(q) <= target || q == q_prev) break;
    const double next = s - q * (s - s_prev) / (q - q_prev);
    s_prev = s;
    q_prev = q;
    s = next;
  }
  return best;
}

}  // namespace gpe
