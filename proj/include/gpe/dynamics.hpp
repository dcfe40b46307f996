#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gpe/error.hpp"
#include "gpe/fft.hpp"
#include "gpe/functionals.hpp"
#include "gpe/grid.hpp"
#include "gpe/kernel.hpp"
#include "gpe/spectral.hpp"

namespace gpe {

/// i d_t psi = -1/2 Lap psi + N(|psi|) psi integrated up to T = dt * steps.
struct PropagationConfig {
  double dt = 1e-3;
  int steps = 1000;
  CouplingParams couplings{};

  double total_time() const noexcept { return dt * steps; }
};

inline void validate(const PropagationConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("dt must be positive");
  if (cfg.steps < 1) throw ValidationError("steps must be >= 1");
  validate_couplings(cfg.couplings, false);
}

namespace detail {

inline void kinetic_phase(Field& psi, const std::vector<complex>& phase) {
  auto ph = forward_transform(psi);
  for (std::size_t i = 0; i < ph.size(); ++i) ph[i] *= phase[i];
  psi = inverse_transform(ph);
}

// N = lambda1 |psi|^2 + lambda2 K * |psi|^2 + lambda3 |psi|^3, frozen over the substep.
inline void nonlinear_phase(Field& psi, const KernelTable& k, const CouplingParams& p, double dt) {
  Field w(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) w[i] = std::norm(psi[i]);
  Field dip;
  if (p.lambda2 != 0.0) {
    auto wh = forward_transform(w);
    for (std::size_t i = 0; i < wh.size(); ++i) wh[i] *= k[i];
    dip = inverse_transform(wh);
  }
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = w[i].real();
    double n = p.lambda1 * rho + p.lambda3 * rho * std::sqrt(rho);
    if (p.lambda2 != 0.0) n += p.lambda2 * dip[i].real();
    psi[i] *= std::polar(1.0, -dt * n);
  }
}

}  // namespace detail

/**
 * Strang splitting: half kinetic step exp(-i dt |xi|^2 / 4) in Fourier space,
 * exact nonlinear phase exp(-i dt N), half kinetic step. Both substeps are
 * unitary, so the mass is conserved to roundoff.
 */
inline Field split_step_evolve(const Field& psi0, const PropagationConfig& cfg,
                               const KernelTable& k) {
  validate(cfg);
  require_same_grid(psi0.grid(), k.grid(), "split_step_evolve");
  const auto ksq = kinetic_multiplier(psi0.grid());
  std::vector<complex> half(ksq.size());
  for (std::size_t i = 0; i < ksq.size(); ++i) half[i] = std::polar(1.0, -0.25 * cfg.dt * ksq[i]);

  Field psi = psi0;
  for (int s = 0; s < cfg.steps; ++s) {
    detail::kinetic_phase(psi, half);
    detail::nonlinear_phase(psi, k, cfg.couplings, cfg.dt);
    detail::kinetic_phase(psi, half);
    if (!psi.all_finite()) {
      throw NumericalBlowup("split_step_evolve: non-finite field at step " + std::to_string(s));
    }
  }
  return psi;
}

struct ConservationReport {
  double mass_drift = 0.0;
  double energy_drift = 0.0;
};

/// Relative drifts of mass and energy; the energy drift is absolute when
/// |E(psi0)| is below 1e-14.
inline ConservationReport conservation_report(const Field& psi0, const Field& psi_t,
                                              const KernelTable& k, const CouplingParams& p) {
  require_same_grid(psi0.grid(), psi_t.grid(), "conservation_report");
  const Diagnostics d0 = compute_diagnostics(psi0, k, p);
  const Diagnostics d1 = compute_diagnostics(psi_t, k, p);
  ConservationReport r;
  r.mass_drift = d0.D > 0.0 ? std::abs(d1.D - d0.D) / d0.D : std::abs(d1.D - d0.D);
  const double de = std::abs(d1.E - d0.E);
  r.energy_drift = std::abs(d0.E) > 1e-14 ? de / std::abs(d0.E) : de;
  return r;
}

/// ||psi_T - e^{-i beta T} u|| / ||u||.
inline double standing_wave_error(const Field& psi_t, const Field& u, double beta, double t) {
  require_same_grid(psi_t.grid(), u.grid(), "standing_wave_error");
  const complex phase = std::polar(1.0, -beta * t);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::norm(psi_t[i] - phase * u[i]);
    den += std::norm(u[i]);
  }
  if (!(den > 0.0)) throw ZeroMass("standing_wave_error: zero reference field");
  return std::sqrt(num / den);
}

/// || |psi_T| - |u| || / ||u||, insensitive to the phase.
inline double modulus_error(const Field& psi_t, const Field& u) {
  require_same_grid(psi_t.grid(), u.grid(), "modulus_error");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = std::abs(psi_t[i]) - std::abs(u[i]);
    num += d * d;
    den += std::norm(u[i]);
  }
  if (!(den > 0.0)) throw ZeroMass("modulus_error: zero reference field");
  return std::sqrt(num / den);
}

}  // namespace gpe
