#pragma once

#include <cmath>
#include <limits>

#include "gpe/error.hpp"
#include "gpe/fft.hpp"
#include "gpe/grid.hpp"
#include "gpe/kernel.hpp"
#include "gpe/spectral.hpp"

namespace gpe {

/**
 * Variational quantities of a field:
 *   A = ||grad u||^2, B = interaction, C = lambda3 ||u||_5^5, D = ||u||^2,
 *   E = A/2 + B/2 + 2C/5, Q = A + 3B/2 + 9C/5,
 *   beta = -(A/2 + B + C)/D (NaN when D = 0).
 */
struct Diagnostics {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double E = 0.0;
  double Q = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();

  bool beta_defined() const noexcept { return std::isfinite(beta); }
};

inline double energy_from(double a, double b, double c) { return 0.5 * a + 0.5 * b + 0.4 * c; }
inline double virial_from(double a, double b, double c) { return a + 1.5 * b + 1.8 * c; }

/// beta from the identity A/2 + B + C + beta D = 0.
inline double chemical_potential(const Diagnostics& d) {
  if (!(d.D > 0.0)) throw ZeroMass("chemical_potential: zero mass");
  return -(0.5 * d.A + d.B + d.C) / d.D;
}

inline Diagnostics make_diagnostics(double a, double b, double c, double d) {
  Diagnostics out;
  out.A = a;
  out.B = b;
  out.C = c;
  out.D = d;
  out.E = energy_from(a, b, c);
  out.Q = virial_from(a, b, c);
  if (d > 0.0) out.beta = chemical_potential(out);
  return out;
}

/// Field and its energy gradient evaluated with shared transforms.
struct Evaluation {
  Diagnostics diagnostics;
  Field gradient;
};

namespace detail {

inline Evaluation evaluate(const Field& u, const KernelTable& k, const CouplingParams& p,
                           bool with_gradient) {
  require_same_grid(u.grid(), k.grid(), "functionals");
  const GridSpec& g = u.grid();
  const double inv_v = 1.0 / g.volume();
  const auto ksq = kinetic_multiplier(g);

  auto uh = forward_transform(u);
  double a = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) a += ksq[i] * std::norm(uh[i]);
  a *= inv_v;

  Field w(g);
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::norm(u[i]);
  auto wh = forward_transform(w);
  double b = 0.0;
  for (std::size_t i = 0; i < wh.size(); ++i) {
    const double m = p.lambda1 + p.lambda2 * k[i];
    b += m * std::norm(wh[i]);
    wh[i] *= m;
  }
  b *= inv_v;

  const double c = p.lambda3 * integrate_density(u, 5.0);
  const double d = mass(u);

  Evaluation out{make_diagnostics(a, b, c, d), Field{}};
  if (!with_gradient) return out;

  // -1/2 Laplacian from the already transformed field.
  for (std::size_t i = 0; i < uh.size(); ++i) uh[i] *= 0.5 * ksq[i];
  Field grad = inverse_transform(uh);
  // phi = F^-1[(lambda1 + lambda2 K^) w^] = lambda1 |u|^2 + lambda2 K * |u|^2.
  const Field phi = inverse_transform(wh);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rho = w[i].real();
    grad[i] += (phi[i].real() + p.lambda3 * rho * std::sqrt(rho)) * u[i];
  }
  out.gradient = std::move(grad);
  return out;
}

}  // namespace detail

inline Diagnostics compute_diagnostics(const Field& u, const KernelTable& k,
                                       const CouplingParams& p) {
  return detail::evaluate(u, k, p, false).diagnostics;
}

/// -1/2 Lap u + lambda1 |u|^2 u + lambda2 (K * |u|^2) u + lambda3 |u|^3 u.
///
/// First variation of E with respect to 2 Re<., .>_h:
/// dE(u)[v] = 2 Re<g, v>_h.
inline Field energy_gradient(const Field& u, const KernelTable& k, const CouplingParams& p) {
  return detail::evaluate(u, k, p, true).gradient;
}

inline Evaluation evaluate(const Field& u, const KernelTable& k, const CouplingParams& p) {
  return detail::evaluate(u, k, p, true);
}

/// ||g + beta u||_2 / ||u||_2 for an already computed gradient.
inline double el_residual(const Field& u, const Field& gradient, double beta) {
  require_same_grid(u.grid(), gradient.grid(), "el_residual");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::norm(gradient[i] + beta * u[i]);
    den += std::norm(u[i]);
  }
  if (!(den > 0.0)) throw ZeroMass("el_residual: zero field");
  return std::sqrt(num / den);
}

/// Relative L2 residual of the Euler-Lagrange equation at (u, beta).
inline double el_residual(const Field& u, double beta, const KernelTable& k,
                          const CouplingParams& p) {
  if (!(mass(u) > 0.0)) throw ZeroMass("el_residual: zero field");
  return el_residual(u, energy_gradient(u, k, p), beta);
}

/// Residual measured in the (1 + |xi|^2)^{-1/2}-weighted norm, a computable
/// stand-in for the H^-1 norm. Reported only.
inline double el_residual_weighted(const Field& u, const Field& gradient, double beta) {
  require_same_grid(u.grid(), gradient.grid(), "el_residual_weighted");
  Field r(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = gradient[i] + beta * u[i];
  const auto rh = forward_transform(r);
  const auto ksq = kinetic_multiplier(u.grid());
  double num = 0.0;
  for (std::size_t i = 0; i < rh.size(); ++i) num += std::norm(rh[i]) / (1.0 + ksq[i]);
  num /= u.grid().volume();
  const double den = mass(u);
  if (!(den > 0.0)) throw ZeroMass("el_residual_weighted: zero field");
  return std::sqrt(num / den);
}

/// ||u||_5 / (A^{9/20} D^{1/20}); compared against a configured
/// Gagliardo-Nirenberg constant for a sanity report.
inline double gagliardo_nirenberg_ratio(const Field& u, const Diagnostics& d) {
  if (!(d.A > 0.0) || !(d.D > 0.0)) return 0.0;
  const double l5 = std::pow(integrate_density(u, 5.0), 0.2);
  return l5 / (std::pow(d.A, 0.45) * std::pow(d.D, 0.05));
}

}  // namespace gpe
