#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gpe/error.hpp"
#include "gpe/fft.hpp"
#include "gpe/grid.hpp"

namespace gpe {

/// |xi|^2 per frequency in storage order, Nyquist components zeroed per axis.
/// Shared by the kinetic energy, the Laplacian and the kinetic propagator so
/// that all three use the same discrete operator.
inline std::vector<double> kinetic_multiplier(const GridSpec& g) {
  const auto k1 = axis_wavenumbers(g, 0, true);
  const auto k2 = axis_wavenumbers(g, 1, true);
  const auto k3 = axis_wavenumbers(g, 2, true);
  std::vector<double> out(g.size());
  std::size_t idx = 0;
  for (int i = 0; i < g.n[0]; ++i) {
    for (int j = 0; j < g.n[1]; ++j) {
      const double a = k1[i] * k1[i] + k2[j] * k2[j];
      for (int k = 0; k < g.n[2]; ++k) out[idx++] = a + k3[k] * k3[k];
    }
  }
  return out;
}

/// A(f) = (1/V) sum_k |xi_k|^2 |f^(xi_k)|^2, the discrete ||grad f||_2^2.
inline double gradient_norm_sq(const SpectralField& fh) {
  const auto ksq = kinetic_multiplier(fh.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) s += ksq[i] * std::norm(fh[i]);
  return s / fh.grid().volume();
}

inline double gradient_norm_sq(const Field& f) {
  return gradient_norm_sq(forward_transform(f));
}

/// h * sum |f|^p, p >= 1.
inline double integrate_density(const Field& f, double p) {
  if (!(p >= 1.0)) throw ValidationError("integrate_density: exponent must be >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values()) s += std::norm(v);
  } else if (p == 4.0) {
    for (const auto& v : f.values()) {
      const double a = std::norm(v);
      s += a * a;
    }
  } else if (p == 5.0) {
    for (const auto& v : f.values()) {
      const double a = std::norm(v);
      s += a * a * std::sqrt(a);
    }
  } else {
    for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
  }
  return s * f.grid().cell_volume();
}

/// Spectral Laplacian of f.
inline Field laplacian(const Field& f) {
  auto fh = forward_transform(f);
  const auto ksq = kinetic_multiplier(f.grid());
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= -ksq[i];
  return inverse_transform(fh);
}

namespace detail {

// Even-n trigonometric interpolation kernel with the Nyquist mode split
// symmetrically (so real samples interpolate to real values):
// D(d) = (1/n) [1 + 2 sum_{m=1}^{n/2-1} cos(m theta) + cos(n theta / 2)],
// theta = 2 pi d / l.
inline double interpolation_kernel(int n, double l, double d) {
  const double theta = 2.0 * std::numbers::pi * d / l;
  double s = 1.0 + std::cos(0.5 * n * theta);
  for (int m = 1; m < n / 2; ++m) s += 2.0 * std::cos(m * theta);
  return s / n;
}

// Row r of the matrix evaluates the axis interpolant at t * x_r. Targets more
// than 10% of the half-width beyond the box are set to zero: the periodic
// interpolant there would read from the interior of a neighbouring image.
inline std::vector<double> scaling_matrix(const GridSpec& g, int axis, double t) {
  const int n = g.n[axis];
  const double l = g.l[axis];
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  for (int r = 0; r < n; ++r) {
    const double y = t * g.coordinate(axis, r);
    if (std::abs(y) > 0.55 * l) continue;
    for (int s = 0; s < n; ++s) {
      w[static_cast<std::size_t>(r) * n + s] =
          interpolation_kernel(n, l, y - g.coordinate(axis, s));
    }
  }
  return w;
}

// out[.., r, ..] = sum_s w[r, s] in[.., s, ..] along one axis.
inline void apply_axis(const GridSpec& g, int axis, const std::vector<double>& w,
                       const std::vector<complex>& in, std::vector<complex>& out) {
  const int n = g.n[axis];
  std::size_t stride = 1;
  for (int a = axis + 1; a < 3; ++a) stride *= g.n[a];
  std::size_t outer = 1;
  for (int a = 0; a < axis; ++a) outer *= g.n[a];
  std::fill(out.begin(), out.end(), complex{0.0, 0.0});
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * n * stride;
    for (int r = 0; r < n; ++r) {
      complex* dst = out.data() + base + r * stride;
      const double* row = w.data() + static_cast<std::size_t>(r) * n;
      for (int s = 0; s < n; ++s) {
        const double c = row[s];
        if (c == 0.0) continue;
        const complex* src = in.data() + base + s * stride;
        for (std::size_t q = 0; q < stride; ++q) dst[q] += c * src[q];
      }
    }
  }
}

}  // namespace detail

/// Largest |f| in the outer shell max_j |x_j| / (l_j/2) >= inner_fraction,
/// relative to the global max of |f|.
inline double shell_ratio(const Field& f, double inner_fraction) {
  const GridSpec& g = f.grid();
  double global = 0.0, shell = 0.0;
  for (int i = 0; i < g.n[0]; ++i) {
    const double r1 = std::abs(g.coordinate(0, i)) / (0.5 * g.l[0]);
    for (int j = 0; j < g.n[1]; ++j) {
      const double r2 = std::max(r1, std::abs(g.coordinate(1, j)) / (0.5 * g.l[1]));
      for (int k = 0; k < g.n[2]; ++k) {
        const double r = std::max(r2, std::abs(g.coordinate(2, k)) / (0.5 * g.l[2]));
        const double a = std::abs(f.at(i, j, k));
        global = std::max(global, a);
        if (r >= inner_fraction) shell = std::max(shell, a);
      }
    }
  }
  return global > 0.0 ? shell / global : 0.0;
}

struct ResampleOptions {
  /// Maximum |f| allowed in the outer shell, relative to max |f|.
  double decay_tolerance = 1e-10;
  /// Inner radius of the shell as a fraction of the half-width.
  double shell_fraction = 0.9;
};

/**
 * Band-limited samples of t^{3/2} f(t x), renormalized to the mass of f.
 *
 * The truncated Fourier series of f is evaluated at the points t x (separably,
 * one axis at a time). For t < 1 the samples at the box edge come from
 * f(t l/2), so the decay requirement is applied to the correspondingly shrunk
 * shell. Throws DecayViolation when f is not small enough there.
 */
inline Field resample_scaled(const Field& f, double t, const ResampleOptions& opt = {}) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ValidationError("resample_scaled: scale factor must be positive and finite");
  }
  if (t == 1.0) return f;
  const double ratio = shell_ratio(f, opt.shell_fraction * std::min(1.0, t));
  if (ratio > opt.decay_tolerance) {
    throw DecayViolation("resample_scaled: field not decayed in the outer shell (ratio " +
                         std::to_string(ratio) + ")");
  }
  const GridSpec& g = f.grid();
  const double m0 = mass(f);
  std::vector<complex> a(f.values().begin(), f.values().end());
  std::vector<complex> b(a.size());
  detail::apply_axis(g, 0, detail::scaling_matrix(g, 0, t), a, b);
  detail::apply_axis(g, 1, detail::scaling_matrix(g, 1, t), b, a);
  detail::apply_axis(g, 2, detail::scaling_matrix(g, 2, t), a, b);
  Field out(g, std::move(b));
  const double amp = std::pow(t, 1.5);
  for (auto& v : out.values()) v *= amp;
  if (m0 > 0.0) project_mass(out, m0);
  return out;
}

}  // namespace gpe
