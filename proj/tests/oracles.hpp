#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code paths with the library's transforms or quadratures.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "gpe/grid.hpp"

namespace oracle {

/// h * sum_x f(x) exp(-i xi_k . x) by direct summation, storage order.
inline gpe::SpectralField direct_forward(const gpe::Field& f) {
  const gpe::GridSpec& g = f.grid();
  gpe::SpectralField out(g);
  const double h = g.cell_volume();
  for (int a = 0; a < g.n[0]; ++a) {
    for (int b = 0; b < g.n[1]; ++b) {
      for (int c = 0; c < g.n[2]; ++c) {
        const double k1 = 2.0 * std::numbers::pi / g.l[0] * (a < g.n[0] / 2 ? a : a - g.n[0]);
        const double k2 = 2.0 * std::numbers::pi / g.l[1] * (b < g.n[1] / 2 ? b : b - g.n[1]);
        const double k3 = 2.0 * std::numbers::pi / g.l[2] * (c < g.n[2] / 2 ? c : c - g.n[2]);
        std::complex<long double> s = 0.0L;
        for (int i = 0; i < g.n[0]; ++i) {
          const double x = -0.5 * g.l[0] + i * g.l[0] / g.n[0];
          for (int j = 0; j < g.n[1]; ++j) {
            const double y = -0.5 * g.l[1] + j * g.l[1] / g.n[1];
            for (int k = 0; k < g.n[2]; ++k) {
              const double z = -0.5 * g.l[2] + k * g.l[2] / g.n[2];
              const long double ph = -(static_cast<long double>(k1) * x + static_cast<long double>(k2) * y +
                                       static_cast<long double>(k3) * z);
              const auto v = f.at(i, j, k);
              s += std::complex<long double>(v.real(), v.imag()) *
                   std::complex<long double>(std::cos(ph), std::sin(ph));
            }
          }
        }
        out.at(a, b, c) = std::complex<double>(static_cast<double>(s.real() * h),
                                               static_cast<double>(s.imag() * h));
      }
    }
  }
  return out;
}

/// int_{R^3} g(|x|) dx = 4 pi int_0^R r^2 g(r) dr, composite Simpson in long double.
inline long double radial_integral(const std::function<long double(long double)>& g, long double r_max,
                                   int intervals = 200000) {
  const long double dr = r_max / intervals;
  long double s = 0.0L;
  for (int i = 0; i <= intervals; ++i) {
    const long double r = i * dr;
    const long double w = (i == 0 || i == intervals) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
    s += w * r * r * g(r);
  }
  return 4.0L * std::numbers::pi_v<long double> * s * dr / 3.0L;
}

/// Unit-mass isotropic Gaussian pi^{-3/4} sigma^{-3/2} exp(-r^2 / (2 sigma^2)).
inline long double gaussian_profile(long double r, long double sigma = 1.0L) {
  return std::pow(std::numbers::pi_v<long double> * sigma * sigma, -0.75L) *
         std::exp(-r * r / (2.0L * sigma * sigma));
}

}  // namespace oracle
