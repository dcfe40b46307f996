#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gpe/error.hpp"
#include "gpe/grid.hpp"

namespace gpe {

/// Couplings of the cubic (lambda1), dipolar (lambda2) and quartic-in-|u|
/// (lambda3) terms, plus the target mass c.
struct CouplingParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = -1.0;
  double mass_c = 1.0;

  friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

/// Checks mass_c > 0 and, for solver use, lambda3 < 0.
inline void validate_couplings(const CouplingParams& p, bool require_focusing = true) {
  if (!(p.mass_c > 0.0) || !std::isfinite(p.mass_c)) {
    throw ValidationError("mass must be positive");
  }
  if (!std::isfinite(p.lambda1) || !std::isfinite(p.lambda2) || !std::isfinite(p.lambda3)) {
    throw ValidationError("couplings must be finite");
  }
  if (require_focusing && !(p.lambda3 < 0.0)) {
    throw ValidationError("lambda3 must be negative (got " + std::to_string(p.lambda3) + ")");
  }
}

inline constexpr double kKernelMin = -4.0 * std::numbers::pi / 3.0;
inline constexpr double kKernelMax = 8.0 * std::numbers::pi / 3.0;

/// Fourier symbol of the dipolar kernel, (4 pi / 3)(2 xi3^2 - xi1^2 - xi2^2)/|xi|^2.
/// Zero at the origin, where the symbol has no limit.
inline double dipole_fourier(const std::array<double, 3>& xi) {
  const double a = xi[0] * xi[0];
  const double b = xi[1] * xi[1];
  const double c = xi[2] * xi[2];
  const double r2 = a + b + c;
  if (r2 == 0.0) return 0.0;
  // the ratio lies in [-1, 2]; clamping removes last-bit overshoot
  return (4.0 * std::numbers::pi / 3.0) * std::clamp((2.0 * c - a - b) / r2, -1.0, 2.0);
}

/// The dipolar symbol tabulated on a grid, storage order.
class KernelTable {
 public:
  KernelTable() = default;
  explicit KernelTable(const GridSpec& grid) : grid_(grid), multiplier_(grid.size()) {
    std::size_t idx = 0;
    for (int i = 0; i < grid.n[0]; ++i) {
      const double k1 = grid.wavenumber(0, i);
      for (int j = 0; j < grid.n[1]; ++j) {
        const double k2 = grid.wavenumber(1, j);
        for (int k = 0; k < grid.n[2]; ++k) {
          multiplier_[idx++] = dipole_fourier({k1, k2, grid.wavenumber(2, k)});
        }
      }
    }
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<double>& multiplier() const noexcept { return multiplier_; }
  double operator[](std::size_t i) const noexcept { return multiplier_[i]; }
  double at(int i, int j, int k) const noexcept { return multiplier_[grid_.index(i, j, k)]; }

 private:
  GridSpec grid_{};
  std::vector<double> multiplier_;
};

inline KernelTable build_kernel_table(const GridSpec& grid) { return KernelTable(grid); }

/// Xi = (2 pi)^-3 max{|lambda1 - lambda2 4pi/3|, |lambda1 + lambda2 8pi/3|}.
/// sup_xi |lambda1 + lambda2 K^(xi)| = (2 pi)^3 Xi, hence |B(u)| <= (2 pi)^3 Xi ||u||_4^4.
inline double xi_constant(double lambda1, double lambda2) {
  const double two_pi_cubed = std::pow(2.0 * std::numbers::pi, 3);
  return std::max(std::abs(lambda1 + lambda2 * kKernelMin),
                  std::abs(lambda1 + lambda2 * kKernelMax)) /
         two_pi_cubed;
}

}  // namespace gpe
