#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpe/error.hpp"
#include "gpe/kernel.hpp"

namespace gpe {

/// Gagliardo-Nirenberg constants: ||u||_5 <= c1 ||grad u||_2^{9/10} ||u||_2^{1/10}
/// and the derived c2 = (5/9)^{4/5} c1^{-4/5}. The default c1 = 1 is not the
/// optimal constant.
struct GNConstants {
  double c1 = 1.0;
  double c2 = derived_c2(1.0);

  static double derived_c2(double c1) { return std::pow(5.0 / 9.0, 0.8) * std::pow(c1, -0.8); }
  static GNConstants with_c1(double c1) {
    if (!(c1 > 0.0)) throw ValidationError("Gagliardo-Nirenberg constant must be positive");
    return {c1, derived_c2(c1)};
  }
};

/// True iff lambda1 + lambda2 K^(xi) <= 0 for every xi, i.e. B(u) <= 0 always.
inline bool is_unconditional(double lambda1, double lambda2) {
  if (lambda2 > 0.0) return lambda1 + lambda2 * kKernelMax <= 0.0;
  return lambda1 + lambda2 * kKernelMin <= 0.0;
}

struct ThresholdReport {
  double xi = 0.0;
  double branch_quartic = 0.0;  ///< 4 lambda3^2 / (25 Xi^2)
  double branch_gn = 0.0;       ///< c2^5 lambda3^-4 / 243 * Xi^-5
  double c0 = 0.0;
  bool unconditional = false;
};

/// Both branches of the mass threshold below which beta > 0 is guaranteed.
inline ThresholdReport threshold_report(const CouplingParams& p, const GNConstants& g) {
  if (!(p.lambda3 < 0.0)) throw InvalidCouplings("c0_threshold: lambda3 must be negative");
  constexpr double inf = std::numeric_limits<double>::infinity();
  ThresholdReport r;
  r.xi = xi_constant(p.lambda1, p.lambda2);
  r.unconditional = is_unconditional(p.lambda1, p.lambda2);
  if (r.xi == 0.0) {
    r.branch_quartic = r.branch_gn = inf;
  } else {
    r.branch_quartic = 4.0 * p.lambda3 * p.lambda3 / (25.0 * r.xi * r.xi);
    r.branch_gn = std::pow(g.c2, 5) * std::pow(p.lambda3, -4) / 243.0 * std::pow(r.xi, -5);
  }
  r.c0 = r.unconditional ? inf : std::min(r.branch_quartic, r.branch_gn);
  return r;
}

inline double c0_threshold(const CouplingParams& p, const GNConstants& g) {
  return threshold_report(p, g).c0;
}

}  // namespace gpe
