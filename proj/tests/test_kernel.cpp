#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "gpe/kernel.hpp"

using namespace gpe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("dipole_fourier endpoints and zero set") {
  CHECK_THAT(dipole_fourier({0, 0, 1}), WithinRel(8 * kPi / 3, 1e-15));
  CHECK_THAT(dipole_fourier({1, 0, 0}), WithinRel(-4 * kPi / 3, 1e-15));
  CHECK_THAT(dipole_fourier({0, -2.5, 0}), WithinRel(-4 * kPi / 3, 1e-15));
  CHECK_THAT(dipole_fourier({1, 1, 1}), WithinAbs(0.0, 1e-15));
  CHECK(dipole_fourier({0, 0, 0}) == 0.0);
}

TEST_CASE("dipole_fourier is homogeneous of degree zero and even") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 3> xi{u(rng), u(rng), u(rng)};
    const double v = dipole_fourier(xi);
    for (double s : {1e-3, 0.7, 42.0}) {
      CHECK_THAT(dipole_fourier({s * xi[0], s * xi[1], s * xi[2]}), WithinAbs(v, 1e-13));
    }
    CHECK(dipole_fourier({-xi[0], -xi[1], -xi[2]}) == v);
    CHECK(v >= kKernelMin - 1e-14);
    CHECK(v <= kKernelMax + 1e-14);
  }
}

TEST_CASE("kernel table: range, zero mode and symmetry") {
  const auto g = make_grid({16, 12, 10}, {3.0, 5.0, 7.0});
  const KernelTable k = build_kernel_table(g);
  double lo = 1e300, hi = -1e300;
  for (double v : k.multiplier()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= kKernelMin - 1e-14);
  CHECK(hi <= kKernelMax + 1e-14);
  CHECK(k.at(0, 0, 0) == 0.0);
  CHECK_THAT(k.at(0, 0, 1), WithinRel(kKernelMax, 1e-15));
  CHECK_THAT(k.at(1, 0, 0), WithinRel(kKernelMin, 1e-15));
  // xi -> -xi, excluding Nyquist planes whose mirror is not stored
  for (int i = 1; i < g.n[0] / 2; ++i)
    for (int j = 1; j < g.n[1] / 2; ++j)
      for (int l = 1; l < g.n[2] / 2; ++l)
        CHECK(k.at(i, j, l) == k.at(g.n[0] - i, g.n[1] - j, g.n[2] - l));
}

TEST_CASE("xi_constant closed forms") {
  const double c = 8 * std::pow(kPi, 3);
  CHECK_THAT(xi_constant(1, 0), WithinRel(1 / c, 1e-15));
  CHECK_THAT(xi_constant(0, 1), WithinRel(1 / (3 * kPi * kPi), 1e-14));
  CHECK_THAT(xi_constant(-4, 1), WithinRel((4 + 4 * kPi / 3) / c, 1e-14));
  CHECK(xi_constant(0, 0) == 0.0);
}

TEST_CASE("coupling symbol is bounded by (2 pi)^3 Xi") {
  const auto g = make_grid({16, 16, 16}, {4, 6, 8});
  const KernelTable k(g);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int t = 0; t < 20; ++t) {
    const double l1 = u(rng), l2 = u(rng);
    const double bound = std::pow(2 * kPi, 3) * xi_constant(l1, l2);
    double worst = 0.0;
    for (double v : k.multiplier()) worst = std::max(worst, std::abs(l1 + l2 * v));
    CHECK(worst <= bound + 1e-12);
  }
}

TEST_CASE("validate_couplings") {
  CHECK_NOTHROW(validate_couplings({1, 2, -1, 0.5}));
  CHECK_THROWS_AS(validate_couplings({1, 2, 0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(validate_couplings({1, 2, -1, 0.0}), ValidationError);
  CHECK_NOTHROW(validate_couplings({1, 2, 0.5, 0.5}, false));
}
