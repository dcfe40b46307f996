#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "gpe/dynamics.hpp"

using namespace gpe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// free Schroedinger evolution of (pi s^2)^{-3/4} exp(-r^2 / 2 s^2)
complex free_gaussian(double r2, double s, double t) {
  const complex w(1.0, t / (s * s));
  return std::pow(kPi * s * s, -0.75) * std::pow(w, -1.5) * std::exp(-r2 / (2.0 * s * s * w));
}

}  // namespace

TEST_CASE("plane waves evolve exactly") {
  const auto g = make_grid({16, 16, 16}, {2 * kPi, 2 * kPi, 2 * kPi});
  const KernelTable k(g);
  const double amp = 0.3;
  const PropagationConfig cfg{1e-2, 100, {1.5, 2.0, -0.7, 1.0}};
  const Field psi0 = sample_field(g, [&](double x, double y, double z) {
    return amp * std::polar(1.0, 2.0 * x - y + 3.0 * z);
  });
  const Field psi = split_step_evolve(psi0, cfg, k);
  // |psi| is uniform, so the dipolar term vanishes (K^(0) = 0)
  const double omega = 0.5 * 14.0 + cfg.couplings.lambda1 * amp * amp +
                       cfg.couplings.lambda3 * amp * amp * amp;
  const double t = cfg.total_time();
  const Field exact = sample_field(g, [&](double x, double y, double z) {
    return amp * std::polar(1.0, 2.0 * x - y + 3.0 * z - omega * t);
  });
  CHECK(max_abs_diff(psi, exact) <= 1e-12);
  CHECK_THAT(standing_wave_error(psi, psi0, omega, t), WithinAbs(0.0, 1e-12));
  CHECK_THAT(modulus_error(psi, psi0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("free Gaussian spreads as the closed form") {
  const auto g = make_grid({48, 48, 48}, {20.0, 20.0, 20.0});
  const KernelTable k(g);
  const double s = 1.0;
  const Field psi0 = sample_field(g, [&](double x, double y, double z) {
    return free_gaussian(x * x + y * y + z * z, s, 0.0);
  });
  const PropagationConfig cfg{1e-3, 500, {0.0, 0.0, 0.0, 1.0}};
  const Field psi = split_step_evolve(psi0, cfg, k);
  const Field exact = sample_field(g, [&](double x, double y, double z) {
    return free_gaussian(x * x + y * y + z * z, s, cfg.total_time());
  });
  CHECK(max_abs_diff(psi, exact) <= 1e-8);
}

TEST_CASE("mass is conserved and energy drift is second order") {
  const auto g = make_grid({32, 32, 32}, {12.0, 12.0, 12.0});
  const KernelTable k(g);
  const CouplingParams p{-1.0, 0.5, -1.0, 1.0};
  Field psi0 = sample_field(g, [&](double x, double y, double z) {
    return std::exp(-(x * x + y * y) / 2.0 - z * z / 3.0) * std::polar(1.0, 0.2 * x);
  });
  project_mass(psi0, 1.0);

  const PropagationConfig coarse{2e-2, 25, p};
  const PropagationConfig fine{1e-2, 50, p};
  const Field a = split_step_evolve(psi0, coarse, k);
  const Field b = split_step_evolve(psi0, fine, k);
  const auto ra = conservation_report(psi0, a, k, p);
  const auto rb = conservation_report(psi0, b, k, p);
  CHECK(ra.mass_drift <= 1e-12);
  CHECK(rb.mass_drift <= 1e-12);
  REQUIRE(rb.energy_drift > 0.0);
  const double ratio = ra.energy_drift / rb.energy_drift;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("standing wave error") {
  const auto g = make_grid({16, 16, 16}, {8.0, 8.0, 8.0});
  const Field u = sample_field(g, [](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z));
  });
  CHECK(standing_wave_error(u, u, 3.0, 0.0) == 0.0);

  Field rotated = u;
  for (auto& v : rotated.values()) v *= std::polar(1.0, -0.5);
  CHECK_THAT(standing_wave_error(rotated, u, 0.5, 1.0), WithinAbs(0.0, 1e-15));
  // wrong beta: |1 - e^{-0.5 i}| ~ 0.49
  CHECK(standing_wave_error(rotated, u, 0.0, 1.0) > 0.1);
  CHECK_THAT(modulus_error(rotated, u), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(standing_wave_error(u, Field(g), 0.0, 1.0), ZeroMass);
}

TEST_CASE("propagation rejects bad parameters") {
  const auto g = make_grid({8, 8, 8}, {4.0, 4.0, 4.0});
  const KernelTable k(g);
  const Field u(g);
  CHECK_THROWS_AS(split_step_evolve(u, PropagationConfig{0.0, 10, {}}, k), ValidationError);
  CHECK_THROWS_AS(split_step_evolve(u, PropagationConfig{1e-3, 0, {}}, k), ValidationError);
  const KernelTable other(make_grid({8, 8, 8}, {5.0, 4.0, 4.0}));
  CHECK_THROWS_AS(split_step_evolve(u, PropagationConfig{}, other), GridMismatch);

  Field blow(g);
  blow[0] = complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(split_step_evolve(blow, PropagationConfig{1e-3, 1, {}}, k), NumericalBlowup);
}
