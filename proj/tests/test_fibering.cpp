#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gpe/fibering.hpp"

using namespace gpe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FiberTriple random_triple(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.1, 10.0), b(-10.0, 10.0), c(-10.0, -0.1);
  return {a(rng), b(rng), c(rng)};
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace

TEST_CASE("fiber energy and virial arithmetic") {
  CHECK_THAT(fiber_energy({1, 2, -5}, 1.0), WithinAbs(-0.5, 1e-15));
  CHECK_THAT(fiber_virial({1, 0, -5.0 / 9.0}, 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(fiber_virial({1, 2, -5}, 1.0), WithinAbs(-5.0, 1e-15));
  CHECK(fiber_energy({1, 0, -1}, 10.0) < 0.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_triple(rng);
    CHECK(std::abs(fiber_energy(f, 1e-6)) < 1e-5 * f.A);
  }
}

TEST_CASE("scaled triple follows the scaling laws") {
  const FiberTriple f{2, -1, -3};
  const auto s = f.scaled(1.7);
  CHECK_THAT(s.A, WithinRel(2 * 1.7 * 1.7, 1e-15));
  CHECK_THAT(s.B, WithinRel(-1 * std::pow(1.7, 3), 1e-15));
  CHECK_THAT(s.C, WithinRel(-3 * std::pow(1.7, 4.5), 1e-15));
  for (double t : {0.3, 1.0, 2.2}) CHECK_THAT(fiber_energy(s, t), WithinRel(fiber_energy(f, 1.7 * t), 1e-14));
}

TEST_CASE("dE(u^t)/dt = Q(u^t)/t by central differences") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ut(0.2, 3.0);
  const double h = 1e-6;
  for (int i = 0; i < 20; ++i) {
    const auto f = random_triple(rng);
    const double t = ut(rng);
    const double fd = (fiber_energy(f, t + h) - fiber_energy(f, t - h)) / (2 * h);
    const double q = fiber_virial(f, t) / t;
    CHECK(std::abs(fd - q) <= 1e-8 * std::max(std::abs(q), f.A));
  }
}

TEST_CASE("closed-form roots") {
  CHECK_THAT(solve_tstar({1, 0, -5.0 / 9.0}).t_star, WithinAbs(1.0, 1e-10));
  CHECK_THAT(solve_tstar({1, 0, -1}).t_star, WithinAbs(std::pow(5.0 / 9.0, 0.4), 1e-10));
  CHECK_THAT(solve_tstar({4, 0, -1}).t_star, WithinAbs(std::pow(20.0 / 9.0, 0.4), 1e-10));
  CHECK_THAT(solve_tstar({1, 0, -1}).t_star, WithinAbs(0.7904802032597706, 1e-10));
  CHECK_THAT(solve_tstar({4, 0, -1}).t_star, WithinAbs(1.376305972444456, 1e-10));
}

TEST_CASE("solve_tstar rejects invalid triples") {
  CHECK_THROWS_AS(solve_tstar({0, 1, -1}), InvalidTriple);
  CHECK_THROWS_AS(solve_tstar({1, 1, 0}), InvalidTriple);
  CHECK_THROWS_AS(solve_tstar({1, std::nan(""), -1}), InvalidTriple);
}

TEST_CASE("root properties on random triples") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto f = random_triple(rng);
    const auto r = solve_tstar(f);
    const auto on = f.scaled(r.t_star);
    CHECK(std::abs(fiber_virial(f, r.t_star)) <= 1e-12 * on.A);
    CHECK(r.curvature < 0.0);
    CHECK_THAT(r.e_at_star, WithinRel(fiber_energy(f, r.t_star), 1e-15));
    for (double t : log_spaced(1e-3 * r.t_star, 1e3 * r.t_star, 50)) {
      if (std::abs(t / r.t_star - 1) < 1e-9) continue;
      if (t < r.t_star) CHECK(fiber_virial(f, t) > 0.0);
      if (t > r.t_star) CHECK(fiber_virial(f, t) < 0.0);
      CHECK(fiber_energy(f, t) < r.e_at_star);
    }
    // on V(c): E = A/6 - C/5 > 0
    CHECK_THAT(fiber_energy(on, 1.0), WithinRel(on.A / 6 - on.C / 5, 1e-9));
    CHECK(fiber_energy(on, 1.0) > 0.0);
  }
}

TEST_CASE("curvature at the root") {
  CHECK_THAT(fiber_curvature_at_root({1, 0, -5.0 / 9.0}), WithinAbs(-2.5, 1e-14));
  CHECK_THROWS_AS(fiber_curvature_at_root({1, 0, -1}), NotOnManifold);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_triple(rng);
    const auto on = f.scaled(solve_tstar(f).t_star);
    const double c = fiber_curvature_at_root(on);
    const double h = 1e-5;
    const double fd =
        (fiber_energy(on, 1 + h) - 2 * fiber_energy(on, 1) + fiber_energy(on, 1 - h)) / (h * h);
    CHECK(c < 0.0);
    CHECK_THAT(fd, WithinRel(c, 1e-6));
    CHECK_THAT(fiber_second_derivative(on, 1.0), WithinRel(c, 1e-9));
  }
}

TEST_CASE("E < 0 implies Q < 0; small rescalings are positive") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ut(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    const auto f = random_triple(rng);
    for (int j = 0; j < 5; ++j) {
      const double t = ut(rng);
      if (fiber_energy(f, t) < 0.0) CHECK(fiber_virial(f, t) < 0.0);
    }
    const double small = 1e-3 * solve_tstar(f).t_star;
    CHECK(fiber_energy(f, small) > 0.0);
    CHECK(fiber_virial(f, small) > 0.0);
  }
}

TEST_CASE("mountain-pass path sampling") {
  const FiberTriple on = FiberTriple{1, 0.3, -1}.scaled(solve_tstar({1, 0.3, -1}).t_star);
  const auto path = mpg_path(on, 0.1, 3.0, 59);
  REQUIRE(path.size() == 59);
  CHECK(path.front().E > 0.0);
  CHECK(path.back().E < 0.0);
  CHECK(path.front().Q > 0.0);
  CHECK(path.back().Q < 0.0);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (path[i].E > path[arg].E) arg = i;
  CHECK_THAT(path[arg].t, WithinAbs(1.0, 1e-12));
  CHECK_THAT(path[arg].E, WithinRel(fiber_energy(on, 1.0), 1e-15));

  const auto three = mpg_path(on, 0.5, 1.5, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0].t == 0.5);
  CHECK(three[1].t == 1.0);
  CHECK(three[2].t == 1.5);

  CHECK_THROWS_AS(mpg_path(on, 0.0, 1.0, 5), BadEndpoints);
  CHECK_THROWS_AS(mpg_path(on, 2.0, 1.0, 5), BadEndpoints);
  CHECK_THROWS_AS(mpg_path(on, 0.5, 1.0, 2), BadEndpoints);
}

TEST_CASE("rescale_to_manifold on resolved fields") {
  const auto g = make_grid({64, 64, 64}, {24, 24, 24});
  const KernelTable k(g);
  const CouplingParams p{0.0, 0.0, -100.0, 1.0};
  auto gaussian = [&](double s) {
    Field u = sample_field(g, [&](double x, double y, double z) {
      return std::exp(-(x * x + y * y + z * z) / (2 * s * s));
    });
    project_mass(u, 1.0);
    return u;
  };
  // Q > 0 for a broad Gaussian: the projection concentrates it (t* > 1).
  {
    const Field u = gaussian(1.5);
    REQUIRE(compute_diagnostics(u, k, p).Q > 0.0);
    const auto r = rescale_to_manifold(u, k, p);
    CHECK(r.t_star > 1.0);
    CHECK(std::abs(r.diagnostics.Q) <= 1e-6 * r.diagnostics.A);
    CHECK_THAT(r.diagnostics.D, WithinRel(1.0, 1e-13));

    // already on the manifold: unchanged
    const auto again = rescale_to_manifold(r.field, k, p, {}, 1e-6);
    CHECK(again.t_star == 1.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(again.field[i] - r.field[i]));
    CHECK(diff <= 1e-10);
  }
  // Q < 0 for a narrower one: t* < 1.
  {
    const Field u = gaussian(1.0);
    REQUIRE(compute_diagnostics(u, k, p).Q < 0.0);
    const auto r = rescale_to_manifold(u, k, p);
    CHECK(r.t_star < 1.0);
    CHECK(std::abs(r.diagnostics.Q) <= 1e-6 * r.diagnostics.A);
  }
  CHECK_THROWS_AS(rescale_to_manifold(Field(g), k, p), ZeroMass);
}
