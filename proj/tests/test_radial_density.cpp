#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "revhls/quadrature.hpp"
#include "revhls/radial_density.hpp"
#include "revhls/sampling.hpp"

using namespace revhls;

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
  for (int d = 1; d <= 8; ++d) CHECK(unit_ball_volume(d) == doctest::Approx(oracle::ball_volume(d)).epsilon(1e-14));
}

TEST_CASE("annulus volume is accurate for thin shells") {
  for (int d = 1; d <= 5; ++d) {
    const double a = 1.0, h = 1e-9;
    // d omega a^{d-1} h (1 + (d-1) h / (2a)) to second order
    const double expected = d * unit_ball_volume(d) * std::pow(a, d - 1) * h * (1.0 + 0.5 * (d - 1) * h / a);
    CHECK(annulus_volume(d, a, a + h) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("annulus power means match closed forms") {
  // mean |x|^p over a < |x| <= b = d/(d+p) (b^{d+p} - a^{d+p}) / (b^d - a^d)
  for (int d = 1; d <= 4; ++d)
    for (double p : {0.5, 1.0, 2.0, 3.7}) {
      const double a = 0.3, b = 1.7;
      const double expected = d / (d + p) * (std::pow(b, d + p) - std::pow(a, d + p)) / (std::pow(b, d) - std::pow(a, d));
      CHECK(annulus_power_mean(d, a, b, p) == doctest::Approx(expected).epsilon(1e-13));
    }
  // thin shell: mean tends to a^p
  CHECK(annulus_power_mean(3, 2.0, 2.0 + 1e-12, 1.5) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-11));
}

TEST_CASE("grids") {
  const auto g = geometric_edges({16, 1e-2, 10.0});
  REQUIRE(g.size() == 18);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(10.0));
  for (std::size_t i = 2; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(1e3, 1.0 / 16)));

  const auto e = equal_volume_edges(3, 10, 2.0);
  for (std::size_t i = 0; i + 1 < e.size(); ++i)
    CHECK(annulus_volume(3, e[i], e[i + 1]) == doctest::Approx(annulus_volume(3, 0.0, 2.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(RadialDensity(1, 0.0, {0.0, 1.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialDensity(1, 0.0, {0.1, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialDensity(1, 0.0, {0.0, 1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialDensity(1, -0.1, {0.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialDensity(0, 0.0, {0.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialDensity(1, 0.0, {0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("uniform ball and atoms") {
  const auto b = RadialDensity::uniform_ball(3, 2.0);
  CHECK(b.is_probability());
  CHECK(b.is_decreasing());
  const auto a = RadialDensity::pure_atom(2);
  CHECK(a.is_probability());
  CHECK(a.atom() == 1.0);
  CHECK(total_mass(b.with_atom(0.25)) == doctest::Approx(1.25));
  CHECK(total_mass(b.scaled(0.5)) == doctest::Approx(0.5));
}

TEST_CASE("from_masses round trip") {
  std::vector<double> edges{0.0, 0.5, 1.0, 3.0};
  std::vector<double> masses{0.2, 0.3, 0.5};
  const auto rho = RadialDensity::from_masses(2, 0.0, edges, masses);
  const auto back = rho.masses();
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(masses[i]).epsilon(1e-15));
}

TEST_CASE("dilation preserves mass and rescales the grid") {
  std::mt19937_64 rng(3);
  for (int d = 1; d <= 3; ++d) {
    const auto rho = random_decreasing_density(d, rng);
    const auto r = rho.dilated(2.5);
    CHECK(total_mass(r) == doctest::Approx(total_mass(rho)).epsilon(1e-13));
    CHECK(r.edges().back() == doctest::Approx(2.5 * rho.edges().back()));
    CHECK(r.values()[0] == doctest::Approx(rho.values()[0] * std::pow(2.5, -d)));
  }
}

TEST_CASE("rearrangement: mass kept, decreasing, idempotent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const auto rho = random_radial_density(d, rng, {.atom_probability = 0.3});
    const auto star = rearrange_decreasing(rho);
    CHECK(star.is_decreasing());
    CHECK(star.atom() == rho.atom());
    CHECK(total_mass(star) == doctest::Approx(total_mass(rho)).epsilon(1e-12));
    const auto twice = rearrange_decreasing(star);
    REQUIRE(twice.size() == star.size());
    for (std::size_t i = 0; i < star.size(); ++i) {
      CHECK(twice.values()[i] == star.values()[i]);
      CHECK(twice.edges()[i + 1] == star.edges()[i + 1]);
    }
  }
}

TEST_CASE("rearrangement keeps the level-set volumes") {
  // value 1 on (1, 2], value 3 on (2, 2.5] in d = 1: the larger level moves inward.
  const RadialDensity rho(1, 0.0, {0.0, 1.0, 2.0, 2.5}, {0.0, 1.0, 3.0});
  const auto star = rearrange_decreasing(rho);
  CHECK(star.values()[0] == 3.0);
  CHECK(star.edges()[1] == doctest::Approx(0.5));
  CHECK(star.values()[1] == 1.0);
  CHECK(star.edges()[2] == doctest::Approx(1.5));
}

TEST_CASE("dyadic decomposition") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const auto rho = random_decreasing_density(d, rng, {.atom_probability = 0.2});
    const auto dp = dyadic_decompose(rho);
    CHECK(dp.sum() + dp.tail_mass() == doctest::Approx(rho.profile_mass()).epsilon(1e-12));
    CHECK(dp.atom == rho.atom());
  }
  // Ring-constant density on (1, 2] and (2, 4]: masses land on j = 1, 2.
  const auto rho = RadialDensity::from_masses(2, 0.0, {0.0, 1.0, 2.0, 4.0}, std::vector<double>{0.0, 0.25, 0.75});
  const auto dp = dyadic_decompose(rho);
  CHECK(dp.mass(1) == doctest::Approx(0.25));
  CHECK(dp.mass(2) == doctest::Approx(0.75));
  CHECK(dp.mass(0) == doctest::Approx(0.0));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (std::size_t n : {2u, 5u, 16u}) {
    const int deg = static_cast<int>(2 * n - 1);
    const double got = integrate_gauss([&](double x) { return std::pow(x, deg - 1) + 1.0; }, 0.0, 2.0, n);
    CHECK(got == doctest::Approx(std::pow(2.0, deg) / deg + 2.0).epsilon(1e-13));
  }
}

TEST_CASE("random suites are reproducible probability measures") {
  const auto a = decreasing_suite(2, 20, 42);
  const auto b = decreasing_suite(2, 20, 42);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].is_probability(1e-12));
    CHECK(a[i].is_decreasing());
    REQUIRE(a[i].size() == b[i].size());
    for (std::size_t j = 0; j < a[i].size(); ++j) CHECK(a[i].values()[j] == b[i].values()[j]);
  }
}
