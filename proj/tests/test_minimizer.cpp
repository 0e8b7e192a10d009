#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "revhls/minimizer.hpp"
#include "revhls/sampling.hpp"
#include "revhls/zones.hpp"

using namespace revhls;

TEST_CASE("k = 2 minimizers match the self-consistent profile") {
  struct Case {
    int d;
    double m;
  };
  for (const auto c : {Case{1, 0.9}, Case{2, 0.8}, Case{1, 0.7}}) {
    const Params p{c.m, 2.0, c.d, 1.0};
    const auto res = minimize_zone2(p);
    const auto ref = oracle::quadratic_minimizer(c.m, c.d);
    INFO("d=" << c.d << " m=" << c.m << " F=" << res.report.free_energy << " ref=" << ref.free_energy);
    CHECK(res.converged);
    CHECK(res.el_residual <= 1e-6);
    CHECK(res.density.atom() <= 1e-6);
    CHECK(res.report.free_energy == doctest::Approx(ref.free_energy).epsilon(1e-4));
    CHECK(res.report.entropy == doctest::Approx(ref.entropy).epsilon(1e-3));
    CHECK(res.virial_defect_r <= 1e-4);
  }
}

TEST_CASE("m = 2, k = 2 in d = 1: compactly supported parabola") {
  const Params p{2.0, 2.0, 1, 1.0};
  const oracle::ParabolicMinimizer ref;
  const auto res = minimize_zone3(p);
  CHECK(res.converged);
  CHECK(res.el_exterior_ok);
  CHECK(res.report.free_energy == doctest::Approx(ref.free_energy()).epsilon(1e-4));
  CHECK(res.report.entropy == doctest::Approx(ref.entropy()).epsilon(1e-3));
  CHECK(res.support_radius == doctest::Approx(ref.radius).epsilon(0.02));
  CHECK(res.density.atom() == 0.0);
  CHECK(res.support_radius < res.grid.r_max);
}

TEST_CASE("rescaled problem converges and satisfies its virial identity") {
  const Params p{0.8, 1.0, 1, 1.0};
  const auto res = minimize_rescaled(p);
  CHECK(res.converged);
  CHECK(res.el_residual <= 1e-6);
  CHECK(res.virial_defect_r <= 1e-4);
  CHECK(res.problem == Problem::rescaled);
}

TEST_CASE("solver output does not depend on the seed beyond tolerance") {
  const Params p{0.9, 3.0, 3, 1.0};
  SolverConfig a;
  a.seed = 1;
  SolverConfig b;
  b.seed = 99;
  const auto ra = minimize_zone2(p, a);
  const auto rb = minimize_zone2(p, b);
  CHECK(ra.converged);
  CHECK(rb.converged);
  CHECK(ra.report.free_energy == doctest::Approx(rb.report.free_energy).epsilon(1e-7));
  const auto again = minimize_zone2(p, a);
  CHECK(again.report.free_energy == ra.report.free_energy);
  CHECK(again.iterations == ra.iterations);
}

TEST_CASE("energy decreases along the iteration") {
  SolverConfig cfg;
  cfg.initial_atom = 0.3;
  const auto res = minimize_zone2(Params{0.85, 1.5, 2, 1.0}, cfg);
  REQUIRE(res.log.size() > 2);
  for (std::size_t i = 1; i < res.log.size(); ++i)
    CHECK(res.log[i].energy <= res.log[i - 1].energy + 1e-12);
}

TEST_CASE("exponentiated gradient reaches the same free energy") {
  // The multiplicative step is limited by rounding in F on nearly empty tail
  // cells, so only the energy is compared here.
  SolverConfig cfg;
  cfg.method = SolverMethod::exponentiated_gradient;
  cfg.el_tolerance = 1e-5;
  cfg.grid = {256, 1e-3, 16.0};
  for (const Params p : {Params{0.9, 2.0, 1, 1.0}, Params{0.8, 2.0, 2, 1.0}, Params{0.85, 1.5, 2, 1.0}}) {
    const auto eg = minimize_zone2(p, cfg);
    SolverConfig fp = cfg;
    fp.method = SolverMethod::fixed_point;
    const auto ref = minimize_zone2(p, fp);
    CHECK(ref.converged);
    CHECK(eg.report.free_energy == doctest::Approx(ref.report.free_energy).epsilon(1e-8));
    CHECK(eg.el_residual < eg.log.front().residual);
    for (std::size_t i = 1; i < eg.log.size(); ++i) CHECK(eg.log[i].energy <= eg.log[i - 1].energy);
  }
}

TEST_CASE("EL residual flags non-minimizers") {
  const Params p{0.9, 2.0, 1, 1.0};
  // A uniform ball on one annulus is trivially stationary on its own grid.
  const auto edges = equal_volume_edges(1, 64, 1.0);
  const RadialDensity ball(1, 0.0, edges, std::vector<double>(64, 0.5));
  CHECK(el_residual(ball, p).residual > 1e-2);
  std::mt19937_64 rng(31);
  CHECK(el_residual(random_decreasing_density(1, rng), p).residual > 1e-2);
  const auto res = minimize_zone2(p);
  CHECK(el_residual(res.density, p).residual == doctest::Approx(res.el_residual).epsilon(1e-6).scale(1e-12));
}

TEST_CASE("zone preconditions") {
  CHECK_THROWS_AS(minimize_zone2(Params{0.3, 1.0, 3, 1.0}), ZoneError);
  CHECK_THROWS_AS(minimize_zone3(Params{0.9, 1.0, 3, 1.0}), ZoneError);
  CHECK_THROWS_AS(minimize_rescaled(Params{0.2, 1.0, 3, 1.0}), ZoneError);
  SolverConfig bad;
  bad.el_tolerance = -1.0;
  CHECK_THROWS_AS(minimize_zone2(Params{0.9, 2.0, 1, 1.0}, bad), std::invalid_argument);
}

TEST_CASE("virial defects vanish only at stationary points") {
  const Params p{0.9, 2.0, 1, 1.0};
  const auto res = minimize_zone2(p);
  const auto v = virial_check(res.density, p);
  CHECK(v.r <= 1e-4);
  CHECK(virial_check(res.density.dilated(1.5), p).r > 1e-3);
}

TEST_CASE("profile lower-bound check passes without an atom") {
  const auto res = minimize_zone2(Params{0.9, 2.0, 1, 1.0});
  CHECK(lower_bound_profile_check(res).passed());
}
