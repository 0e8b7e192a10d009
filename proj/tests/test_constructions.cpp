#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "revhls/bounds.hpp"
#include "revhls/constructions.hpp"
#include "revhls/sampling.hpp"
#include "revhls/zones.hpp"

using namespace revhls;

TEST_CASE("dyadic power density: ring masses and normalization") {
  for (int d = 1; d <= 3; ++d) {
    const double beta = 0.8;
    const auto rho = dyadic_power_density(d, beta, 20);
    CHECK(rho.is_probability(1e-13));
    CHECK(rho.atom() == 0.0);
    const auto dp = dyadic_decompose(rho);
    CHECK(dp.mass(0) == 0.0);
    for (int j = 1; j <= 20; ++j) CHECK(dp.mass(j) / dp.mass(j + 1) == doctest::Approx(std::exp2(beta)).epsilon(1e-12));
  }
}

TEST_CASE("dyadic family energies against ring sums") {
  for (int d = 1; d <= 3; ++d)
    for (int j : {3, 17, 40}) {
      const Params p{0.45, 1.2, d, 1.0};
      const double beta = 1.6;
      const auto ref = oracle::dyadic_sums(d, beta, j, p.m, p.k);
      const auto pt = dyadic_family_point(p, beta, j);
      CHECK(pt.moment_k == doctest::Approx(ref.moment).epsilon(1e-11));
      CHECK(pt.entropy == doctest::Approx(ref.entropy).epsilon(1e-11));
      CHECK(pt.free_energy == doctest::Approx(pt.entropy + pt.interaction / (2.0 * p.k)).epsilon(1e-14));
      CHECK(pt.interaction >= pt.moment_k - 10.0 * pt.quad_error);
    }
}

TEST_CASE("Zone I family window") {
  const Params p{0.5, 0.5, 1, 1.0};
  CHECK(Zone1Family::midpoint_beta(p) == doctest::Approx(0.75));
  CHECK_NOTHROW((Zone1Family{0.75, 60, p}.validate()));
  CHECK_THROWS_AS((Zone1Family{0.5, 60, p}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Zone1Family{1.0, 60, p}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Zone1Family{0.75, 0, p}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Zone1Family{0.9, 60, Params{0.9, 2.0, 1, 1.0}}.validate()), ZoneError);
}

TEST_CASE("Zone I witness: bounded moment, diverging entropy") {
  const Params p{0.5, 0.5, 1, 1.0};
  const Zone1Family fam{Zone1Family::midpoint_beta(p), 60, p};
  const auto w = zone1_witness(fam);
  const auto ref = oracle::dyadic_sums(1, fam.beta, 60, p.m, p.k);
  CHECK(w.moment_k == doctest::Approx(ref.moment).epsilon(1e-12));
  CHECK(w.entropy_partial.back() == doctest::Approx(ref.entropy).epsilon(1e-12));
  REQUIRE(w.entropy_partial.size() == 61);
  for (std::size_t j = 1; j < w.entropy_partial.size(); ++j) CHECK(w.entropy_partial[j] < w.entropy_partial[j - 1]);
  for (std::size_t j = 1; j < w.moment_partial.size(); ++j) CHECK(w.moment_partial[j] >= w.moment_partial[j - 1]);
  CHECK(w.predicted_ratio == doctest::Approx(std::exp2(1.0 * (1.0 - p.m) - p.m * fam.beta)).epsilon(1e-14));
  CHECK(w.predicted_ratio > 1.0);
  CHECK(std::abs(w.growth_ratio / w.predicted_ratio - 1.0) < 1e-3);
  // geometric tail with ratio 2^{-(beta - k)}
  CHECK(w.moment_tail > 0.0);
  CHECK(w.moment_tail < 1e-4);
}

TEST_CASE("Zone I free energy decreases in j and the interaction stays bounded") {
  const Params p{0.5, 0.5, 1, 1.0};
  const Zone1Family fam{0.75, 60, p};
  const std::vector<int> js{10, 20, 40, 60};
  const auto curve = zone1_free_energy_curve(fam, js);
  REQUIRE(curve.size() == js.size());
  const double limit = dyadic_interaction_limit(p, fam.beta);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].j_max == js[i]);
    CHECK(curve[i].interaction <= limit + 1e-6);
    if (i > 0) {
      CHECK(curve[i].free_energy < curve[i - 1].free_energy);
      CHECK(curve[i].interaction >= curve[i - 1].interaction - 1e-9);
    }
  }
  CHECK(limit - curve.back().interaction < 1e-3);
}

TEST_CASE("the same family is bounded below in Zone II") {
  const Params p{0.9, 2.0, 1, 1.0};
  const double c = lower_bound_constant(p, ConstantForm::corrected);
  for (double beta : {2.5, 4.0})
    for (int j : {5, 20, 40}) {
      const auto pt = dyadic_family_point(p, beta, j);
      CHECK(pt.free_energy >= c);
      CHECK(free_energy_lower_bound(dyadic_power_density(1, beta, j), p, ConstantForm::corrected).passed());
    }
}

TEST_CASE("potential parser") {
  const auto v = parse_potential("2*r^2 + r^6");
  REQUIRE(v.terms.size() == 2);
  CHECK(v.terms[0].first == 2.0);
  CHECK(v.terms[0].second == 2.0);
  CHECK(v.terms[1].first == 1.0);
  CHECK(v.terms[1].second == 6.0);
  CHECK(v(2.0) == doctest::Approx(8.0 + 64.0));
  CHECK(parse_potential("|x|^6")(2.0) == doctest::Approx(64.0));
  CHECK(parse_potential("0.5r^3")(2.0) == doctest::Approx(4.0));
  CHECK(parse_potential("r")(3.0) == doctest::Approx(3.0));
  CHECK(v.min_exponent() == 2.0);
  CHECK(v.max_exponent() == 6.0);
  for (const char* bad : {"", "r^-1", "-r^2", "x^2 + y", "r^2 +", "0*r^2"})
    CHECK_THROWS_AS(parse_potential(bad), std::invalid_argument);
}

TEST_CASE("potential annulus mean") {
  const auto v = parse_potential("2*r^2 + r^6");
  for (int d = 1; d <= 3; ++d) {
    const double a = 0.4, b = 1.9;
    auto mean = [&](double q) {
      return d / (d + q) * (std::pow(b, d + q) - std::pow(a, d + q)) / (std::pow(b, d) - std::pow(a, d));
    };
    CHECK(v.annulus_mean(d, a, b) == doctest::Approx(2.0 * mean(2.0) + mean(6.0)).epsilon(1e-13));
  }
}

TEST_CASE("potential integrals against the Beta-function closed form") {
  struct Case {
    double c1, a, c2, b;
    int d;
    double s;
  };
  for (const auto c : {Case{1, 2, 1, 6, 3, 1.25}, Case{1, 2, 1, 6, 3, 0.8}, Case{2, 1, 0.5, 4, 2, 1.0},
                       Case{0.3, 0.5, 3, 3, 1, 1.2}, Case{1, 2, 1, 6, 2, 0.5}}) {
    PowerPotential v{{{c.c1, c.a}, {c.c2, c.b}}};
    const auto got = potential_integral(v, c.d, c.s);
    const double want = oracle::two_power_integral(c.c1, c.a, c.c2, c.b, c.d, c.s);
    INFO("d=" << c.d << " s=" << c.s << " got=" << got.value << " want=" << want);
    CHECK(got.finite == std::isfinite(want));
    if (got.finite) CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
  }
  // a single power never integrates
  CHECK_FALSE(potential_integral(parse_potential("r^6"), 2, 0.5).finite);
  CHECK(std::isinf(potential_integral(parse_potential("r^6"), 2, 2.0).value));
}

namespace {

ToySolution solve(const char* v, int d, double m, double gamma, GridSpec grid = {2048, 1e-6, 32.0}) {
  return toy_model_solve(ToyModel{parse_potential(v), gamma, Params{m, 1.0, d, 1.0}}, grid);
}

}  // namespace

TEST_CASE("toy model: mass balance, stationarity, threshold") {
  const char* v = "r^2 + r^6";
  const int d = 3;
  const double m = 0.2;
  const double n = oracle::two_power_integral(1, 2, 1, 6, d, 1.0 / (1.0 - m));
  const double gamma_c = (1.0 - m) / m * std::pow(n, -(1.0 - m));
  const auto at_c = solve(v, d, m, gamma_c);
  CHECK(at_c.capacity.value == doctest::Approx(n).epsilon(1e-9));
  CHECK(at_c.continuum_threshold == doctest::Approx(gamma_c).epsilon(1e-9));
  CHECK(at_c.m_integral.value == doctest::Approx(oracle::two_power_integral(1, 2, 1, 6, d, 1.0 - m)).epsilon(1e-9));

  double previous = 0.0;
  for (double f : {0.05, 0.2, 0.5, 0.8, 0.95, 1.05, 1.5, 3.0}) {
    const auto s = solve(v, d, m, f * gamma_c);
    INFO("gamma/gamma_c=" << f << " atom=" << s.atom << " el=" << s.el_residual);
    CHECK(s.el_residual <= 1e-8);
    CHECK(s.atom + s.profile.profile_mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.ac_mass == doctest::Approx(1.0 - s.atom).epsilon(1e-14));
    CHECK(s.ac_mass >= previous - 1e-12);
    previous = s.ac_mass;
    CHECK(s.multiplier <= 0.0);
    CHECK_FALSE(s.grid_artifact);
    if (f < 1.0) {
      CHECK(s.atom > 0.0);
      CHECK(s.multiplier == 0.0);
      // a.c. mass (gamma / gamma_c)^{1/(1-m)} when C = 0. The density blows up
      // like r^{-2/(1-m)} at the origin, so the inner cell must be tiny.
      const auto fine = solve(v, d, m, f * gamma_c, {4096, 1e-12, 32.0});
      CHECK(fine.ac_mass == doctest::Approx(std::pow(f, 1.0 / (1.0 - m))).epsilon(1e-4));
    } else {
      CHECK(s.atom == 0.0);
      CHECK(s.multiplier < 0.0);
    }
    if (s.criterion_holds) CHECK(s.atom > 0.0);
  }
}

TEST_CASE("toy model without capacity never forms an atom") {
  // |x|^6 in d = 2: int V^{-1/(1-m)} diverges at the origin
  for (double gamma : {1e-4, 1e-2, 1.0, 10.0}) {
    const auto s = solve("|x|^6", 2, 0.5, gamma);
    CHECK_FALSE(s.capacity.finite);
    CHECK_FALSE(s.m_integral.finite);
    CHECK(s.continuum_threshold == 0.0);
    CHECK_FALSE(s.criterion_holds);
    CHECK(s.el_residual <= 1e-8);
    CHECK(s.atom + s.profile.profile_mass() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("toy model validation") {
  CHECK_THROWS_AS(solve("r^2", 3, 1.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve("r^2", 3, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve("r^2", 0, 0.5, 1.0), std::invalid_argument);
}
