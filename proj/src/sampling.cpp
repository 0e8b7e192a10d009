#include "revhls/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace revhls {

namespace {

std::vector<double> random_edges(std::mt19937_64& rng, const SampleOptions& opt) {
  std::uniform_int_distribution<std::size_t> count(opt.min_annuli, opt.max_annuli);
  std::uniform_real_distribution<double> lo(-3.0, -0.5);
  std::uniform_real_distribution<double> hi(0.0, 1.5);
  GridSpec g;
  g.points = count(rng);
  g.r_min = std::pow(10.0, lo(rng));
  g.r_max = std::pow(10.0, hi(rng));
  return geometric_edges(g);
}

double draw_atom(std::mt19937_64& rng, const SampleOptions& opt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) >= opt.atom_probability) return 0.0;
  return opt.max_atom * u(rng);
}

RadialDensity normalized(int dim, double atom, std::vector<double> edges, std::vector<double> values) {
  RadialDensity raw(dim, 0.0, edges, values);
  const double mass = raw.profile_mass();
  for (double& v : values) v *= (1.0 - atom) / mass;
  return RadialDensity(dim, atom, std::move(edges), std::move(values));
}

}  // namespace

RadialDensity random_decreasing_density(int dim, std::mt19937_64& rng, const SampleOptions& opt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto edges = random_edges(rng, opt);
  const std::size_t n = edges.size() - 1;
  std::vector<double> values(n);
  const int shape = static_cast<int>(u(rng) * 4.0);
  const double scale = std::pow(10.0, -1.0 + 2.0 * u(rng));
  const double power = 0.5 + 6.0 * u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = 0.5 * (edges[i] + edges[i + 1]);
    switch (shape) {
      case 0:  // exp(-(r/s)^p)
        values[i] = std::exp(-std::pow(r / scale, power));
        break;
      case 1:  // (1 + r/s)^{-p}
        values[i] = std::pow(1.0 + r / scale, -power);
        break;
      case 2:  // (1 - (r/R)^2)_+^p
        values[i] = std::pow(std::max(0.0, 1.0 - (r / (scale * 4.0)) * (r / (scale * 4.0))), power);
        break;
      default:  // random non-increasing staircase
        values[i] = (i == 0 ? 1.0 : values[i - 1]) * (u(rng) < 0.3 ? 1.0 : u(rng));
        break;
    }
  }
  // Keep the profile strictly representable and non-increasing.
  if (!(values[0] > 0.0)) values[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) values[i] = std::min(values[i], values[i - 1]);
  return normalized(dim, draw_atom(rng, opt), std::move(edges), std::move(values));
}

RadialDensity random_radial_density(int dim, std::mt19937_64& rng, const SampleOptions& opt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto edges = random_edges(rng, opt);
  std::vector<double> values(edges.size() - 1);
  for (double& v : values) v = u(rng) < 0.2 ? 0.0 : std::pow(u(rng), 3.0);
  values[values.size() / 2] += 1.0;
  return normalized(dim, draw_atom(rng, opt), std::move(edges), std::move(values));
}

std::vector<RadialDensity> decreasing_suite(int dim, std::size_t count, std::uint64_t seed,
                                            const SampleOptions& opt) {
  std::mt19937_64 rng(seed);
  std::vector<RadialDensity> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_decreasing_density(dim, rng, opt));
  return out;
}

}  // namespace revhls
