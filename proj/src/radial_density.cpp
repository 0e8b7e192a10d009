#include "revhls/radial_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace revhls {

double unit_ball_volume(int dim) {
  if (dim < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
  const double h = 0.5 * dim;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double annulus_volume(int dim, double a, double b) {
  if (b <= a) return 0.0;
  const double w = unit_ball_volume(dim);
  if (a <= 0.0) return w * std::pow(b, dim);
  // a^d (e^{d log(b/a)} - 1) keeps precision for thin annuli.
  return w * std::pow(a, dim) * std::expm1(dim * std::log(b / a));
}

double annulus_power_mean(int dim, double a, double b, double p) {
  if (b <= a) return std::pow(b, p);
  const double d = dim;
  if (a <= 0.0) return d / (d + p) * std::pow(b, p);
  const double l = std::log(b / a);
  return d / (d + p) * std::pow(a, p) * std::expm1((d + p) * l) / std::expm1(d * l);
}

std::vector<double> geometric_edges(const GridSpec& spec) {
  if (spec.points < 1 || !(spec.r_min > 0.0) || !(spec.r_max > spec.r_min)) {
    throw std::invalid_argument("geometric_edges: need points >= 1 and 0 < r_min < r_max");
  }
  std::vector<double> edges(spec.points + 2);
  edges[0] = 0.0;
  const double log_ratio = std::log(spec.r_max / spec.r_min);
  for (std::size_t i = 0; i <= spec.points; ++i) {
    edges[i + 1] = spec.r_min * std::exp(log_ratio * static_cast<double>(i) /
                                         static_cast<double>(spec.points));
  }
  edges.back() = spec.r_max;
  return edges;
}

std::vector<double> equal_volume_edges(int dim, std::size_t annuli, double radius) {
  if (annuli < 1 || !(radius > 0.0)) {
    throw std::invalid_argument("equal_volume_edges: need annuli >= 1 and radius > 0");
  }
  std::vector<double> edges(annuli + 1);
  for (std::size_t i = 0; i <= annuli; ++i) {
    edges[i] = radius * std::pow(static_cast<double>(i) / static_cast<double>(annuli), 1.0 / dim);
  }
  edges.back() = radius;
  return edges;
}

RadialDensity::RadialDensity(int dim, double atom, std::vector<double> edges,
                             std::vector<double> values)
    : dim_(dim), atom_(atom), edges_(std::move(edges)), values_(std::move(values)) {
  if (dim_ < 1) throw std::invalid_argument("RadialDensity: dimension must be >= 1");
  if (!(atom_ >= 0.0) || !std::isfinite(atom_)) {
    throw std::invalid_argument("RadialDensity: atom mass must be finite and >= 0");
  }
  if (values_.empty()) {
    if (!(edges_.empty() || edges_.size() == 1)) {
      throw std::invalid_argument("RadialDensity: edges/values size mismatch");
    }
    edges_.assign(1, 0.0);
    return;
  }
  if (edges_.size() != values_.size() + 1) {
    throw std::invalid_argument("RadialDensity: need edges.size() == values.size() + 1");
  }
  if (edges_.front() != 0.0) throw std::invalid_argument("RadialDensity: first edge must be 0");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1]) || !std::isfinite(edges_[i])) {
      throw std::invalid_argument("RadialDensity: edges must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("RadialDensity: values must be finite and >= 0");
    }
  }
}

RadialDensity RadialDensity::pure_atom(int dim) { return RadialDensity(dim, 1.0, {0.0}, {}); }

RadialDensity RadialDensity::uniform_ball(int dim, double radius, double mass) {
  const double vol = unit_ball_volume(dim) * std::pow(radius, dim);
  return RadialDensity(dim, 0.0, {0.0, radius}, {mass / vol});
}

RadialDensity RadialDensity::from_masses(int dim, double atom, std::vector<double> edges,
                                         std::span<const double> masses) {
  if (edges.size() != masses.size() + 1) {
    throw std::invalid_argument("RadialDensity::from_masses: size mismatch");
  }
  std::vector<double> values(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    values[i] = masses[i] / revhls::annulus_volume(dim, edges[i], edges[i + 1]);
  }
  return RadialDensity(dim, atom, std::move(edges), std::move(values));
}

double RadialDensity::annulus_volume(std::size_t i) const {
  return revhls::annulus_volume(dim_, edges_[i], edges_[i + 1]);
}

std::vector<double> RadialDensity::volumes() const {
  std::vector<double> v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = annulus_volume(i);
  return v;
}

std::vector<double> RadialDensity::masses() const {
  std::vector<double> w(size());
  for (std::size_t i = 0; i < size(); ++i) w[i] = values_[i] * annulus_volume(i);
  return w;
}

double RadialDensity::profile_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += values_[i] * annulus_volume(i);
  return s;
}

bool RadialDensity::is_probability(double tol) const {
  return std::abs(total_mass(*this) - 1.0) <= tol;
}

bool RadialDensity::is_decreasing() const {
  return std::is_sorted(values_.begin(), values_.end(), std::greater<>());
}

RadialDensity RadialDensity::dilated(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("RadialDensity::dilated: r must be positive");
  std::vector<double> e(edges_);
  for (double& x : e) x *= r;
  std::vector<double> v(values_);
  const double f = std::pow(r, -dim_);
  for (double& x : v) x *= f;
  return RadialDensity(dim_, atom_, std::move(e), std::move(v));
}

RadialDensity RadialDensity::scaled(double c) const {
  if (!(c >= 0.0)) throw std::invalid_argument("RadialDensity::scaled: c must be >= 0");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return RadialDensity(dim_, atom_ * c, edges_, std::move(v));
}

RadialDensity RadialDensity::with_atom(double atom) const {
  return RadialDensity(dim_, atom, edges_, values_);
}

double total_mass(const RadialDensity& rho) { return rho.atom() + rho.profile_mass(); }

RadialDensity rearrange_decreasing(const RadialDensity& rho) {
  if (rho.is_decreasing()) return rho;
  const std::size_t n = rho.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto values = rho.values();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  const double w = unit_ball_volume(rho.dim());
  std::vector<double> edges(n + 1, 0.0);
  std::vector<double> sorted(n);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sorted[i] = values[order[i]];
    cumulative += rho.annulus_volume(order[i]);
    edges[i + 1] = std::pow(cumulative / w, 1.0 / rho.dim());
  }
  // Collapse annuli that rounding made degenerate; their volume is below ulp.
  std::vector<double> e2{0.0};
  std::vector<double> v2;
  for (std::size_t i = 0; i < n; ++i) {
    if (edges[i + 1] > e2.back()) {
      e2.push_back(edges[i + 1]);
      v2.push_back(sorted[i]);
    }
  }
  return RadialDensity(rho.dim(), rho.atom(), std::move(e2), std::move(v2));
}

double DyadicProfile::mass(int j) const {
  if (j < j_min || j > j_max) return 0.0;
  return masses[static_cast<std::size_t>(j - j_min)];
}

double DyadicProfile::sum() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

namespace {

// Smallest j with 2^j >= r (ring index containing r on its outer side).
int ring_of(double r) {
  int e = 0;
  const double f = std::frexp(r, &e);  // r = f 2^e, f in [0.5, 1)
  return f == 0.5 ? e - 1 : e;
}

// Ring index of the points just above r.
int ring_above(double r) {
  const int j = ring_of(r);
  return std::ldexp(1.0, j) == r ? j + 1 : j;
}

}  // namespace

DyadicProfile dyadic_decompose(const RadialDensity& rho) {
  constexpr int jcap = DyadicProfile::max_abs_index;
  DyadicProfile out;
  out.atom = rho.atom();
  const auto values = rho.values();
  const auto edges = rho.edges();

  int lo = jcap + 1;
  int hi = -jcap - 1;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const int jl = edges[i] <= 0.0 ? -jcap : std::clamp(ring_above(edges[i]), -jcap, jcap);
    const int jh = std::clamp(ring_of(edges[i + 1]), -jcap, jcap);
    lo = std::min(lo, jl);
    hi = std::max(hi, jh);
  }
  if (lo > hi) return out;
  out.j_min = lo;
  out.j_max = hi;
  out.masses.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);

  const double inner = std::ldexp(1.0, lo - 1);
  const double outer = std::ldexp(1.0, hi);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const double a = edges[i];
    const double b = edges[i + 1];
    if (a < inner) out.inner_tail += values[i] * annulus_volume(rho.dim(), a, std::min(b, inner));
    if (b > outer) out.outer_tail += values[i] * annulus_volume(rho.dim(), std::max(a, outer), b);
    const int jl = std::max(lo, a < inner ? lo : ring_of(a));
    const int jh = std::min(hi, ring_of(b));
    for (int j = jl; j <= jh; ++j) {
      const double ra = std::max(a, std::ldexp(1.0, j - 1));
      const double rb = std::min(b, std::ldexp(1.0, j));
      if (rb > ra) {
        out.masses[static_cast<std::size_t>(j - lo)] += values[i] * annulus_volume(rho.dim(), ra, rb);
      }
    }
  }
  return out;
}

}  // namespace revhls
