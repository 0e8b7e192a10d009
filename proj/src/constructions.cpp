#include "revhls/constructions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "revhls/zones.hpp"

namespace revhls {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<double> dyadic_edges(int j_max) {
  std::vector<double> edges{0.0};
  for (int j = 0; j <= j_max + 1; ++j) edges.push_back(std::ldexp(1.0, j));
  return edges;
}

// Unnormalized ring weights 2^{-j beta} and their sum.
std::vector<double> dyadic_weights(double beta, int j_max, double& total) {
  std::vector<double> w(static_cast<std::size_t>(j_max) + 1);
  total = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    w[j] = std::exp2(-beta * j);
    total += w[j];
  }
  return w;
}

void check_dyadic(int dim, double beta, int j_max) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
  if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");
  if (j_max > 1000) throw std::invalid_argument("j_max too large for double radii");
}

}  // namespace

RadialDensity dyadic_power_density(int dim, double beta, int j_max) {
  check_dyadic(dim, beta, j_max);
  double total = 0.0;
  const auto w = dyadic_weights(beta, j_max, total);
  std::vector<double> masses{0.0};
  for (double x : w) masses.push_back(x / total);
  return RadialDensity::from_masses(dim, 0.0, dyadic_edges(j_max), masses);
}

double Zone1Family::midpoint_beta(const Params& p) {
  return 0.5 * (p.k + p.d * (1.0 - p.m) / p.m);
}

void Zone1Family::validate() const {
  params.validate();
  if (!in_zone1(params.m, params.k, params.d))
    throw ZoneError("parameters are not in zone I");
  const double upper = params.d * (1.0 - params.m) / params.m;
  if (!(beta > params.k && beta < upper)) {
    std::ostringstream os;
    os << "beta = " << beta << " outside (" << params.k << ", " << upper << ")";
    throw std::invalid_argument(os.str());
  }
  if (j_max < 1) throw std::invalid_argument("j_max must be >= 1");
  check_dyadic(params.d, beta, j_max);
}

Zone1Witness zone1_witness(const Zone1Family& fam) {
  fam.validate();
  const Params& p = fam.params;
  const double beta = fam.beta;
  double total = 0.0;
  const auto w = dyadic_weights(beta, fam.j_max, total);
  // Ring j: volume omega (2^d - 1) 2^{jd}, mean |x|^k = 2^{jk} mean over (1, 2].
  const double ring_mean = annulus_power_mean(p.d, 1.0, 2.0, p.k);
  const double ring_volume = annulus_volume(p.d, 1.0, 2.0);

  Zone1Witness out;
  out.moment_partial.reserve(w.size());
  out.entropy_partial.reserve(w.size());
  double moment = 0.0;
  double ent = 0.0;
  for (int j = 0; j <= fam.j_max; ++j) {
    const double mass = w[j] / total;
    moment += mass * std::exp2(p.k * j) * ring_mean;
    const double vol = ring_volume * std::exp2(p.d * j);
    ent += std::pow(mass, p.m) * std::pow(vol, 1.0 - p.m) / (p.m - 1.0);
    out.moment_partial.push_back(moment);
    out.entropy_partial.push_back(ent);
  }
  out.moment_k = moment;

  // Untruncated family: weights normalized by 1 / (1 - 2^{-beta}).
  const double gap = beta - p.k;
  out.moment_tail = ring_mean * std::exp2(-gap * (fam.j_max + 1)) / (-std::expm1(-gap * std::log(2.0))) *
                    (-std::expm1(-beta * std::log(2.0)));
  out.predicted_ratio = std::exp2(p.entropy_scaling() - p.m * beta);
  const auto& e = out.entropy_partial;
  out.growth_ratio = e[fam.j_max] / e[fam.j_max - 1];
  return out;
}

CurvePoint dyadic_family_point(const Params& p, double beta, int j_max) {
  p.validate();
  check_dyadic(p.d, beta, j_max);
  double total = 0.0;
  const auto w = dyadic_weights(beta, j_max, total);
  const double ring_mean = annulus_power_mean(p.d, 1.0, 2.0, p.k);
  const double ring_volume = annulus_volume(p.d, 1.0, 2.0);

  CurvePoint pt;
  pt.j_max = j_max;
  std::vector<double> masses{0.0};
  for (int j = 0; j <= j_max; ++j) {
    const double mass = w[j] / total;
    masses.push_back(mass);
    pt.moment_k += mass * std::exp2(p.k * j) * ring_mean;
    pt.entropy += std::pow(mass, p.m) * std::pow(ring_volume * std::exp2(p.d * j), 1.0 - p.m) / (p.m - 1.0);
  }
  const auto edges = dyadic_edges(j_max);
  const auto op = shared_operator(edges, p.d, p.k);
  pt.interaction = op->energy(masses, 0.0);
  pt.quad_error = op->error(masses);
  pt.free_energy = pt.entropy + pt.interaction / (2.0 * p.k);
  return pt;
}

std::vector<CurvePoint> zone1_free_energy_curve(const Zone1Family& fam, std::span<const int> j_values) {
  fam.validate();
  std::vector<CurvePoint> out;
  out.reserve(j_values.size());
  for (int j : j_values) {
    if (j < 1) throw std::invalid_argument("j_max must be >= 1");
    out.push_back(dyadic_family_point(fam.params, fam.beta, j));
  }
  return out;
}

double dyadic_interaction_limit(const Params& p, double beta) {
  p.validate();
  const double gap = beta - p.k;
  if (!(gap > 0.0)) throw std::invalid_argument("interaction limit needs beta > k");
  // Truncate where the tail ratio has decayed to ~1e-13, keeping radii^k finite.
  const int cap = static_cast<int>(std::floor(900.0 / std::max(p.k, 1.0))) - 2;
  const int j = std::clamp(static_cast<int>(std::ceil(44.0 / gap)), 20, cap);
  const double a = dyadic_family_point(p, beta, j - 1).interaction;
  const double b = dyadic_family_point(p, beta, j).interaction;
  const double q = std::exp2(-gap);
  return b + (b - a) * q / (1.0 - q);
}

// ---------------------------------------------------------------------------

double PowerPotential::operator()(double r) const {
  double v = 0.0;
  for (const auto& [c, e] : terms) v += c * std::pow(r, e);
  return v;
}

double PowerPotential::annulus_mean(int dim, double a, double b) const {
  double v = 0.0;
  for (const auto& [c, e] : terms) v += c * annulus_power_mean(dim, a, b, e);
  return v;
}

double PowerPotential::min_exponent() const {
  double e = inf;
  for (const auto& t : terms) e = std::min(e, t.second);
  return e;
}

double PowerPotential::max_exponent() const {
  double e = 0.0;
  for (const auto& t : terms) e = std::max(e, t.second);
  return e;
}

std::string PowerPotential::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) os << " + ";
    if (terms[i].first != 1.0) os << terms[i].first << "*";
    os << "r^" << terms[i].second;
  }
  return os.str();
}

void PowerPotential::validate() const {
  if (terms.empty()) throw std::invalid_argument("potential has no terms");
  for (const auto& [c, e] : terms) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("potential coefficients must be positive");
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("potential exponents must be positive");
  }
}

PowerPotential parse_potential(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(ch));
  // Accept |x| as a synonym for r.
  for (std::size_t pos; (pos = s.find("|x|")) != std::string::npos;) s.replace(pos, 3, "r");

  PowerPotential v;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = std::min(s.find('+', start), s.size());
    const std::string term = s.substr(start, end - start);
    const std::size_t r = term.find('r');
    if (term.empty() || r == std::string::npos)
      throw std::invalid_argument("cannot parse potential term '" + term + "' in '" + text + "'");
    double coef = 1.0;
    std::string head = term.substr(0, r);
    if (!head.empty() && head.back() == '*') head.pop_back();
    try {
      std::size_t used = 0;
      if (!head.empty()) {
        coef = std::stod(head, &used);
        if (used != head.size()) throw std::invalid_argument("trailing");
      }
      double expo = 1.0;
      const std::string tail = term.substr(r + 1);
      if (!tail.empty()) {
        if (tail[0] != '^') throw std::invalid_argument("expected ^");
        expo = std::stod(tail.substr(1), &used);
        if (used != tail.size() - 1) throw std::invalid_argument("trailing");
      }
      v.terms.emplace_back(coef, expo);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse potential term '" + term + "' in '" + text + "'");
    }
    if (end == s.size()) break;
    start = end + 1;
  }
  v.validate();
  return v;
}

PotentialIntegral potential_integral(const PowerPotential& v, int dim, double s) {
  v.validate();
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("integral exponent must be positive");
  PotentialIntegral out;
  // Near 0 the integrand is r^{d-1-s p_min}, near infinity r^{d-1-s p_max}.
  if (!(s * v.min_exponent() < dim && s * v.max_exponent() > dim)) {
    out.value = inf;
    out.error = 0.0;
    out.finite = false;
    return out;
  }
  // r = e^t: int_R e^{t d} V(e^t)^{-s} dt, split at t = 0; log V in log-sum-exp form.
  auto log_v = [&](double t) {
    double top = -inf;
    for (const auto& [c, e] : v.terms) top = std::max(top, std::log(c) + e * t);
    double sum = 0.0;
    for (const auto& [c, e] : v.terms) sum += std::exp(std::log(c) + e * t - top);
    return top + std::log(sum);
  };
  const double surface = dim * unit_ball_volume(dim);
  boost::math::quadrature::exp_sinh<double> rule;
  double err_hi = 0.0;
  double err_lo = 0.0;
  const double hi =
      rule.integrate([&](double t) { return std::exp(dim * t - s * log_v(t)); }, 0.0, inf, 1e-14, &err_hi);
  const double lo =
      rule.integrate([&](double t) { return std::exp(-dim * t - s * log_v(-t)); }, 0.0, inf, 1e-14, &err_lo);
  out.value = surface * (hi + lo);
  out.error = surface * (err_hi * std::abs(hi) + err_lo * std::abs(lo));
  out.finite = std::isfinite(out.value);
  return out;
}

void ToyModel::validate() const {
  potential.validate();
  if (!(params.m > 0.0 && params.m < 1.0)) throw std::invalid_argument("toy model needs 0 < m < 1");
  if (params.d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
}

ToySolution toy_model_solve(const ToyModel& tm, const GridSpec& grid) {
  tm.validate();
  if (grid.points < 2 || !(grid.r_min > 0.0) || !(grid.r_max > grid.r_min))
    throw std::invalid_argument("invalid grid");
  const double m = tm.params.m;
  const int d = tm.params.d;
  const double gamma = tm.gamma;
  const double expo = 1.0 / (1.0 - m);
  const double scale = (1.0 - m) / m;
  const PowerPotential& pot = tm.potential;

  ToySolution out;
  out.m_integral = potential_integral(pot, d, 1.0 - m);
  out.capacity = potential_integral(pot, d, expo);
  out.criterion = gamma * out.m_integral.value * std::pow(scale, 1.0 - m);
  out.criterion_holds = out.m_integral.finite && out.criterion < 1.0;
  out.continuum_threshold = out.capacity.finite ? scale * std::pow(out.capacity.value, -(1.0 - m)) : 0.0;

  // Extend r_max until the C = 0 profile has negligible mass outside, using
  // V >= c r^p for the leading term.
  GridSpec g = grid;
  const double p_top = pot.max_exponent();
  if (p_top * expo > d) {
    double c_top = 0.0;
    for (const auto& [c, e] : pot.terms)
      if (e == p_top) c_top += c;
    const double q = p_top * expo - d;
    const double lead = d * unit_ball_volume(d) * std::pow(gamma / (scale * c_top), expo) / q;
    const double r_cut = std::pow(lead / 1e-15, 1.0 / q);
    if (r_cut > g.r_max) {
      const double ratio = std::log(r_cut / g.r_min) / std::log(g.r_max / g.r_min);
      g.points = static_cast<std::size_t>(std::ceil(static_cast<double>(g.points) * ratio));
      g.r_max = r_cut;
    }
  }
  const auto edges = geometric_edges(g);
  const std::size_t n = edges.size() - 1;
  std::vector<double> vbar(n);
  std::vector<double> logvol(n);
  for (std::size_t i = 0; i < n; ++i) {
    vbar[i] = pot.annulus_mean(d, edges[i], edges[i + 1]) / gamma;
    logvol[i] = std::log(annulus_volume(d, edges[i], edges[i + 1]));
  }
  // log of the a.c. mass for multiplier C <= 0, rho_i = (scale (vbar_i - C))^{-expo}.
  auto log_mass = [&](double c) {
    double top = -inf;
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
      terms[i] = logvol[i] - expo * std::log(scale * (vbar[i] - c));
      top = std::max(top, terms[i]);
    }
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - top);
    return top + std::log(sum);
  };

  double c = 0.0;
  const double lm0 = log_mass(0.0);
  if (!(lm0 < 0.0)) {
    // Root in x = log(-C): mass decreases as x grows.
    auto f = [&](double x) { return log_mass(-std::exp(x)); };
    double lo = -10.0;
    while (f(lo) < 0.0) {
      lo -= 10.0;
      if (lo < -700.0) throw std::runtime_error("toy model: multiplier root not bracketed below");
    }
    double hi = lo + 10.0;
    while (f(hi) > 0.0) {
      lo = hi;
      hi += 10.0;
      if (hi > 700.0) throw std::runtime_error("toy model: multiplier root not bracketed above");
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, [](double u, double v) { return std::abs(u - v) <= 1e-15 * std::max(1.0, std::abs(u)); },
        iters);
    if (iters >= 200) throw std::runtime_error("toy model: multiplier root find did not converge");
    const double x = std::abs(f(a)) < std::abs(f(b)) ? a : b;
    c = -std::exp(x);
  }

  std::vector<double> values(n);
  double ac = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::pow(scale * (vbar[i] - c), -expo);
    ac += values[i] * std::exp(logvol[i]);
  }
  out.multiplier = c;
  out.atom = c == 0.0 ? std::max(0.0, 1.0 - ac) : 0.0;
  out.ac_mass = 1.0 - out.atom;
  out.profile = RadialDensity(d, out.atom, edges, values);
  out.grid_artifact = out.atom > 0.0 && !out.capacity.finite;

  // Residual of m/(m-1) rho^{m-1} + V/gamma = C, relative to the size of the
  // terms being balanced.
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g_i = m / (m - 1.0) * std::pow(values[i], m - 1.0) + vbar[i];
    res = std::max(res, std::abs(g_i - c) / (1.0 + std::abs(c) + vbar[i]));
  }
  out.el_residual = res;
  return out;
}

}  // namespace revhls
