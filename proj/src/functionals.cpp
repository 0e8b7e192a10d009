#include "revhls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "revhls/quadrature.hpp"

namespace revhls {

void Params::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("Params: m must be > 0");
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("Params: k must be > 0");
  if (d < 1) throw std::invalid_argument("Params: d must be >= 1");
  if (!(chi > 0.0) || !std::isfinite(chi)) throw std::invalid_argument("Params: chi must be > 0");
}

namespace {

// x^{k/2}, with the common exponents done without pow.
inline double half_power(double x, double k) {
  if (k == 2.0) return x;
  if (k == 1.0) return std::sqrt(x);
  if (k == 4.0) return x * x;
  if (k == 3.0) return x * std::sqrt(x);
  return std::pow(x, 0.5 * k);
}

// 1 / int_0^pi sin^{d-2}
double sphere_normalizer(int dim) {
  return std::tgamma(0.5 * dim) / (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (dim - 1)));
}

double kernel_d1(double r, double s, double k) {
  return 0.5 * (std::pow(std::abs(r - s), k) + std::pow(r + s, k));
}

// ((r+s)^{k+2} - |r-s|^{k+2}) / (2 r s (k+2)) without cancellation when r << s.
double kernel_d3(double r, double s, double k) {
  const double hi = std::max(r, s);
  const double lo = std::min(r, s);
  if (lo == 0.0) return std::pow(hi, k);
  const double t = lo / hi;
  double f;
  if (t < 0.5) {
    // (1+t)^{k+2} - (1-t)^{k+2} = (1-t)^{k+2} expm1(2 (k+2) atanh t)
    f = std::pow(1.0 - t, k + 2.0) * std::expm1(2.0 * (k + 2.0) * std::atanh(t)) /
        (2.0 * t * (k + 2.0));
  } else {
    f = (std::pow(1.0 + t, k + 2.0) - std::pow(1.0 - t, k + 2.0)) / (2.0 * t * (k + 2.0));
  }
  return std::pow(hi, k) * f;
}

// Polar-angle rule for c_d int_0^pi f((r-s)^2 + 4 r s sin^2(theta/2)) sin^{d-2} theta dtheta
// with theta = pi u^2, which clusters nodes near theta = 0 where f is least smooth.
struct AngularRule {
  std::vector<double> s2;  // sin^2(theta/2)
  std::vector<double> w;   // c_d sin^{d-2}(theta) dtheta, summing to 1
};

AngularRule make_angular_rule(int dim, std::size_t n) {
  const GaussRule& rule = gauss_legendre(n);
  const double cd = sphere_normalizer(dim);
  AngularRule out;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double u = 0.5 * (rule.nodes[q] + 1.0);
    const double theta = std::numbers::pi * u * u;
    const double sh = std::sin(0.5 * theta);
    // d theta = 2 pi u du, du = dx / 2
    out.s2.push_back(sh * sh);
    out.w.push_back(cd * std::numbers::pi * rule.weights[q] * u * std::pow(std::sin(theta), dim - 2));
  }
  return out;
}

double kernel_polar(double r, double s, double k, const AngularRule& rule) {
  const double diff2 = (r - s) * (r - s);
  const double rs4 = 4.0 * r * s;
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.s2.size(); ++q) sum += rule.w[q] * half_power(diff2 + rs4 * rule.s2[q], k);
  return sum;
}

}  // namespace

KernelValue angular_kernel(double r, double s, double k, int dim, std::size_t angular_nodes) {
  if (!(r >= 0.0) || !(s >= 0.0)) throw std::invalid_argument("angular_kernel: radii must be >= 0");
  if (!(k > 0.0)) throw std::invalid_argument("angular_kernel: k must be > 0");
  if (dim < 1) throw std::invalid_argument("angular_kernel: dimension must be >= 1");
  if (dim == 1) return {kernel_d1(r, s, k), 0.0};
  if (dim == 3) return {kernel_d3(r, s, k), 0.0};
  if (r == 0.0 || s == 0.0) return {std::pow(std::max(r, s), k), 0.0};
  const std::size_t coarse = std::max<std::size_t>(1, angular_nodes / 2);
  const double fine_v = kernel_polar(r, s, k, make_angular_rule(dim, angular_nodes));
  const double coarse_v = kernel_polar(r, s, k, make_angular_rule(dim, coarse));
  return {fine_v, std::abs(fine_v - coarse_v)};
}

KernelValue angular_kernel(double r, double s, const Params& p) {
  p.validate();
  return angular_kernel(r, s, p.k, p.d);
}

namespace {

struct RadialNodes {
  std::vector<double> r;
  std::vector<double> w;  // probability weights of the r^{d-1} dr distribution
};

RadialNodes radial_nodes(double a, double b, int dim, const GaussRule& rule) {
  RadialNodes out;
  out.r.resize(rule.nodes.size());
  out.w.resize(rule.nodes.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double total = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    out.r[q] = mid + half * rule.nodes[q];
    out.w[q] = rule.weights[q] * std::pow(out.r[q], dim - 1);
    total += out.w[q];
  }
  for (double& w : out.w) w /= total;
  return out;
}

// Mean of |r - s|^k for r, s uniform on [a, b] and [c, e], c >= b or identical intervals.
double mean_abs_power_1d(double a, double b, double c, double e, double k) {
  const double norm = (k + 1.0) * (k + 2.0);
  if (a == c && b == e) return 2.0 * std::pow(b - a, k) / norm;
  auto big_f = [&](double x) { return x > 0.0 ? std::pow(x, k + 2.0) / norm : 0.0; };
  const double num = big_f(e - a) - big_f(e - b) - big_f(c - a) + big_f(c - b);
  return num / ((b - a) * (e - c));
}

}  // namespace

InteractionOperator::InteractionOperator(std::span<const double> edges, int dim, double k,
                                         QuadratureSpec spec)
    : dim_(dim), k_(k), n_(edges.empty() ? 0 : edges.size() - 1), edges_(edges.begin(), edges.end()) {
  if (dim < 1) throw std::invalid_argument("InteractionOperator: dimension must be >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("InteractionOperator: k must be > 0");
  if (spec.radial_nodes < 2 || spec.near_nodes < 2 || spec.angular_nodes < 2) {
    throw std::invalid_argument("InteractionOperator: need at least 2 nodes per direction");
  }
  g_.assign(n_ * n_, 0.0);
  err_.assign(n_ * n_, 0.0);
  means_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    means_[i] = annulus_power_mean(dim, edges_[i], edges_[i + 1], k);
  }
  if (n_ == 0) return;

  const GaussRule& far_rule = gauss_legendre(spec.radial_nodes);
  const GaussRule& far_half = gauss_legendre(spec.radial_nodes / 2);
  const GaussRule& near_rule = gauss_legendre(spec.near_nodes);
  const GaussRule& near_half = gauss_legendre(spec.near_nodes / 2);
  AngularRule ang;
  AngularRule ang_half;
  if (dim == 2 || dim >= 4) {
    ang = make_angular_rule(dim, spec.angular_nodes);
    ang_half = make_angular_rule(dim, std::max<std::size_t>(1, spec.angular_nodes / 2));
  }

  auto kernel = [&](double r, double s, bool coarse) {
    switch (dim) {
      case 1: return kernel_d1(r, s, k);
      case 3: return kernel_d3(r, s, k);
      default: return kernel_polar(r, s, k, coarse ? ang_half : ang);
    }
  };
  auto nodes_for = [&](const GaussRule& rule) {
    std::vector<RadialNodes> v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = radial_nodes(edges_[i], edges_[i + 1], dim, rule);
    return v;
  };
  const auto far_nodes = nodes_for(far_rule);
  const auto far_coarse = nodes_for(far_half);
  const auto near_nodes = nodes_for(near_rule);
  const auto near_coarse = nodes_for(near_half);

  auto double_mean = [&](const RadialNodes& x, const RadialNodes& y, bool coarse, bool plus_only) {
    double sum = 0.0;
    for (std::size_t p = 0; p < x.r.size(); ++p) {
      double row = 0.0;
      for (std::size_t q = 0; q < y.r.size(); ++q) {
        const double v = plus_only ? std::pow(x.r[p] + y.r[q], k) : kernel(x.r[p], y.r[q], coarse);
        row += y.w[q] * v;
      }
      sum += x.w[p] * row;
    }
    return sum;
  };

  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const bool near = j - i <= 1;
      const auto& fine = near ? near_nodes : far_nodes;
      const auto& coarse = near ? near_coarse : far_coarse;
      double value;
      double error;
      if (dim == 1 && near) {
        // |r - s|^k exactly; only the smooth (r + s)^k half is sampled.
        const double exact = mean_abs_power_1d(edges_[i], edges_[i + 1], edges_[j], edges_[j + 1], k);
        const double plus = double_mean(fine[i], fine[j], false, true);
        const double plus_c = double_mean(coarse[i], coarse[j], true, true);
        value = 0.5 * (exact + plus);
        error = 0.5 * std::abs(plus - plus_c);
      } else {
        value = double_mean(fine[i], fine[j], false, false);
        error = std::abs(value - double_mean(coarse[i], coarse[j], true, false));
      }
      g_[i * n_ + j] = g_[j * n_ + i] = value;
      err_[i * n_ + j] = err_[j * n_ + i] = error;
    }
  }
}

void InteractionOperator::potential(std::span<const double> masses, double atom,
                                    std::span<double> out) const {
  if (masses.size() != n_ || out.size() != n_) {
    throw std::invalid_argument("InteractionOperator::potential: size mismatch");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = g_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * masses[j];
    out[i] = s + atom * means_[i];
  }
}

double InteractionOperator::energy(std::span<const double> masses, double atom) const {
  if (masses.size() != n_) throw std::invalid_argument("InteractionOperator::energy: size mismatch");
  double total = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (masses[i] == 0.0) continue;
    const double* row = g_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * masses[j];
    total += masses[i] * s;
    cross += masses[i] * means_[i];
  }
  return total + 2.0 * atom * cross;
}

double InteractionOperator::error(std::span<const double> masses) const {
  if (masses.size() != n_) throw std::invalid_argument("InteractionOperator::error: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (masses[i] == 0.0) continue;
    const double* row = err_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * masses[j];
    total += masses[i] * s;
  }
  return total;
}

bool InteractionOperator::matches(const RadialDensity& rho) const {
  const auto e = rho.edges();
  return rho.dim() == dim_ && e.size() == edges_.size() && std::equal(e.begin(), e.end(), edges_.begin());
}

std::shared_ptr<const InteractionOperator> shared_operator(std::span<const double> edges, int dim,
                                                           double k) {
  static std::mutex mu;
  static std::list<std::shared_ptr<const InteractionOperator>> cache;
  constexpr std::size_t capacity = 24;
  auto same = [&](const InteractionOperator& op) {
    return op.dim() == dim && op.exponent() == k && op.edges().size() == edges.size() &&
           std::equal(edges.begin(), edges.end(), op.edges().begin());
  };
  {
    std::lock_guard lock(mu);
    for (auto it = cache.begin(); it != cache.end(); ++it) {
      if (same(**it)) {
        auto hit = *it;
        cache.erase(it);
        cache.push_front(hit);
        return hit;
      }
    }
  }
  auto built = std::make_shared<const InteractionOperator>(edges, dim, k);
  std::lock_guard lock(mu);
  cache.push_front(built);
  if (cache.size() > capacity) cache.pop_back();
  return built;
}

double entropy(const RadialDensity& rho, const Params& p) {
  p.validate();
  if (p.m == 1.0) throw std::invalid_argument("entropy: m = 1 is not supported");
  if (rho.dim() != p.d) throw std::invalid_argument("entropy: dimension mismatch");
  if (p.m > 1.0 && rho.atom() > 0.0) return std::numeric_limits<double>::infinity();
  const auto values = rho.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (values[i] > 0.0) sum += std::pow(values[i], p.m) * rho.annulus_volume(i);
  }
  return sum / (p.m - 1.0);
}

double moment(const RadialDensity& rho, double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("moment: exponent must be > 0");
  const auto values = rho.values();
  const auto edges = rho.edges();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (values[i] == 0.0) continue;
    sum += values[i] * rho.annulus_volume(i) *
           annulus_power_mean(rho.dim(), edges[i], edges[i + 1], exponent);
  }
  return sum;
}

KernelValue interaction_with_error(const RadialDensity& rho, const InteractionOperator& op) {
  if (!op.matches(rho)) throw std::invalid_argument("interaction: operator built for another grid");
  const auto w = rho.masses();
  return {op.energy(w, rho.atom()), op.error(w)};
}

KernelValue interaction_with_error(const RadialDensity& rho, const Params& p) {
  p.validate();
  if (rho.dim() != p.d) throw std::invalid_argument("interaction: dimension mismatch");
  if (rho.size() == 0) return {0.0, 0.0};
  return interaction_with_error(rho, *shared_operator(rho.edges(), rho.dim(), p.k));
}

double interaction(const RadialDensity& rho, const Params& p) {
  return interaction_with_error(rho, p).value;
}

namespace {

EnergyReport assemble(const RadialDensity& rho, const Params& p, KernelValue inter) {
  EnergyReport r;
  r.entropy = entropy(rho, p);
  r.interaction = inter.value;
  r.quad_error = inter.error;
  r.moment_k = moment(rho, p.k);
  r.moment_2 = moment(rho, 2.0);
  r.free_energy = r.entropy + r.interaction / (2.0 * p.k);
  r.rescaled = r.free_energy + 0.5 * r.moment_2;
  return r;
}

}  // namespace

EnergyReport free_energy(const RadialDensity& rho, const Params& p) {
  return assemble(rho, p, interaction_with_error(rho, p));
}

EnergyReport free_energy(const RadialDensity& rho, const Params& p, const InteractionOperator& op) {
  p.validate();
  if (op.exponent() != p.k) throw std::invalid_argument("free_energy: operator built for another k");
  return assemble(rho, p, interaction_with_error(rho, op));
}

}  // namespace revhls
