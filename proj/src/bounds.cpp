#include "revhls/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "revhls/zones.hpp"

namespace revhls {

std::string to_string(ConstantForm f) {
  return f == ConstantForm::printed ? "printed" : "corrected";
}

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::entropy_moment: return "entropy_moment";
    case CertificateKind::free_energy: return "free_energy";
    case CertificateKind::reversed_hls: return "reversed_hls";
    case CertificateKind::dyadic_moment: return "dyadic_moment";
    case CertificateKind::dyadic_entropy: return "dyadic_entropy";
    case CertificateKind::holder: return "holder";
    case CertificateKind::pointwise: return "pointwise";
    case CertificateKind::zone3_inequality: return "zone3_inequality";
  }
  return "?";
}

double certificate_tolerance(double quad_error) { return std::max(1e-9, 10.0 * quad_error); }

namespace {

void require_zone2(const Params& p, const char* who) {
  p.validate();
  if (!in_zone2(p.m, p.k, p.d)) {
    throw ZoneError(std::string(who) + ": parameters outside Zone II");
  }
}

void require_probability_like(const RadialDensity& rho, const Params& p, const char* who) {
  if (rho.dim() != p.d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

double holder_exponent_a(const Params& p) {
  require_zone2(p, "holder_exponent_a");
  return 0.5 * (p.m + p.entropy_scaling() / p.k);
}

double lower_bound_constant(const Params& p, ConstantForm form) {
  const double a = holder_exponent_a(p);
  const double m = p.m;
  const double k = p.k;
  const double alpha = p.entropy_scaling();
  const double w = std::pow(unit_ball_volume(p.d), 1.0 - m);
  if (form == ConstantForm::printed) {
    const double delta = -std::exp2(alpha) * (m - 1.0) * p.chi / w;
    const double q = std::exp2((alpha - a * k) / (1.0 - m));
    const double num = (1.0 - a) * std::pow(a, 1.0 / (1.0 - a)) * std::exp2(k * a * a / (a - 1.0)) *
                       (1.0 - std::exp2(-alpha)) * std::pow(delta, -a / (1.0 - a));
    const double den = std::pow(1.0 - q, (1.0 - m) / (1.0 - a));
    return w / ((std::exp2(alpha) - 1.0) * (m - 1.0)) * (1.0 + num / den);
  }
  // Jensen per ring with |R_j| <= omega 2^{jd}; rings j <= 0 carry mass <= 1;
  // rings j >= 1 by Hoelder (exponent 1/m, then a/m) against the moment; then
  // Young in J.
  const double q = std::exp2((alpha - a * k) / (1.0 - m));
  const double big_a = std::pow(1.0 / (1.0 - q), 1.0 - m) * std::exp2(k * a);
  const double delta = p.chi * (1.0 - m) / w;
  const double young = (1.0 - a) * std::pow(a, a / (1.0 - a)) * std::pow(big_a, 1.0 / (1.0 - a)) *
                       std::pow(delta, -a / (1.0 - a));
  return w / (m - 1.0) * (1.0 / (1.0 - std::exp2(-alpha)) + young);
}

double free_energy_bound(const Params& p, ConstantForm form) {
  Params q = p;
  if (form == ConstantForm::printed) {
    q.chi = 1.0;
    return lower_bound_constant(q, form) / (2.0 * p.k);
  }
  q.chi = 1.0 / (2.0 * p.k);
  return lower_bound_constant(q, form);
}

double dyadic_entropy_sum(const DyadicProfile& dp, const Params& p) {
  const double w = unit_ball_volume(p.d);
  double sum = 0.0;
  for (int j = dp.j_min; j <= dp.j_max; ++j) {
    const double mass = dp.mass(j);
    if (mass > 0.0) sum += std::pow(w * std::ldexp(1.0, j * p.d), 1.0 - p.m) * std::pow(mass, p.m);
  }
  if (dp.inner_tail > 0.0) {
    sum += std::pow(w * std::ldexp(1.0, (dp.j_min - 1) * p.d), 1.0 - p.m) * std::pow(dp.inner_tail, p.m);
  }
  return sum;
}

BoundCertificate check_dyadic_moment(const DyadicProfile& dp, const RadialDensity& rho, const Params& p) {
  p.validate();
  require_probability_like(rho, p, "check_dyadic_moment");
  double s = 0.0;
  for (int j = dp.j_min; j <= dp.j_max; ++j) s += std::pow(2.0, j * p.k) * dp.mass(j);
  // Mass below the tracked rings sits inside B_{2^{j_min-1}}.
  const double upper = s + std::pow(2.0, (dp.j_min - 1) * p.k) * dp.inner_tail +
                       (dp.outer_tail > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  BoundCertificate c;
  c.kind = CertificateKind::dyadic_moment;
  c.params = p;
  c.lhs = moment(rho, p.k);
  c.constant = std::pow(2.0, -p.k) * s;
  c.slack = c.lhs - c.constant;
  c.upper = upper;
  c.upper_slack = upper - c.lhs;
  c.tolerance = 1e-12 * std::max(1.0, std::abs(c.lhs));
  return c;
}

BoundCertificate check_dyadic_entropy(const DyadicProfile& dp, const RadialDensity& rho,
                                      const Params& p, ConstantForm form) {
  p.validate();
  require_probability_like(rho, p, "check_dyadic_entropy");
  if (!(p.m < 1.0)) throw std::invalid_argument("check_dyadic_entropy: requires m < 1");
  const double factor = form == ConstantForm::printed ? std::exp2(-p.entropy_scaling()) : 1.0;
  BoundCertificate c;
  c.kind = CertificateKind::dyadic_entropy;
  c.params = p;
  c.form = form;
  c.lhs = entropy(rho, p);
  c.constant = factor * dyadic_entropy_sum(dp, p) / (p.m - 1.0);
  c.slack = c.lhs - c.constant;
  c.tolerance = 1e-12 * std::max(1.0, std::abs(c.lhs));
  return c;
}

BoundCertificate entropy_moment_lower_bound(const RadialDensity& rho, const Params& p,
                                            ConstantForm form) {
  require_zone2(p, "entropy_moment_lower_bound");
  require_probability_like(rho, p, "entropy_moment_lower_bound");
  BoundCertificate c;
  c.kind = CertificateKind::entropy_moment;
  c.params = p;
  c.form = form;
  c.constant = lower_bound_constant(p, form);
  c.lhs = entropy(rho, p) + p.chi * moment(rho, p.k);
  c.slack = c.lhs - c.constant;
  c.tolerance = certificate_tolerance(0.0);
  return c;
}

BoundCertificate free_energy_lower_bound(const RadialDensity& rho, const Params& p, ConstantForm form) {
  require_zone2(p, "free_energy_lower_bound");
  require_probability_like(rho, p, "free_energy_lower_bound");
  const RadialDensity star = rearrange_decreasing(rho);
  const EnergyReport before = free_energy(rho, p);
  const EnergyReport after = free_energy(star, p);
  BoundCertificate c;
  c.kind = CertificateKind::free_energy;
  c.params = p;
  c.form = form;
  c.constant = free_energy_bound(p, form);
  c.lhs = after.free_energy;
  c.slack = c.lhs - c.constant;
  c.upper = before.free_energy;
  c.upper_slack = before.free_energy - after.free_energy;
  c.tolerance = certificate_tolerance((after.quad_error + before.quad_error) / (2.0 * p.k));
  return c;
}

double dilation_constant(const Params& p) {
  const double alpha = p.entropy_scaling();
  const double k = p.k;
  const double ratio = alpha / k;
  return (std::pow(ratio, alpha / (k - alpha)) - std::pow(ratio, k / (k - alpha))) *
         std::pow(2.0 * k, alpha / (k - alpha));
}

DilationOptimum optimal_dilation(double entropy_value, double interaction_value, const Params& p) {
  p.validate();
  const double alpha = p.entropy_scaling();
  if (!(alpha > 0.0) || !(p.k > alpha)) {
    throw std::invalid_argument("optimal_dilation: requires 0 < d(1-m) < k");
  }
  if (!(entropy_value < 0.0) || !(interaction_value > 0.0)) {
    throw std::invalid_argument("optimal_dilation: requires E < 0 < I");
  }
  const double k = p.k;
  DilationOptimum out;
  out.c1 = dilation_constant(p);
  out.r_star = std::pow(2.0 * alpha * -entropy_value / interaction_value, 1.0 / (k - alpha));
  out.min_value = -out.c1 * std::pow(-entropy_value, k / (k - alpha)) *
                  std::pow(interaction_value, -alpha / (k - alpha));
  const double r = out.r_star;
  const double f = std::pow(r, alpha) * entropy_value + std::pow(r, k) * interaction_value / (2.0 * k);
  const double rdf = alpha * std::pow(r, alpha) * entropy_value + std::pow(r, k) * interaction_value / 2.0;
  out.stationarity = std::abs(rdf) / std::abs(f);
  return out;
}

double hls_constant(const Params& p, double inf_F) {
  require_zone2(p, "hls_constant");
  if (!(inf_F < 0.0)) throw std::invalid_argument("hls_constant: requires inf_F < 0");
  const double alpha = p.entropy_scaling();
  const double k = p.k;
  const double base = dilation_constant(p) * std::pow(1.0 - p.m, -k / (k - alpha)) / -inf_F;
  return std::pow(base, (k - alpha) / alpha);
}

double certified_hls_constant(const Params& p) {
  return hls_constant(p, free_energy_bound(p, ConstantForm::corrected));
}

namespace {

double power_integral(const RadialDensity& psi, double q) {
  const auto v = psi.values();
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (v[i] > 0.0) s += std::pow(v[i], q) * psi.annulus_volume(i);
  }
  return s;
}

}  // namespace

BoundCertificate verify_reversed_hls(const RadialDensity& psi, const Params& p, double c0) {
  require_zone2(p, "verify_reversed_hls");
  require_probability_like(psi, p, "verify_reversed_hls");
  if (psi.atom() != 0.0) throw std::invalid_argument("verify_reversed_hls: psi must have no atom");
  const double l1 = psi.profile_mass();
  if (!(l1 > 0.0)) throw std::invalid_argument("verify_reversed_hls: psi vanishes");
  const double alpha = p.entropy_scaling();
  const KernelValue inter = interaction_with_error(psi, p);
  BoundCertificate c;
  c.kind = CertificateKind::reversed_hls;
  c.params = p;
  c.lhs = inter.value;
  c.constant = c0 * std::pow(l1, 2.0 - p.m * p.k / alpha) * std::pow(power_integral(psi, p.m), p.k / alpha);
  c.slack = c.lhs - c.constant;
  c.tolerance = certificate_tolerance(inter.error);
  return c;
}

BoundCertificate check_holder_interpolation(const RadialDensity& psi, double m, double q,
                                            ConstantForm form) {
  if (!(0.0 < m && m < q && q < 1.0)) {
    throw std::invalid_argument("check_holder_interpolation: requires 0 < m < q < 1");
  }
  const double e = form == ConstantForm::printed ? m * (1.0 - q) / (1.0 - m) : (1.0 - q) / (1.0 - m);
  BoundCertificate c;
  c.kind = CertificateKind::holder;
  c.params.m = m;
  c.params.d = psi.dim();
  c.form = form;
  c.lhs = power_integral(psi, q);
  c.constant = std::pow(psi.profile_mass(), (q - m) / (1.0 - m)) * std::pow(power_integral(psi, m), e);
  c.slack = c.constant - c.lhs;
  c.tolerance = 1e-12 * std::max(1.0, c.lhs);
  return c;
}

double zone3_functional_constant(const Params& p) {
  p.validate();
  if (!(p.m > 1.0)) throw ZoneError("zone3_functional_constant: requires m > 1");
  const double beta = p.d * (p.m - 1.0);
  const double k = p.k;
  return (1.0 + beta / k) * std::pow(2.0 * beta, -beta / (k + beta)) * std::pow(p.m - 1.0, -k / (k + beta));
}

BoundCertificate check_zone3_inequality(const RadialDensity& psi, const Params& p, double inf_F) {
  const double cmk = zone3_functional_constant(p);
  require_probability_like(psi, p, "check_zone3_inequality");
  if (psi.atom() != 0.0) throw std::invalid_argument("check_zone3_inequality: psi must have no atom");
  const double beta = p.d * (p.m - 1.0);
  const double k = p.k;
  const double l1 = psi.profile_mass();
  const double lm = std::pow(power_integral(psi, p.m), 1.0 / p.m);
  const KernelValue inter = interaction_with_error(psi, p);
  BoundCertificate c;
  c.kind = CertificateKind::zone3_inequality;
  c.params = p;
  c.lhs = inf_F;
  c.constant = cmk * std::pow(inter.value, beta / (k + beta)) *
               std::pow(l1, -(p.m * k + 2.0 * beta) / (k + beta)) * std::pow(lm, p.m * k / (k + beta));
  c.slack = c.constant - c.lhs;
  c.tolerance = certificate_tolerance(inter.error);
  return c;
}

BoundCertificate check_pointwise_bound(const RadialDensity& rho, ConstantForm form) {
  const double w = unit_ball_volume(rho.dim());
  const auto v = rho.values();
  const auto e = rho.edges();
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = e[i + 1];
    const double bound = form == ConstantForm::printed ? std::pow(w * r, -rho.dim())
                                                       : 1.0 / (w * std::pow(r, rho.dim()));
    worst = std::max(worst, v[i] / bound);
  }
  BoundCertificate c;
  c.kind = CertificateKind::pointwise;
  c.params.d = rho.dim();
  c.form = form;
  c.constant = 1.0;
  c.lhs = worst;
  c.slack = 1.0 - worst;
  c.tolerance = 1e-12;
  return c;
}

}  // namespace revhls
