#pragma once

// Lower bounds for E_m + chi J_k and F_{m,k} in Zone II, the dilation
// optimum behind the reversed HLS inequality, and related inequalities.
//
// Notation: alpha = d(1-m) (entropy dilation exponent), a = (m + alpha/k)/2.

#include <limits>
#include <string>

#include "revhls/functionals.hpp"
#include "revhls/radial_density.hpp"

namespace revhls {

/// Which version of a published constant to evaluate.
///   printed   : the closed form as published
///   corrected : a re-derivation whose every step is a valid inequality
enum class ConstantForm { printed, corrected };

std::string to_string(ConstantForm f);

enum class CertificateKind {
  entropy_moment,
  free_energy,
  reversed_hls,
  dyadic_moment,
  dyadic_entropy,
  holder,
  pointwise,
  zone3_inequality,
};

std::string to_string(CertificateKind k);

/// One checked inequality. `constant` is the bound side, `lhs` the evaluated
/// functional, and `slack` >= 0 means the inequality holds (for upper bounds
/// slack = constant - lhs). Two-sided checks fill `upper`/`upper_slack`.
struct BoundCertificate {
  CertificateKind kind = CertificateKind::entropy_moment;
  Params params;
  ConstantForm form = ConstantForm::printed;
  double constant = 0.0;
  double lhs = 0.0;
  double slack = 0.0;
  double upper = std::numeric_limits<double>::quiet_NaN();
  double upper_slack = std::numeric_limits<double>::infinity();
  double tolerance = 1e-9;

  bool passed() const { return slack >= -tolerance && upper_slack >= -tolerance; }
};

/// max(1e-9, 10 quad_error)
double certificate_tolerance(double quad_error);

/// a = (m + d(1-m)/k)/2; requires Zone II.
double holder_exponent_a(const Params& p);

/// C(chi, m, k, d) with chi = p.chi: lower bound of E_m + chi J_k over
/// probability measures. Requires Zone II.
double lower_bound_constant(const Params& p, ConstantForm form = ConstantForm::printed);

/// Lower bound of F_{m,k}: C(1, m, k, d)/(2k) for the printed form,
/// C(1/(2k), m, k, d) for the corrected one.
double free_energy_bound(const Params& p, ConstantForm form = ConstantForm::printed);

/// sum_j (omega_d 2^{jd})^{1-m} rho_j^m, plus the inner-tail ball.
double dyadic_entropy_sum(const DyadicProfile& dp, const Params& p);

/// 2^{-k} S <= J_k <= S with S = sum_j 2^{jk} rho_j.
BoundCertificate check_dyadic_moment(const DyadicProfile& dp, const RadialDensity& rho, const Params& p);

/// E_m >= c sum_j 2^{jd(1-m)} rho_j^m / (m-1); c = omega^{1-m} 2^{-d(1-m)}
/// (printed) or omega^{1-m} (corrected).
BoundCertificate check_dyadic_entropy(const DyadicProfile& dp, const RadialDensity& rho,
                                      const Params& p, ConstantForm form = ConstantForm::printed);

/// E_m + chi J_k >= C(chi, m, k, d).
BoundCertificate entropy_moment_lower_bound(const RadialDensity& rho, const Params& p,
                                            ConstantForm form = ConstantForm::printed);

/// free_energy_bound(p) <= F[rho*] <= F[rho], rho* the decreasing rearrangement.
BoundCertificate free_energy_lower_bound(const RadialDensity& rho, const Params& p,
                                         ConstantForm form = ConstantForm::printed);

/// C_1 = [(alpha/k)^{alpha/(k-alpha)} - (alpha/k)^{k/(k-alpha)}] (2k)^{alpha/(k-alpha)}.
double dilation_constant(const Params& p);

struct DilationOptimum {
  double r_star = 0.0;
  double min_value = 0.0;
  double c1 = 0.0;
  /// |f'(r*)| r* / |f(r*)|, should be ~1e-16.
  double stationarity = 0.0;
};

/// Minimizes f(r) = r^{alpha} E + r^k I/(2k) over r > 0 for E < 0 < I, k > alpha.
DilationOptimum optimal_dilation(double entropy, double interaction, const Params& p);

/// C_0 from |inf F| (inf_F < 0). Requires Zone II.
double hls_constant(const Params& p, double inf_F);
/// C_0 from the corrected free-energy bound: rigorous but smaller than sharp.
double certified_hls_constant(const Params& p);

/// I_k[psi] >= C_0 |psi|_1^{2 - mk/alpha} (int psi^m)^{k/alpha}; psi need not
/// be normalized.
BoundCertificate verify_reversed_hls(const RadialDensity& psi, const Params& p, double c0);

/// int psi^q <= (int psi)^{(q-m)/(1-m)} (int psi^m)^{e}, 0 < m < q < 1, with
/// e = (1-q)/(1-m) (corrected) or m(1-q)/(1-m) (printed).
BoundCertificate check_holder_interpolation(const RadialDensity& psi, double m, double q,
                                            ConstantForm form = ConstantForm::corrected);

/// For m > 1, beta = d(m-1):
///   C(m,k) = (1 + beta/k) (2 beta)^{-beta/(k+beta)} (m-1)^{-k/(k+beta)}
double zone3_functional_constant(const Params& p);

/// inf F <= C(m,k) I^{beta/(k+beta)} |psi|_1^{-(mk+2beta)/(k+beta)} |psi|_m^{mk/(k+beta)}.
BoundCertificate check_zone3_inequality(const RadialDensity& psi, const Params& p, double inf_F);

/// Radially decreasing probability profiles satisfy rho(r) <= B(r) with
/// B = 1/(omega_d r^d) (corrected) or (omega_d r)^{-d} (printed). Checked at
/// every annulus outer edge (the worst point of a decreasing step).
BoundCertificate check_pointwise_bound(const RadialDensity& rho,
                                       ConstantForm form = ConstantForm::corrected);

}  // namespace revhls
