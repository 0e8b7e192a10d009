#pragma once

// Explicit constructions:
//  * the dyadic power family rho_j = 2^{-j beta} / sum_i 2^{-i beta} on the
//    rings (2^j, 2^{j+1}], j = 0..j_max, whose entropy diverges while the
//    k-th moment stays bounded when k < beta < d(1-m)/m;
//  * the confinement model E_m[rho] + gamma^{-1} int V drho, whose
//    minimizers put an atom at the origin when the a.c. part cannot hold
//    all the mass.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revhls/functionals.hpp"
#include "revhls/radial_density.hpp"

namespace revhls {

/// Ring-constant density with ring masses proportional to 2^{-j beta} on
/// (2^j, 2^{j+1}], j = 0..j_max; the unit ball is empty.
RadialDensity dyadic_power_density(int dim, double beta, int j_max);

struct Zone1Family {
  double beta = 0.0;
  int j_max = 60;
  Params params;

  /// Throws std::invalid_argument unless Zone I and k < beta < d(1-m)/m.
  void validate() const;
  /// (k + d(1-m)/m) / 2
  static double midpoint_beta(const Params& p);
};

struct Zone1Witness {
  /// J_k of the truncated density.
  double moment_k = 0.0;
  /// Partial sums of J_k over rings 0..J, J = 0..j_max.
  std::vector<double> moment_partial;
  /// Moment tail beyond j_max of the untruncated family.
  double moment_tail = 0.0;
  /// Partial sums of E_m over rings 0..J, J = 0..j_max.
  std::vector<double> entropy_partial;
  /// 2^{d(1-m) - m beta}
  double predicted_ratio = 0.0;
  /// entropy_partial[j_max] / entropy_partial[j_max - 1]
  double growth_ratio = 0.0;
};

Zone1Witness zone1_witness(const Zone1Family& fam);

struct CurvePoint {
  int j_max = 0;
  double entropy = 0.0;
  double interaction = 0.0;
  double moment_k = 0.0;
  double free_energy = 0.0;
  double quad_error = 0.0;
};

/// Energies of the dyadic power family for any parameters.
CurvePoint dyadic_family_point(const Params& p, double beta, int j_max);

std::vector<CurvePoint> zone1_free_energy_curve(const Zone1Family& fam, std::span<const int> j_values);

/// Limit of I_k over j_max for the dyadic power family, by extrapolating
/// from a long truncation with the known tail ratio 2^{-(beta - k)}.
/// Requires beta > k.
double dyadic_interaction_limit(const Params& p, double beta);

/// V(r) = sum_i c_i r^{p_i} with c_i > 0, p_i > 0.
struct PowerPotential {
  std::vector<std::pair<double, double>> terms;  // (coefficient, exponent)

  double operator()(double r) const;
  /// Mean of V over the annulus a < |x| <= b in R^d.
  double annulus_mean(int dim, double a, double b) const;
  double min_exponent() const;
  double max_exponent() const;
  std::string describe() const;
  void validate() const;
};

/// Parses "r^6", "2*r^2 + r^6", "0.5r^3"; throws std::invalid_argument.
PowerPotential parse_potential(const std::string& text);

struct PotentialIntegral {
  double value = 0.0;
  double error = 0.0;
  bool finite = false;
};

/// int_{R^d} V^{-s} dx. Finite iff p_min s < d < p_max s; +inf otherwise.
PotentialIntegral potential_integral(const PowerPotential& v, int dim, double s);

struct ToyModel {
  PowerPotential potential;
  double gamma = 1.0;
  /// Only m and d are used.
  Params params;

  void validate() const;
};

struct ToySolution {
  double atom = 0.0;
  /// Mass of the a.c. part, 1 - atom.
  double ac_mass = 1.0;
  /// EL multiplier C <= 0 (C = 0 exactly when an atom forms).
  double multiplier = 0.0;
  RadialDensity profile = RadialDensity::pure_atom(1);
  /// max |m/(m-1) rho^{m-1} + V/gamma - C| / (1 + |C|) over annuli.
  double el_residual = 0.0;
  /// M = int V^{-(1-m)} and the published test gamma M ((1-m)/m)^{1-m} < 1.
  PotentialIntegral m_integral;
  double criterion = 0.0;
  bool criterion_holds = false;
  /// N = int V^{-1/(1-m)}: largest a.c. mass at gamma = ((1-m)/m) is N.
  PotentialIntegral capacity;
  /// Continuum threshold: atoms form iff gamma < gamma_c (0 if N = inf).
  double continuum_threshold = 0.0;
  /// The grid put mass in the atom although the continuum problem cannot.
  bool grid_artifact = false;
};

ToySolution toy_model_solve(const ToyModel& tm, const GridSpec& grid = {});

}  // namespace revhls
