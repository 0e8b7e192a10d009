#pragma once

// Minimization of F_{m,k} (and of F + J_2/2) over radial probability
// measures atom * delta_0 + profile on a fixed annular grid.
//
// With w_i the annulus masses and
//   V_i = ((G w)_i + atom M_i) / k + U_i        (U_i = mean |x|^2/2 when rescaled)
//   g_i = m/(m-1) rho_i^{m-1} + V_i             (first variation on annulus i)
//   g_0 = sum_i w_i M_i / k                     (first variation at the origin)
// a minimizer has g_i = lambda on the support, g_i >= lambda off it, and
// g_0 = lambda when the atom is charged (g_0 >= lambda otherwise).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "revhls/bounds.hpp"
#include "revhls/functionals.hpp"
#include "revhls/radial_density.hpp"

namespace revhls {

enum class Problem { zone2, zone3, rescaled };

std::string to_string(Problem p);

enum class SolverMethod {
  /// w <- (1 - t) w + t T(w), T solving the EL system with the potential frozen
  fixed_point,
  /// multiplicative updates w_i <- w_i exp(-eta g_i) / Z
  exponentiated_gradient,
};

std::string to_string(SolverMethod m);

struct SolverConfig {
  std::size_t max_iters = 20000;
  double el_tolerance = 1e-6;
  /// Iterate until the residual is this fraction of el_tolerance.
  double target_fraction = 0.01;
  GridSpec grid{512, 1e-3, 16.0};
  std::uint64_t seed = 0;
  SolverMethod method = SolverMethod::fixed_point;
  /// Initial atom mass for problems that admit one.
  double initial_atom = 0.5;
  double armijo = 1e-4;
  /// Outer fraction of annuli watched for mass leaking through r_max.
  double leak_fraction = 0.05;
  double leak_threshold = 1e-8;
  std::size_t max_restarts = 4;

  /// Throws std::invalid_argument on non-positive tolerances or sizes.
  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double energy = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct MinimizerResult {
  Problem problem = Problem::zone2;
  Params params;
  RadialDensity density = RadialDensity::pure_atom(1);
  EnergyReport report;
  /// Mass of the absolutely continuous part (1 - atom).
  double atom_a = 1.0;
  double el_residual = 0.0;
  bool el_exterior_ok = true;
  /// Multiplier of the mass constraint in the normalization of el_residual.
  double el_constant = 0.0;
  double virial_defect_r = 0.0;
  double virial_defect_a = 0.0;
  /// Outer radius of the last charged annulus.
  double support_radius = 0.0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool converged = false;
  std::vector<IterationRecord> log;
  GridSpec grid;
  std::uint64_t seed = 0;
};

/// Zone II: d/(d+k) < m < 1.
MinimizerResult minimize_zone2(const Params& p, const SolverConfig& cfg = {});
/// m > 1; atoms are excluded.
MinimizerResult minimize_zone3(const Params& p, const SolverConfig& cfg = {});
/// d/(d+2) < m < 1, any k > 0; minimizes F + J_2/2.
MinimizerResult minimize_rescaled(const Params& p, const SolverConfig& cfg = {});
MinimizerResult minimize(Problem problem, const Params& p, const SolverConfig& cfg = {});

struct ELReport {
  double residual = 0.0;
  bool exterior_ok = true;
  double constant = 0.0;
  /// True when the atom is charged and the atom-normalized form was used.
  bool atom_case = false;
};

/// EL residual of a density. With an atom the expression is scaled by the
/// a.c. mass a and compared to a g_0; otherwise C is the mass-weighted mean
/// of g over the support. Residuals are max |expr - C| / (1 + |C|).
ELReport el_residual(const RadialDensity& rho, const Params& p, bool rescaled = false);
ELReport el_residual(const RadialDensity& rho, const Params& p, bool rescaled,
                     const InteractionOperator& op);

struct VirialDefects {
  /// |d(1-m) E + I/2 (+ J_2)| / (|E| + |I| (+ J_2))
  double r = 0.0;
  /// |m k E_ac + I_ac + (1 - 2a) J_ac (+ k J2_ac / 2)| / (sum of |terms|);
  /// only a stationarity condition when 0 < a < 1.
  double a = 0.0;
};

VirialDefects virial_check(const RadialDensity& rho, const Params& p, bool rescaled = false);
VirialDefects virial_check(const MinimizerResult& res);

/// Log-log slope of the profile over the inner 20% of annuli, certified
/// against -min(2, k)/(1-m) + 0.1. Passes trivially when there is no atom.
BoundCertificate lower_bound_profile_check(const MinimizerResult& res);

}  // namespace revhls
