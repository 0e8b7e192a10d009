#pragma once

// Radial measures on R^d: a Dirac atom at the origin plus a profile that is
// constant on each annulus A_i = (r_{i-1}, r_i] of a grid 0 = r_0 < ... < r_N.
//
//   vol(A_i) = omega_d (r_i^d - r_{i-1}^d),   omega_d = pi^{d/2} / Gamma(d/2 + 1)
//   mass     = atom + sum_i values_i vol(A_i)
//
// Dyadic rings are R_j = B_{2^j} \ B_{2^{j-1}}.

#include <cstddef>
#include <span>
#include <vector>

namespace revhls {

/// Volume of the unit ball in R^d.
double unit_ball_volume(int dim);

/// Lebesgue measure of {a < |x| <= b} in R^d. Accurate for thin annuli.
double annulus_volume(int dim, double a, double b);

/// Mean of |x|^p over the annulus {a < |x| <= b} in R^d (uniform density).
double annulus_power_mean(int dim, double a, double b, double p);

struct GridSpec {
  std::size_t points = 256;
  double r_min = 1e-4;
  double r_max = 32.0;
};

/// {0, r_min, r_min q, ..., r_max} with q = (r_max / r_min)^{1/points}.
std::vector<double> geometric_edges(const GridSpec& spec);

/// Edges whose annuli all have the same volume; outer radius `radius`.
std::vector<double> equal_volume_edges(int dim, std::size_t annuli, double radius);

class RadialDensity {
 public:
  /// Checks the grid (r_0 = 0, strictly increasing) and non-negativity.
  /// Mass normalization is not enforced here; see is_probability().
  RadialDensity(int dim, double atom, std::vector<double> edges, std::vector<double> values);

  static RadialDensity pure_atom(int dim);
  static RadialDensity uniform_ball(int dim, double radius, double mass = 1.0);
  /// Builds values from per-annulus masses.
  static RadialDensity from_masses(int dim, double atom, std::vector<double> edges,
                                   std::span<const double> masses);

  int dim() const { return dim_; }
  double atom() const { return atom_; }
  std::span<const double> edges() const { return edges_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double inner_radius(std::size_t i) const { return edges_[i]; }
  double outer_radius(std::size_t i) const { return edges_[i + 1]; }
  double annulus_volume(std::size_t i) const;
  std::vector<double> volumes() const;
  std::vector<double> masses() const;
  double profile_mass() const;

  bool is_probability(double tol = 1e-12) const;
  bool is_decreasing() const;

  /// rho_r(x) = r^{-d} rho(x / r); the grid is rescaled, not interpolated.
  RadialDensity dilated(double r) const;
  /// Multiplies atom and values by c.
  RadialDensity scaled(double c) const;
  RadialDensity with_atom(double atom) const;

 private:
  int dim_;
  double atom_;
  std::vector<double> edges_;
  std::vector<double> values_;
};

double total_mass(const RadialDensity& rho);

/// Radially symmetric decreasing rearrangement. Level sets (value, volume)
/// are kept and sorted by value; the atom is untouched. A profile that is
/// already non-increasing is returned unchanged.
RadialDensity rearrange_decreasing(const RadialDensity& rho);

/// Masses rho_j on the dyadic rings R_j for j in [j_min, j_max].
struct DyadicProfile {
  static constexpr int max_abs_index = 60;

  int j_min = 0;
  int j_max = -1;
  std::vector<double> masses;
  /// Profile mass inside B_{2^{j_min - 1}} (below the truncation).
  double inner_tail = 0.0;
  /// Profile mass outside B_{2^{j_max}}.
  double outer_tail = 0.0;
  double atom = 0.0;

  double tail_mass() const { return inner_tail + outer_tail; }
  double mass(int j) const;
  double sum() const;
  bool empty() const { return masses.empty(); }
};

DyadicProfile dyadic_decompose(const RadialDensity& rho);

}  // namespace revhls
