#pragma once

// Energies of radial measures on R^d (rho = atom * delta_0 + profile):
//
//   E_m[rho] = int rho_ac^m / (m - 1) dx               (atom carries no entropy)
//   I_k[rho] = iint |x - y|^k drho(x) drho(y)
//   J_p[rho] = int |x|^p drho(x)
//   F_{m,k}  = E_m + I_k / (2k)
//   F_resc   = E_m + I_k / (2k) + J_2 / 2
//
// For radial profiles I_k reduces to the spherical average
//   K(r, s) = avg_{|w|=1} |r e_1 - s w|^k
// integrated against the radial mass distribution of each pair of annuli.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "revhls/radial_density.hpp"

namespace revhls {

struct Params {
  double m = 0.5;
  double k = 1.0;
  int d = 1;
  double chi = 1.0;

  /// Throws std::invalid_argument unless m > 0, k > 0, d >= 1, chi > 0.
  void validate() const;
  /// d (1 - m): the dilation exponent of the entropy.
  double entropy_scaling() const { return d * (1.0 - m); }
};

struct EnergyReport {
  double entropy = 0.0;
  double interaction = 0.0;
  double moment_k = 0.0;
  double moment_2 = 0.0;
  double free_energy = 0.0;
  double rescaled = 0.0;
  double quad_error = 0.0;
};

struct KernelValue {
  double value = 0.0;
  double error = 0.0;
};

/// Spherical average of |r e_1 - s w|^k in dimension d. Closed form for d = 1
/// and d = 3, Gauss-Legendre in the polar angle otherwise; `error` is the
/// difference to the half-order rule (0 for closed forms).
KernelValue angular_kernel(double r, double s, double k, int dim, std::size_t angular_nodes = 64);
KernelValue angular_kernel(double r, double s, const Params& p);

struct QuadratureSpec {
  std::size_t radial_nodes = 4;
  /// Used on diagonal and neighbouring blocks.
  std::size_t near_nodes = 8;
  std::size_t angular_nodes = 64;
};

/// Interaction matrix of a fixed grid: G_ij is the mean of K over the radial
/// mass distributions of annuli i and j, so that
///   I_k = sum_ij w_i w_j G_ij + 2 atom sum_i w_i M_i
/// with w the annulus masses and M_i the mean of |x|^k over annulus i.
/// Building costs O(N^2); evaluation afterwards is a dense mat-vec.
class InteractionOperator {
 public:
  InteractionOperator(std::span<const double> edges, int dim, double k, QuadratureSpec spec = {});

  std::size_t size() const { return n_; }
  int dim() const { return dim_; }
  double exponent() const { return k_; }
  std::span<const double> edges() const { return edges_; }

  double block(std::size_t i, std::size_t j) const { return g_[i * n_ + j]; }
  double block_error(std::size_t i, std::size_t j) const { return err_[i * n_ + j]; }
  std::span<const double> power_means() const { return means_; }

  /// out_i = sum_j G_ij w_j + atom M_i: the annulus-averaged k-th power
  /// potential (|.|^k * rho) on annulus i.
  void potential(std::span<const double> masses, double atom, std::span<double> out) const;
  double energy(std::span<const double> masses, double atom) const;
  double error(std::span<const double> masses) const;

  bool matches(const RadialDensity& rho) const;

 private:
  int dim_;
  double k_;
  std::size_t n_;
  std::vector<double> edges_;
  std::vector<double> g_;
  std::vector<double> err_;
  std::vector<double> means_;
};

/// Operator for (edges, dim, k) from a small process-wide cache; built on a
/// miss. Safe to call from several threads.
std::shared_ptr<const InteractionOperator> shared_operator(std::span<const double> edges, int dim,
                                                           double k);

double entropy(const RadialDensity& rho, const Params& p);
double moment(const RadialDensity& rho, double exponent);
double interaction(const RadialDensity& rho, const Params& p);
KernelValue interaction_with_error(const RadialDensity& rho, const Params& p);
KernelValue interaction_with_error(const RadialDensity& rho, const InteractionOperator& op);

EnergyReport free_energy(const RadialDensity& rho, const Params& p);
/// Same, reusing a prebuilt operator for rho's grid.
EnergyReport free_energy(const RadialDensity& rho, const Params& p, const InteractionOperator& op);

}  // namespace revhls
