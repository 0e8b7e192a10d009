#pragma once

// Seeded random radial densities for certificate suites.

#include <cstdint>
#include <random>
#include <vector>

#include "revhls/radial_density.hpp"

namespace revhls {

struct SampleOptions {
  std::size_t min_annuli = 8;
  std::size_t max_annuli = 64;
  /// Probability of putting mass on the atom.
  double atom_probability = 0.0;
  double max_atom = 0.5;
};

/// Radially non-increasing probability measure on a random geometric grid.
/// Profiles mix exponential, power-law and compactly supported shapes.
RadialDensity random_decreasing_density(int dim, std::mt19937_64& rng, const SampleOptions& opt = {});

/// Probability measure with i.i.d. annulus values (not monotone).
RadialDensity random_radial_density(int dim, std::mt19937_64& rng, const SampleOptions& opt = {});

/// `count` decreasing densities from a generator seeded with `seed`.
std::vector<RadialDensity> decreasing_suite(int dim, std::size_t count, std::uint64_t seed,
                                            const SampleOptions& opt = {});

}  // namespace revhls
