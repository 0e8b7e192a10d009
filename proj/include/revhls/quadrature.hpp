#pragma once

#include <cstddef>
#include <vector>

namespace revhls {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights of the n-point Gauss-Legendre rule. Rules are computed
/// once per n and cached; the returned reference stays valid for the lifetime
/// of the program.
const GaussRule& gauss_legendre(std::size_t n);

/// Integrate f over [a, b] with the n-point rule.
template <class F>
double integrate_gauss(F&& f, double a, double b, std::size_t n) {
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    sum += rule.weights[q] * f(mid + half * rule.nodes[q]);
  }
  return half * sum;
}

}  // namespace revhls
