#pragma once

// Parameter regions for F_{m,k} in dimension d:
//   I   : 0 < m < d/(d+k)   free energy unbounded below
//   II  : d/(d+k) < m < 1   bounded below, optimizers may carry an atom
//   III : m > 1             compactly supported minimizers
// and the curves m = 1 - k/d, m = d/(2d+k), m = (d-2)/d.

#include <array>
#include <stdexcept>
#include <string>

namespace revhls {

enum class Zone { I, II, III, boundary };

/// Parameters outside the region an operation is defined on.
class ZoneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string to_string(Zone z);

/// Distance under which a point counts as lying on a curve.
inline constexpr double curve_tolerance = 1e-12;

double zone_threshold(double k, int dim);       // d / (d + k)
double fair_competition_m(double k, int dim);   // 1 - k/d
double nn2017_m(double k, int dim);             // d / (2d + k)
double bounded_threshold(int dim);              // (d - 2) / d

/// Which side of each curve (m = 1 - k/d, d/(d+k), d/(2d+k), 1, (d-2)/d) the
/// point lies on: +1 above, -1 below, 0 on the curve.
using CurveSides = std::array<int, 5>;

struct ZoneLabel {
  Zone zone = Zone::boundary;
  bool fair_competition = false;
  bool nn2017_curve = false;
  bool bounded_optimizers = false;
  bool abs_continuous = false;
  CurveSides sides{};
};

/// Throws std::invalid_argument unless m > 0, k > 0, d >= 1.
ZoneLabel classify(double m, double k, int dim);

// Strict zone membership (points on a boundary curve belong to none).
bool in_zone1(double m, double k, int dim);
bool in_zone2(double m, double k, int dim);
bool in_zone3(double m);

struct CondensationCriteria {
  /// m > (d-2)/d: every optimizer is bounded.
  bool bounded = false;
  /// m > (d-1)/d and k >= 1: unique and bounded.
  bool unique_bounded = false;
  /// 0 < k <= 1.
  bool small_k = false;
  /// 2^{k-1} k / (2^k - 1) > d(1-m)/m.
  bool scaling_gap = false;
  bool abs_continuous = false;
  std::string reasons;
};

/// Evaluates the regularity and absolute-continuity criteria for a Zone II
/// point; throws std::invalid_argument outside Zone II.
CondensationCriteria condensation_criteria(double m, double k, int dim);

}  // namespace revhls
