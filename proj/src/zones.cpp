#include "revhls/zones.hpp"

#include <cmath>
#include <stdexcept>

namespace revhls {

std::string to_string(Zone z) {
  switch (z) {
    case Zone::I: return "I";
    case Zone::II: return "II";
    case Zone::III: return "III";
    case Zone::boundary: return "boundary";
  }
  return "?";
}

double zone_threshold(double k, int dim) { return dim / (dim + k); }
double fair_competition_m(double k, int dim) { return 1.0 - k / dim; }
double nn2017_m(double k, int dim) { return dim / (2.0 * dim + k); }
double bounded_threshold(int dim) { return (dim - 2.0) / dim; }

namespace {

void check_args(double m, double k, int dim) {
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("classify: m must be > 0");
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("classify: k must be > 0");
  if (dim < 1) throw std::invalid_argument("classify: d must be >= 1");
}

int side(double m, double curve) {
  if (std::abs(m - curve) <= curve_tolerance) return 0;
  return m > curve ? 1 : -1;
}

}  // namespace

bool in_zone1(double m, double k, int dim) { return m < zone_threshold(k, dim) - curve_tolerance; }

bool in_zone2(double m, double k, int dim) {
  return m > zone_threshold(k, dim) + curve_tolerance && m < 1.0 - curve_tolerance;
}

bool in_zone3(double m) { return m > 1.0 + curve_tolerance; }

CondensationCriteria condensation_criteria(double m, double k, int dim) {
  check_args(m, k, dim);
  if (!in_zone2(m, k, dim)) throw ZoneError("condensation_criteria: not in Zone II");
  CondensationCriteria c;
  c.bounded = m > bounded_threshold(dim);
  c.unique_bounded = m > (dim - 1.0) / dim && k >= 1.0;
  c.small_k = k <= 1.0;
  c.scaling_gap = std::exp2(k - 1.0) * k / (std::exp2(k) - 1.0) > dim * (1.0 - m) / m;
  c.abs_continuous = c.bounded || c.small_k || c.scaling_gap;
  auto add = [&](bool on, const char* text) {
    if (!on) return;
    if (!c.reasons.empty()) c.reasons += "; ";
    c.reasons += text;
  };
  add(c.bounded, "m > (d-2)/d: optimizers bounded");
  add(c.unique_bounded, "m > (d-1)/d and k >= 1: unique bounded optimizer");
  add(c.small_k, "k <= 1: absolutely continuous");
  add(c.scaling_gap, "2^{k-1}k/(2^k-1) > d(1-m)/m: absolutely continuous");
  if (c.reasons.empty()) c.reasons = "inconclusive";
  return c;
}

ZoneLabel classify(double m, double k, int dim) {
  check_args(m, k, dim);
  ZoneLabel z;
  z.sides = {side(m, fair_competition_m(k, dim)), side(m, zone_threshold(k, dim)),
             side(m, nn2017_m(k, dim)), side(m, 1.0), side(m, bounded_threshold(dim))};
  if (z.sides[1] == 0 || z.sides[3] == 0) {
    z.zone = Zone::boundary;
  } else if (z.sides[1] < 0) {
    z.zone = Zone::I;
  } else if (z.sides[3] < 0) {
    z.zone = Zone::II;
  } else {
    z.zone = Zone::III;
  }
  z.fair_competition = z.sides[0] == 0;
  z.nn2017_curve = z.sides[2] == 0;
  if (z.zone == Zone::II) {
    const auto c = condensation_criteria(m, k, dim);
    z.bounded_optimizers = c.bounded;
    z.abs_continuous = c.abs_continuous;
  }
  return z;
}

}  // namespace revhls
