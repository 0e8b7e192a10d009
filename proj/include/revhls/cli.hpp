#pragma once

// Command-line front end. Every subcommand prints a JSON document to `out`
// and writes JSON/CSV files to the output directory (--out, else the
// REVHLS_OUT environment variable, else ./revhls_out).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "revhls/zones.hpp"

namespace revhls::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_certificate = 1,
  exit_usage = 2,
  exit_zone = 3,
  exit_convergence = 4,
  exit_internal = 5,
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SweepSpec {
  int d = 3;
  double m_lo = 0.0;
  double m_hi = 1.6;
  double k_lo = 0.0;
  double k_hi = 6.0;
  /// steps x steps cell centres.
  std::size_t steps = 100;
  /// 0: hardware concurrency.
  std::size_t threads = 0;
};

struct SweepCell {
  double m = 0.0;
  double k = 0.0;
  ZoneLabel label;
};

/// Row-major in (m, k): index = i_m * steps + i_k. Deterministic for any
/// thread count.
std::vector<SweepCell> sweep(const SweepSpec& spec);

/// m,k,zone,fair_competition,nn2017_curve,bounded_optimizers,abs_continuous,
/// side_fair,side_zone,side_nn2017,side_one,side_bounded
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace revhls::cli
