#include "revhls/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "revhls/bounds.hpp"
#include "revhls/constructions.hpp"
#include "revhls/io.hpp"
#include "revhls/minimizer.hpp"
#include "revhls/sampling.hpp"

namespace revhls::cli {

using io::json;

std::vector<SweepCell> sweep(const SweepSpec& spec) {
  if (spec.d < 1) throw std::invalid_argument("sweep: d must be >= 1");
  if (spec.steps == 0) throw std::invalid_argument("sweep: steps must be positive");
  if (!(spec.m_lo >= 0.0 && spec.m_hi > spec.m_lo && spec.k_lo >= 0.0 && spec.k_hi > spec.k_lo))
    throw std::invalid_argument("sweep: ranges must satisfy 0 <= lo < hi");
  const std::size_t n = spec.steps;
  std::vector<SweepCell> cells(n * n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx; (idx = next.fetch_add(1)) < cells.size();) {
      const std::size_t i = idx / n;
      const std::size_t j = idx % n;
      SweepCell& c = cells[idx];
      c.m = spec.m_lo + (spec.m_hi - spec.m_lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      c.k = spec.k_lo + (spec.k_hi - spec.k_lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      c.label = classify(c.m, c.k, spec.d);
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cells.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "m,k,zone,fair_competition,nn2017_curve,bounded_optimizers,abs_continuous,"
        "side_fair,side_zone,side_nn2017,side_one,side_bounded\n";
  for (const auto& c : cells) {
    const auto& z = c.label;
    os << c.m << "," << c.k << "," << to_string(z.zone) << "," << z.fair_competition << "," << z.nn2017_curve
       << "," << z.bounded_optimizers << "," << z.abs_continuous;
    for (int s : z.sides) os << "," << s;
    os << "\n";
  }
  return os.str();
}

namespace {

struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("range must look like lo:hi, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("range must look like lo:hi, got '" + text + "'");
  }
}

std::string token(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  throw std::invalid_argument("unsupported config value " + v.dump());
}

// Merges a JSON config into the argument list; flags given on the command
// line win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(),
                         [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (it + 1 == args.end()) throw std::invalid_argument("--config needs a file");
    path = *(it + 1);
    args.erase(it, it + 2);
  } else {
    path = it->substr(9);
    args.erase(it);
  }
  json cfg;
  try {
    cfg = io::read_json_file(path);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (cfg.contains("schema") && cfg.at("schema") != io::schema_version)
    throw std::invalid_argument("unsupported config schema " + cfg.at("schema").dump());
  if ((args.empty() || args.front().rfind("-", 0) == 0) && cfg.contains("command"))
    args.insert(args.begin(), cfg.at("command").get<std::string>());
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "schema" || key == "command") continue;
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& v : value) args.push_back(token(v));
    } else {
      args.push_back(flag);
      args.push_back(token(value));
    }
  }
  return args;
}

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("REVHLS_OUT"); env && *env) return env;
  return "revhls_out";
}

struct Common {
  std::string out_dir;
  std::uint64_t seed = 0;
  Params p;
};

void add_params(CLI::App* app, Params& p, bool with_k = true) {
  app->add_option("--m", p.m, "diffusion exponent m > 0")->required();
  if (with_k) app->add_option("--k", p.k, "interaction exponent k > 0")->required();
  app->add_option("--d", p.d, "dimension d >= 1")->required();
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out_dir, "output directory (default: $REVHLS_OUT or ./revhls_out)");
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

void add_solver(CLI::App* app, SolverConfig& cfg, std::string& method) {
  app->add_option("--points", cfg.grid.points, "grid annuli")->capture_default_str();
  app->add_option("--r-min", cfg.grid.r_min, "innermost edge")->capture_default_str();
  app->add_option("--r-max", cfg.grid.r_max, "outer edge")->capture_default_str();
  app->add_option("--max-iters", cfg.max_iters, "iteration cap")->capture_default_str();
  app->add_option("--tol", cfg.el_tolerance, "Euler-Lagrange residual tolerance")->capture_default_str();
  app->add_option("--initial-atom", cfg.initial_atom, "starting atom mass")->capture_default_str();
  app->add_option("--max-restarts", cfg.max_restarts, "grid extensions when mass leaks")->capture_default_str();
  app->add_option("--method", method, "fixed-point | eg")->check(CLI::IsMember({"fixed-point", "eg"}));
}

SolverMethod parse_method(const std::string& m) {
  return m == "eg" ? SolverMethod::exponentiated_gradient : SolverMethod::fixed_point;
}

void require_zone2(const Params& p) {
  if (!in_zone2(p.m, p.k, p.d)) {
    std::ostringstream os;
    os << "(m, k, d) = (" << p.m << ", " << p.k << ", " << p.d << ") is not in Zone II, label "
       << to_string(classify(p.m, p.k, p.d).zone);
    throw ZoneError(os.str());
  }
}

struct CertificateTally {
  std::size_t count = 0;
  std::size_t failed = 0;
  double worst_slack = INFINITY;
  json first_failure;

  void add(const BoundCertificate& c) {
    ++count;
    worst_slack = std::min(worst_slack, std::min(c.slack, c.upper_slack));
    if (!c.passed()) {
      if (!failed) first_failure = io::to_json(c);
      ++failed;
    }
  }
  json to_json() const {
    json j = {{"count", count}, {"failed", failed}, {"worst_slack", io::number(worst_slack)}};
    if (failed) j["first_failure"] = first_failure;
    return j;
  }
};

int finish(std::ostream& out, json doc, const std::vector<std::string>& failures, int fail_code) {
  doc["status"] = failures.empty() ? "pass" : "fail";
  doc["failures"] = failures;
  out << io::document(std::move(doc)).dump(2) << "\n";
  return failures.empty() ? exit_ok : fail_code;
}

// --------------------------------------------------------------------------

int cmd_classify(const Common& c, std::ostream& out) {
  const auto label = classify(c.p.m, c.p.k, c.p.d);
  json doc = {{"command", "classify"}, {"params", io::to_json(c.p)}, {"label", io::to_json(label)}};
  doc["thresholds"] = {{"fair_competition", fair_competition_m(c.p.k, c.p.d)},
                       {"zone", zone_threshold(c.p.k, c.p.d)},
                       {"nn2017", nn2017_m(c.p.k, c.p.d)},
                       {"bounded", bounded_threshold(c.p.d)}};
  if (label.zone == Zone::II) doc["criteria"] = io::to_json(condensation_criteria(c.p.m, c.p.k, c.p.d));
  const auto dir = output_dir(c.out_dir);
  io::write_file(dir, "classify.json", io::document(doc).dump(2));
  return finish(out, std::move(doc), {}, exit_certificate);
}

int cmd_sweep(const Common& c, const SweepSpec& spec, std::ostream& out) {
  const auto cells = sweep(spec);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& cell : cells) ++counts[static_cast<int>(cell.label.zone)];
  const auto dir = output_dir(c.out_dir);
  io::write_file(dir, "sweep.csv", sweep_csv(cells));
  json doc = {{"command", "sweep"},
              {"d", spec.d},
              {"m_range", {spec.m_lo, spec.m_hi}},
              {"k_range", {spec.k_lo, spec.k_hi}},
              {"steps", spec.steps},
              {"cells", cells.size()},
              {"zone_counts", {{"I", counts[0]}, {"II", counts[1]}, {"III", counts[2]}, {"boundary", counts[3]}}},
              {"csv", (dir / "sweep.csv").string()}};
  io::write_file(dir, "sweep.json", io::document(doc).dump(2));
  return finish(out, std::move(doc), {}, exit_certificate);
}

int cmd_bound(const Common& c, std::size_t samples, const std::string& form_name, std::ostream& out) {
  require_zone2(c.p);
  const ConstantForm form = form_name == "corrected" ? ConstantForm::corrected : ConstantForm::printed;
  CertificateTally em, fe, dm, de;
  std::mt19937_64 rng(c.seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto rho = random_decreasing_density(c.p.d, rng);
    em.add(entropy_moment_lower_bound(rho, c.p, form));
    fe.add(free_energy_lower_bound(rho, c.p, form));
    const auto dp = dyadic_decompose(rho);
    dm.add(check_dyadic_moment(dp, rho, c.p));
    de.add(check_dyadic_entropy(dp, rho, c.p, form));
  }
  json doc = {{"command", "bound"},
              {"params", io::to_json(c.p)},
              {"form", to_string(form)},
              {"samples", samples},
              {"seed", c.seed},
              {"constants",
               {{"entropy_moment_printed", io::number(lower_bound_constant(c.p, ConstantForm::printed))},
                {"entropy_moment_corrected", io::number(lower_bound_constant(c.p, ConstantForm::corrected))},
                {"free_energy_printed", io::number(free_energy_bound(c.p, ConstantForm::printed))},
                {"free_energy_corrected", io::number(free_energy_bound(c.p, ConstantForm::corrected))},
                {"holder_exponent_a", holder_exponent_a(c.p)}}},
              {"certificates",
               {{"entropy_moment", em.to_json()},
                {"free_energy", fe.to_json()},
                {"dyadic_moment", dm.to_json()},
                {"dyadic_entropy", de.to_json()}}}};
  std::vector<std::string> failures;
  for (const auto& [name, t] : {std::pair{"entropy_moment", &em}, {"free_energy", &fe}, {"dyadic_moment", &dm},
                                {"dyadic_entropy", &de}})
    if (t->failed) failures.push_back(std::string(name) + ": " + std::to_string(t->failed) + " of " +
                                      std::to_string(t->count) + " failed");
  io::write_file(output_dir(c.out_dir), "bound.json", io::document(doc).dump(2));
  return finish(out, std::move(doc), failures, exit_certificate);
}

int cmd_hls(const Common& c, bool sharp, std::size_t samples, const SolverConfig& cfg, std::ostream& out) {
  require_zone2(c.p);
  json doc = {{"command", "hls"}, {"params", io::to_json(c.p)}, {"samples", samples}, {"seed", c.seed}};
  const double certified = certified_hls_constant(c.p);
  doc["certified_c0"] = io::number(certified);
  double c0 = certified;
  std::vector<std::string> failures;
  if (sharp) {
    const auto res = minimize_zone2(c.p, cfg);
    doc["minimizer"] = io::to_json(res);
    if (!res.converged) throw Failure(exit_convergence, "minimizer did not converge for the sharp constant");
    c0 = hls_constant(c.p, res.report.free_energy);
    doc["sharp_c0"] = io::number(c0);
    if (!(c0 >= certified)) failures.push_back("sharp constant below the certified constant");
  }
  doc["mode"] = sharp ? "sharp" : "certified";
  CertificateTally suite, family;
  std::mt19937_64 rng(c.seed);
  for (std::size_t s = 0; s < samples; ++s) suite.add(verify_reversed_hls(random_decreasing_density(c.p.d, rng), c.p, c0));
  for (double gap : {0.25, 1.0, 3.0})
    for (int j : {10, 20, 40}) family.add(verify_reversed_hls(dyadic_power_density(c.p.d, c.p.k + gap, j), c.p, c0));
  doc["certificates"] = {{"suite", suite.to_json()}, {"dyadic_family", family.to_json()}};
  if (suite.failed) failures.push_back("suite: " + std::to_string(suite.failed) + " failed");
  if (family.failed) failures.push_back("dyadic family: " + std::to_string(family.failed) + " failed");
  io::write_file(output_dir(c.out_dir), "hls.json", io::document(doc).dump(2));
  return finish(out, std::move(doc), failures, exit_certificate);
}

int cmd_minimize(const Common& c, const std::string& zone, SolverConfig cfg, std::ostream& out) {
  const Problem problem = zone == "2" ? Problem::zone2 : zone == "3" ? Problem::zone3 : Problem::rescaled;
  cfg.seed = c.seed;
  const auto res = minimize(problem, c.p, cfg);
  const auto dir = output_dir(c.out_dir);
  json doc = {{"command", "minimize"}, {"result", io::to_json(res)}};
  const auto profile = lower_bound_profile_check(res);
  doc["profile_check"] = io::to_json(profile);
  io::write_file(dir, "minimize.json", io::document(doc).dump(2));
  io::write_file(dir, "density.csv", io::density_csv(res.density));
  io::write_file(dir, "convergence.csv", io::convergence_csv(res.log));
  doc.erase("result");
  doc["result"] = io::to_json(res);
  doc["result"].erase("density");
  if (!res.converged || !res.el_exterior_ok) {
    std::vector<std::string> f{"solver stopped with EL residual " + std::to_string(res.el_residual) +
                               (res.el_exterior_ok ? "" : " and a violated EL inequality")};
    return finish(out, std::move(doc), f, exit_convergence);
  }
  std::vector<std::string> failures;
  if (!(res.virial_defect_r <= 1e-4)) failures.push_back("virial defect " + std::to_string(res.virial_defect_r));
  if (!profile.passed()) failures.push_back("inner profile slope check failed");
  return finish(out, std::move(doc), failures, exit_certificate);
}

int cmd_zone1(const Common& c, double beta, int j_max, std::vector<int> j_list, std::ostream& out) {
  Zone1Family fam{std::isnan(beta) ? Zone1Family::midpoint_beta(c.p) : beta, j_max, c.p};
  const auto w = zone1_witness(fam);
  if (j_list.empty()) j_list = {10, 20, 40, 60};
  std::sort(j_list.begin(), j_list.end());
  const auto curve = zone1_free_energy_curve(fam, j_list);
  const double limit = dyadic_interaction_limit(c.p, fam.beta);
  std::vector<std::string> failures;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i].free_energy < curve[i - 1].free_energy)) failures.push_back("free energy not decreasing");
  for (const auto& pt : curve)
    if (!(pt.interaction <= limit + 1e-6)) failures.push_back("interaction exceeds its limit at j_max " +
                                                              std::to_string(pt.j_max));
  const double rel = std::abs(w.growth_ratio / w.predicted_ratio - 1.0);
  if (!(rel <= 0.01)) failures.push_back("entropy growth ratio off by " + std::to_string(rel));
  json pts = json::array();
  for (const auto& pt : curve) pts.push_back(io::to_json(pt));
  json doc = {{"command", "zone1"}, {"params", io::to_json(c.p)}, {"beta", fam.beta},
              {"j_max", fam.j_max}, {"witness", io::to_json(w)}, {"curve", pts},
              {"interaction_limit", io::number(limit)}};
  const auto dir = output_dir(c.out_dir);
  io::write_file(dir, "zone1.json", io::document(doc).dump(2));
  io::write_file(dir, "zone1.csv", io::curve_csv(curve));
  doc["witness"].erase("entropy_partial");
  return finish(out, std::move(doc), failures, exit_certificate);
}

int cmd_toy(const Common& c, double gamma, const std::string& potential, const std::string& gamma_range,
            std::size_t steps, const GridSpec& grid, std::ostream& out) {
  ToyModel tm{parse_potential(potential), gamma, c.p};
  tm.validate();
  std::vector<double> gammas;
  if (gamma_range.empty()) {
    gammas.push_back(gamma);
  } else {
    const auto [lo, hi] = parse_range(gamma_range);
    if (!(lo > 0.0 && hi > lo) || steps < 2) throw std::invalid_argument("gamma range needs 0 < lo < hi, steps >= 2");
    for (std::size_t i = 0; i < steps; ++i)
      gammas.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(steps - 1)));
  }
  std::vector<std::string> failures;
  json rows = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17) << "gamma,atom,ac_mass,C,el_residual,criterion,criterion_holds,grid_artifact\n";
  double prev_ac = -1.0;
  for (double g : gammas) {
    tm.gamma = g;
    const auto s = toy_model_solve(tm, grid);
    json row = io::to_json(s);
    row["gamma"] = g;
    rows.push_back(row);
    csv << g << "," << s.atom << "," << s.ac_mass << "," << s.multiplier << "," << s.el_residual << ","
        << s.criterion << "," << s.criterion_holds << "," << s.grid_artifact << "\n";
    const std::string at = " at gamma " + std::to_string(g);
    if (!(s.el_residual <= 1e-8)) failures.push_back("EL residual " + std::to_string(s.el_residual) + at);
    if (!(std::abs(total_mass(s.profile) - 1.0) <= 1e-10)) failures.push_back("mass not conserved" + at);
    if (s.criterion_holds && !(s.atom > 0.0)) failures.push_back("published criterion holds without an atom" + at);
    if (s.ac_mass < prev_ac) failures.push_back("a.c. mass decreased" + at);
    prev_ac = s.ac_mass;
  }
  json doc = {{"command", "toy"}, {"m", c.p.m}, {"d", c.p.d}, {"potential", tm.potential.describe()},
              {"grid", io::to_json(grid)}, {"solutions", rows}};
  const auto dir = output_dir(c.out_dir);
  io::write_file(dir, "toy.json", io::document(doc).dump(2));
  io::write_file(dir, "toy_sweep.csv", csv.str());
  return finish(out, std::move(doc), failures, exit_certificate);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  auto report = [&](int code, const std::string& msg) {
    json doc = {{"status", "error"}, {"exit_code", code}, {"error", msg}};
    err << io::document(doc).dump() << "\n";
    return code;
  };
  CLI::App app{"Free energies with reversed HLS bounds: classification, certificates, minimizers."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  app.add_option("--config", "JSON file whose keys are flag names (\"schema\": 1); command-line flags win");
  app.footer(
      "Exit codes: 0 all certificates pass, 1 certificate failure, 2 usage, 3 parameters in the wrong zone,\n"
      "4 solver did not converge, 5 internal error.");

  Common c;
  SweepSpec spec;
  std::string m_range = "0:1.6", k_range = "0:6";
  std::size_t samples = 100;
  std::string form = "printed";
  bool sharp = false;
  bool certified = false;
  SolverConfig cfg;
  std::string method = "fixed-point";
  std::string zone = "2";
  double beta = NAN;
  int j_max = 60;
  std::vector<int> j_list;
  double gamma = 1.0;
  std::string potential;
  std::string gamma_range;
  std::size_t gamma_steps = 25;
  GridSpec toy_grid{2048, 1e-6, 32.0};

  auto* classify_cmd = app.add_subcommand("classify", "zone and flags of (m, k, d); writes classify.json");
  add_params(classify_cmd, c.p);
  add_common(classify_cmd, c);

  auto* sweep_cmd = app.add_subcommand(
      "sweep",
      "zone raster over (m, k) cell centres; writes sweep.csv with columns "
      "m,k,zone,fair_competition,nn2017_curve,bounded_optimizers,abs_continuous,side_fair,side_zone,"
      "side_nn2017,side_one,side_bounded (sides: +1 above, -1 below, 0 on the curve m = 1-k/d, d/(d+k), "
      "d/(2d+k), 1, (d-2)/d)");
  sweep_cmd->add_option("--d", spec.d, "dimension")->capture_default_str();
  sweep_cmd->add_option("--m-range", m_range, "lo:hi")->capture_default_str();
  sweep_cmd->add_option("--k-range", k_range, "lo:hi")->capture_default_str();
  sweep_cmd->add_option("--steps", spec.steps, "cells per axis")->capture_default_str();
  sweep_cmd->add_option("--threads", spec.threads, "workers (0: all cores)")->capture_default_str();
  add_common(sweep_cmd, c);

  auto* bound_cmd = app.add_subcommand("bound", "lower-bound constants and random-suite certificates (Zone II)");
  add_params(bound_cmd, c.p);
  bound_cmd->add_option("--chi", c.p.chi, "weight of the moment term")->capture_default_str();
  bound_cmd->add_option("--samples", samples, "random decreasing densities")->capture_default_str();
  bound_cmd->add_option("--form", form, "printed | corrected")->check(CLI::IsMember({"printed", "corrected"}));
  add_common(bound_cmd, c);

  auto* hls_cmd = app.add_subcommand("hls", "reversed HLS inequality on the random suite and the dyadic family");
  add_params(hls_cmd, c.p);
  hls_cmd->add_flag("--certified", certified, "use the certified constant (default)");
  hls_cmd->add_flag("--sharp", sharp, "use the constant from the numerical minimizer");
  hls_cmd->add_option("--samples", samples, "random decreasing densities")->capture_default_str();
  add_solver(hls_cmd, cfg, method);
  add_common(hls_cmd, c);

  auto* min_cmd = app.add_subcommand(
      "minimize",
      "minimize the free energy; writes minimize.json, density.csv (r_inner,r_outer,value,mass) and "
      "convergence.csv (iter,energy,residual,step)");
  min_cmd->add_option("--zone", zone, "2 | 3 | resc")->check(CLI::IsMember({"2", "3", "resc"}))->capture_default_str();
  add_params(min_cmd, c.p);
  add_solver(min_cmd, cfg, method);
  add_common(min_cmd, c);

  auto* z1_cmd = app.add_subcommand(
      "zone1",
      "dyadic witness of unboundedness; writes zone1.json and zone1.csv "
      "(j_max,entropy,interaction,moment_k,free_energy,quad_error)");
  add_params(z1_cmd, c.p);
  z1_cmd->add_option("--beta", beta, "ring decay exponent (default: window midpoint)");
  z1_cmd->add_option("--jmax", j_max, "truncation of the witness")->capture_default_str();
  z1_cmd->add_option("--j-list", j_list, "truncations for the free-energy curve (default 10 20 40 60)");
  add_common(z1_cmd, c);

  auto* toy_cmd = app.add_subcommand(
      "toy",
      "confinement model E_m + V/gamma; writes toy.json and toy_sweep.csv "
      "(gamma,atom,ac_mass,C,el_residual,criterion,criterion_holds,grid_artifact)");
  toy_cmd->add_option("--m", c.p.m, "0 < m < 1")->required();
  toy_cmd->add_option("--d", c.p.d, "dimension")->required();
  toy_cmd->add_option("--gamma", gamma, "confinement strength")->capture_default_str();
  toy_cmd->add_option("--potential", potential, "sum of c*r^p terms, e.g. \"r^2 + r^6\"")->required();
  toy_cmd->add_option("--gamma-range", gamma_range, "lo:hi logarithmic sweep");
  toy_cmd->add_option("--steps", gamma_steps, "sweep points")->capture_default_str();
  toy_cmd->add_option("--points", toy_grid.points, "grid annuli")->capture_default_str();
  toy_cmd->add_option("--r-min", toy_grid.r_min, "innermost edge")->capture_default_str();
  toy_cmd->add_option("--r-max", toy_grid.r_max, "outer edge (extended when needed)")->capture_default_str();
  add_common(toy_cmd, c);

  try {
    auto args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      app.exit(e, out, err);
      return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
      app.exit(e, out, err);
      return exit_ok;
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return exit_usage;
    }
    if (sharp && certified) throw std::invalid_argument("--sharp and --certified are exclusive");
    cfg.method = parse_method(method);
    cfg.validate();
    if (*toy_cmd) {
      if (!(c.p.m > 0.0 && c.p.m < 1.0)) throw std::invalid_argument("toy needs 0 < m < 1");
    } else if (!*sweep_cmd) {
      c.p.validate();
    }
    if (*classify_cmd) return cmd_classify(c, out);
    if (*sweep_cmd) {
      std::tie(spec.m_lo, spec.m_hi) = parse_range(m_range);
      std::tie(spec.k_lo, spec.k_hi) = parse_range(k_range);
      return cmd_sweep(c, spec, out);
    }
    if (*bound_cmd) return cmd_bound(c, samples, form, out);
    if (*hls_cmd) return cmd_hls(c, sharp, samples, cfg, out);
    if (*min_cmd) return cmd_minimize(c, zone, cfg, out);
    if (*z1_cmd) return cmd_zone1(c, beta, j_max, j_list, out);
    if (*toy_cmd) return cmd_toy(c, gamma, potential, gamma_range, gamma_steps, toy_grid, out);
    return report(exit_usage, "no subcommand");
  } catch (const Failure& e) {
    return report(e.code, e.what());
  } catch (const ZoneError& e) {
    return report(exit_zone, e.what());
  } catch (const std::invalid_argument& e) {
    return report(exit_usage, e.what());
  } catch (const std::exception& e) {
    return report(exit_internal, e.what());
  }
}

}  // namespace revhls::cli
