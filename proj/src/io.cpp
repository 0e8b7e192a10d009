#include "revhls/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace revhls::io {

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

json to_json(const Params& p) {
  return {{"m", p.m}, {"k", p.k}, {"d", p.d}, {"chi", p.chi}};
}

json to_json(const GridSpec& g) {
  return {{"points", g.points}, {"r_min", g.r_min}, {"r_max", g.r_max}};
}

json to_json(const EnergyReport& r) {
  return {{"entropy", number(r.entropy)},       {"interaction", number(r.interaction)},
          {"moment_k", number(r.moment_k)},     {"moment_2", number(r.moment_2)},
          {"free_energy", number(r.free_energy)}, {"rescaled", number(r.rescaled)},
          {"quad_error", number(r.quad_error)}};
}

json to_json(const BoundCertificate& c) {
  json j = {{"kind", to_string(c.kind)},  {"params", to_json(c.params)},
            {"form", to_string(c.form)},  {"constant", number(c.constant)},
            {"lhs", number(c.lhs)},       {"slack", number(c.slack)},
            {"tolerance", c.tolerance},   {"passed", c.passed()}};
  if (!std::isnan(c.upper)) {
    j["upper"] = number(c.upper);
    j["upper_slack"] = number(c.upper_slack);
  }
  return j;
}

json to_json(const RadialDensity& rho) {
  return {{"dim", rho.dim()},
          {"atom", rho.atom()},
          {"edges", std::vector<double>(rho.edges().begin(), rho.edges().end())},
          {"values", std::vector<double>(rho.values().begin(), rho.values().end())}};
}

json to_json(const ZoneLabel& z) {
  return {{"zone", to_string(z.zone)},
          {"fair_competition", z.fair_competition},
          {"nn2017_curve", z.nn2017_curve},
          {"bounded_optimizers", z.bounded_optimizers},
          {"abs_continuous", z.abs_continuous},
          {"curve_sides", z.sides}};
}

json to_json(const CondensationCriteria& c) {
  return {{"bounded", c.bounded},         {"unique_bounded", c.unique_bounded},
          {"small_k", c.small_k},         {"scaling_gap", c.scaling_gap},
          {"abs_continuous", c.abs_continuous}, {"reasons", c.reasons}};
}

json to_json(const MinimizerResult& r, bool with_log) {
  json j = {{"problem", to_string(r.problem)},
            {"params", to_json(r.params)},
            {"energies", to_json(r.report)},
            {"atom", r.density.atom()},
            {"ac_mass", r.atom_a},
            {"el_residual", number(r.el_residual)},
            {"el_exterior_ok", r.el_exterior_ok},
            {"el_constant", number(r.el_constant)},
            {"virial_defect_r", number(r.virial_defect_r)},
            {"virial_defect_a", number(r.virial_defect_a)},
            {"support_radius", r.support_radius},
            {"iterations", r.iterations},
            {"restarts", r.restarts},
            {"converged", r.converged},
            {"grid", to_json(r.grid)},
            {"seed", r.seed},
            {"density", to_json(r.density)}};
  if (with_log) {
    json log = json::array();
    for (const auto& it : r.log)
      log.push_back({{"iter", it.iter}, {"energy", number(it.energy)}, {"residual", number(it.residual)},
                     {"step", it.step}});
    j["log"] = std::move(log);
  }
  return j;
}

json to_json(const Zone1Witness& w) {
  json ent = json::array();
  for (double e : w.entropy_partial) ent.push_back(number(e));
  return {{"moment_k", number(w.moment_k)},
          {"moment_tail", number(w.moment_tail)},
          {"predicted_ratio", w.predicted_ratio},
          {"growth_ratio", number(w.growth_ratio)},
          {"entropy_partial", std::move(ent)}};
}

json to_json(const CurvePoint& p) {
  return {{"j_max", p.j_max},
          {"entropy", number(p.entropy)},
          {"interaction", number(p.interaction)},
          {"moment_k", number(p.moment_k)},
          {"free_energy", number(p.free_energy)},
          {"quad_error", number(p.quad_error)}};
}

json to_json(const PotentialIntegral& v) {
  return {{"value", number(v.value)}, {"error", number(v.error)}, {"finite", v.finite}};
}

json to_json(const ToySolution& s, bool with_profile) {
  json j = {{"atom", s.atom},
            {"ac_mass", s.ac_mass},
            {"multiplier", s.multiplier},
            {"el_residual", number(s.el_residual)},
            {"m_integral", to_json(s.m_integral)},
            {"criterion", number(s.criterion)},
            {"criterion_holds", s.criterion_holds},
            {"capacity", to_json(s.capacity)},
            {"continuum_threshold", number(s.continuum_threshold)},
            {"grid_artifact", s.grid_artifact}};
  if (with_profile) j["profile"] = to_json(s.profile);
  return j;
}

Params params_from_json(const json& j) {
  Params p;
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  if (j.contains("m")) p.m = read_number(j.at("m"));
  if (j.contains("k")) p.k = read_number(j.at("k"));
  if (j.contains("d")) p.d = j.at("d").get<int>();
  if (j.contains("chi")) p.chi = read_number(j.at("chi"));
  p.validate();
  return p;
}

RadialDensity density_from_json(const json& j) {
  try {
    return RadialDensity(j.at("dim").get<int>(), j.at("atom").get<double>(),
                         j.at("edges").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed density: ") + e.what());
  }
}

json document(json body) {
  body["schema"] = schema_version;
  return body;
}

namespace {

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

}  // namespace

std::string density_csv(const RadialDensity& rho) {
  auto os = csv_stream();
  os << "r_inner,r_outer,value,mass\n";
  os << "0,0,inf," << rho.atom() << "\n";
  const auto masses = rho.masses();
  for (std::size_t i = 0; i < rho.size(); ++i)
    os << rho.inner_radius(i) << "," << rho.outer_radius(i) << "," << rho.values()[i] << "," << masses[i]
       << "\n";
  return os.str();
}

std::string convergence_csv(std::span<const IterationRecord> log) {
  auto os = csv_stream();
  os << "iter,energy,residual,step\n";
  for (const auto& it : log) os << it.iter << "," << it.energy << "," << it.residual << "," << it.step << "\n";
  return os.str();
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  auto os = csv_stream();
  os << "j_max,entropy,interaction,moment_k,free_energy,quad_error\n";
  for (const auto& p : curve)
    os << p.j_max << "," << p.entropy << "," << p.interaction << "," << p.moment_k << "," << p.free_energy
       << "," << p.quad_error << "\n";
  return os.str();
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return path;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace revhls::io
