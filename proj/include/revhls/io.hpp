#pragma once

// JSON and CSV serialization of results. JSON documents carry "schema": 1;
// non-finite numbers are written as the strings "inf", "-inf", "nan".

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "revhls/bounds.hpp"
#include "revhls/constructions.hpp"
#include "revhls/functionals.hpp"
#include "revhls/minimizer.hpp"
#include "revhls/radial_density.hpp"
#include "revhls/zones.hpp"

namespace revhls::io {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

json number(double x);
/// Inverse of number(); throws std::invalid_argument on other types.
double read_number(const json& j);

json to_json(const Params& p);
json to_json(const GridSpec& g);
json to_json(const EnergyReport& r);
json to_json(const BoundCertificate& c);
json to_json(const RadialDensity& rho);
json to_json(const ZoneLabel& z);
json to_json(const CondensationCriteria& c);
json to_json(const MinimizerResult& r, bool with_log = false);
json to_json(const Zone1Witness& w);
json to_json(const CurvePoint& p);
json to_json(const PotentialIntegral& v);
json to_json(const ToySolution& s, bool with_profile = false);

Params params_from_json(const json& j);
RadialDensity density_from_json(const json& j);

/// Adds "schema" to an object.
json document(json body);

/// r_inner,r_outer,value,mass (the atom as a first row with r = 0).
std::string density_csv(const RadialDensity& rho);
/// iter,energy,residual,step
std::string convergence_csv(std::span<const IterationRecord> log);
/// j_max,entropy,interaction,moment_k,free_energy,quad_error
std::string curve_csv(std::span<const CurvePoint> curve);

/// Writes text to dir/name, creating dir.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text);

/// Reads a JSON file; throws std::runtime_error with the path on failure.
json read_json_file(const std::filesystem::path& path);

}  // namespace revhls::io
