#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "revhls/cli.hpp"
#include "revhls/io.hpp"
#include "revhls/sampling.hpp"

using namespace revhls;
namespace fs = std::filesystem;
using io::json;

namespace {

struct Run {
  int code = 0;
  json doc;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.err = err.str();
  if (!out.str().empty()) r.doc = json::parse(out.str());
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("revhls_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("non-finite numbers round trip as strings") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(io::number(inf) == "inf");
  CHECK(io::number(-inf) == "-inf");
  CHECK(io::number(std::nan("")) == "nan");
  CHECK(io::read_number(io::number(inf)) == inf);
  CHECK(io::read_number(io::number(-inf)) == -inf);
  CHECK(std::isnan(io::read_number(io::number(std::nan("")))));
  CHECK(io::read_number(io::number(0.1)) == 0.1);
  CHECK_THROWS_AS(io::read_number(json("infinity")), std::invalid_argument);
  CHECK_THROWS_AS(io::read_number(json::array()), std::invalid_argument);
}

TEST_CASE("params and densities round trip through JSON text") {
  const Params p{0.7, 2.5, 3, 0.25};
  const auto q = io::params_from_json(json::parse(io::to_json(p).dump()));
  CHECK(q.m == p.m);
  CHECK(q.k == p.k);
  CHECK(q.d == p.d);
  CHECK(q.chi == p.chi);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_decreasing_density(1 + t % 3, rng, {.atom_probability = 0.5});
    const auto back = io::density_from_json(json::parse(io::to_json(rho).dump()));
    CHECK(back.dim() == rho.dim());
    CHECK(back.atom() == rho.atom());
    REQUIRE(back.size() == rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      CHECK(back.values()[i] == rho.values()[i]);
      CHECK(back.edges()[i + 1] == rho.edges()[i + 1]);
    }
  }
  CHECK(io::document(json::object())["schema"] == io::schema_version);
}

TEST_CASE("CSV writers") {
  const auto rho = RadialDensity::uniform_ball(1, 2.0).with_atom(0.25);
  const auto csv = io::density_csv(rho);
  CHECK(csv.rfind("r_inner,r_outer,value,mass\n", 0) == 0);
  CHECK(csv.find("\n0,0,") != std::string::npos);
  const std::vector<IterationRecord> log{{0, 1.0, 0.5, 0.0}, {1, 0.5, 0.1, 1.0}};
  const auto conv = io::convergence_csv(log);
  CHECK(conv.rfind("iter,energy,residual,step\n", 0) == 0);
  CHECK(std::count(conv.begin(), conv.end(), '\n') == 3);
}

TEST_CASE("classify: zone label and exit 0") {
  const auto dir = scratch("classify");
  const auto r = run({"classify", "--m", "0.9", "--k", "2", "--d", "1", "--out", dir.string()});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.doc["label"]["zone"] == "II");
  CHECK(r.doc["schema"] == 1);
  CHECK(io::read_json_file(dir / "classify.json")["label"] == r.doc["label"]);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == cli::exit_usage);
  CHECK(run({"bogus"}).code == cli::exit_usage);
  CHECK(run({"classify", "--m", "0.9", "--d", "1"}).code == cli::exit_usage);
  CHECK(run({"classify", "--m", "-1", "--k", "1", "--d", "1", "--out", scratch("usage").string()}).code ==
        cli::exit_usage);
  CHECK(run({"bound", "--m", "0.9", "--k", "2", "--d", "1", "--form", "other"}).code == cli::exit_usage);
}

TEST_CASE("wrong zone exits 3") {
  const auto dir = scratch("zone").string();
  const auto r = run({"minimize", "--zone", "3", "--m", "0.9", "--k", "2", "--d", "1", "--out", dir});
  CHECK(r.code == cli::exit_zone);
  CHECK(json::parse(r.err)["exit_code"] == 3);
  CHECK(run({"zone1", "--m", "0.9", "--k", "2", "--d", "1", "--out", dir}).code == cli::exit_zone);
}

TEST_CASE("minimize: converged run, then a capped run exits 4") {
  const auto dir = scratch("minimize");
  const auto ok = run({"minimize", "--zone", "2", "--m", "0.9", "--k", "2", "--d", "1", "--out", dir.string()});
  CHECK(ok.code == cli::exit_ok);
  CHECK(ok.doc["result"]["converged"] == true);
  for (const char* f : {"minimize.json", "density.csv", "convergence.csv"}) CHECK(fs::exists(dir / f));
  const auto saved = io::read_json_file(dir / "minimize.json");
  CHECK(saved["result"]["energies"] == ok.doc["result"]["energies"]);
  CHECK(saved["result"]["density"]["values"].size() == saved["result"]["grid"]["points"].get<std::size_t>() + 1);
  // k = 2 is solved in one fixed-point step, so use k = 3 here.
  const auto capped = run({"minimize", "--zone", "2", "--m", "0.9", "--k", "3", "--d", "1", "--max-iters", "1",
                           "--out", dir.string()});
  CHECK(capped.code == cli::exit_convergence);
  CHECK(capped.doc["result"]["converged"] == false);
}

TEST_CASE("certificate failures exit 1") {
  // The printed free-energy constant is not a lower bound in d = 2.
  const auto r = run({"bound", "--m", "0.9", "--k", "2", "--d", "2", "--samples", "20", "--out",
                      scratch("bound").string()});
  CHECK(r.code == cli::exit_certificate);
  CHECK(r.doc["status"] == "fail");
  const auto c = run({"bound", "--m", "0.9", "--k", "2", "--d", "2", "--samples", "20", "--form", "corrected",
                      "--out", scratch("bound").string()});
  CHECK(c.code == cli::exit_ok);
}

TEST_CASE("config file merges with flags; flags win") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << R"({"schema": 1, "command": "classify", "m": 0.3, "k": 1, "d": 3, "out": ")" << dir.string() << "\"}";
  }
  const auto a = run({"--config", (dir / "c.json").string()});
  CHECK(a.code == cli::exit_ok);
  CHECK(a.doc["label"]["zone"] == "I");
  const auto b = run({"--config", (dir / "c.json").string(), "classify", "--m", "0.9"});
  CHECK(b.code == cli::exit_ok);
  CHECK(b.doc["label"]["zone"] == "II");
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"schema": 2})";
  }
  CHECK(run({"--config", (dir / "bad.json").string(), "classify", "--m", "1", "--k", "1", "--d", "1"}).code ==
        cli::exit_usage);
  CHECK(run({"--config", (dir / "missing.json").string(), "classify"}).code == cli::exit_usage);
}

TEST_CASE("output directory falls back to REVHLS_OUT") {
  const auto dir = scratch("env");
  ::setenv("REVHLS_OUT", dir.string().c_str(), 1);
  CHECK(run({"classify", "--m", "0.9", "--k", "2", "--d", "1"}).code == cli::exit_ok);
  CHECK(fs::exists(dir / "classify.json"));
  const auto flag = scratch("env_flag");
  CHECK(run({"classify", "--m", "0.9", "--k", "2", "--d", "1", "--out", flag.string()}).code == cli::exit_ok);
  CHECK(fs::exists(flag / "classify.json"));
  ::unsetenv("REVHLS_OUT");
}

TEST_CASE("sweep writes the raster") {
  const auto dir = scratch("sweep");
  const auto r = run({"sweep", "--steps", "6", "--d", "2", "--out", dir.string()});
  CHECK(r.code == cli::exit_ok);
  std::ifstream f(dir / "sweep.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header ==
        "m,k,zone,fair_competition,nn2017_curve,bounded_optimizers,abs_continuous,side_fair,side_zone,side_nn2017,"
        "side_one,side_bounded");
  int rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  CHECK(rows == 36);
  CHECK(fs::exists(dir / "sweep.json"));
}

TEST_CASE("zone1 and toy subcommands") {
  const auto dir = scratch("constructions").string();
  const auto z = run({"zone1", "--m", "0.5", "--k", "0.5", "--d", "1", "--out", dir});
  CHECK(z.code == cli::exit_ok);
  const auto t = run({"toy", "--m", "0.2", "--d", "3", "--potential", "r^2 + r^6", "--gamma-range", "0.01:1",
                      "--steps", "5", "--out", dir});
  CHECK(t.code == cli::exit_ok);
  CHECK(fs::exists(fs::path(dir) / "toy_sweep.csv"));
  CHECK(run({"toy", "--m", "0.2", "--d", "3", "--potential", "r^-2", "--out", dir}).code == cli::exit_usage);
}
