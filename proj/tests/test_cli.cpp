#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = SHIFTWALK_CLI_PATH;

struct TempDir {
  fs::path p;
  TempDir() {
    p = fs::temp_directory_path() /
        ("shiftwalk_cli_" + std::to_string(::getpid()) + "_" +
         std::to_string(rand()));
    fs::create_directories(p);
  }
  ~TempDir() { fs::remove_all(p); }
  std::string str() const { return p.string(); }
};

int run(const std::string& args) {
  std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json load(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  return json::parse(is);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli validate reports the map properties") {
  TempDir d;
  CHECK(run("validate --map example1 --eps 4 --delta 4 --out " + d.str()) ==
        0);
  auto j = load(d.p / "validate.json");
  CHECK(j["is_shift_periodic"] == true);
  CHECK(j["has_integer_spikes"] == true);
  auto manifest = load(d.p / "manifest.json");
  CHECK(manifest["command"] == "validate");
  CHECK(manifest["config"]["map"]["name"] == "example1");
}

TEST_CASE("cli rejects bad configurations with a config-error status") {
  TempDir d;
  CHECK(run("frobnicate") != 0);
  CHECK(run("trajectory --map example1 --eps 1 --delta 1 --steps 5 --out " +
            d.str()) != 0);  // missing required --x0
  CHECK(run("density --method nonsense --out " + d.str()) != 0);
  // randomized subcommand without a seed
  CHECK(run("fclt --kappa 1 --n 10 --paths 10 --out " + d.str()) != 0);
}

TEST_CASE("cli trajectory writes the iteration table") {
  TempDir d;
  CHECK(run("trajectory --map example1 --eps 0.01 --delta 0.01 --x0 0.9 "
            "--steps 50 --out " +
            d.str()) == 0);
  auto csv = slurp(d.p / "trajectory.csv");
  CHECK(csv.rfind("k,x,frac,y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);  // header + 51 rows
}

TEST_CASE("cli transitions matches the closed-form jump distribution") {
  TempDir d;
  CHECK(run("transitions --map example1 --eps 4 --delta 4 --samples 20000 "
            "--seed 3 --out " +
            d.str()) == 0);
  auto j = load(d.p / "transitions.json");
  CHECK(std::abs(j["exact"]["0"].get<double>() - 5.0 / 12.0) < 1e-12);
  CHECK(std::abs(j["exact"]["-1"].get<double>() - 7.0 / 24.0) < 1e-12);
  CHECK(std::abs(j["empirical"]["0"].get<double>() - 5.0 / 12.0) < 0.02);
}

TEST_CASE("cli artifacts are byte-identical for identical configs") {
  TempDir d1, d2;
  std::string args =
      "fclt --kappa 1 --n 200 --paths 200 --seed 42 --threads 2 --out ";
  CHECK(run(args + d1.str()) == 0);
  CHECK(run(args + d2.str()) == 0);
  CHECK(slurp(d1.p / "fclt.json") == slurp(d2.p / "fclt.json"));

  std::string targs =
      "transitions --map example1 --eps 0.01 --delta 0.01 --samples 5000 "
      "--seed 9 --out ";
  TempDir d3, d4;
  CHECK(run(targs + d3.str()) == 0);
  CHECK(run(targs + d4.str()) == 0);
  CHECK(slurp(d3.p / "transitions.json") == slurp(d4.p / "transitions.json"));
}

TEST_CASE("cli config file mirrors the flags") {
  TempDir d;
  std::ofstream cfg(d.p / "run.toml");
  cfg << "[transitions]\n"
      << "map = \"example1\"\n"
      << "eps = 4.0\n"
      << "delta = 4.0\n"
      << "out = \"" << d.str() << "\"\n";
  cfg.close();
  CHECK(run("--config " + (d.p / "run.toml").string() + " transitions") == 0);
  auto j = load(d.p / "transitions.json");
  CHECK(std::abs(j["exact"]["1"].get<double>() - 7.0 / 24.0) < 1e-12);
}

TEST_CASE("cli density and fp-convergence emit plateaus and envelopes") {
  TempDir d;
  CHECK(run("density --map example1 --eps 0.02 --delta 0.005 --method cond "
            "--out " +
            d.str()) == 0);
  auto j = load(d.p / "density.json");
  CHECK(j["nu"].get<double>() > 1.0);  // eps > delta tilts mass left

  TempDir d2;
  CHECK(run("fp-convergence --eps 1e-4 --delta 1e-4 --steps 20 --out " +
            d2.str()) == 0);
  auto csv = slurp(d2.p / "fp_convergence.csv");
  CHECK(csv.rfind("n,sup_distance,envelope\n", 0) == 0);
  CHECK(load(d2.p / "fp_convergence.json")["within_envelope"] == true);
}

TEST_CASE("cli reference-density reproduces the reference plateaus on a coarse grid") {
  TempDir d;
  CHECK(run("reference-density --grid 800 --out " + d.str()) == 0);
  auto j = load(d.p / "reference_density.json");
  CHECK(j["rows"].size() == 13);
  CHECK(j["max_abs_error"].get<double>() < 0.02);
}

TEST_CASE("cli fclt and ctrw report passing tests at moderate scale") {
  TempDir d;
  CHECK(run("fclt --kappa 10 --n 1000 --paths 1000 --seed 7 --threads 4 "
            "--out " +
            d.str()) == 0);
  auto j = load(d.p / "fclt.json");
  CHECK(j["alpha"].get<double>() == 2.0);
  CHECK(j["ks"]["reject"] == false);

  TempDir d2;
  CHECK(run("ctrw --eps 0.5 --delta 0.5 --m 200 --horizon 50 --paths 1000 "
            "--seed 8 --threads 4 --out " +
            d2.str()) == 0);
  auto c = load(d2.p / "ctrw.json");
  CHECK(std::abs(c["gamma"].get<double>() - 3.0 / 16.0) < 1e-12);
  CHECK(c["waiting_times"]["reject_5"] == false);
  CHECK(c["first_jump_ks"]["reject"] == false);
}
