#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace torusflow::cli;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("torusflow_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "torusflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("configuration parsing") {
  const RunConfig d = parse_config("{}");
  CHECK(d.nx == 32);
  CHECK(d.b == 2.0);
  CHECK(d.initial_condition.type == "random");

  const RunConfig c = parse_config(R"({"grid": {"nx": 16, "ny": 8}, "b": 3, "dt": 0.002})");
  CHECK(c.nx == 16);
  CHECK(c.ny == 8);
  CHECK(c.b == 3.0);
  CHECK(c.dt == 0.002);

  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"tolerances": {"mystery": 1e-3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"nx": 7}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dt": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"tolerances": {"mch2": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"curvature": {"k_range": [0, 1]}})"), ConfigError);
  CHECK_THROWS_AS(validate_for_command(parse_config(R"({"curvature": {"k_range": [1, 6]}})"), "curvature"), ConfigError);
  CHECK_NOTHROW(validate_for_command(parse_config(R"({"curvature": {"k_range": [1, 6]}})"), "simulate"));
  CHECK_THROWS_AS(parse_config(R"({"curvature": {"pairing": "other"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"initial_condition": {"type": "noise"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/torusflow.json"), ConfigError);

  try {
    parse_config(R"({"verify": {"extra": true}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("verify.extra") != std::string::npos);
  }
}

TEST_CASE("config digest ignores the output directory") {
  RunConfig a = parse_config("{}");
  RunConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  b.initial_condition.seed = 2;
  CHECK(config_digest(a) != config_digest(b));
  CHECK(canonical_config(a).find("output_dir") == std::string::npos);
  CHECK(parse_config(canonical_config(a)).dt == a.dt);
}

TEST_CASE("initial conditions") {
  RunConfig c = parse_config(R"({"grid": {"nx": 16, "ny": 16},
    "initial_condition": {"type": "constant", "value": [0.5, -1]}})");
  const auto u = make_initial(c);
  CHECK(u[0](3, 4) == 0.5);
  CHECK(u[1](7, 1) == -1.0);

  c = parse_config(R"({"grid": {"nx": 16, "ny": 16},
    "initial_condition": {"type": "modes", "modes": [{"n1": 1, "n2": 0, "amplitude": [0.1, 0], "kind": "sin"}]}})");
  const auto m = make_initial(c);
  CHECK(m[0](4, 0) == doctest::Approx(0.1));
  CHECK(m[1].sup_norm() == 0.0);

  c = parse_config(R"({"grid": {"nx": 16, "ny": 16}, "initial_condition": {"amplitude": 0.05}})");
  CHECK(make_initial(c).sup_norm() == doctest::Approx(0.05));
}

TEST_CASE("command line errors") {
  CHECK(run({"--version"}).out.find("0.1.0") != std::string::npos);
  CHECK(run({"--version"}).code == kPass);
  CHECK(run({}).code == kConfigError);
  CHECK(run({"explode"}).code == kConfigError);
  CHECK(run({"simulate", "--bogus"}).code == kConfigError);
  CHECK(run({"simulate", "--config", "/nonexistent/config.json"}).code == kConfigError);

  TempDir dir;
  const fs::path bad = write_config(dir.path(), "bad.json", R"({"grid": {"nx": 16, "ny": 16}, "typo": 1})");
  const Result r = run({"simulate", "--config", bad.string(), "--out", (dir.path() / "o").string()});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("typo") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path() / "o" / "trajectory.csv"));

  const fs::path malformed = write_config(dir.path(), "malformed.json", R"({"grid": )");
  CHECK(run({"simulate", "--config", malformed.string()}).code == kConfigError);
  CHECK(run({"simulate", "--threads", "0", "--out", dir.path().string()}).code == kConfigError);
}

TEST_CASE("simulate writes stamped outputs") {
  TempDir dir;
  const fs::path cfg = write_config(dir.path(), "c.json",
                                    R"({"grid": {"nx": 16, "ny": 16}, "t_end": 0.02, "record_stride": 5})");
  const fs::path out = dir.path() / "run";
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", out.string()}).code == kPass);

  const std::string csv = slurp(out / "trajectory.csv");
  const std::string digest = config_digest(load_config(cfg));
  CHECK(csv.rfind("# torusflow 0.1.0 config=" + digest + "\nt,hamiltonian,h1_energy,sup_u\n", 0) == 0);

  const json report = json::parse(slurp(out / "conservation.json"));
  CHECK(report["tool"] == "torusflow");
  CHECK(report["version"] == "0.1.0");
  CHECK(report["config_digest"] == digest);
  CHECK(report["command"] == "simulate");
  CHECK(report["status"] == "completed");
  CHECK(report["records"] == 5);
  CHECK(report["pass"] == true);
  CHECK(report["hamiltonian_drift"].get<double>() <= 1e-6);
}

TEST_CASE("simulate exit codes for blow-up and failed gates") {
  TempDir dir;
  const fs::path blow = write_config(dir.path(), "blow.json", R"({"grid": {"nx": 16, "ny": 16},
    "initial_condition": {"amplitude": 50}, "dt": 0.01, "t_end": 1, "blowup_factor": 2})");
  const fs::path out = dir.path() / "blow";
  CHECK(run({"simulate", "--config", blow.string(), "--out", out.string()}).code == kRuntimeAbort);
  const json report = json::parse(slurp(out / "conservation.json"));
  CHECK(report["status"] == "blow_up");
  CHECK(report["pass"] == false);
  CHECK(fs::exists(out / "trajectory.csv"));

  const fs::path strict = write_config(dir.path(), "strict.json", R"({"grid": {"nx": 16, "ny": 16},
    "initial_condition": {"amplitude": 0.5}, "t_end": 0.05, "tolerances": {"hamiltonian_drift": 1e-30}})");
  CHECK(run({"simulate", "--config", strict.string(), "--out", (dir.path() / "s").string()}).code ==
        kToleranceFailure);

  // The energy gate only applies to b = 2.
  const fs::path other = write_config(dir.path(), "other.json", R"({"grid": {"nx": 16, "ny": 16}, "b": 3,
    "initial_condition": {"amplitude": 0.5}, "t_end": 0.05, "tolerances": {"hamiltonian_drift": 1e-30}})");
  CHECK(run({"simulate", "--config", other.string(), "--out", (dir.path() / "b3").string()}).code == kPass);
}

TEST_CASE("curvature sweep outputs") {
  TempDir dir;
  const fs::path cfg = write_config(dir.path(), "c.json",
                                    R"({"grid": {"nx": 32, "ny": 32}, "curvature": {"k_range": [1, 2], "basis": [1, 2]}})");
  const fs::path out = dir.path() / "curv";
  REQUIRE(run({"curvature", "--config", cfg.string(), "--out", out.string(), "--threads", "2"}).code == kPass);
  std::istringstream csv(slurp(out / "curvature.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'k') ++rows;
  CHECK(rows == 8);
  const json summary = json::parse(slurp(out / "curvature_summary.json"));
  CHECK(summary["max_closed_form_error"].get<double>() <= 1e-7);
  CHECK(summary["min_S"].get<double>() > 0.0);

  const fs::path empty = write_config(dir.path(), "e.json", R"({"grid": {"nx": 32, "ny": 32}, "curvature": {"k_range": []}})");
  const fs::path eout = dir.path() / "empty";
  REQUIRE(run({"curvature", "--config", empty.string(), "--out", eout.string()}).code == kPass);
  const std::string header = slurp(eout / "curvature.csv");
  CHECK(header.substr(header.find('\n') + 1) == "k1,k2,i,S_formula,S_direct,S_closed_form,gamma_terms,r_term\n");
  CHECK(json::parse(slurp(eout / "curvature_summary.json"))["min_S"].is_null());
}

TEST_CASE("verify marks non-metric parameters as expected failures") {
  TempDir dir;
  const fs::path cfg = write_config(dir.path(), "v.json",
                                    R"({"grid": {"nx": 32, "ny": 32}, "verify": {"b_list": [2, 3], "trials": 2}})");
  const fs::path out = dir.path() / "v";
  REQUIRE(run({"verify", "--config", cfg.string(), "--out", out.string()}).code == kPass);
  const json report = json::parse(slurp(out / "verify.json"));
  CHECK(report["pass"] == true);
  CHECK(report["uniqueness"]["b2_unique"] == true);
  for (const auto& row : report["uniqueness"]["rows"]) {
    const bool b3 = row["b"].get<double>() == 3.0;
    CHECK(row["expected_fail"] == b3);
  }
  CHECK(report["commuting_identity"]["max"].get<double>() <= 1e-10);
  CHECK(report["metric_compatibility"]["controls"][0]["expected_fail"] == true);
}

TEST_CASE("reduce1d and geodesic commands") {
  TempDir dir;
  const fs::path cfg = write_config(dir.path(), "r.json", R"({"grid": {"nx": 16, "ny": 16}, "dt": 0.005, "t_end": 0.05,
    "initial_condition": {"amplitude": 0.02}, "reduce1d": {"mch2_steps": 3}})");
  REQUIRE(run({"reduce1d", "--config", cfg.string(), "--out", (dir.path() / "r").string()}).code == kPass);
  CHECK(json::parse(slurp(dir.path() / "r" / "reduce1d.json"))["pass"] == true);

  const fs::path misaligned = write_config(dir.path(), "m.json", R"({"grid": {"nx": 16, "ny": 16}, "dt": 0.03, "t_end": 0.05})");
  CHECK(run({"reduce1d", "--config", misaligned.string(), "--out", (dir.path() / "m").string()}).code == kConfigError);

  REQUIRE(run({"geodesic", "--config", cfg.string(), "--out", (dir.path() / "g").string()}).code == kPass);
  const json geo = json::parse(slurp(dir.path() / "g" / "geodesic.json"));
  CHECK(geo["pass"] == true);
  CHECK(slurp(dir.path() / "g" / "geodesic.csv").find("t,min_det,body_momentum_drift,euler_mismatch") !=
        std::string::npos);
  CHECK(fs::exists(dir.path() / "g" / "diffeo_final.csv"));
}

TEST_CASE("reruns are byte-identical across thread counts") {
  TempDir dir;
  const fs::path cfg = write_config(dir.path(), "d.json", R"({"grid": {"nx": 32, "ny": 32}, "t_end": 0.02,
    "curvature": {"k_range": [1, 2]}, "verify": {"trials": 3}})");
  for (const std::string cmd : {"simulate", "curvature", "verify"}) {
    const fs::path a = dir.path() / (cmd + "_a"), b = dir.path() / (cmd + "_b");
    REQUIRE(run({cmd, "--config", cfg.string(), "--out", a.string(), "--threads", "1"}).code == kPass);
    REQUIRE(run({cmd, "--config", cfg.string(), "--out", b.string(), "--threads", "3"}).code == kPass);
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      REQUIRE(fs::exists(other));
      CHECK(slurp(entry.path()) == slurp(other));
    }
  }

  const fs::path s1 = dir.path() / "seed1", s2 = dir.path() / "seed2";
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", s1.string(), "--seed", "5"}).code == kPass);
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", s2.string(), "--seed", "6"}).code == kPass);
  CHECK(slurp(s1 / "trajectory.csv") != slurp(s2 / "trajectory.csv"));
}
