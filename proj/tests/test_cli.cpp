#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = ACNS_CLI_PATH;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("acns_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string with(std::string s, const std::string& from, const std::string& to) {
  const auto k = s.find(from);
  REQUIRE(k != std::string::npos);
  return s.replace(k, from.size(), to);
}

// small noisy configuration shared by the tests below
std::string small_config(const fs::path& out) {
  return R"({"geometry": {"nx": 12, "ny": 8}, "galerkin": {"n": 12}, "time": {"T": 0.02, "dt": 0.002},
 "ensemble": {"paths": 3, "seed": 11},
 "noise": {"channels": [{"sigma": 0.3, "cutoff": 4, "h_mode": 0, "h_amp": 0.1}]},
 "control": {"kc": 1, "knots": [0.0], "coeffs": [0.02, 0, 0.01, 0, 0, 0, 0.01, 0, 0, 0]},
 "family": {"bound": 0.05},
 "cost": {"targets": "control", "target_control": [0.01, 0, 0.02, 0, 0, 0, 0, 0, 0, 0]},
 "optimizer": {"budget": 6}, "out": ")" + out.string() + "\"}";
}

}  // namespace

TEST_CASE("version and usage errors") {
  const auto d = scratch("usage");
  CHECK(run("--version", d / "log") == 0);
  CHECK(slurp(d / "log").find("0.1.0") != std::string::npos);
  CHECK(run("", d / "log") == 2);
  CHECK(run("simulate --paths 0", d / "log") == 2);
  CHECK(run("frobnicate", d / "log") == 2);
}

TEST_CASE("configuration errors exit with 2 and name the problem") {
  const auto d = scratch("config");
  write(d / "bad.json", "{\"time\": {\"dt\": -1}}");
  CHECK(run("simulate --config " + (d / "bad.json").string(), d / "log") == 2);
  CHECK(slurp(d / "log").find("time.dt") != std::string::npos);
  write(d / "broken.json", "{\"time\": {");
  CHECK(run("simulate --config " + (d / "broken.json").string(), d / "log") == 2);
  CHECK(slurp(d / "log").find("line") != std::string::npos);
  CHECK(run("simulate --config " + (d / "missing.json").string(), d / "log") == 2);
}

TEST_CASE("zero-everything simulate writes zero trajectories into a fresh directory") {
  const auto d = scratch("zero");
  const auto out = d / "nested" / "deeper";
  write(d / "zero.json", R"({"geometry": {"nx": 12, "ny": 8}, "galerkin": {"n": 12}, "time": {"T": 0.01, "dt": 0.002},
   "ensemble": {"paths": 2}, "initial": {"stripe_amp": 0.0, "u_amp": 0.0}, "out": ")" + out.string() + "\"}");
  REQUIRE(run("simulate --config " + (d / "zero.json").string(), d / "log") == 0);
  for (const char* f : {"path_0000.csv", "path_0001.csv", "trace_0000.csv", "manifest.json", "schema.json", "failures.json"})
    CHECK(fs::exists(out / f));
  std::ifstream in(out / "path_0000.csv");
  std::string line, cell;
  std::getline(in, line);
  std::vector<std::string> cols;
  for (std::stringstream h(line); std::getline(h, cell, ',');) cols.push_back(cell);
  int rows = 0, zero_cols = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream s(line);
    for (std::size_t c = 0; std::getline(s, cell, ','); ++c) {
      REQUIRE(c < cols.size());
      const auto& name = cols[c];
      if (name.rfind("beta_", 0) == 0 || name.rfind("chi_", 0) == 0 || name.rfind("s_", 0) == 0) {
        CHECK(std::stod(cell) == 0.0);
        ++zero_cols;
      }
    }
  }
  CHECK(zero_cols > 0);
  CHECK(rows == 6);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["command"] == "simulate");
  CHECK(m["path_seeds"].size() == 2);
  CHECK(nlohmann::json::parse(slurp(out / "failures.json")).empty());
}

TEST_CASE("simulate is byte-reproducible and thread-count independent") {
  const auto d = scratch("repro");
  write(d / "a.json", small_config(d / "a"));
  write(d / "b.json", small_config(d / "b"));
  write(d / "c.json", with(small_config(d / "c"), "\"seed\": 11", "\"seed\": 11, \"threads\": 2"));
  REQUIRE(run("simulate --config " + (d / "a.json").string(), d / "log") == 0);
  REQUIRE(run("simulate --config " + (d / "b.json").string(), d / "log") == 0);
  REQUIRE(run("simulate --config " + (d / "c.json").string(), d / "log") == 0);
  for (const char* f : {"path_0000.csv", "path_0001.csv", "path_0002.csv", "trace_0002.csv"}) {
    const auto a = slurp(d / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(d / "b" / f));
    CHECK(a == slurp(d / "c" / f));
  }
  // a different seed changes the noise
  REQUIRE(run("simulate --config " + (d / "a.json").string() + " --seed 12 --out " + (d / "s").string(), d / "log") == 0);
  CHECK(slurp(d / "a" / "path_0000.csv") != slurp(d / "s" / "path_0000.csv"));
}

TEST_CASE("verify flags backward Euler as failing the exact dissipation check") {
  const auto d = scratch("verify");
  const std::string base = R"({"geometry": {"nx": 16, "ny": 12}, "galerkin": {"n": 32},
   "time": {"T": 0.1, "dt": 0.002, "implicitness": IMPL}, "ensemble": {"paths": 4, "seed": 3},
   "audit": {"samples": 20}, "out": ")" + (d / "out").string() + "\"}";
  auto cfg = [&](const std::string& impl) { return with(base, "IMPL", impl); };
  write(d / "cn.json", cfg("0.5"));
  write(d / "be.json", cfg("1.0"));
  CHECK(run("verify --config " + (d / "cn.json").string(), d / "log") == 0);
  CHECK(slurp(d / "log").find("PASS dissipation") != std::string::npos);
  CHECK(run("verify --config " + (d / "be.json").string(), d / "log") == 1);
  CHECK(slurp(d / "log").find("FAIL dissipation") != std::string::npos);
  const auto v = nlohmann::json::parse(slurp(d / "out" / "verify.json"));
  CHECK(v.contains("checks"));
  write(d / "odd.json", R"({"time": {"T": 0.1, "dt": 0.003}})");
  CHECK(run("verify --config " + (d / "odd.json").string(), d / "log") == 2);
}

TEST_CASE("optimize: budget 1, checkpoint, resume continues monotonically") {
  const auto d = scratch("optimize");
  write(d / "one.json", with(small_config(d / "one"), "\"budget\": 6", "\"budget\": 1"));
  REQUIRE(run("optimize --config " + (d / "one.json").string(), d / "log") == 0);
  const auto rec1 = nlohmann::json::parse(slurp(d / "one" / "optimizer.json"));
  CHECK(rec1["history"].size() == 1);
  CHECK(fs::exists(d / "one" / "best.json"));

  write(d / "six.json", small_config(d / "six"));
  REQUIRE(run("optimize --config " + (d / "six.json").string() + " --resume " + (d / "one" / "optimizer.json").string(),
              d / "log") == 0);
  const auto rec6 = nlohmann::json::parse(slurp(d / "six" / "optimizer.json"));
  REQUIRE(rec6["history"].size() == 6);
  CHECK(rec6["history"][0]["params"] == rec1["history"][0]["params"]);
  double prev = 1e300;
  for (const auto& e : rec6["history"]) {
    const double b = e["best_so_far"].get<double>();
    CHECK(b <= prev);
    prev = b;
  }
  // a straight run with the same budget records the same sequence
  write(d / "straight.json", small_config(d / "straight"));
  REQUIRE(run("optimize --config " + (d / "straight.json").string(), d / "log") == 0);
  const auto recs = nlohmann::json::parse(slurp(d / "straight" / "optimizer.json"));
  CHECK(recs["history"] == rec6["history"]);
}
