#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wellclust/cli.hpp"

using namespace wellclust;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("wellclust_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "wellclust");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("generate writes a reproducible instance") {
  TempDir dir("generate");
  const std::string out = dir.path.string();
  REQUIRE(run({"generate", "--family", "ring_of_cliques", "--k", "3", "--s", "4", "--out-dir", out, "--name",
               "ring"}) == kExitOk);
  const auto manifest = read_json(dir.path / "ring.manifest.json");
  CHECK(manifest["n"] == 12);
  CHECK(manifest["m"] == 21);
  const std::string edges = slurp(dir.path / "ring.edges");
  const std::string part = slurp(dir.path / "ring.partition");

  REQUIRE(run({"generate", "--spec", (dir.path / "ring.manifest.json").string(), "--out-dir", out, "--name",
               "again"}) == kExitOk);
  CHECK(slurp(dir.path / "again.edges") == edges);
  CHECK(slurp(dir.path / "again.partition") == part);

  CHECK(run({"generate", "--family", "ring_of_cliques", "--k", "3", "--s", "1", "--out-dir", out}) != kExitOk);
  CHECK(run({"generate", "--family", "bogus", "--out-dir", out}) == kExitUsage);
  CHECK(run({"frobnicate"}) == kExitUsage);
}

TEST_CASE("cluster with the spectral pipeline") {
  TempDir dir("cluster");
  const std::string out = dir.path.string();
  REQUIRE(run({"generate", "--family", "disjoint_cliques", "--k", "3", "--s", "6", "--out-dir", out, "--name",
               "dc"}) == kExitOk);
  const std::string input = (dir.path / "dc.edges").string();
  const std::string ref = (dir.path / "dc.partition").string();
  REQUIRE(run({"cluster", "--input", input, "--k", "3", "--ref", ref, "--out-dir", out}) == kExitOk);
  const auto report = read_json(dir.path / "report.json");
  CHECK(report["quality"]["max_conductance"].get<double>() == 0.0);
  CHECK(report["quality"]["matching"]["max_fraction"].get<double>() == 0.0);
  const std::string first = slurp(dir.path / "report.json");
  REQUIRE(run({"cluster", "--input", input, "--k", "3", "--ref", ref, "--out-dir", out}) == kExitOk);
  CHECK(slurp(dir.path / "report.json") == first);

  REQUIRE(run({"cluster", "--input", input, "--k", "3", "--out-dir", out, "--format", "csv"}) == kExitOk);
  const std::string csv = slurp(dir.path / "report.csv");
  CHECK(csv.rfind("cluster,size,volume,conductance\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  CHECK(run({"cluster", "--input", (dir.path / "missing.edges").string(), "--k", "3", "--out-dir", out}) ==
        kExitUsage);
  CHECK(run({"cluster", "--input", input, "--out-dir", out}) == kExitUsage);
}

TEST_CASE("cluster with the fast pipeline") {
  TempDir dir("fast");
  const std::string out = dir.path.string();
  REQUIRE(run({"cluster", "--family", "ring_of_cliques", "--k", "4", "--s", "8", "--pipeline", "fast",
               "--t-max", "1024", "--seed", "5", "--out-dir", out}) == kExitOk);
  const auto report = read_json(dir.path / "report.json");
  CHECK(report["per_t"].size() == 10);
  CHECK(report["quality"]["matching"]["max_fraction"].get<double>() <= 0.1);
  CHECK(report["run_config"]["gen"]["family"] == "ring_of_cliques");
}

TEST_CASE("certify exit codes") {
  TempDir dir("certify");
  const std::string out = dir.path.string();
  CHECK(run({"certify", "--family", "disjoint_cliques", "--k", "3", "--s", "5", "--out-dir", out}) == kExitOk);
  const auto report = read_json(dir.path / "certify.json");
  for (const auto& c : report["checks"]) CHECK(c["status"] == "pass");

  // Splitting each clique across clusters makes the structure matrix singular.
  REQUIRE(run({"generate", "--family", "disjoint_cliques", "--k", "2", "--s", "4", "--out-dir", out, "--name",
               "dc"}) == kExitOk);
  {
    std::ofstream bad(dir.path / "bad.partition");
    const int labels[] = {0, 0, 1, 1, 0, 0, 1, 1};
    for (int u = 0; u < 8; ++u) bad << u << ' ' << labels[u] << '\n';
  }
  CHECK(run({"certify", "--input", (dir.path / "dc.edges").string(), "--ref",
             (dir.path / "bad.partition").string(), "--k", "2", "--out-dir", out}) == kExitDegenerate);
  CHECK(run({"certify", "--input", (dir.path / "dc.edges").string(), "--k", "2", "--out-dir", out}) ==
        kExitUsage);
  CHECK(run({"certify", "--family", "disjoint_cliques", "--k", "3", "--s", "5", "--format", "csv", "--out-dir",
             out}) == kExitOk);
  CHECK(slurp(dir.path / "certify.csv").rfind("check,status,value,bound,hypothesis\n", 0) == 0);
}

TEST_CASE("bench reports timings") {
  TempDir dir("bench");
  REQUIRE(run({"bench", "--sizes", "200", "400", "--t-max", "64", "--out-dir", dir.path.string()}) == kExitOk);
  const auto report = read_json(dir.path / "bench.json");
  CHECK(report["rows"].size() == 2);
  CHECK(report["k"] == 4);
  CHECK(report.contains("loglog_slope"));
  CHECK(report["per_edge_spread"].get<double>() >= 1.0);
}
