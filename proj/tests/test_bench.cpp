#include "doctest.h"

#include "slpg/bench.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace slpg;
using namespace slpg::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("slpg_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string &name) const { return (path / name).string(); }
};

std::string slurp(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    out.push_back(line);
  return out;
}

// Drops the trailing elapsed_s column of each trace row.
std::string strip_timing(const std::string &csv) {
  std::string out;
  for (const std::string &l : lines(csv))
    out += l.substr(0, l.rfind(',')) + "\n";
  return out;
}

std::string sparse_config(const TempDir &dir, int max_iter = 10000) {
  json j = {{"instance",
             {{"kind", "SparsePCA"},
              {"n", 40},
              {"p", 3},
              {"gamma_rule", {{"kind", "Direct"}, {"value", 0.05}}},
              {"seed", 5}}},
            {"options", {{"max_iter", max_iter}}},
            {"outputs",
             {{"trace_path", dir.file("trace.csv")}, {"summary_path", dir.file("summary.json")}}}};
  return j.dump();
}

} // namespace

TEST_CASE("config round trip is the identity") {
  RunConfig cfg;
  cfg.instance.kind = ProblemKind::L21PCA;
  cfg.instance.n = 77;
  cfg.instance.p = 5;
  cfg.instance.num_samples = 31;
  cfg.instance.gamma_rule = {GammaRule::Kind::BSqrt, 0.1};
  cfg.instance.seed = 0xdeadbeefcafeULL;
  cfg.instance.init = InitKind::RandomOrthonormal;
  cfg.options.tol = 3e-7;
  cfg.options.max_iter = 123;
  cfg.options.inner_cap = 7;
  cfg.options.c = 12.5;
  cfg.options.inner_solver = InnerSolver::Explicit;
  cfg.options.normal_kind = NormalKind::ExactPolar;
  cfg.options.eta0 = 0.125;
  cfg.options.fixed_eta = 0.01;
  cfg.options.merit_constants = MeritConstants{1.0, 2.0, 3.0};
  cfg.options.post_process = false;
  cfg.options.seed = 99;
  cfg.outputs.trace_path = "t.csv";

  const json j = to_json(cfg);
  const RunConfig back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(to_json(parse_config(j.dump())) == j);
  CHECK(back.instance.seed == 0xdeadbeefcafeULL);
  CHECK(back.options.eta0.value() == 0.125);
  CHECK_FALSE(back.outputs.summary_path.has_value());

  // defaults fill in for missing keys
  const RunConfig def = parse_config("{}");
  CHECK(def.options.tol == 1e-4);
  CHECK(def.options.max_iter == 10000);
  CHECK(def.options.inner_cap == 10);
  CHECK(def.options.c == 1000.0);
  CHECK_FALSE(def.options.eta0.has_value());
  CHECK(def.instance.num_samples == 200);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"options": {"tol": "small"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"options": {"tol": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"instance": {"kind": "Dense"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"instance": {"n": 3, "p": 5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"options": {"eta0": "Sometimes"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/slpg/config.json"), ConfigError);
  CHECK(parse_config(R"({"options": {"eta0": "Auto"}})").options.eta0 == std::nullopt);
}

TEST_CASE("format_real uses 17 significant digits and a dot") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(-0.25) == "-0.25");
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::pow(10.0, u(gen)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("bin_values groups values closer than the gap") {
  std::vector<Bin> bins = bin_values({3.0, 1.0, 1.0 + 5e-8, 2.0, 1.0 + 2e-7, 2.0 + 9e-8});
  REQUIRE(bins.size() == 4);
  CHECK(bins[0].value == 1.0);
  CHECK(bins[0].count == 2);
  CHECK(bins[1].count == 1);
  CHECK(bins[2].value == 2.0);
  CHECK(bins[2].count == 2);
  CHECK(bins[3].value == 3.0);
  int total = 0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    total += bins[i].count;
    if (i > 0)
      CHECK(bins[i].value > bins[i - 1].value);
  }
  CHECK(total == 6);
  CHECK(bins_csv(bins).rfind("bin_value,count\n", 0) == 0);
}

TEST_CASE("cmd_solve writes a trace with one row per iteration") {
  TempDir dir;
  spit(dir.file("cfg.json"), sparse_config(dir));
  std::ostringstream out, err;
  const int code = cmd_solve(dir.file("cfg.json"), out, err);
  CHECK(code == 0);
  const std::vector<std::string> rows = lines(slurp(dir.file("trace.csv")));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == kTraceHeader);
  const json summary = json::parse(slurp(dir.file("summary.json")));
  const int iterations = summary.at("iterations").get<int>();
  CHECK(static_cast<int>(rows.size()) == iterations + 2);
  CHECK(summary.at("terminated") == "Converged");
  for (int k = 0; k <= iterations; ++k)
    CHECK(rows[k + 1].substr(0, rows[k + 1].find(',')) == std::to_string(k));

  // summary equals the trace tail exactly
  std::vector<std::string> tail;
  std::stringstream ss(rows.back());
  std::string cell;
  while (std::getline(ss, cell, ','))
    tail.push_back(cell);
  CHECK(tail[2] == format_real(summary.at("fval_final").get<double>()));
  CHECK(tail[5] == format_real(summary.at("substationarity_final").get<double>()));
  CHECK(tail[6] == format_real(summary.at("feasibility_final").get<double>()));
  CHECK(summary.at("post_process").at("feasibility_after").get<double>() <= 1e-12);
  CHECK(summary.at("config_echo") == to_json(load_config(dir.file("cfg.json"))));
}

TEST_CASE("cmd_solve reruns reproduce the trace") {
  TempDir dir;
  spit(dir.file("cfg.json"), sparse_config(dir));
  std::ostringstream out, err;
  REQUIRE(cmd_solve(dir.file("cfg.json"), out, err) == 0);
  const std::string first = slurp(dir.file("trace.csv"));
  REQUIRE(cmd_solve(dir.file("cfg.json"), out, err) == 0);
  CHECK(strip_timing(first) == strip_timing(slurp(dir.file("trace.csv"))));
}

TEST_CASE("cmd_solve exits 2 at max_iter and 1 on a malformed config") {
  TempDir dir;
  json j = json::parse(sparse_config(dir, 1));
  j["instance"]["init"] = "RandomOrthonormal";
  spit(dir.file("cfg.json"), j.dump());
  std::ostringstream out, err;
  CHECK(cmd_solve(dir.file("cfg.json"), out, err) == 2);
  CHECK(lines(slurp(dir.file("trace.csv"))).size() == 3);

  TempDir bad;
  std::string text = sparse_config(bad);
  text.pop_back();
  spit(bad.file("cfg.json"), text);
  std::ostringstream out2, err2;
  CHECK(cmd_solve(bad.file("cfg.json"), out2, err2) == 1);
  CHECK_FALSE(err2.str().empty());
  CHECK_FALSE(fs::exists(bad.file("trace.csv")));
  CHECK_FALSE(fs::exists(bad.file("summary.json")));
}

TEST_CASE("output directory override") {
  TempDir dir, redirect;
  json j = json::parse(sparse_config(dir));
  j["outputs"]["trace_path"] = "nested/trace.csv";
  j["outputs"]["summary_path"] = "summary.json";
  spit(dir.file("cfg.json"), j.dump());
  ::setenv(kOutputDirEnv, redirect.path.c_str(), 1);
  std::ostringstream out, err;
  const int code = cmd_solve(dir.file("cfg.json"), out, err);
  ::unsetenv(kOutputDirEnv);
  CHECK(code == 0);
  CHECK(fs::exists(redirect.file("trace.csv")));
  CHECK(fs::exists(redirect.file("summary.json")));
}

TEST_CASE("cmd_compare skips the explicit variant for l1") {
  TempDir dir;
  spit(dir.file("cfg.json"), sparse_config(dir));
  std::ostringstream out, err;
  CHECK(cmd_compare(dir.file("cfg.json"), out, err) == 0);
  const json table = json::parse(slurp(dir.file("summary.json")));
  REQUIRE(table.size() == compare_variants().size());
  CHECK(table[1].at("skipped") == true);
  CHECK(table[0].at("skipped") == false);
  CHECK(table[2].at("skipped") == false);
  CHECK(fs::exists(dir.file("trace.FixedPoint+FirstOrder.csv")));
  CHECK_FALSE(fs::exists(dir.file("trace.Explicit+FirstOrder.csv")));
  CHECK(lines(out.str()).size() == 4);
}

TEST_CASE("cmd_compare on a smooth instance agrees across variants") {
  RunConfig cfg;
  cfg.instance.kind = ProblemKind::PCA;
  cfg.instance.n = 50;
  cfg.instance.p = 3;
  cfg.instance.init = InitKind::RandomOrthonormal;
  cfg.options.tol = 1e-8;
  const std::vector<CompareRow> rows = run_compare(cfg);
  REQUIRE(rows.size() == 3);
  for (const CompareRow &r : rows) {
    CHECK_FALSE(r.skipped);
    CHECK(r.summary.terminated == "Converged");
    CHECK(std::abs(r.objective_final - rows[0].objective_final) <= 1e-6);
    CHECK(r.stationarity_residual.value() <= 1e-3);
  }
}

TEST_CASE("cmd_multistart bins") {
  TempDir dir;
  json j = {{"instance", {{"kind", "PCA"}, {"n", 30}, {"p", 2}, {"seed", 2}}},
            {"options", {{"seed", 4}}},
            {"outputs", {{"summary_path", dir.file("ms.json")}}}};
  spit(dir.file("cfg.json"), j.dump());

  std::ostringstream out, err;
  CHECK(cmd_multistart(dir.file("cfg.json"), 1, out, err) == 0);
  std::vector<std::string> rows = lines(out.str());
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(rows[1].find(',') + 1) == "1");

  std::ostringstream out5, err5;
  CHECK(cmd_multistart(dir.file("cfg.json"), 5, out5, err5, 2) == 0);
  rows = lines(out5.str());
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(rows[1].find(',') + 1) == "5");
  const json doc = json::parse(slurp(dir.file("ms.json")));
  CHECK(doc.at("runs").size() == 5);
  CHECK(doc.at("config_echo").at("options").at("tol") == kMultistartTol);

  // thread count does not change the result
  std::ostringstream out1, err1;
  cmd_multistart(dir.file("cfg.json"), 5, out1, err1, 1);
  CHECK(out1.str() == out5.str());

  std::ostringstream o, e;
  CHECK(cmd_multistart(dir.file("cfg.json"), 0, o, e) == 1);
}
