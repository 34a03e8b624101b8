// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "run_config.hpp"

using namespace xbias::cli;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "xbias");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "xbias_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

double first_bound(const Run& r, const std::string& name) {
  const auto doc = Json::parse(r.out);
  for (const auto& b : doc["bounds"]) {
    if (b["name"] == name) return b["value"].get<double>();
  }
  FAIL("bound not found: " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("config text round trips") {
  RunConfig c;
  c.command = "simulate";
  c.model = "heavytail:3:2:e";
  c.rule = "softmax:0.5";
  c.sigma = 0.1;
  c.alphas = {1.0, 1.5, 2.0};
  c.n_list = {100, 1000};
  c.uniform = true;
  c.trials = 1234;
  c.seed = 42;
  c.workers = 3;
  c.format = "csv";
  std::istringstream in(serialize(c));
  CHECK(parse_config(in) == c);

  RunConfig d;
  std::istringstream empty_in(serialize(d));
  CHECK(parse_config(empty_in) == d);
  CHECK(serialize(d).find("seed = 1") != std::string::npos);
}

TEST_CASE("config errors name the line") {
  std::istringstream unknown("# comment\nmodel = gaussian\nspeed = 3\n");
  CHECK_THROWS_WITH_AS(parse_config(unknown, "run.cfg"), doctest::Contains("run.cfg:3:"), ConfigError);
  std::istringstream dup("n = 3\nn = 4\n");
  CHECK_THROWS_WITH_AS(parse_config(dup, "run.cfg"), doctest::Contains("run.cfg:2:"), ConfigError);
  std::istringstream no_eq("\n\ntrials 100\n");
  CHECK_THROWS_WITH_AS(parse_config(no_eq, "run.cfg"), doctest::Contains("run.cfg:3:"), ConfigError);
  std::istringstream bad_num("trials = many\n");
  CHECK_THROWS_WITH_AS(parse_config(bad_num, "run.cfg"), doctest::Contains("run.cfg:1:"), ConfigError);
}

TEST_CASE("list parsing") {
  CHECK(parse_real_list("1, 1.5,2", "alphas") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(parse_count_list("100,1000", "n_list") == std::vector<std::size_t>{100, 1000});
  CHECK_THROWS_AS(parse_count_list("10,-1", "n_list"), ConfigError);
}

TEST_CASE("bound command examples") {
  const auto g = run({"bound", "--family", "gaussian", "--sigma", "1", "--I", "0.6931"});
  REQUIRE(g.code == kOk);
  CHECK(first_bound(g, "gaussian") == doctest::Approx(std::sqrt(2.0 * 0.6931)).epsilon(1e-12));
  const auto ln2 = run({"bound", "--family", "gaussian", "--sigma", "1", "--I", "0.69314718055994531"});
  CHECK(first_bound(ln2, "gaussian") == doctest::Approx(1.17741).epsilon(1e-5));
  const auto zero = run({"bound", "--family", "gaussian", "--sigma", "1", "--I", "0"});
  CHECK(first_bound(zero, "gaussian") == 0.0);
  const auto p = run({"bound", "--family", "pnorm", "--beta", "2", "--uniform", "--n", "5", "--sigma", "1"});
  REQUIRE(p.code == kOk);
  CHECK(first_bound(p, "pnorm_uniform") == doctest::Approx(2.0).epsilon(1e-12));
  const auto sg = run({"bound", "--family", "subgamma", "--sigma", "2", "--c", "2", "--I", "0.69314718055994531"});
  CHECK(first_bound(sg, "subgamma") == doctest::Approx(3.74111).epsilon(1e-6));
}

TEST_CASE("beta below 2 is flagged as having no selection-free cap") {
  const auto r = run({"bound", "--family", "pnorm", "--beta", "1.5", "--I-alpha", "2", "--sigma", "1", "--n", "4"});
  REQUIRE(r.code == kOk);
  CHECK(Json::parse(r.out)["pnorm_cap"]["pnorm"] == "data-dependent only");
  CHECK(run({"bound", "--family", "pnorm", "--beta", "1.5", "--uniform", "--n", "4", "--sigma", "1"}).code == kConfigError);
  const auto ok = run({"bound", "--family", "pnorm", "--beta", "3", "--I-alpha", "2", "--sigma", "1", "--n", "4"});
  CHECK_FALSE(Json::parse(ok.out).contains("pnorm_cap"));
}

TEST_CASE("exit codes") {
  CHECK(run({"bound", "--family", "gaussian", "--sigma", "1", "--I", "1"}).code == kOk);
  const auto missing = run({"bound", "--sigma", "1"});
  CHECK(missing.code == kConfigError);
  CHECK(missing.err.find("family") != std::string::npos);
  CHECK(run({"bound", "--family", "gaussian", "--sigma", "-1", "--I", "1"}).code == kConfigError);
  CHECK(run({"frobnicate"}).code == kConfigError);
  const auto cfg = scratch("bad.cfg", "model = gaussian\nmodle = exponential\n");
  const auto bad = run({"--config", cfg.string(), "simulate"});
  CHECK(bad.code == kConfigError);
  CHECK(bad.err.find("bad.cfg:2:") != std::string::npos);
  // Finite only on [0, 1e-305]: no representable scale makes E psi(|X| / s) <= 1.
  const auto psi = scratch("narrow.csv", "u,psi\n0,0\n1e-305,1\n");
  const auto values = scratch("values.csv", "1\n2\n");
  const auto diverge = run({"norms", "--values", values.string(), "--psi", psi.string()});
  CHECK(diverge.code == kNumericDivergence);
}

TEST_CASE("flags override the config file") {
  const auto cfg = scratch("override.cfg", "family = gaussian\nsigma = 3\ninformation = 2\n");
  const auto file_only = run({"--config", cfg.string(), "bound"});
  REQUIRE(file_only.code == kOk);
  CHECK(first_bound(file_only, "gaussian") == doctest::Approx(6.0));
  const auto flagged = run({"--config", cfg.string(), "bound", "--sigma", "1"});
  CHECK(first_bound(flagged, "gaussian") == doctest::Approx(2.0));
  CHECK(Json::parse(flagged.out)["meta"]["seed"] == 1);
}

TEST_CASE("estimate command examples") {
  const auto identity = scratch("identity.csv", "0.5,0\n0,0.5\n");
  const auto r = run({"estimate", identity.string(), "--alpha", "2"});
  REQUIRE(r.code == kOk);
  const auto doc = Json::parse(r.out);
  CHECK(doc["dependence"]["I_alpha"]["2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["lemma1"]["bound_alpha_2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["lemma1"]["equal_alpha_2"] == true);
  CHECK(doc["dependence"]["deterministic"] == true);

  const auto diag = scratch("diag.csv", "0.333333333333333333,0,0\n0,0.333333333333333333,0\n0,0,0.333333333333333333\n");
  const auto d = Json::parse(run({"estimate", "--joint", diag.string(), "--alpha", "2"}).out);
  CHECK(d["dependence"]["I_alpha"]["2"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d["lemma1"]["bound_alpha_2"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

  const auto product = scratch("product.csv", "0.12,0.28\n0.18,0.42\n");
  const auto pr = Json::parse(run({"estimate", product.string()}).out);
  CHECK(pr["dependence"]["I"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pr["dependence"]["I_alpha"]["1"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pr["dependence"]["I_alpha"]["2"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  const auto broken = scratch("broken.csv", "0.5,0.1\n0,0.5\n");
  const auto b = run({"estimate", broken.string()});
  CHECK(b.code == kConfigError);
  CHECK(b.err.find("unit-mass") != std::string::npos);
}

TEST_CASE("simulate reports verdicts and heavy-tail constants") {
  const auto g = run({"simulate", "--model", "gaussian", "--rule", "argmax", "--n", "20", "--trials", "2000", "--seed", "7"});
  REQUIRE(g.code == kOk);
  const auto doc = Json::parse(g.out);
  CHECK(doc["meta"]["seed"] == 7);
  for (const auto& b : doc["bounds"]) CHECK(b["verdict"] == "DOMINATES");

  const auto h = run({"simulate", "--model", "heavytail:3:2:e", "--n", "1000", "--trials", "500"});
  REQUIRE(h.code == kOk);
  const auto hd = Json::parse(h.out);
  CHECK(hd["heavy_tail"]["a_n"].get<double>() == doctest::Approx(14.2).epsilon(0.01));
  CHECK(hd["heavy_tail"]["beta_norm"].get<double>() == doctest::Approx(4.315).epsilon(1e-4));

  const auto f = Json::parse(run({"simulate", "--rule", "fixed:3", "--n", "5", "--trials", "3000"}).out);
  for (const auto& b : f["bounds"]) CHECK(b["verdict"] == "DOMINATES");
}

TEST_CASE("sweep output") {
  const auto one = run({"sweep", "--n-list", "2", "--trials", "200"});
  REQUIRE(one.code == kOk);
  CHECK(one.out.rfind("n,empirical_bias,stderr,a_n,frechet_ratio,bound_pnorm,bound_mgf,ratio\n", 0) == 0);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 2);
}

TEST_CASE("reruns are byte-identical") {
  const std::vector<std::string> sim{"simulate", "--model", "exponential:2", "--rule", "softmax:0.5",
                                     "--n", "12", "--trials", "1500", "--seed", "3"};
  CHECK(run(sim).out == run(sim).out);
  auto threaded = sim;
  threaded.insert(threaded.begin(), {"--workers", "3"});
  CHECK(run(threaded).out == run(sim).out);
  const std::vector<std::string> sweep{"sweep", "--n-list", "10,50", "--trials", "500", "--seed", "5"};
  CHECK(run(sweep).out == run(sweep).out);
  const auto out_path = (fs::temp_directory_path() / "xbias_cli_tests" / "report.csv").string();
  auto to_file = sim;
  to_file.insert(to_file.begin(), {"--format", "csv", "--out", out_path});
  const auto written = run(to_file);
  CHECK(written.out.find("wrote " + out_path) != std::string::npos);
  std::ifstream in(out_path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("command,seed,", 0) == 0);
}
