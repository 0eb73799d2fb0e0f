#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lgt/cli.hpp"
#include "lgt/error.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lgt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = lgt::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

const std::string kStar = oracle::fixture("star.tree");
const std::string kDumbbell = oracle::fixture("dumbbell.tree");

}  // namespace

TEST_CASE("validate prints the node counts") {
  const Run r = cli({"validate", kStar});
  CHECK(r.code == 0);
  CHECK(r.err.find("valid tree: k=1, n=3") != std::string::npos);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "validate");
  CHECK(j.contains("version"));
  CHECK(j.contains("timestamp"));
  CHECK(j["config"]["seed"] == 1);
  CHECK(j["result"]["hidden"] == 1);
}

TEST_CASE("exit codes") {
  CHECK(cli({"frobnicate", kStar}).code == 1);
  CHECK(cli({"frobnicate", kStar}).err.find("UnknownCommand") != std::string::npos);
  CHECK(cli({"validate", "/no/such.tree"}).err.find("FileNotFound") != std::string::npos);
  CHECK(cli({"validate", "/no/such.tree"}).code == 1);
  CHECK(cli({"validate", oracle::fixture("invalid_cycle.tree")}).code == 1);
  CHECK(cli({"report-all", oracle::fixture("invalid_cycle.tree")}).code == 1);
  CHECK(cli({"validate"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"validate", kStar, "--units", "furlongs"}).code == 1);
}

TEST_CASE("error messages name the offending field") {
  const Run a = cli({"mi-conditional", kStar, "--samples", "10"});
  CHECK(a.code == 1);
  CHECK(a.err.find("--samples") != std::string::npos);
  CHECK(cli({"optimize-pi", kStar, "--grid", "0.5"}).err.find("--grid") != std::string::npos);
  CHECK(cli({"validate", kStar, "--seed", "0"}).err.find("--seed") != std::string::npos);
  CHECK(cli({"mi", kStar, "--pi", "1.5"}).err.find("--pi") != std::string::npos);
  CHECK(cli({"mi", kDumbbell, "--pi", "y1=0.5"}).err.find("MissingAssignment") != std::string::npos);
  CHECK(cli({"rate-check", kStar, "--ry", "0.5,x", "--rb", "0.1"}).err.find("--ry") != std::string::npos);
  CHECK(cli({"rate-check", kStar, "--ry", "0.5"}).err.find("--rb") != std::string::npos);
  CHECK(cli({"rate-check", kStar, "--ry", "0.5,0.5", "--rb", "0.1,0.1"}).code == 1);
  CHECK(cli({"synthesize", kStar, "--blocklen", "0"}).err.find("--blocklen") != std::string::npos);
}

TEST_CASE("mi reports both methods") {
  const json j = json::parse(cli({"mi", kStar, "--method", "both"}).out);
  const double c = j["result"]["closed_form"]["value"], d = j["result"]["direct"]["value"];
  CHECK(c == doctest::Approx(0.7294309951122715).epsilon(1e-12));
  CHECK(std::abs(c - d) < 1e-12);
  CHECK(j["result"]["abs_difference"].get<double>() < 1e-12);

  const json bits = json::parse(cli({"mi", kStar, "--units", "bits"}).out);
  CHECK(bits["result"]["direct"]["value"].get<double>() == doctest::Approx(d / std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("deterministic reports are byte-identical") {
  const std::vector<std::string> args{"mi-conditional", kDumbbell, "--samples", "5000", "--seed", "4", "--deterministic"};
  const Run a = cli(args), b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out).contains("timestamp") == false);
}

TEST_CASE("reports go to --out atomically") {
  const fs::path dir = fs::temp_directory_path() / "lgt_cli_test";
  fs::remove_all(dir);
  const fs::path file = dir / "sub" / "report.json";
  const Run r = cli({"covariance", kStar, "--out", file.string(), "--deterministic"});
  CHECK(r.code == 0);
  CHECK(r.out.find("covariance:") != std::string::npos);
  const json j = json::parse(slurp(file));
  CHECK(j["result"]["joint"].size() == 4);
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("enumerate-signs writes one file per member") {
  const fs::path dir = fs::temp_directory_path() / "lgt_enum_test";
  fs::remove_all(dir);
  const Run r = cli({"enumerate-signs", kDumbbell, "--out-dir", dir.string()});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["result"]["count"] == 4);
  CHECK(j["result"]["equivalent"] == true);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.path().extension() == ".tree";
  CHECK(files == 4);
  // Each written tree must load and validate.
  for (const auto& e : fs::directory_iterator(dir)) CHECK(cli({"validate", e.path().string()}).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path cfg = fs::temp_directory_path() / "lgt_cli_cfg.toml";
  std::ofstream(cfg) << "seed = 9\nsamples = 3000\n";
  const json j = json::parse(cli({"validate", kStar, "--config", cfg.string(), "--samples", "4000"}).out);
  CHECK(j["config"]["seed"] == 9);
  CHECK(j["config"]["samples"] == 4000);
  fs::remove(cfg);
}

TEST_CASE("rate-check echoes margins") {
  const json j = json::parse(cli({"rate-check", kStar, "--ry", "0.93", "--rb", "0.1", "--samples", "5000"}).out);
  const auto& q = j["result"]["inequalities"];
  REQUIRE(q.size() == 2);
  CHECK(q[0]["provided"] == 0.93);
  CHECK(q[1]["provided"].get<double>() == doctest::Approx(1.03));
  CHECK(j["result"]["all_satisfied"] == true);
}

TEST_CASE("optimize-pi and synthesize write CSV") {
  const fs::path dir = fs::temp_directory_path() / "lgt_csv_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK(cli({"optimize-pi", kStar, "--grid", "0.25", "--samples", "2000", "--csv", (dir / "c.csv").string()}).code == 0);
  std::istringstream csv(slurp(dir / "c.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "pi,value,std_error");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 5);

  CHECK(cli({"synthesize", kStar, "--ry", "0.6", "--rb", "0.3", "--blocklen", "2", "--runs", "10", "--samples", "2000",
             "--csv", (dir / "s.csv").string()})
            .code == 0);
  std::istringstream s(slurp(dir / "s.csv"));
  rows = 0;
  while (std::getline(s, line)) ++rows;
  CHECK(rows == 1 + 10 * 2 * 3);
  fs::remove_all(dir);
}

TEST_CASE("verify-constraints lists six checks") {
  const json j = json::parse(
      cli({"verify-constraints", kStar, "--blocklen", "2", "--samples", "2000", "--kl-samples", "500", "--cov-runs", "500"}).out);
  CHECK(j["result"]["constraints"].size() == 6);
  CHECK(j["result"]["synthesis"].contains("kl_estimate"));
}

TEST_CASE("report-all keeps going past failing sections") {
  const Run r = cli({"report-all", oracle::fixture("two_layer.tree"), "--samples", "2000", "--grid", "0.25", "--kl-samples", "200",
                     "--cov-runs", "100", "--deterministic"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["result"]["enumerate_signs"]["count"] == 64);
  CHECK(j["result"]["verify_constraints"].contains("error"));
}
