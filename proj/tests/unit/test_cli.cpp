#include "tonekit/cli.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "tonekit");
  std::ostringstream out, err;
  const int code = tonekit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

} // namespace

TEST_CASE("tone on the unit square") {
  const Run r = run({"tone", "--domain", "square:1", "--multiplier", "x", "--h", "0.0625"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["meta"]["h"].get<double>() == 0.0625);
  CHECK(j["meta"]["seed"].get<int>() == 20240917);
  CHECK(j["meta"]["config"]["domain"] == "square:1");
  const auto& res = j["results"][0];
  CHECK(res["value"].get<double>() == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(0.02));
  CHECK(res["units"] == "dimensionless");
  CHECK(res["bc"] == "neumann");
}

TEST_CASE("bessel subcommand") {
  const Run r = run({"bessel", "--n", "3"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& res : j["results"])
    if (res["name"] == "c_n") {
      found = true;
      CHECK(res["value"].get<double>() == doctest::Approx(2.08158).epsilon(1e-5));
    }
  CHECK(found);
}

TEST_CASE("exit codes") {
  CHECK(run({"tone", "--domain", "square:1", "--multiplier", "5", "--h", "0.25"}).code == 1);
  CHECK(run({"tone", "--domain", "pentagon:1"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"tone", "--domain", "square:1", "--h", "-1"}).code == 1);
  CHECK(run({"--help"}).code == 0);

  const Run sq = run({"bounds", "--domain", "square:1", "--multiplier", "x", "--h", "0.125"});
  CHECK(sq.code == 0);
  const Run disk = run({"bounds", "--domain", "disk:1", "--multiplier", "x", "--h", "0.125"});
  const nlohmann::json j = nlohmann::json::parse(disk.out);
  bool any_fail = false;
  for (const auto& res : j["results"])
    any_fail = any_fail || !res["pass"].get<bool>();
  CHECK(disk.code == (any_fail ? 2 : 0));

  const Run stretch =
      run({"distortion", "--map", "affine:4,0,0,1", "--domain", "disk:1", "--h", "0.125", "--max-balls", "1",
           "--directions", "2"});
  CHECK(stretch.code == 2);
}

TEST_CASE("config files and flag precedence") {
  const auto cfg = temp_file("tonekit_cli_test.cfg", "# tone settings\ndomain = square:1\nmultiplier = \"3*x\"\nh = 0.25\n");
  const Run a = run({"tone", "--config", cfg.string()});
  REQUIRE(a.code == 0);
  const double mu_a = nlohmann::json::parse(a.out)["results"][0]["value"].get<double>();
  const Run b = run({"tone", "--config", cfg.string(), "--multiplier", "x"});
  REQUIRE(b.code == 0);
  const nlohmann::json jb = nlohmann::json::parse(b.out);
  CHECK(jb["meta"]["config"]["multiplier"] == "x");
  CHECK(jb["results"][0]["value"].get<double>() == doctest::Approx(9.0 * mu_a).epsilon(1e-8));

  const auto bad = temp_file("tonekit_cli_bad.cfg", "domian = square:1\n");
  const Run c = run({"tone", "--config", bad.string()});
  CHECK(c.code == 1);
  CHECK(c.err.find("domian") != std::string::npos);
  std::filesystem::remove(cfg);
  std::filesystem::remove(bad);
}

TEST_CASE("reports are byte-identical across runs") {
  const std::vector<std::string> args{"distortion", "--map", "mobius:translate 2 0;invert", "--domain", "disk:1",
                                      "--h", "0.125", "--max-balls", "2", "--directions", "2"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Run t1 = run({"green", "--map", "dilate 2", "--field", "bump:0.5,0,0,0.4", "--points", "3", "--seed", "7"});
  const Run t2 = run({"green", "--map", "dilate 2", "--field", "bump:0.5,0,0,0.4", "--points", "3", "--seed", "7"});
  CHECK(t1.code == 0);
  CHECK(t1.out == t2.out);
}

TEST_CASE("text format and file output") {
  const auto path = std::filesystem::temp_directory_path() / "tonekit_cli_out.json";
  const Run r = run({"bessel", "--n", "2", "--output", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j["meta"]["config"]["n"] == "2");
  std::filesystem::remove(path);
  const Run t = run({"bessel", "--n", "2", "--format", "text"});
  CHECK(t.out.find("c_n") != std::string::npos);
}
