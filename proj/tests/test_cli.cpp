#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "wmlab/experiments.hpp"

using namespace wmlab;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/wmlab_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
  // minimal valid config gets defaults filled
  auto cfg = validate_config("ap-duality", nlohmann::json::object());
  CHECK(cfg.params.contains("exponents"));
  CHECK(cfg.seed == 1);

  // unknown key rejected by name
  try {
    validate_config("ap-duality", {{"weigth", 1.0}});
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("weigth") != std::string::npos);
  }

  CHECK_THROWS_AS(validate_config("not-an-experiment", {}),
                  std::invalid_argument);
}

TEST_CASE("config files") {
  auto good = write_temp("good.json",
                         R"({"experiment":"dft-roundtrip","N1":128,"seed":9})");
  auto cfg = parse_config(good);
  CHECK(cfg.name == "dft-roundtrip");
  CHECK(cfg.params["N1"] == 128);
  CHECK(cfg.seed == 9);

  auto empty = write_temp("empty.json", "");
  CHECK_THROWS_AS(parse_config(empty), std::invalid_argument);

  auto noname = write_temp("noname.json", R"({"N1":128})");
  CHECK_THROWS_AS(parse_config(noname), std::invalid_argument);

  CHECK_THROWS_AS(parse_config("/nonexistent/path.json"),
                  std::invalid_argument);
}

TEST_CASE("deterministic reports") {
  auto cfg = validate_config("dft-roundtrip", {{"seed", 42}});
  auto r1 = run(cfg);
  auto r2 = run(cfg);
  CHECK(r1.to_json().dump() == r2.to_json().dump());  // byte identical
  CHECK(r1.all_pass());

  auto cfg2 = validate_config("aniso-homogeneity", {{"seed", 42}});
  CHECK(run(cfg2).to_json().dump() == run(cfg2).to_json().dump());
}

TEST_CASE("report emission and formats") {
  auto cfg = validate_config("mikhlin-check", nlohmann::json::object());
  auto rep = run(cfg);
  CHECK(rep.all_pass());

  auto jpath = "/tmp/wmlab_test_report.json";
  emit_report(rep, ReportFormat::Json, jpath);
  auto parsed = nlohmann::json::parse(slurp(jpath));
  CHECK(parsed["experiment"] == "mikhlin-check");
  CHECK(parsed["all_pass"] == true);
  CHECK(parsed.contains("version"));

  auto cpath = "/tmp/wmlab_test_report.csv";
  emit_report(rep, ReportFormat::Csv, cpath);
  auto csv = slurp(cpath);
  CHECK(csv.find("experiment,criterion,pass,measured,threshold,detail") == 0);

  CHECK_THROWS(emit_report(rep, ReportFormat::Json, "/nonexistent/dir/x.json"));
}

TEST_CASE("schema document") {
  auto schema = config_schema();
  CHECK(schema["schema_version"] == 1);
  for (const auto& name : experiment_names())
    CHECK(schema["experiments"].contains(name));
  CHECK(schema["experiments"]["kurtz-iff"].contains("a_diverging"));
}

TEST_CASE("failing criteria are flagged") {
  // an absurd tolerance cannot pass: force a fail through a tight knob
  auto cfg = validate_config("sparse-weighted", {{"ratio_bound", 1e-9}});
  auto rep = run(cfg);
  CHECK(!rep.all_pass());
  bool found = false;
  for (auto& c : rep.criteria)
    if (c.id == "uniform_ratio") {
      CHECK(!c.pass);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("light experiments pass end to end") {
  for (const std::string name :
       {"dft-roundtrip", "rbdd-variation", "aniso-homogeneity",
        "blocking-identity", "lp-reconstruct"}) {
    auto rep = run(validate_config(name, nlohmann::json::object()));
    CHECK(rep.all_pass());
    CHECK(rep.experiment == name);
  }
}
