#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "subcausal/cli.hpp"
#include "subcausal/errors.hpp"
#include "subcausal/io.hpp"

using namespace subcausal;
using nlohmann::ordered_json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = std::string("cli_test_") + name;
  std::ofstream out(path);
  out << text;
  return path;
}

const char* kIcdJson = R"({
  "J": 2, "K": 2,
  "observed": [
    {"t":0,"x":0,"y":0,"n":4},   {"t":0,"x":0,"y":1,"n":0},
    {"t":0,"x":1,"y":0,"n":6},   {"t":0,"x":1,"y":1,"n":2},
    {"t":1,"x":0,"y":0,"n":311}, {"t":1,"x":0,"y":1,"n":62},
    {"t":1,"x":1,"y":0,"n":190}, {"t":1,"x":1,"y":1,"n":20}
  ],
  "missing": [
    {"t":0,"y":0,"n":382}, {"t":0,"y":1,"n":95},
    {"t":1,"y":0,"n":136}, {"t":1,"y":1,"n":23}
  ]
})";

const char* kIcdCsv =
    "t,x,y,m,n\n"
    "0,0,0,0,4\n0,0,1,0,0\n0,1,0,0,6\n0,1,1,0,2\n"
    "1,0,0,0,311\n1,0,1,0,62\n1,1,0,0,190\n1,1,1,0,20\n"
    "0,,0,1,382\n0,,1,1,95\n1,,0,1,136\n1,,1,1,23\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("bundled trial fixture carries the printed counts") {
    const auto t = fixture("icd_trial");
    CHECK(t.total() == 1231.0);
    CHECK(t.obs(0, 0, 0) == 4.0);
    CHECK(t.mis(1, 1) == 23.0);
    CHECK_THROWS_AS(fixture("nope"), DataError);
  }

  TEST_CASE("JSON and CSV encodings ingest identically") {
    const auto a = ingest_json(kIcdJson);
    const auto b = ingest_csv(kIcdCsv);
    CHECK(a.n_obs == b.n_obs);
    CHECK(a.n_mis == b.n_mis);
    CHECK(table_digest(a) == table_digest(b));
    const auto f = fixture("icd_trial");
    CHECK(table_digest(a) == table_digest(f));
  }

  TEST_CASE("schema violations are data errors") {
    CHECK_THROWS_AS(ingest_json(""), DataError);
    CHECK_THROWS_AS(ingest_json("[]"), DataError);
    CHECK_THROWS_AS(ingest_json(R"({"observed":[{"t":0,"x":0,"y":0,"n":-3}]})"), DataError);
    CHECK_THROWS_AS(ingest_json(R"({"observed":[{"t":0,"x":0,"y":0,"n":1.5}]})"), DataError);
    CHECK_THROWS_AS(ingest_json(R"({"missing":[{"t":0,"x":1,"y":0,"n":5}]})"), DataError);
    CHECK_THROWS_AS(ingest_csv("a,b\n1,2\n"), DataError);
    CHECK_THROWS_AS(ingest_csv("t,x,y,m,n\n0,1,0,1,5\n"), DataError);
    CHECK_THROWS_AS(ingest_csv("t,x,y,m,n\n0,-1,0,0,5\n"), DataError);
    CHECK_THROWS_AS(ingest_csv("t,x,y,m,n\n0,zz,0,0,5\n"), DataError);
  }

  TEST_CASE("goodness-of-fit subcommand on the trial fixture") {
    const auto r = run_command({"gof", "--fixture", "icd_trial", "--mechanism", "2"});
    REQUIRE(r.exit_code == 0);
    const double p = r.report["results"]["gof"]["p_value"].get<double>();
    CHECK(std::fabs(p - 0.248) < 0.005);
  }

  TEST_CASE("bounds subcommand flags infinite endpoints as strings") {
    const auto r = run_command({"bounds", "--fixture", "icd_trial", "--measure", "cor"});
    REQUIRE(r.exit_code == 0);
    const auto& rows = r.report["results"]["bounds"]["ce_x"];
    bool any_inf = false;
    for (const auto& row : rows) {
      if (row["infinite"].get<bool>()) {
        any_inf = true;
        const bool upper_str = row["upper"].is_string();
        const bool lower_str = row["lower"].is_string();
        CHECK((upper_str || lower_str));
        if (upper_str) CHECK(row["upper"].get<std::string>() == "inf");
      }
    }
    CHECK(any_inf);
  }

  TEST_CASE("selection subcommand reports the winner and all log likelihoods") {
    const auto r = run_command({"select", "--fixture", "icd_trial"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["results"]["chosen"] == "M2");
    CHECK(r.report["results"]["logliks"].size() == 4);
  }

  TEST_CASE("reports are stable modulo the timestamp") {
    const auto a = run_command({"gibbs", "--fixture", "icd_trial", "--mechanism", "2", "--seed",
                                "11", "--iters", "800", "--burnin", "200"});
    const auto b = run_command({"gibbs", "--fixture", "icd_trial", "--mechanism", "2", "--seed",
                                "11", "--iters", "800", "--burnin", "200"});
    REQUIRE(a.exit_code == 0);
    ordered_json ja = a.report, jb = b.report;
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja.dump() == jb.dump());
  }

  TEST_CASE("file input equals fixture input") {
    const auto path = write_temp("icd.json", kIcdJson);
    const auto a = run_command({"gof", "--input", path, "--mechanism", "1"});
    const auto b = run_command({"gof", "--fixture", "icd_trial", "--mechanism", "1"});
    REQUIRE(a.exit_code == 0);
    CHECK(a.report["results"]["gof"]["p_value"] == b.report["results"]["gof"]["p_value"]);
    std::remove(path.c_str());
  }

  TEST_CASE("exit code two on data errors") {
    const auto nofile = run_command({"gof", "--input", "does_not_exist.json", "--mechanism", "1"});
    CHECK(nofile.exit_code == 2);
    const auto empty = write_temp("empty.json", "");
    const auto r = run_command({"gof", "--input", empty, "--mechanism", "1"});
    CHECK(r.exit_code == 2);
    CHECK(r.report["error"]["type"] == "data");
    std::remove(empty.c_str());
    const auto usage = run_command({"gof", "--fixture", "icd_trial"});  // missing --mechanism
    CHECK(usage.exit_code == 2);
  }

  TEST_CASE("exit code three on model incompatibility") {
    // the trial data admit no X-only missingness law
    const auto r = run_command({"identify", "--fixture", "icd_trial", "--mechanism", "x"});
    CHECK(r.exit_code == 3);
    CHECK(r.report["error"]["type"] == "model");
    CHECK(r.report["error"]["code"] == "negative_odds");
  }

  TEST_CASE("partial identification still reports the identified pieces") {
    // the (X,Y) mechanism cannot fit the trial joint, but the subgroup log
    // odds ratios are reported with the per-stratum failure recorded
    const auto r = run_command({"identify", "--fixture", "icd_trial", "--mechanism", "3"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["results"]["log_cor_x"][0] == "inf");
    CHECK(r.report["results"]["joint_error"]["code"] == "negative_odds");
  }

  TEST_CASE("identify subcommand returns closed-form effects") {
    const auto r = run_command({"identify", "--fixture", "icd_trial", "--mechanism", "2"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["results"]["conditions"].size() == 2);
    CHECK(r.report["results"]["effects"].contains("log_cor"));
  }

  TEST_CASE("analyze produces the full model-comparison report") {
    const auto r = run_command({"analyze", "--fixture", "icd_trial"});
    REQUIRE(r.exit_code == 0);
    const auto& res = r.report["results"];
    CHECK(res["selected"] == "M2");
    CHECK(res["fits"].size() == 4);
    CHECK(res["population_log_or"]["se"].get<double>() == doctest::Approx(0.1547706916544735));
    // log likelihood column of the comparison table
    CHECK(res["fits"][0]["gof"]["loglik"].get<double>() == doctest::Approx(-2202.654).epsilon(1e-6));
    CHECK(res["fits"][1]["gof"]["loglik"].get<double>() == doctest::Approx(-2200.452).epsilon(1e-6));
    CHECK(res["fits"][3]["gof"]["loglik"].get<double>() == doctest::Approx(-2200.584).epsilon(1e-6));
  }

  TEST_CASE("environment variable provides the fallback seed") {
    setenv("SUBGROUP_CAUSAL_SEED", "777", 1);
    const auto r = run_command({"gibbs", "--fixture", "icd_trial", "--mechanism", "1", "--iters",
                                "400", "--burnin", "100"});
    unsetenv("SUBGROUP_CAUSAL_SEED");
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["seed"].get<std::uint64_t>() == 777);
  }

  TEST_CASE("draws export writes one row per retained iteration") {
    const std::string path = "cli_test_draws.csv";
    const auto r = run_command({"gibbs", "--fixture", "icd_trial", "--mechanism", "2", "--iters",
                                "300", "--burnin", "100", "--draws-out", path});
    REQUIRE(r.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 201);  // header + retained draws
    std::remove(path.c_str());
  }
}
