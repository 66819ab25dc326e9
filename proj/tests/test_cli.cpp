#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "seqdec/csv.hpp"
#include "seqdec/pomdp.hpp"
#include "seqdec/pomdp_io.hpp"

using namespace seqdec;
using testsupport::CommandResult;
using testsupport::ScratchDir;
using testsupport::read_file;
using testsupport::run_command;
using testsupport::write_file;

namespace {

const std::string kBin = SEQDEC_CLI_BIN;

const char* kRunConfig = R"JSON({
  "schema": 1,
  "problem": {"family": "flu", "variant": 1, "params": {"c_obs": 2.0, "c_unc": 5.0}},
  "policy": {"tag": "PFA-Observe", "params": {"theta_obs": 0.1}},
  "run": {"horizon": 10, "replications": 3, "master_seed": 42}
})JSON";

const char* kPomdpModel = R"JSON({
    "states": ["fine", "broken"],
    "actions": ["run", "repair"],
    "observations": ["good", "bad"],
    "transition": [[[0.9, 0.1], [0.0, 1.0]], [[1.0, 0.0], [0.8, 0.2]]],
    "observation_probs": [[[0.8, 0.2], [0.3, 0.7]], [[0.6, 0.4], [0.4, 0.6]]],
    "contribution": [[1.0, -1.0], [-0.5, -0.5]],
    "horizon": 3
  })JSON";

std::string cli(const std::string& args) { return kBin + " " + args; }

double column_sum(const CsvTable& table, const std::string& column) {
  std::size_t idx = table.header.size();
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == column) idx = i;
  REQUIRE(idx < table.header.size());
  double sum = 0.0;
  for (const auto& row : table.rows) sum += std::stod(row[idx]);
  return sum;
}

} // namespace

TEST_CASE("run writes a trajectory and a summary") {
  ScratchDir scratch("cli-run");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, kRunConfig);
  const CommandResult res =
      run_command(cli("run --config " + cfg + " --out " + scratch.path));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("PFA-Observe") != std::string::npos);

  const CsvTable traj = read_csv_strict(scratch.path + "/trajectory.csv");
  CHECK(traj.header ==
        std::vector<std::string>{"t", "mu_bar", "beta", "x_obs", "contribution"});
  CHECK(traj.rows.size() == 10);

  const CsvTable summary = read_csv_strict(scratch.path + "/summary.csv");
  REQUIRE(summary.rows.size() == 1);
  CHECK(summary.rows[0][0] == "PFA-Observe");
  CHECK(summary.rows[0][4] == "3");  // replications
  CHECK(summary.rows[0][5] == "42"); // seed
}

TEST_CASE("two identical invocations produce byte-identical outputs") {
  ScratchDir scratch("cli-repeat");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, kRunConfig);
  REQUIRE(run_command(cli("run --quiet --config " + cfg + " --out " + scratch.path + "/a"))
              .exit_code == 0);
  REQUIRE(run_command(cli("run --quiet --config " + cfg + " --out " + scratch.path + "/b"))
              .exit_code == 0);
  CHECK(read_file(scratch.path + "/a/trajectory.csv") ==
        read_file(scratch.path + "/b/trajectory.csv"));
  CHECK(read_file(scratch.path + "/a/summary.csv") ==
        read_file(scratch.path + "/b/summary.csv"));
}

TEST_CASE("with one replication the summary mean is the trajectory total") {
  ScratchDir scratch("cli-replay");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu", "variant": 1},
    "policy": {"tag": "PFA-Observe", "params": {"theta_obs": 0.1}},
    "run": {"horizon": 15, "replications": 1, "master_seed": 7}
  })JSON");
  REQUIRE(run_command(cli("run --quiet --config " + cfg + " --out " + scratch.path))
              .exit_code == 0);
  const CsvTable traj = read_csv_strict(scratch.path + "/trajectory.csv");
  const CsvTable summary = read_csv_strict(scratch.path + "/summary.csv");
  const double total = column_sum(traj, "contribution");
  CHECK(std::stod(summary.rows[0][1]) == doctest::Approx(total).epsilon(1e-12));
  CHECK(summary.rows[0][2] == "0"); // single replication has no spread
}

TEST_CASE("an energy run exercises the other problem family") {
  ScratchDir scratch("cli-energy");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "energy", "variant": "ar"},
    "policy": {"tag": "Energy-Threshold", "params": {"theta_buy": 25.0, "theta_sell": 40.0}},
    "run": {"horizon": 20, "replications": 4, "master_seed": 9}
  })JSON");
  const CommandResult res =
      run_command(cli("run --config " + cfg + " --out " + scratch.path));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);
  const CsvTable traj = read_csv_strict(scratch.path + "/trajectory.csv");
  REQUIRE(!traj.header.empty());
  CHECK(traj.header[1] == "storage");
  CHECK(traj.rows.size() == 20);
  const CsvTable summary = read_csv_strict(scratch.path + "/summary.csv");
  CHECK(summary.rows[0][0] == "Energy-Threshold");
}

TEST_CASE("configuration problems exit with code 2 and name the field") {
  ScratchDir scratch("cli-err");
  const std::string cfg = scratch.path + "/bad.json";

  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu", "params": {"bogus_key": 1}},
    "policy": {"tag": "PFA-Observe"},
    "run": {"horizon": 5}
  })JSON");
  CommandResult res = run_command(cli("run --config " + cfg));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("/problem/params/bogus_key") != std::string::npos);

  res = run_command(cli("run --config " + scratch.path + "/absent.json"));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("cannot open") != std::string::npos);

  write_file(cfg, "{not json");
  res = run_command(cli("run --config " + cfg));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("not valid JSON") != std::string::npos);

  write_file(cfg, R"JSON({"schema": 2, "run": {"horizon": 1}})JSON");
  res = run_command(cli("run --config " + cfg));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("unsupported version") != std::string::npos);

  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu"},
    "policy": {"tag": "PFA-Observe"}
  })JSON");
  res = run_command(cli("run --config " + cfg));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("missing \"run\"") != std::string::npos);

  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu"},
    "policy": {"tag": "No-Such-Policy"},
    "run": {"horizon": 5}
  })JSON");
  res = run_command(cli("run --config " + cfg));
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("No-Such-Policy") != std::string::npos);

  res = run_command(cli("nonsense"));
  CHECK(res.exit_code == 2);
}

TEST_CASE("library failures after configuration exit with code 3") {
  ScratchDir scratch("cli-rte");
  const std::string cfg = scratch.path + "/run.json";
  // The config parses, but the policy cannot drive the spatial variant.
  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu", "variant": 6, "params": {"regions": 3}},
    "policy": {"tag": "PFA-Observe", "params": {"theta_obs": 0.1}},
    "run": {"horizon": 5, "master_seed": 1}
  })JSON");
  const CommandResult res = run_command(cli("run --config " + cfg + " --out " + scratch.path));
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("error:") != std::string::npos);
  CHECK(res.output.find("spatial") != std::string::npos);
}

TEST_CASE("--seed overrides the config and lands in the summary") {
  ScratchDir scratch("cli-seed");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, kRunConfig);
  REQUIRE(run_command(cli("run --quiet --config " + cfg + " --out " + scratch.path +
                          "/a --seed 1234"))
              .exit_code == 0);
  REQUIRE(run_command(cli("run --quiet --config " + cfg + " --out " + scratch.path + "/b"))
              .exit_code == 0);
  const CsvTable a = read_csv_strict(scratch.path + "/a/summary.csv");
  const CsvTable b = read_csv_strict(scratch.path + "/b/summary.csv");
  CHECK(a.rows[0][5] == "1234");
  CHECK(b.rows[0][5] == "42");
  CHECK(a.rows[0][1] != b.rows[0][1]); // different seed, different estimate
}

TEST_CASE("--quiet suppresses the status line") {
  ScratchDir scratch("cli-quiet");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, kRunConfig);
  const CommandResult res =
      run_command(cli("run --quiet --config " + cfg + " --out " + scratch.path));
  CHECK(res.exit_code == 0);
  CHECK(res.output.empty());
}

TEST_CASE("the output directory falls back to SEQDEC_OUT_DIR") {
  ScratchDir scratch("cli-env");
  const std::string cfg = scratch.path + "/run.json";
  write_file(cfg, kRunConfig);
  const CommandResult res = run_command("SEQDEC_OUT_DIR=" + scratch.path + "/env " +
                                        cli("run --quiet --config " + cfg));
  REQUIRE(res.exit_code == 0);
  CHECK(!read_file(scratch.path + "/env/summary.csv").empty());
}

TEST_CASE("compare evaluates policies on shared seeds and reports paired differences") {
  ScratchDir scratch("cli-compare");
  const std::string cfg = scratch.path + "/compare.json";
  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu", "variant": 1, "params": {"c_obs": 2.0, "c_unc": 5.0}},
    "policies": [
      {"tag": "PFA-Observe", "params": {"theta_obs": 0.1}},
      {"tag": "PFA-Observe", "params": {"theta_obs": 0.1}},
      {"tag": "PFA-Observe", "params": {"theta_obs": 1000000.0}}
    ],
    "run": {"horizon": 10, "replications": 5, "master_seed": 3}
  })JSON");
  const CommandResult res =
      run_command(cli("compare --quiet --config " + cfg + " --out " + scratch.path));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);
  const CsvTable summary = read_csv_strict(scratch.path + "/summary.csv");
  REQUIRE(summary.rows.size() == 3);
  CHECK(summary.header[6] == "diff_mean");
  // Identical policies on identical seeds differ by exactly zero.
  CHECK(summary.rows[0][6] == "0");
  CHECK(summary.rows[1][6] == "0");
  CHECK(summary.rows[1][7] == "0");
  CHECK(summary.rows[0][1] == summary.rows[1][1]);
  CHECK(summary.rows[2][6] != "0"); // the never-observe policy actually differs

  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu", "variant": 1},
    "policies": [{"tag": "PFA-Observe", "params": {"theta_obs": 0.1}}],
    "run": {"horizon": 10, "master_seed": 3}
  })JSON");
  CHECK(run_command(cli("compare --config " + cfg)).exit_code == 2);
}

TEST_CASE("tune writes the search table") {
  ScratchDir scratch("cli-tune");
  const std::string cfg = scratch.path + "/tune.json";
  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "flu", "variant": 1, "params": {"c_obs": 2.0, "c_unc": 5.0}},
    "policy": {"tag": "PFA-Observe", "params": {"theta_obs": 0.1}},
    "run": {"horizon": 10, "replications": 4, "master_seed": 11},
    "tune": {"method": "grid", "parameters": [{"name": "theta_obs", "grid": [0.05, 0.2]}]}
  })JSON");
  const CommandResult res =
      run_command(cli("tune --config " + cfg + " --out " + scratch.path));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("best theta_obs=") != std::string::npos);
  const CsvTable table = read_csv_strict(scratch.path + "/tuning.csv");
  CHECK(table.header[0] == "theta_obs");
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][0] == "0.05");
  CHECK(table.rows[1][0] == "0.2");

  // Grid search over an energy problem is not a thing.
  write_file(cfg, R"JSON({
    "schema": 1,
    "problem": {"family": "energy"},
    "policy": {"tag": "Energy-Threshold", "params": {"theta_buy": 1, "theta_sell": 2}},
    "run": {"horizon": 10},
    "tune": {"method": "grid", "parameters": [{"name": "x", "grid": [1]}]}
  })JSON");
  CHECK(run_command(cli("tune --config " + cfg)).exit_code == 2);
}

TEST_CASE("tune on the spatial variant scores the truth objective by default") {
  ScratchDir scratch("cli-tune-truth");
  const auto config_with = [&](const std::string& tune_extra) {
    return std::string(R"JSON({
      "schema": 1,
      "problem": {"family": "flu", "variant": 6,
                  "params": {"regions": 3, "mu0_regions": [30.0, 40.0, 50.0]}},
      "policy": {"tag": "CFA-IE", "params": {"theta_ie": 0.0}},
      "run": {"horizon": 8, "replications": 3, "master_seed": 17},
      "tune": {"method": "grid", )JSON") +
           tune_extra + R"JSON("parameters": [{"name": "theta_ie", "grid": [0.0, 1.0]}]}
    })JSON";
  };

  const std::string cfg = scratch.path + "/tune.json";
  write_file(cfg, config_with(""));
  REQUIRE(run_command(cli("tune --config " + cfg + " --out " + scratch.path)).exit_code == 0);
  const CsvTable implicit = read_csv_strict(scratch.path + "/tuning.csv");

  write_file(cfg, config_with("\"use_truth\": true, "));
  REQUIRE(run_command(cli("tune --config " + cfg + " --out " + scratch.path)).exit_code == 0);
  const CsvTable truth = read_csv_strict(scratch.path + "/tuning.csv");

  write_file(cfg, config_with("\"use_truth\": false, "));
  REQUIRE(run_command(cli("tune --config " + cfg + " --out " + scratch.path)).exit_code == 0);
  const CsvTable cost = read_csv_strict(scratch.path + "/tuning.csv");

  REQUIRE(implicit.rows.size() == 2);
  CHECK(implicit.rows == truth.rows);
  CHECK(implicit.rows != cost.rows);
}

TEST_CASE("solve-pomdp matches the in-process exact solver") {
  ScratchDir scratch("cli-pomdp");
  const std::string cfg = scratch.path + "/solve.json";
  write_file(cfg, std::string(R"JSON({
  "schema": 1,
  "pomdp": {"model": )JSON") + kPomdpModel + "}}");

  const CommandResult res = run_command(cli("solve-pomdp --config " + cfg));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);

  const DiscretePomdp model = pomdp_from_json_text(kPomdpModel);
  const BeliefVector b0 = BeliefVector::Constant(2, 0.5);
  const ExactSolution sol = solve_exact_reachable(model, b0, model.horizon);
  CHECK(res.output.find("value " + format_double(sol.value) + "\n") != std::string::npos);
  const std::string action = sol.first_action == 0 ? "run" : "repair";
  CHECK(res.output.find("first_action " + action) != std::string::npos);
}

TEST_CASE("solve-pomdp loads a model file, honors belief and horizon overrides") {
  ScratchDir scratch("cli-pomdp-file");
  write_file(scratch.path + "/machine.json", kPomdpModel);
  const std::string cfg = scratch.path + "/solve.json";
  write_file(cfg, R"JSON({
    "schema": 1,
    "pomdp": {"model": "machine.json", "belief": [1.0, 0.0], "horizon": 0}
  })JSON");
  const CommandResult res = run_command(cli("solve-pomdp --config " + cfg));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("value 0\n") != std::string::npos);

  write_file(cfg, R"JSON({
    "schema": 1,
    "pomdp": {"model": "machine.json", "belief": [0.7, 0.2]}
  })JSON");
  CHECK(run_command(cli("solve-pomdp --config " + cfg)).exit_code == 2);
}

TEST_CASE("solve-pomdp grid method writes the value table") {
  ScratchDir scratch("cli-pomdp-grid");
  write_file(scratch.path + "/machine.json", kPomdpModel);
  const std::string cfg = scratch.path + "/solve.json";
  write_file(cfg, R"JSON({
    "schema": 1,
    "pomdp": {"model": "machine.json", "method": "grid", "resolution": 10,
              "value_table_csv": "values.csv"}
  })JSON");
  const CommandResult res =
      run_command(cli("solve-pomdp --config " + cfg + " --out " + scratch.path));
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);
  const CsvTable table = read_csv_strict(scratch.path + "/values.csv");
  CHECK(table.header == std::vector<std::string>{"b_fine", "b_broken", "value"});
  CHECK(table.rows.size() == 11);

  // A malformed model is a configuration error.
  write_file(cfg, R"JSON({
    "schema": 1,
    "pomdp": {"model": {"states": 2, "actions": 1, "observations": 2,
                        "transition": [[[2.0, -1.0], [0.5, 0.5]]],
                        "observation_probs": [[[0.5, 0.5], [0.5, 0.5]]],
                        "contribution": [[0.0], [0.0]],
                        "horizon": 1}}
  })JSON");
  CHECK(run_command(cli("solve-pomdp --config " + cfg)).exit_code == 2);
}

TEST_CASE("the oracle suite passes end to end") {
  const CommandResult res = run_command(cli("oracle-check"));
  CAPTURE(res.output);
  CHECK(res.exit_code == 0);
  for (const char* name : {"conjugate-update", "rls-batch", "pomdp-bayes", "pomdp-exact",
                           "gauss-hermite"})
    CHECK(res.output.find(std::string("PASS ") + name) != std::string::npos);
  CHECK(res.output.find("FAIL") == std::string::npos);
}
