#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ccmd/bench.hpp"
#include "ccmd/errors.hpp"

using namespace ccmd;
using namespace ccmd::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path p = fs::temp_directory_path() /
               ("ccmd-" + std::string(info->test_suite_name()) + "-" + info->name() + "-" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  return parse_config(json::parse(R"({
    "grid": {"d": [8, 12]},
    "run": {"seeds": [1, 2, 3], "budget": 150},
    "solvers": [
      {"name": "NACSMD", "algorithm": "nacsmd", "restart": "auto"},
      {"name": "ACSMD1", "algorithm": "acsmd", "m": 1, "offset": "condition"},
      {"name": "Lan", "algorithm": "acsa"}
    ]
  })"));
}

}  // namespace

TEST(Config, DefaultsAreTheExperimentSetup) {
  ExperimentConfig cfg = parse_config(json::object());
  EXPECT_EQ(cfg.instance.q, 4.0);
  EXPECT_EQ(cfg.instance.kappa, 2.0);
  EXPECT_EQ(cfg.instance.mu, 2.0);
  EXPECT_EQ(cfg.instance.sigma_b, 0.1);
  EXPECT_EQ(cfg.run.epsilon, 0.01);
  EXPECT_EQ(cfg.run.seeds.size(), 20u);
  ASSERT_EQ(cfg.solvers.size(), 5u);
  EXPECT_EQ(cfg.solvers[0].algorithm, "acsa");
  EXPECT_EQ(cfg.solvers[4].name, "ACSMD3");
  EXPECT_TRUE(cfg.overrides.empty());
}

TEST(Config, OverridesAreRecordedOnlyWhenValuesChange) {
  auto cfg = parse_config(json::parse(R"({"instance": {"mu": 3, "q": 4}, "run": {"budget": 50}})"));
  EXPECT_EQ(cfg.overrides, (std::vector<std::string>{"instance.mu", "run.budget"}));
  EXPECT_EQ(to_json(cfg)["overrides"], json({"instance.mu", "run.budget"}));
}

TEST(Config, RejectsBadInput) {
  auto path_of = [](const char* text) {
    try {
      parse_config(json::parse(text));
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("no error");
  };
  EXPECT_EQ(path_of(R"({"run": {"seeds": []}})"), "run.seeds");
  EXPECT_EQ(path_of(R"({"instance": {"sigma": 1}})"), "instance.sigma");
  EXPECT_EQ(path_of(R"({"run": {"epsilon": 2}})"), "run.epsilon");
  EXPECT_EQ(path_of(R"({"instance": {"q": "four"}})"), "instance.q");
  EXPECT_EQ(path_of(R"({"solvers": [{"name": "a", "algorithm": "sgd"}]})"), "solvers[0].algorithm");
  EXPECT_EQ(path_of(R"({"solvers": [{"name": "a", "algorithm": "acsmd"},
                                     {"name": "a", "algorithm": "nacsmd"}]})"),
            "solvers[1].name");
  EXPECT_EQ(path_of(R"({"grid": {"d": [0]}})"), "grid.d");
  EXPECT_EQ(path_of(R"({"instance": {"kind": "bernoulli"}})"), "instance.kind");
}

TEST(Config, ValidationChecksParametersAndSchedules) {
  auto cfg = small_config();
  EXPECT_NO_THROW(validate(cfg));
  auto holder = parse_config(json::parse(R"({"instance": {"q": 3, "kappa": 1.5},
    "solvers": [{"name": "A", "algorithm": "acsmd"}]})"));
  EXPECT_THROW(validate(holder), ConfigError);  // needs a box
  holder.instance.box = 2.0;
  EXPECT_NO_THROW(validate(holder));
  auto bad_q = small_config();
  bad_q.instance.q = 1.0;
  EXPECT_THROW(validate(bad_q), ConfigError);
  auto raw = parse_config(json::parse(R"({"solvers": [{"name": "A", "algorithm": "nacsmd",
    "offset": 0}]})"));
  EXPECT_NO_THROW(validate(raw));  // the gamma repair admits any offset
}

TEST(Run, EmptySeedListWritesNothing) {
  auto cfg = small_config();
  cfg.run.seeds.clear();
  fs::path dir = scratch("out");
  RunOptions opts;
  opts.out = dir;
  EXPECT_THROW(run_experiment(cfg, opts), ConfigError);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Run, OutputsAreByteIdenticalAcrossWorkerCounts) {
  auto cfg = small_config();
  fs::path a = scratch("a"), b = scratch("b");
  RunOptions oa, ob;
  oa.out = a;
  ob.out = b;
  ob.workers = 4;
  run_experiment(cfg, oa);
  run_experiment(cfg, ob);
  long files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    EXPECT_NE(e.path().extension(), ".tmp");
  }
  // 2 cells x 3 solvers x 3 seeds traces + plot, summary, table, manifest
  EXPECT_EQ(files, 18 + 4);
}

TEST(Run, ArtifactsHaveTheDocumentedShape) {
  auto cfg = small_config();
  fs::path dir = scratch("out");
  RunOptions opts;
  opts.out = dir;
  auto sum = run_experiment(cfg, opts);

  std::string trace = slurp(dir / "trace-d8-L1_ACSMD1-2.csv");
  std::istringstream in(trace);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,psi_gap,bregman_to_opt,alpha_t,gamma_t");
  long rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 150);

  json s = json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(s["schema"], kSummarySchema);
  EXPECT_EQ(s["config"]["run"]["budget"], 150);
  EXPECT_EQ(s["config"]["overrides"], json({"grid.d", "solvers", "run.budget", "run.seeds"}));
  const json& resolved = s["resolved"][0]["solvers"];
  EXPECT_EQ(resolved[0]["restart"], "auto");
  EXPECT_TRUE(resolved[1]["schedule"].contains("repaired_until"));
  for (const auto& r : s["runs"]) {
    if (r["solver"] == "NACSMD") EXPECT_TRUE(r.contains("restart_plan"));
    if (r["solver"] == "Lan") EXPECT_EQ(r["certificate"], "skipped");
    else EXPECT_EQ(r["certificate"], "pass") << r.dump();
  }

  json manifest = json::parse(slurp(dir / "manifest.json"));
  for (const auto& f : manifest["files"])
    EXPECT_EQ(f["bytes"].get<std::uintmax_t>(), fs::file_size(dir / f["name"].get<std::string>()));

  auto pts = parse_plotdata(slurp(dir / "plotdata.csv"));
  EXPECT_EQ(pts.size(), 2u * 3u * 3u * 150u);
}

TEST(Run, DeterministicInstanceReachesEpsilonAndCertifies) {
  auto cfg = small_config();
  cfg.instance.kind = "ridge_deterministic";
  RunOptions opts;
  opts.write = false;
  auto sum = run_experiment(cfg, opts);
  for (const auto& r : sum.runs) {
    EXPECT_GT(r.iterations, 0) << r.solver << " " << r.cell;
    EXPECT_LE(r.final_rel_gap, cfg.run.epsilon);
    if (r.solver != "Lan") EXPECT_EQ(r.certificate, "pass");
  }
}

TEST(Table, SingleSummaryGivesOneRow) {
  auto cfg = small_config();
  cfg.d = {8};
  RunOptions opts;
  opts.write = false;
  auto sum = run_experiment(cfg, opts);
  Table t = emit_table({sum});
  std::istringstream in(t.csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(header, "cell,d,L_multiplier,NACSMD,ACSMD1,Lan");
  std::string expect = "d8-L1,8,1";
  for (const auto& st : sum.cells[0].stats) expect += "," + st.median_text;
  EXPECT_EQ(row, expect);
}

TEST(Table, MatchesSummaryJsonAndRejectsMixedColumns) {
  auto cfg = small_config();
  RunOptions opts;
  opts.write = false;
  auto sum = run_experiment(cfg, opts);
  auto back = summary_from_json(json::parse(summary_to_json(sum).dump()));
  EXPECT_EQ(emit_table({sum}).csv, emit_table({back}).csv);
  EXPECT_EQ(emit_table({sum}).text, emit_table({back}).text);
  EXPECT_EQ(back.config.overrides, sum.config.overrides);

  auto other = sum;
  other.cells[0].stats.pop_back();
  EXPECT_THROW(emit_table({sum, other}), ParameterError);
  EXPECT_THROW(summary_from_json(json{{"schema", "other/1"}}), ParameterError);
}

TEST(Table, MediansUseNearestRankAndMarkUnreached) {
  auto cfg = small_config();
  cfg.run.budget = 3;
  cfg.d = {8};
  RunOptions opts;
  opts.write = false;
  auto sum = run_experiment(cfg, opts);
  for (const auto& st : sum.cells[0].stats) {
    EXPECT_EQ(st.median_text, ">3");
    EXPECT_FALSE(st.median.has_value());
  }
}

TEST(PlotData, RoundTrips) {
  std::vector<PlotPoint> pts = {
      {1, -0.30102999566398120, "ACSMD1", 0, "d50-L1"},
      {2, -1e-300, "NACSMD", 18446744073709551615ull, "d50-L20"},
      {3, -std::numeric_limits<double>::infinity(), "Lan", 7, "d20-L1"},
      {1000, 0.1 + 0.2, "ACSMD3", 3, "d200-L2.5"},
  };
  std::string csv = emit_plotdata(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kPlotHeader);
  EXPECT_EQ(parse_plotdata(csv), pts);
  EXPECT_EQ(emit_plotdata(parse_plotdata(csv)), csv);
  EXPECT_THROW(parse_plotdata("t,x\n1,2\n"), ParameterError);
  EXPECT_THROW(parse_plotdata(std::string(kPlotHeader) + "\n1,abc,a,0,c\n"), ParameterError);
  EXPECT_THROW(emit_plotdata({{1, 0.0, "a,b", 0, "c"}}), ParameterError);
}

TEST(WriteAtomic, ReplacesContent) {
  fs::path dir = scratch("w");
  fs::create_directories(dir);
  write_atomic(dir / "f.txt", "one");
  write_atomic(dir / "f.txt", "two");
  EXPECT_EQ(slurp(dir / "f.txt"), "two");
  EXPECT_FALSE(fs::exists(dir / "f.txt.tmp"));
}
