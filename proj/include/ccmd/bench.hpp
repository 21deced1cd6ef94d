#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccmd/diagnostics.hpp"
#include "ccmd/schedule.hpp"
#include "ccmd/solvers.hpp"

namespace ccmd::bench {

using nlohmann::json;

inline constexpr const char* kSummarySchema = "ccmd.summary/1";
inline constexpr const char* kPlotHeader = "t,log_rel_error,algorithm,seed,cell";
inline constexpr const char* kTraceHeader = "t,psi_gap,bregman_to_opt,alpha_t,gamma_t";

// Thrown for malformed or inconsistent configs; `path` names the key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct InstanceSpec {
  std::string kind = "ridge";  // ridge | ridge_deterministic
  double q = 4.0;
  double kappa = 2.0;
  double mu = 2.0;
  double sigma_b = 0.1;
  double x1 = 3.0;               // x_1 = x1 * ones
  double x_star_scale = 1.0;     // x_star ~ U[-scale, scale]^d
  std::optional<double> R;       // default 2 ||x_star||_q
  double box = std::numeric_limits<double>::infinity();
};

struct SolverSpec {
  std::string name;
  std::string algorithm;  // nacsmd | acsmd | acsa
  std::optional<double> m;
  // number, "default", or "condition" for (L/mu)^(1/q) - 1
  json offset = "default";
  double safety_scale = 1.0;
  std::string restart = "none";  // none | auto
};

struct RunSpec {
  double epsilon = 0.01;  // relative: (Psi(x)-Psi*)/(Psi(x1)-Psi*)
  long budget = 1000;
  std::vector<std::uint64_t> seeds;
  long thin = 1;
  bool certificate = true;
};

struct OutputSpec {
  std::string directory = "ccmd-out";
  bool traces = true;
  bool plotdata = true;
};

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<int> d = {50};
  std::vector<double> L_multiplier = {1.0};
  std::vector<SolverSpec> solvers;
  RunSpec run;
  OutputSpec output;
  // Keys whose values differ from the section-5 defaults.
  std::vector<std::string> overrides;
};

std::vector<SolverSpec> default_solvers();
ExperimentConfig default_config();

// Missing keys take defaults; unknown keys and bad values throw ConfigError.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
json to_json(const ExperimentConfig& cfg);

struct Cell {
  int d = 0;
  double L_multiplier = 1.0;
  std::string id() const;
};

std::vector<Cell> cells(const ExperimentConfig& cfg);

// Resolved problem constants and step rule for one (cell, solver).
struct ResolvedSolver {
  GeometryParams params;
  StepSchedule schedule;
  std::optional<RestartPlan> plan;  // filled per seed when restart == auto
};

// Checks every (cell, solver) pair with derive_params and validate_schedule
// over the budget. Throws ConfigError on the first problem.
void validate(const ExperimentConfig& cfg);

struct RunResult {
  std::string cell;
  std::string solver;
  std::uint64_t seed = 0;
  long iterations = -1;  // first t with relative gap <= epsilon, -1 if never
  double final_rel_gap = 0.0;
  double initial_gap = 0.0;
  std::string certificate = "skipped";  // pass | fail | skipped
  double certificate_min_slack = 0.0;
  std::string status = "ok";            // ok | numerical_failure
  std::string message;
  std::optional<RestartPlan> plan;
};

struct SolverStats {
  std::string solver;
  long reached = 0;
  long runs = 0;
  // Nearest-rank order statistics with unreached runs counted as +inf.
  std::optional<long> median;
  std::optional<long> q1;
  std::optional<long> q3;
  std::string median_text;  // integer, or ">budget"
  long certificate_pass = 0;
  long certificate_fail = 0;
  long failures = 0;
};

struct CellSummary {
  Cell cell;
  std::vector<SolverStats> stats;
};

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<CellSummary> cells;
  std::vector<RunResult> runs;
  json resolved;  // per-cell params, schedules and plans
  bool numerical_failure = false;
};

struct RunOptions {
  int workers = 1;
  bool write = true;
  std::optional<std::filesystem::path> out;  // overrides output.directory
};

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

json summary_to_json(const ExperimentSummary& s);
ExperimentSummary summary_from_json(const json& j);

struct Table {
  std::string text;
  std::string csv;
};

// Rows are cells, columns are solvers, entries are median_text. Summaries
// must share the schema and the solver columns.
Table emit_table(const std::vector<ExperimentSummary>& summaries);

struct PlotPoint {
  long t = 0;
  double log_rel_error = 0.0;  // log10
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string cell;
  bool operator==(const PlotPoint&) const = default;
};

// Shortest round-trip formatting, so parse_plotdata(emit_plotdata(x)) == x.
std::string emit_plotdata(const std::vector<PlotPoint>& points);
std::vector<PlotPoint> parse_plotdata(const std::string& csv);

// Writes `content` to path via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ccmd::bench
