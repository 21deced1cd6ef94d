#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "ccmd/bench.hpp"
#include "ccmd/errors.hpp"

namespace ccmd::bench {

namespace {

namespace fs = std::filesystem;

struct Problem {
  RidgeInstance inst;
  GeometryParams params;
  Regularizer H;
  std::shared_ptr<const Oracle> oracle;
  Vector x1;
};

Problem build_problem(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed) {
  const InstanceSpec& I = cfg.instance;
  const bool exact = I.kind == "ridge_deterministic";
  Rng rng = make_stream(seed, static_cast<std::uint64_t>(cell.d), 1);
  Vector xs = uniform_vector(rng, cell.d, -I.x_star_scale, I.x_star_scale);
  Problem P;
  P.inst = make_ridge_instance(cell.d, I.q, I.mu, exact ? 0.0 : I.sigma_b, xs, I.box);
  const double L = P.inst.L_kappa(I.kappa) * cell.L_multiplier;
  const double R = I.R ? *I.R : 2.0 * lq_norm(xs, I.q);
  const double sigma = exact ? 0.0 : P.inst.declared_sigma(R);
  P.params = derive_params(I.q, I.kappa, L, effective_uniform_convexity(I.mu, I.q), sigma, R);
  P.H = make_regularizer(I.mu, I.q, I.box);
  if (exact) {
    RidgeInstance inst = P.inst;
    P.oracle = additive_noise_oracle(
        cell.d, [inst](const Vector& x) { return inst.mean_gradient(x); }, NoiseModel{},
        [inst](const Vector& x) { return inst.evaluate_F(x); });
  } else {
    P.oracle = ridge_oracle(P.inst, sigma);
  }
  P.x1 = Vector::Constant(cell.d, I.x1);
  if (std::isfinite(I.box)) P.x1 = P.x1.cwiseMax(-I.box).cwiseMin(I.box);
  return P;
}

Target target_of(const SolverSpec& s) {
  return s.algorithm == "acsmd" ? Target::kAcsmd : Target::kNacsmd;
}

StepSchedule schedule_for(const SolverSpec& s, const GeometryParams& params) {
  const Target tgt = target_of(s);
  const double m = s.m ? *s.m : default_degree(params, tgt);
  double offset;
  if (s.offset.is_number())
    offset = s.offset.get<double>();
  else if (s.offset == "condition")
    offset = std::max(0.0, std::pow(params.L / params.mu, 1.0 / params.q) - 1.0);
  else
    offset = default_offset(params, tgt, m);
  StepSchedule sched = polynomial_schedule(tgt, m, offset);
  sched.safety_scale = s.safety_scale;
  return sched;
}

RestartPlan auto_plan(const GeometryParams& params, const StepSchedule& sched, double V0,
                      double eps, long budget) {
  RestartPlan plan = plan_from_params(params, sched, V0, eps, budget);
  // Iterations past the budget are never executed.
  plan.K = std::min(plan.K, budget);
  plan.T = std::min(plan.T, budget);
  return plan;
}

json params_json(const GeometryParams& p) {
  return {{"q", p.q}, {"kappa", p.kappa}, {"L", p.L}, {"mu_uniform_convexity", p.mu},
          {"sigma", p.sigma}, {"R", p.R}, {"r", p.r}, {"M", p.M}, {"p", p.p}};
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

struct Job {
  size_t cell = 0;
  size_t solver = 0;
  size_t seed = 0;
};

struct RunOutput {
  RunResult result;
  std::vector<PlotPoint> plot;
  std::string trace_csv;
};

RunOutput run_one(const ExperimentConfig& cfg, const Cell& cell, const SolverSpec& spec,
                  std::uint64_t seed, bool keep_plot, bool keep_trace) {
  RunOutput out;
  RunResult& rr = out.result;
  rr.cell = cell.id();
  rr.solver = spec.name;
  rr.seed = seed;

  const Problem P = build_problem(cfg, cell, seed);
  const Optimum opt = exact_optimum(P.inst);
  auto psi = [&](const Vector& x) { return ridge_psi(P.inst, x); };
  const double g0 = psi(P.x1) - opt.psi;
  rr.initial_gap = g0;
  const long budget = cfg.run.budget;

  std::vector<double> gaps, dists;
  gaps.reserve(budget);
  dists.reserve(budget);
  TraceOptions opts;
  opts.observer = [&](long t, const Vector& x_next, const Vector& avg) {
    const double gap = psi(avg) - opt.psi;
    gaps.push_back(gap);
    dists.push_back(bregman(P.H, opt.x, x_next));
    if (rr.iterations < 0 && gap <= cfg.run.epsilon * g0) rr.iterations = t;
    return t >= budget;
  };

  Rng rng = make_stream(seed, static_cast<std::uint64_t>(cell.d), 2);
  SolveResult res;
  try {
    if (spec.algorithm == "acsa") {
      AcsaConfig ac{RidgeInstance::mu_F, RidgeInstance::mu_F * cell.L_multiplier, P.params.sigma,
                    g0, budget};
      res = acsa_baseline(*P.oracle, P.H, ac, P.x1, rng, opts);
    } else {
      const StepSchedule sched = schedule_for(spec, P.params);
      const Target tgt = target_of(spec);
      if (spec.restart == "auto") {
        rr.plan = auto_plan(P.params, sched, g0, cfg.run.epsilon * g0, budget);
        StepSequence seq = expand(sched, P.params, std::max(rr.plan->K, rr.plan->T));
        res = restart(tgt, *P.oracle, P.H, seq, P.x1, *rr.plan, rng, opts);
      } else {
        StepSequence seq = expand(sched, P.params, budget);
        res = tgt == Target::kAcsmd ? run_acsmd(*P.oracle, P.H, seq, P.x1, budget, rng, opts)
                                    : run_nacsmd(*P.oracle, P.H, seq, P.x1, budget, rng, opts);
      }
      if (cfg.run.certificate) {
        CertificateReport cert = certificate_check(res.trace, P.params, P.H, psi, opt.x);
        rr.certificate = cert.ok ? "pass" : "fail";
        rr.certificate_min_slack = cert.min_scaled_slack;
      }
    }
  } catch (const NumericalError& e) {
    rr.status = "numerical_failure";
    rr.message = e.what();
  }
  rr.final_rel_gap = gaps.empty() ? 1.0 : gaps.back() / g0;

  const long thin = cfg.run.thin;
  if (keep_trace) {
    std::string csv = std::string(kTraceHeader) + "\n";
    for (size_t i = 0; i < gaps.size(); ++i) {
      if (static_cast<long>(i) % thin != 0) continue;
      const IterationRecord* rec = i < res.trace.records.size() ? &res.trace.records[i] : nullptr;
      csv += std::to_string(i + 1) + "," + sci(gaps[i]) + "," + sci(dists[i]) + "," +
             sci(rec ? rec->alpha : NAN) + "," + sci(rec ? rec->gamma : NAN) + "\n";
    }
    out.trace_csv = std::move(csv);
  }
  if (keep_plot) {
    for (size_t i = 0; i < gaps.size(); ++i) {
      if (static_cast<long>(i) % thin != 0) continue;
      out.plot.push_back(PlotPoint{static_cast<long>(i + 1), std::log10(gaps[i] / g0), spec.name,
                                   seed, rr.cell});
    }
  }
  return out;
}

SolverStats stats_for(const std::string& name, const std::vector<const RunResult*>& runs,
                      long budget) {
  SolverStats st;
  st.solver = name;
  std::vector<long> v;
  for (const RunResult* r : runs) {
    ++st.runs;
    if (r->status != "ok") ++st.failures;
    if (r->certificate == "pass") ++st.certificate_pass;
    if (r->certificate == "fail") ++st.certificate_fail;
    const bool hit = r->iterations > 0 && r->status == "ok";
    st.reached += hit;
    v.push_back(hit ? r->iterations : std::numeric_limits<long>::max());
  }
  std::sort(v.begin(), v.end());
  auto rank = [&](double P) -> std::optional<long> {
    if (v.empty()) return std::nullopt;
    size_t k = static_cast<size_t>(std::ceil(P * static_cast<double>(v.size())));
    long x = v[std::max<size_t>(k, 1) - 1];
    if (x == std::numeric_limits<long>::max()) return std::nullopt;
    return x;
  };
  st.q1 = rank(0.25);
  st.median = rank(0.5);
  st.q3 = rank(0.75);
  st.median_text = st.median ? std::to_string(*st.median) : ">" + std::to_string(budget);
  return st;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.run.seeds.empty()) throw ConfigError("run.seeds", "must not be empty");
  if (cfg.solvers.empty()) throw ConfigError("solvers", "must not be empty");
  for (const Cell& c : cells(cfg)) {
    Problem P;
    try {
      P = build_problem(cfg, c, cfg.run.seeds.front());
    } catch (const ParameterError& e) {
      throw ConfigError("instance." + e.field(), e.what());
    }
    for (size_t i = 0; i < cfg.solvers.size(); ++i) {
      const SolverSpec& s = cfg.solvers[i];
      const std::string path = "solvers[" + std::to_string(i) + "]";
      if (s.algorithm == "acsa") {
        if (cfg.instance.kappa != 2.0)
          throw ConfigError(path + ".algorithm", "acsa needs a smooth (kappa = 2) instance");
        continue;
      }
      try {
        ScheduleReport rep = validate_schedule(schedule_for(s, P.params), P.params, cfg.run.budget);
        if (!rep.ok)
          throw ConfigError(path, "step sizes violate the configuration inequalities at t=" +
                                      std::to_string(*rep.first_violation) + " in cell " + c.id());
      } catch (const ParameterError& e) {
        throw ConfigError(path + "." + e.field(), e.what());
      }
    }
  }
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  if (opts.workers < 1) throw ConfigError("workers", "must be >= 1");

  const std::vector<Cell> grid = cells(cfg);
  std::vector<Job> jobs;
  for (size_t c = 0; c < grid.size(); ++c)
    for (size_t s = 0; s < cfg.solvers.size(); ++s)
      for (size_t k = 0; k < cfg.run.seeds.size(); ++k) jobs.push_back(Job{c, s, k});

  const fs::path dir = opts.out ? *opts.out : fs::path(cfg.output.directory);
  const bool traces = opts.write && cfg.output.traces;
  const bool plot = opts.write && cfg.output.plotdata;
  if (opts.write) fs::create_directories(dir);

  std::vector<RunOutput> outputs(jobs.size());
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      try {
        outputs[i] = run_one(cfg, grid[j.cell], cfg.solvers[j.solver], cfg.run.seeds[j.seed],
                             plot, traces);
        if (traces) {
          const RunResult& r = outputs[i].result;
          std::ofstream f(dir / ("trace-" + r.cell + "_" + r.solver + "-" +
                                 std::to_string(r.seed) + ".csv"));
          f << outputs[i].trace_csv;
          outputs[i].trace_csv.clear();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(opts.workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);

  ExperimentSummary sum;
  sum.config = cfg;
  for (auto& o : outputs) {
    sum.runs.push_back(o.result);
    sum.numerical_failure = sum.numerical_failure || o.result.status != "ok";
  }
  size_t idx = 0;
  json resolved = json::array();
  for (size_t c = 0; c < grid.size(); ++c) {
    CellSummary cs;
    cs.cell = grid[c];
    const Problem P = build_problem(cfg, grid[c], cfg.run.seeds.front());
    json rc = {{"cell", grid[c].id()}, {"params_first_seed", params_json(P.params)}};
    json sv = json::array();
    for (size_t s = 0; s < cfg.solvers.size(); ++s) {
      std::vector<const RunResult*> rs;
      for (size_t k = 0; k < cfg.run.seeds.size(); ++k) rs.push_back(&sum.runs[idx++]);
      cs.stats.push_back(stats_for(cfg.solvers[s].name, rs, cfg.run.budget));
      const SolverSpec& spec = cfg.solvers[s];
      json e = {{"solver", spec.name}, {"algorithm", spec.algorithm}};
      if (spec.algorithm == "acsa") {
        AcsaConfig ac{RidgeInstance::mu_F, RidgeInstance::mu_F * grid[c].L_multiplier,
                      P.params.sigma, 1.0, cfg.run.budget};
        e["acsa"] = {{"mu", ac.mu}, {"L", ac.L}, {"sigma", ac.sigma}};
      } else {
        StepSchedule sched = schedule_for(spec, P.params);
        StepSequence seq = expand(sched, P.params, cfg.run.budget);
        e["schedule"] = {{"target", to_string(sched.target)}, {"m", sched.m},
                         {"offset", sched.offset}, {"safety_scale", sched.safety_scale},
                         {"repaired_until", seq.repaired_until}};
        e["restart"] = spec.restart;
      }
      sv.push_back(e);
    }
    rc["solvers"] = sv;
    resolved.push_back(rc);
    sum.cells.push_back(std::move(cs));
  }
  sum.resolved = resolved;

  if (opts.write) {
    json manifest = {{"schema", kSummarySchema}, {"files", json::array()}};
    auto add = [&](const std::string& name) {
      manifest["files"].push_back({{"name", name}, {"bytes", fs::file_size(dir / name)}});
    };
    if (traces)
      for (const auto& r : sum.runs)
        add("trace-" + r.cell + "_" + r.solver + "-" + std::to_string(r.seed) + ".csv");
    if (plot) {
      std::vector<PlotPoint> pts;
      for (auto& o : outputs) pts.insert(pts.end(), o.plot.begin(), o.plot.end());
      write_atomic(dir / "plotdata.csv", emit_plotdata(pts));
      add("plotdata.csv");
    }
    write_atomic(dir / "summary.json", summary_to_json(sum).dump(2) + "\n");
    add("summary.json");
    Table t = emit_table({sum});
    write_atomic(dir / "table.csv", t.csv);
    add("table.csv");
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return sum;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace ccmd::bench
