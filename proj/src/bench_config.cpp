#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ccmd/bench.hpp"
#include "ccmd/errors.hpp"

namespace ccmd::bench {

namespace {

const std::set<std::string> kTopKeys = {"instance", "grid", "solvers", "run", "output"};
const std::set<std::string> kInstanceKeys = {"kind", "d", "q", "kappa", "mu", "sigma_b",
                                             "x1", "x_star_scale", "R", "box", "L_multiplier"};
const std::set<std::string> kGridKeys = {"d", "L_multiplier"};
const std::set<std::string> kSolverKeys = {"name", "algorithm", "m", "offset", "safety_scale",
                                           "restart"};
const std::set<std::string> kRunKeys = {"epsilon", "budget", "seeds", "thin", "certificate"};
const std::set<std::string> kOutputKeys = {"directory", "traces", "plotdata"};

void require_object(const json& j, const std::string& path, const std::set<std::string>& keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

// Reads j[key] into out if present, recording an override when it differs
// from the default already held in out.
template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out,
          std::vector<std::string>& overrides) {
  if (!j.contains(key)) return;
  const std::string full = path + "." + key;
  T v;
  try {
    v = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(full, "wrong type");
  }
  if (!(v == out)) overrides.push_back(full);
  out = v;
}

std::vector<int> read_dims(const json& v, const std::string& path) {
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(path, "dimensions must be integers");
      out.push_back(e.get<int>());
    }
  } else {
    throw ConfigError(path, "expected an integer or a list");
  }
  if (out.empty()) throw ConfigError(path, "must not be empty");
  for (int d : out)
    if (d < 1) throw ConfigError(path, "dimensions must be >= 1");
  return out;
}

std::vector<double> read_numbers(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path, "expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(path, "expected a number or a list");
  }
  if (out.empty()) throw ConfigError(path, "must not be empty");
  return out;
}

SolverSpec parse_solver(const json& j, const std::string& path) {
  require_object(j, path, kSolverKeys);
  SolverSpec s;
  std::vector<std::string> ignored;
  if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError(path + ".name", "required");
  if (!j.contains("algorithm") || !j.at("algorithm").is_string())
    throw ConfigError(path + ".algorithm", "required");
  s.name = j.at("name").get<std::string>();
  s.algorithm = j.at("algorithm").get<std::string>();
  if (s.algorithm != "nacsmd" && s.algorithm != "acsmd" && s.algorithm != "acsa")
    throw ConfigError(path + ".algorithm", "unknown algorithm '" + s.algorithm + "'");
  if (j.contains("m") && !j.at("m").is_null() && j.at("m") != "default") {
    if (!j.at("m").is_number()) throw ConfigError(path + ".m", "expected a number or \"default\"");
    s.m = j.at("m").get<double>();
  }
  if (j.contains("offset")) {
    const json& o = j.at("offset");
    if (!(o.is_number() || o == "default" || o == "condition"))
      throw ConfigError(path + ".offset", "expected a number, \"default\" or \"condition\"");
    s.offset = o;
  }
  read(j, path, "safety_scale", s.safety_scale, ignored);
  read(j, path, "restart", s.restart, ignored);
  if (s.restart != "none" && s.restart != "auto")
    throw ConfigError(path + ".restart", "expected \"none\" or \"auto\"");
  if (s.algorithm == "acsa" && s.restart != "none")
    throw ConfigError(path + ".restart", "acsa restarts internally");
  if (!(s.safety_scale >= 1.0)) throw ConfigError(path + ".safety_scale", "must be >= 1");
  return s;
}

json solver_to_json(const SolverSpec& s) {
  json j = {{"name", s.name}, {"algorithm", s.algorithm}};
  j["m"] = s.m ? json(*s.m) : json("default");
  j["offset"] = s.offset;
  j["safety_scale"] = s.safety_scale;
  j["restart"] = s.restart;
  return j;
}

}  // namespace

std::vector<SolverSpec> default_solvers() {
  std::vector<SolverSpec> out;
  out.push_back(SolverSpec{"Lan", "acsa", std::nullopt, "default", 1.0, "none"});
  out.push_back(SolverSpec{"NACSMD", "nacsmd", std::nullopt, "default", 1.0, "auto"});
  for (int k = 1; k <= 3; ++k)
    out.push_back(SolverSpec{"ACSMD" + std::to_string(k), "acsmd", static_cast<double>(k),
                             "condition", 1.0, "none"});
  return out;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.solvers = default_solvers();
  for (std::uint64_t s = 0; s < 20; ++s) cfg.run.seeds.push_back(s);
  return cfg;
}

ExperimentConfig parse_config(const json& j) {
  require_object(j, "", kTopKeys);
  ExperimentConfig cfg = default_config();
  auto& ov = cfg.overrides;

  if (j.contains("instance")) {
    const json& in = j.at("instance");
    require_object(in, "instance", kInstanceKeys);
    InstanceSpec& I = cfg.instance;
    read(in, "instance", "kind", I.kind, ov);
    if (I.kind != "ridge" && I.kind != "ridge_deterministic")
      throw ConfigError("instance.kind",
                        "expected ridge or ridge_deterministic (the Bernoulli instance runs "
                        "through the lowerbound command)");
    read(in, "instance", "q", I.q, ov);
    read(in, "instance", "kappa", I.kappa, ov);
    read(in, "instance", "mu", I.mu, ov);
    read(in, "instance", "sigma_b", I.sigma_b, ov);
    read(in, "instance", "x1", I.x1, ov);
    read(in, "instance", "x_star_scale", I.x_star_scale, ov);
    if (in.contains("R") && !in.at("R").is_null() && in.at("R") != "auto") {
      if (!in.at("R").is_number()) throw ConfigError("instance.R", "expected a number or \"auto\"");
      I.R = in.at("R").get<double>();
      ov.push_back("instance.R");
    }
    if (in.contains("box") && !in.at("box").is_null()) {
      if (!in.at("box").is_number()) throw ConfigError("instance.box", "expected a number");
      I.box = in.at("box").get<double>();
      ov.push_back("instance.box");
    }
    if (in.contains("d")) {
      cfg.d = read_dims(in.at("d"), "instance.d");
      if (cfg.d != std::vector<int>{50}) ov.push_back("instance.d");
    }
    if (in.contains("L_multiplier")) {
      cfg.L_multiplier = read_numbers(in.at("L_multiplier"), "instance.L_multiplier");
      if (cfg.L_multiplier != std::vector<double>{1.0}) ov.push_back("instance.L_multiplier");
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_object(g, "grid", kGridKeys);
    if (g.contains("d")) {
      cfg.d = read_dims(g.at("d"), "grid.d");
      if (cfg.d != std::vector<int>{50}) ov.push_back("grid.d");
    }
    if (g.contains("L_multiplier")) {
      cfg.L_multiplier = read_numbers(g.at("L_multiplier"), "grid.L_multiplier");
      if (cfg.L_multiplier != std::vector<double>{1.0}) ov.push_back("grid.L_multiplier");
    }
  }
  for (double m : cfg.L_multiplier)
    if (!(m > 0.0)) throw ConfigError("grid.L_multiplier", "must be > 0");

  if (j.contains("solvers")) {
    const json& s = j.at("solvers");
    if (!s.is_array() || s.empty()) throw ConfigError("solvers", "expected a non-empty list");
    cfg.solvers.clear();
    std::set<std::string> names;
    for (size_t i = 0; i < s.size(); ++i) {
      SolverSpec sp = parse_solver(s[i], "solvers[" + std::to_string(i) + "]");
      if (!names.insert(sp.name).second)
        throw ConfigError("solvers[" + std::to_string(i) + "].name", "duplicate name");
      cfg.solvers.push_back(std::move(sp));
    }
    json now = json::array(), def = json::array();
    for (const auto& sp : cfg.solvers) now.push_back(solver_to_json(sp));
    for (const auto& sp : default_solvers()) def.push_back(solver_to_json(sp));
    if (now != def) ov.push_back("solvers");
  }

  if (j.contains("run")) {
    const json& r = j.at("run");
    require_object(r, "run", kRunKeys);
    read(r, "run", "epsilon", cfg.run.epsilon, ov);
    read(r, "run", "budget", cfg.run.budget, ov);
    read(r, "run", "thin", cfg.run.thin, ov);
    read(r, "run", "certificate", cfg.run.certificate, ov);
    read(r, "run", "seeds", cfg.run.seeds, ov);
  }
  if (cfg.run.seeds.empty()) throw ConfigError("run.seeds", "must not be empty");
  if (!(cfg.run.epsilon > 0.0 && cfg.run.epsilon < 1.0))
    throw ConfigError("run.epsilon", "must lie in (0, 1)");
  if (cfg.run.budget < 1) throw ConfigError("run.budget", "must be >= 1");
  if (cfg.run.thin < 1) throw ConfigError("run.thin", "must be >= 1");

  if (j.contains("output")) {
    const json& o = j.at("output");
    require_object(o, "output", kOutputKeys);
    std::vector<std::string> ignored;
    read(o, "output", "directory", cfg.output.directory, ignored);
    read(o, "output", "traces", cfg.output.traces, ignored);
    read(o, "output", "plotdata", cfg.output.plotdata, ignored);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  const InstanceSpec& I = cfg.instance;
  json inst = {{"kind", I.kind},       {"q", I.q},
               {"kappa", I.kappa},     {"mu", I.mu},
               {"sigma_b", I.sigma_b}, {"x1", I.x1},
               {"x_star_scale", I.x_star_scale}};
  inst["R"] = I.R ? json(*I.R) : json("auto");
  inst["box"] = std::isfinite(I.box) ? json(I.box) : json(nullptr);
  json solvers = json::array();
  for (const auto& s : cfg.solvers) solvers.push_back(solver_to_json(s));
  return {{"instance", inst},
          {"grid", {{"d", cfg.d}, {"L_multiplier", cfg.L_multiplier}}},
          {"solvers", solvers},
          {"run",
           {{"epsilon", cfg.run.epsilon},
            {"budget", cfg.run.budget},
            {"seeds", cfg.run.seeds},
            {"thin", cfg.run.thin},
            {"certificate", cfg.run.certificate}}},
          {"output",
           {{"directory", cfg.output.directory},
            {"traces", cfg.output.traces},
            {"plotdata", cfg.output.plotdata}}},
          {"overrides", cfg.overrides}};
}

std::string Cell::id() const {
  std::ostringstream os;
  os << "d" << d << "-L" << L_multiplier;
  return os.str();
}

std::vector<Cell> cells(const ExperimentConfig& cfg) {
  std::vector<Cell> out;
  for (double m : cfg.L_multiplier)
    for (int d : cfg.d) out.push_back(Cell{d, m});
  return out;
}

}  // namespace ccmd::bench
