#include <charconv>
#include <cmath>
#include <sstream>

#include "ccmd/bench.hpp"
#include "ccmd/errors.hpp"

namespace ccmd::bench {

namespace {

json opt_json(const std::optional<long>& v) { return v ? json(*v) : json(nullptr); }

std::optional<long> opt_long(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<long>();
}

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string pad(const std::string& s, size_t w, bool left) {
  if (s.size() >= w) return s;
  return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

}  // namespace

json summary_to_json(const ExperimentSummary& s) {
  json cells = json::array();
  for (const auto& c : s.cells) {
    json stats = json::array();
    for (const auto& st : c.stats)
      stats.push_back({{"solver", st.solver},
                       {"median", opt_json(st.median)},
                       {"q1", opt_json(st.q1)},
                       {"q3", opt_json(st.q3)},
                       {"median_text", st.median_text},
                       {"reached", st.reached},
                       {"runs", st.runs},
                       {"certificate_pass", st.certificate_pass},
                       {"certificate_fail", st.certificate_fail},
                       {"failures", st.failures}});
    cells.push_back({{"cell", c.cell.id()},
                     {"d", c.cell.d},
                     {"L_multiplier", c.cell.L_multiplier},
                     {"solvers", stats}});
  }
  json runs = json::array();
  for (const auto& r : s.runs) {
    json e = {{"cell", r.cell},
              {"solver", r.solver},
              {"seed", r.seed},
              {"iterations", r.iterations > 0 ? json(r.iterations) : json(nullptr)},
              {"initial_gap", r.initial_gap},
              {"final_rel_gap", r.final_rel_gap},
              {"certificate", r.certificate},
              {"certificate_min_slack", r.certificate == "skipped" ? json(nullptr)
                                                                   : json(r.certificate_min_slack)},
              {"status", r.status}};
    if (!r.message.empty()) e["message"] = r.message;
    if (r.plan)
      e["restart_plan"] = {{"n", r.plan->n}, {"K", r.plan->K}, {"T", r.plan->T},
                           {"K1", r.plan->K1}, {"T_capped", r.plan->T_capped}};
    runs.push_back(e);
  }
  return {{"schema", kSummarySchema},
          {"config", to_json(s.config)},
          {"resolved", s.resolved},
          {"cells", cells},
          {"runs", runs},
          {"numerical_failure", s.numerical_failure}};
}

ExperimentSummary summary_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kSummarySchema)
    throw ParameterError("schema", "not a " + std::string(kSummarySchema) + " document");
  ExperimentSummary s;
  json cfg = j.at("config");
  std::vector<std::string> overrides = cfg.value("overrides", std::vector<std::string>{});
  cfg.erase("overrides");
  s.config = parse_config(cfg);
  s.config.overrides = overrides;
  s.resolved = j.value("resolved", json::array());
  for (const auto& c : j.at("cells")) {
    CellSummary cs;
    cs.cell = Cell{c.at("d").get<int>(), c.at("L_multiplier").get<double>()};
    for (const auto& st : c.at("solvers")) {
      SolverStats x;
      x.solver = st.at("solver").get<std::string>();
      x.median = opt_long(st.at("median"));
      x.q1 = opt_long(st.at("q1"));
      x.q3 = opt_long(st.at("q3"));
      x.median_text = st.at("median_text").get<std::string>();
      x.reached = st.at("reached").get<long>();
      x.runs = st.at("runs").get<long>();
      x.certificate_pass = st.at("certificate_pass").get<long>();
      x.certificate_fail = st.at("certificate_fail").get<long>();
      x.failures = st.at("failures").get<long>();
      cs.stats.push_back(std::move(x));
    }
    s.cells.push_back(std::move(cs));
  }
  for (const auto& r : j.at("runs")) {
    RunResult rr;
    rr.cell = r.at("cell").get<std::string>();
    rr.solver = r.at("solver").get<std::string>();
    rr.seed = r.at("seed").get<std::uint64_t>();
    rr.iterations = r.at("iterations").is_null() ? -1 : r.at("iterations").get<long>();
    rr.initial_gap = r.at("initial_gap").get<double>();
    rr.final_rel_gap = r.at("final_rel_gap").get<double>();
    rr.certificate = r.at("certificate").get<std::string>();
    if (!r.at("certificate_min_slack").is_null())
      rr.certificate_min_slack = r.at("certificate_min_slack").get<double>();
    rr.status = r.at("status").get<std::string>();
    rr.message = r.value("message", "");
    s.runs.push_back(std::move(rr));
  }
  s.numerical_failure = j.value("numerical_failure", false);
  return s;
}

Table emit_table(const std::vector<ExperimentSummary>& summaries) {
  if (summaries.empty()) throw ParameterError("summaries", "nothing to tabulate");
  std::vector<std::string> columns;
  for (const auto& st : summaries.front().cells.front().stats) columns.push_back(st.solver);
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : summaries)
    for (const auto& c : s.cells) {
      std::vector<std::string> names;
      for (const auto& st : c.stats) names.push_back(st.solver);
      if (names != columns) throw ParameterError("summaries", "mixed solver columns");
      std::ostringstream L;
      L << c.cell.L_multiplier;
      std::vector<std::string> row = {c.cell.id(), std::to_string(c.cell.d), L.str()};
      for (const auto& st : c.stats) row.push_back(st.median_text);
      rows.push_back(std::move(row));
    }

  std::vector<std::string> header = {"cell", "d", "L_multiplier"};
  header.insert(header.end(), columns.begin(), columns.end());
  std::vector<size_t> w(header.size());
  for (size_t i = 0; i < header.size(); ++i) {
    w[i] = header[i].size();
    for (const auto& r : rows) w[i] = std::max(w[i], r[i].size());
  }
  Table t;
  auto line = [&](const std::vector<std::string>& r) {
    std::string s;
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) s += "  ";
      s += pad(r[i], w[i], i == 0);
    }
    return s + "\n";
  };
  auto csv = [](const std::vector<std::string>& r) {
    std::string s;
    for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    return s + "\n";
  };
  t.text = line(header);
  t.csv = csv(header);
  for (const auto& r : rows) {
    t.text += line(r);
    t.csv += csv(r);
  }
  return t;
}

std::string emit_plotdata(const std::vector<PlotPoint>& points) {
  std::string out = std::string(kPlotHeader) + "\n";
  for (const auto& p : points) {
    if (p.algorithm.find_first_of(",\n") != std::string::npos ||
        p.cell.find_first_of(",\n") != std::string::npos)
      throw ParameterError("plotdata", "labels must not contain commas or newlines");
    out += std::to_string(p.t) + "," + shortest(p.log_rel_error) + "," + p.algorithm + "," +
           std::to_string(p.seed) + "," + p.cell + "\n";
  }
  return out;
}

std::vector<PlotPoint> parse_plotdata(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kPlotHeader)
    throw ParameterError("plotdata", "unexpected header");
  std::vector<PlotPoint> out;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    size_t pos = 0;
    for (;;) {
      size_t c = line.find(',', pos);
      f.push_back(line.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    if (f.size() != 5) throw ParameterError("plotdata", "line " + std::to_string(lineno));
    PlotPoint p;
    auto num = [&](const std::string& s, auto& v) {
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ParameterError("plotdata", "bad number on line " + std::to_string(lineno));
    };
    num(f[0], p.t);
    num(f[1], p.log_rel_error);
    p.algorithm = f[2];
    num(f[3], p.seed);
    p.cell = f[4];
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ccmd::bench
