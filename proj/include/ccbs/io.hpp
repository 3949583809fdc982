#pragma once

// Text formats for solutions and run statistics, plus batch aggregation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ccbs/ccbs.hpp"

namespace ccbs::io {

inline std::string fmt(double v, int digits = 6) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Header `soc <v> makespan <v>`, then per agent an `agent <id>` line followed by
/// `move|wait from to t_start duration` lines. Vertex ids are written as labels.
inline std::string write_solution(const Graph& g, const Solution& sol) {
  std::ostringstream out;
  out << "soc " << fmt(sol.soc) << " makespan " << fmt(sol.makespan) << '\n';
  for (const auto& p : sol.plans) {
    out << "agent " << p.agent << '\n';
    for (const auto& a : p.actions)
      out << to_string(a.kind) << ' ' << g.labels[static_cast<std::size_t>(a.from)] << ' '
          << g.labels[static_cast<std::size_t>(a.to)] << ' ' << fmt(a.t_start, 9) << ' ' << fmt(a.duration, 9)
          << '\n';
  }
  return out.str();
}

/// Inverse of write_solution. Throws ParseError with the offending line.
inline Solution read_solution(const Graph& g, const std::string& text) {
  Solution sol;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  const auto vertex = [&](int label) {
    const auto v = g.vertex_with_label(label);
    if (!v) throw ParseError("unknown vertex " + std::to_string(label), lineno);
    return *v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!header) {
      std::string mk;
      if (key != "soc" || !(ls >> sol.soc >> mk >> sol.makespan) || mk != "makespan")
        throw ParseError("expected 'soc <v> makespan <v>'", lineno);
      header = true;
    } else if (key == "agent") {
      Plan p;
      if (!(ls >> p.agent)) throw ParseError("expected agent id", lineno);
      sol.plans.push_back(p);
    } else if (key == "move" || key == "wait") {
      if (sol.plans.empty()) throw ParseError("action before any agent block", lineno);
      int from = 0, to = 0;
      TimedAction a;
      a.kind = key == "move" ? ActionKind::move : ActionKind::wait;
      if (!(ls >> from >> to >> a.t_start >> a.duration)) throw ParseError("malformed action", lineno);
      a.from = vertex(from);
      a.to = vertex(to);
      auto& p = sol.plans.back();
      p.actions.push_back(a);
      p.cost = a.t_end();
    } else {
      throw ParseError("unexpected token '" + key + "'", lineno);
    }
  }
  if (!header) throw ParseError("empty solution file", std::max(lineno, 1));
  return sol;
}

/// One solver run as reported by the batch harness.
struct RunRecord {
  std::string map;
  int k = 2;
  int agents = 0;
  std::string heuristic;
  std::uint64_t seed = 0;
  Stats stats;
};

inline const char* kCsvHeader = "map,k,agents,heuristic,seed,success,soc,makespan,hl_expanded,ll_calls,runtime";

inline std::string csv_row(const RunRecord& r, bool include_runtime = true) {
  std::ostringstream out;
  const auto& s = r.stats;
  out << r.map << ',' << r.k << ',' << r.agents << ',' << r.heuristic << ',' << r.seed << ',' << (s.success ? 1 : 0)
      << ',' << (s.success ? fmt(s.soc) : "") << ',' << (s.success ? fmt(s.makespan) : "") << ',' << s.hl_expanded
      << ',' << s.ll_calls << ',' << (include_runtime ? fmt(s.runtime, 4) : "");
  return out.str();
}

inline nlohmann::ordered_json to_json(const RunRecord& r, bool include_runtime = true) {
  nlohmann::ordered_json j;
  const auto& s = r.stats;
  j["map"] = r.map;
  j["k"] = r.k;
  j["agents"] = r.agents;
  j["heuristic"] = r.heuristic;
  j["seed"] = r.seed;
  j["success"] = s.success;
  j["timed_out"] = s.timed_out;
  j["soc"] = s.success ? nlohmann::ordered_json(s.soc) : nlohmann::ordered_json(nullptr);
  j["makespan"] = s.success ? nlohmann::ordered_json(s.makespan) : nlohmann::ordered_json(nullptr);
  j["hl_expanded"] = s.hl_expanded;
  j["ll_calls"] = s.ll_calls;
  if (include_runtime) j["runtime"] = s.runtime;
  return j;
}

/// Aggregate for one (map, agents, k, heuristic) configuration.
struct Summary {
  std::string map;
  int agents = 0;
  int k = 0;
  std::string heuristic;
  int runs = 0;
  int solved = 0;
  bool qualifies = false;  // success rate at or above the threshold
  int common = 0;          // instances solved by every qualifying configuration
  double mean_soc = NAN;   // over the common instances
  double mean_hl_expanded = NAN;

  double success_rate() const { return runs ? static_cast<double>(solved) / runs : 0.0; }
};

/// Success rates per configuration and mean SOC over the instances solved by all
/// configurations (same map and agent count) whose success rate reaches `threshold`.
inline std::vector<Summary> summarize(const std::vector<RunRecord>& runs, double threshold = 0.4) {
  using Config = std::tuple<std::string, int, int, std::string>;  // map, agents, k, heuristic
  using Group = std::pair<std::string, int>;
  std::map<Config, std::vector<const RunRecord*>> by_config;
  for (const auto& r : runs) by_config[{r.map, r.agents, r.k, r.heuristic}].push_back(&r);

  std::map<Config, Summary> out;
  std::map<Group, std::vector<Config>> qualifying;
  for (const auto& [cfg, recs] : by_config) {
    Summary s;
    std::tie(s.map, s.agents, s.k, s.heuristic) = cfg;
    s.runs = static_cast<int>(recs.size());
    for (const auto* r : recs) s.solved += r->stats.success ? 1 : 0;
    s.qualifies = s.runs > 0 && s.success_rate() >= threshold;
    if (s.qualifies) qualifying[{s.map, s.agents}].push_back(cfg);
    out[cfg] = s;
  }
  for (const auto& [group, cfgs] : qualifying) {
    std::set<std::uint64_t> common;
    bool first = true;
    for (const auto& cfg : cfgs) {
      std::set<std::uint64_t> solved;
      for (const auto* r : by_config[cfg])
        if (r->stats.success) solved.insert(r->seed);
      if (first) {
        common = solved;
        first = false;
      } else {
        std::set<std::uint64_t> keep;
        std::set_intersection(common.begin(), common.end(), solved.begin(), solved.end(),
                              std::inserter(keep, keep.begin()));
        common = std::move(keep);
      }
    }
    for (const auto& cfg : cfgs) {
      auto& s = out[cfg];
      s.common = static_cast<int>(common.size());
      if (common.empty()) continue;
      double soc = 0.0, hl = 0.0;
      for (const auto* r : by_config[cfg]) {
        if (!common.count(r->seed)) continue;
        soc += r->stats.soc;
        hl += static_cast<double>(r->stats.hl_expanded);
      }
      s.mean_soc = soc / static_cast<double>(common.size());
      s.mean_hl_expanded = hl / static_cast<double>(common.size());
    }
  }
  std::vector<Summary> result;
  for (auto& [cfg, s] : out) result.push_back(s);
  return result;
}

inline std::string summary_table(const std::vector<Summary>& rows) {
  std::ostringstream out;
  out << "map,agents,k,heuristic,runs,solved,success_rate,qualifies,common,mean_soc,mean_hl_expanded\n";
  for (const auto& s : rows) {
    out << s.map << ',' << s.agents << ',' << s.k << ',' << s.heuristic << ',' << s.runs << ',' << s.solved << ','
        << fmt(s.success_rate(), 3) << ',' << (s.qualifies ? 1 : 0) << ',' << s.common << ','
        << (std::isnan(s.mean_soc) ? "" : fmt(s.mean_soc, 4)) << ','
        << (std::isnan(s.mean_hl_expanded) ? "" : fmt(s.mean_hl_expanded, 2)) << '\n';
  }
  return out.str();
}

}  // namespace ccbs::io
