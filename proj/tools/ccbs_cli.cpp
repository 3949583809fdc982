// Command-line front end: `solve` for single instances, `batch` for seeded sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ccbs/ccbs.hpp"
#include "ccbs/io.hpp"
#include "ccbs/validator.hpp"

namespace {

using namespace ccbs;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitTimeout = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

// "WxH" builds an open grid; anything else is a .map path.
GridMap load_grid(const std::string& spec) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream ss(spec);
  if (!std::filesystem::exists(spec) && (ss >> w >> x >> h) && x == 'x' && ss.eof() && w > 0 && h > 0)
    return GridMap(w, h);
  return parse_map(read_file(spec));
}

std::string map_name(const std::string& spec) {
  if (!std::filesystem::exists(spec)) return "open" + spec;
  return std::filesystem::path(spec).stem().string();
}

// Grid endpoints are "x,y" cells; roadmap endpoints are vertex labels.
int parse_endpoint(const Graph& g, const std::string& text, bool grid) {
  if (grid) {
    Cell c;
    char comma = 0;
    std::istringstream ss(text);
    if (!(ss >> c.x >> comma >> c.y) || comma != ',' || !ss.eof())
      throw InputError("expected a cell 'x,y', got '" + text + "'");
    const auto v = g.vertex_at(c);
    if (!v) throw InputError("cell " + text + " is blocked or outside the map");
    return *v;
  }
  int label = 0;
  std::istringstream ss(text);
  if (!(ss >> label) || !ss.eof()) throw InputError("expected a vertex id, got '" + text + "'");
  const auto v = g.vertex_with_label(label);
  if (!v) throw InputError("unknown vertex id " + text);
  return *v;
}

struct SolveOptions {
  std::string map, roadmap, scen;
  std::vector<std::string> agent_pairs;
  int agents = -1;
  int k = 2;
  std::string heuristic = "hybrid";
  double timeout = 60.0;
  double delta = 0.1;
  double radius = kDefaultRadius;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out = "-", stats_out, trace_out;
  bool validate = false;
};

int run_solve(const SolveOptions& o) {
  const auto heuristic = parse_heuristic(o.heuristic);
  if (!heuristic) throw InputError("unknown heuristic '" + o.heuristic + "'");
  Instance inst;
  std::string name;
  const bool grid = !o.map.empty();
  if (grid == !o.roadmap.empty()) throw InputError("give exactly one of --map or --roadmap");
  if (grid) {
    inst.graph = build_graph(load_grid(o.map), o.k, o.radius);
    name = map_name(o.map);
  } else {
    inst.graph = load_roadmap(read_file(o.roadmap));
    name = std::filesystem::path(o.roadmap).stem().string();
  }
  if (!o.agent_pairs.empty()) {
    for (std::size_t i = 0; i + 1 < o.agent_pairs.size(); i += 2)
      inst.agents.push_back({static_cast<int>(i / 2), parse_endpoint(inst.graph, o.agent_pairs[i], grid),
                             parse_endpoint(inst.graph, o.agent_pairs[i + 1], grid), o.radius, 1.0});
  } else if (!o.scen.empty()) {
    if (!grid) throw InputError("--scen needs --map");
    inst = instance_from_scen(inst.graph, parse_scen(read_file(o.scen)), o.agents, o.radius);
  } else {
    if (o.agents < 0) throw InputError("give --agent pairs, --scen, or --agents with --seed");
    inst = generate_scenario(inst.graph, o.agents, o.seed, o.radius);
  }
  check_instance(inst);

  SolverConfig cfg;
  cfg.heuristic = *heuristic;
  cfg.timeout = o.timeout;
  cfg.delta = o.delta;
  cfg.log = [](const std::string& msg) { std::cerr << "note: " << msg << '\n'; };
  CcbsSolver solver(inst, cfg);
  std::ostringstream trace;
  if (!o.trace_out.empty()) {
    trace << "node,parent,cost,expanded,constraint,conflict\n";
    solver.on_trace = [&](const TraceEvent& e) {
      trace << e.node << ',' << e.parent << ',' << io::fmt(e.cost) << ',' << (e.expanded ? 1 : 0) << ',';
      if (e.constraint) {
        const auto& c = *e.constraint;
        trace << "a" << c.agent << ' ' << to_string(c.kind) << ' ' << inst.graph.labels[static_cast<std::size_t>(c.from)]
              << ' ' << inst.graph.labels[static_cast<std::size_t>(c.to)] << " [" << io::fmt(c.interval.lo) << ' '
              << io::fmt(c.interval.hi) << ')';
      }
      trace << ',';
      if (e.conflict) {
        const auto& c = *e.conflict;
        trace << "a" << c.i << '@' << io::fmt(c.t_i) << " a" << c.j << '@' << io::fmt(c.t_j) << ' '
              << to_string(c.cardinality);
      }
      trace << '\n';
    };
  }
  const auto sol = solver.solve();
  const auto& st = solver.stats();
  if (!o.trace_out.empty()) write_file(o.trace_out, trace.str());

  io::RunRecord rec{name, o.k, static_cast<int>(inst.agents.size()), to_string(*heuristic), o.seed, st};
  if (!o.stats_out.empty()) {
    const std::string text = o.format == "json" ? io::to_json(rec).dump(2) + "\n"
                                                : std::string(io::kCsvHeader) + "\n" + io::csv_row(rec) + "\n";
    write_file(o.stats_out, text);
  }
  if (!sol) {
    if (st.timed_out) {
      std::cerr << "timeout after " << io::fmt(st.runtime, 3) << " s\n";
      return kExitTimeout;
    }
    std::cerr << "no solution exists\n";
    return kExitInput;
  }
  write_file(o.out, io::write_solution(inst.graph, *sol));
  (o.out == "-" ? std::cerr : std::cout) << "soc " << io::fmt(sol->soc, 4) << '\n';
  if (o.validate) {
    const auto report = validate(inst, sol->plans);
    if (!report.ok()) {
      std::cerr << report.to_text();
      return kExitInput;
    }
    std::cerr << "validation ok\n";
  }
  return kExitOk;
}

struct BatchOptions {
  std::string map = "10x10";
  std::vector<int> agents{4};
  std::vector<int> ks{2};
  std::vector<std::string> heuristics{"hybrid"};
  std::vector<std::string> seed_list;
  std::vector<std::uint64_t> seeds;
  int seed_count = -1;
  double timeout = 60.0;
  double delta = 0.1;
  double radius = kDefaultRadius;
  double threshold = 0.4;
  std::string format = "csv";
  std::string out = "-", summary_out;
  bool with_runtime = false;
};

int run_batch(BatchOptions o) {
  for (const auto& text : o.seed_list) {
    if (text.empty()) continue;
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.front() == '-') throw InputError("bad seed '" + text + "'");
    o.seeds.push_back(v);
  }
  if (o.seed_count >= 0)
    for (int s = 0; s < o.seed_count; ++s) o.seeds.push_back(static_cast<std::uint64_t>(s));
  std::vector<Heuristic> hs;
  for (const auto& h : o.heuristics) {
    const auto parsed = parse_heuristic(h);
    if (!parsed) throw InputError("unknown heuristic '" + h + "'");
    hs.push_back(*parsed);
  }
  const GridMap grid = load_grid(o.map);
  const std::string name = map_name(o.map);
  // Instances are drawn on the 4-connected graph so every k sees the same agents.
  const Graph g2 = build_graph(grid, 2, o.radius);
  std::vector<io::RunRecord> records;
  for (int k : o.ks) {
    const Graph g = build_graph(grid, k, o.radius);
    for (int n : o.agents) {
      for (auto seed : o.seeds) {
        Instance base;
        try {
          base = generate_scenario(g2, n, seed, o.radius);
        } catch (const GenerationError& e) {
          std::cerr << "seed " << seed << ": " << e.what() << '\n';
          continue;
        }
        Instance inst{g, {}};
        for (const auto& a : base.agents)
          inst.agents.push_back({a.id, *g.vertex_at(g2.cells[static_cast<std::size_t>(a.start)]),
                                 *g.vertex_at(g2.cells[static_cast<std::size_t>(a.goal)]), a.radius, a.speed});
        for (auto h : hs) {
          SolverConfig cfg;
          cfg.heuristic = h;
          cfg.timeout = o.timeout;
          cfg.delta = o.delta;
          auto [sol, st] = solve(inst, cfg);
          records.push_back({name, k, n, to_string(h), seed, st});
        }
      }
    }
  }
  std::ostringstream out;
  if (o.format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) arr.push_back(io::to_json(r, o.with_runtime));
    out << arr.dump(2) << '\n';
  } else {
    out << io::kCsvHeader << '\n';
    for (const auto& r : records) out << io::csv_row(r, o.with_runtime) << '\n';
  }
  write_file(o.out, out.str());
  if (!o.summary_out.empty()) write_file(o.summary_out, io::summary_table(io::summarize(records, o.threshold)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time conflict-based search for disk agents"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  solve_cmd->add_option("--map", so.map, "movingai .map file, or WxH for an open grid");
  solve_cmd->add_option("--roadmap", so.roadmap, "roadmap file ('v id x y' / 'e id id' lines)");
  solve_cmd->add_option("--scen", so.scen, "movingai .scen file");
  solve_cmd->add_option("--agent", so.agent_pairs, "START GOAL (cells 'x,y' on maps, ids on roadmaps)")
      ->expected(2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  solve_cmd->add_option("--agents", so.agents, "number of agents from the scen, or random with --seed");
  solve_cmd->add_option("--k", so.k, "neighborhood level (2..5)");
  solve_cmd->add_option("--heuristic", so.heuristic, "vanilla|past|cardinals|hybrid");
  solve_cmd->add_option("--timeout", so.timeout, "seconds");
  solve_cmd->add_option("--delta", so.delta, "unsafe-interval sweep step");
  solve_cmd->add_option("--radius", so.radius, "agent radius");
  solve_cmd->add_option("--seed", so.seed, "seed for random agents");
  solve_cmd->add_option("--format", so.format, "stats format: csv|json")->check(CLI::IsMember({"csv", "json"}));
  solve_cmd->add_option("--out", so.out, "solution file ('-' for stdout)");
  solve_cmd->add_option("--stats", so.stats_out, "stats file");
  solve_cmd->add_option("--trace", so.trace_out, "per-node search trace (csv)");
  solve_cmd->add_flag("--validate", so.validate, "check the solution with the sampling validator");

  BatchOptions bo;
  auto* batch_cmd = app.add_subcommand("batch", "Run a seeded parameter sweep on a grid");
  batch_cmd->add_option("--map", bo.map, "movingai .map file, or WxH for an open grid");
  batch_cmd->add_option("--agents", bo.agents, "agent counts")->delimiter(',');
  batch_cmd->add_option("--k", bo.ks, "neighborhood levels")->delimiter(',');
  batch_cmd->add_option("--heuristic", bo.heuristics, "heuristics")->delimiter(',');
  batch_cmd->add_option("--seeds", bo.seed_list, "explicit seeds")->delimiter(',');
  batch_cmd->add_option("--seed-count", bo.seed_count, "use seeds 0..N-1");
  batch_cmd->add_option("--timeout", bo.timeout, "seconds per solve");
  batch_cmd->add_option("--delta", bo.delta, "unsafe-interval sweep step");
  batch_cmd->add_option("--radius", bo.radius, "agent radius");
  batch_cmd->add_option("--threshold", bo.threshold, "success rate needed to enter the SOC average");
  batch_cmd->add_option("--format", bo.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  batch_cmd->add_option("--out", bo.out, "per-run results ('-' for stdout)");
  batch_cmd->add_option("--summary", bo.summary_out, "per-configuration summary table");
  batch_cmd->add_flag("--with-runtime", bo.with_runtime, "fill the runtime column (output is then not reproducible)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve_cmd->parsed()) return run_solve(so);
    return run_batch(bo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitInput;
}
