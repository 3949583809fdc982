#pragma once

// movingai .map/.scen parsing, 2^k-neighborhood grid graphs, roadmaps and
// random scenario generation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccbs/geometry.hpp"

namespace ccbs {

inline const double kDefaultRadius = std::sqrt(2.0) / 4.0;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Cell {
  int x = 0;  // column
  int y = 0;  // row, 0 at the top as in movingai files
  friend bool operator==(Cell, Cell) = default;
  friend auto operator<=>(Cell, Cell) = default;
};

inline Point2 cell_center(Cell c) { return {c.x + 0.5, c.y + 0.5}; }

struct GridMap {
  int width = 0;
  int height = 0;
  std::string type = "octile";
  std::vector<std::uint8_t> blocked;  // row-major, 1 = obstacle

  GridMap() = default;
  GridMap(int w, int h) : width(w), height(h), blocked(static_cast<std::size_t>(w) * h, 0) {}

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool is_blocked(Cell c) const { return blocked[static_cast<std::size_t>(c.y) * width + c.x] != 0; }
  bool passable(Cell c) const { return in_bounds(c) && !is_blocked(c); }
  void set_blocked(Cell c, bool b) { blocked[static_cast<std::size_t>(c.y) * width + c.x] = b ? 1 : 0; }
  std::size_t blocked_count() const {
    return static_cast<std::size_t>(std::count(blocked.begin(), blocked.end(), std::uint8_t{1}));
  }
};

struct Edge {
  int to = 0;
  double length = 0.0;
};

/// Undirected graph with embedded vertices. Vertex ids are dense indices;
/// `labels` carries the external id used in files (roadmap ids, or the index
/// itself for grids).
struct Graph {
  std::vector<Point2> points;
  std::vector<int> labels;
  std::vector<std::vector<Edge>> adjacency;
  std::vector<Cell> cells;  // grid graphs only
  std::vector<int> cell_to_vertex;  // grid graphs only, -1 for blocked cells
  int grid_width = 0;

  std::size_t size() const { return points.size(); }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& adj : adjacency) n += adj.size();
    return n / 2;
  }
  bool valid_vertex(int v) const { return v >= 0 && static_cast<std::size_t>(v) < points.size(); }
  Point2 point(int v) const {
    if (!valid_vertex(v)) throw InputError("unknown vertex id " + std::to_string(v));
    return points[static_cast<std::size_t>(v)];
  }
  const std::vector<Edge>& neighbors(int v) const { return adjacency[static_cast<std::size_t>(v)]; }
  std::optional<double> edge_length(int u, int v) const {
    if (!valid_vertex(u)) return std::nullopt;
    for (const auto& e : neighbors(u))
      if (e.to == v) return e.length;
    return std::nullopt;
  }
  std::optional<int> vertex_at(Cell c) const {
    if (cell_to_vertex.empty() || c.x < 0 || c.y < 0 || c.x >= grid_width) return std::nullopt;
    const std::size_t idx = static_cast<std::size_t>(c.y) * grid_width + c.x;
    if (idx >= cell_to_vertex.size() || cell_to_vertex[idx] < 0) return std::nullopt;
    return cell_to_vertex[idx];
  }
  std::optional<int> vertex_with_label(int label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    return std::nullopt;
  }
  VertexLocator locator() const {
    return [this](int v) { return point(v); };
  }
};

struct Agent {
  int id = 0;
  int start = 0;
  int goal = 0;
  double radius = kDefaultRadius;
  double speed = 1.0;
};

struct Instance {
  Graph graph;
  std::vector<Agent> agents;
};

/// Checks the instance invariants; throws InputError on the first violation.
inline void check_instance(const Instance& inst) {
  const auto& agents = inst.agents;
  for (const auto& a : agents) {
    if (!inst.graph.valid_vertex(a.start) || !inst.graph.valid_vertex(a.goal))
      throw InputError("agent " + std::to_string(a.id) + " has an unknown start or goal vertex");
    if (!(a.radius > 0.0) || !(a.speed > 0.0))
      throw InputError("agent " + std::to_string(a.id) + " needs positive radius and speed");
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const double clear = agents[i].radius + agents[j].radius;
      if (distance(inst.graph.point(agents[i].start), inst.graph.point(agents[j].start)) < clear)
        throw InputError("agents " + std::to_string(agents[i].id) + " and " + std::to_string(agents[j].id) +
                         " collide at their start vertices");
      if (agents[i].goal == agents[j].goal)
        throw InputError("agents " + std::to_string(agents[i].id) + " and " + std::to_string(agents[j].id) +
                         " share a goal vertex");
    }
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline int parse_int(std::string_view s, int line, const char* what) {
  s = trim(s);
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected integer for ") + what + ", got '" + std::string(s) + "'", line);
  }
}

inline double parse_double(std::string_view s, int line, const char* what) {
  s = trim(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected number for ") + what + ", got '" + std::string(s) + "'", line);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// movingai .map
// ---------------------------------------------------------------------------

inline GridMap parse_map(const std::string& text) {
  const auto lines = detail::split_lines(text);
  GridMap grid;
  int width = -1;
  int height = -1;
  std::size_t i = 0;
  bool saw_map = false;
  for (; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    std::istringstream ls{std::string(line)};
    std::string key;
    ls >> key;
    if (key == "type") {
      ls >> grid.type;
    } else if (key == "height") {
      std::string v;
      ls >> v;
      height = detail::parse_int(v, lineno, "height");
    } else if (key == "width") {
      std::string v;
      ls >> v;
      width = detail::parse_int(v, lineno, "width");
    } else if (key == "map") {
      saw_map = true;
      ++i;
      break;
    } else {
      throw ParseError("unexpected header line '" + std::string(line) + "'", lineno);
    }
  }
  if (!saw_map) throw ParseError("missing 'map' line", static_cast<int>(lines.size()));
  if (width < 1 || height < 1) throw ParseError("width and height must be positive", static_cast<int>(i));

  grid.width = width;
  grid.height = height;
  grid.blocked.assign(static_cast<std::size_t>(width) * height, 0);
  int row = 0;
  for (; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    std::string_view line = lines[i];
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() && row >= height) continue;
    if (row >= height) throw ParseError("more than " + std::to_string(height) + " grid rows", lineno);
    if (static_cast<int>(line.size()) != width)
      throw ParseError("row has " + std::to_string(line.size()) + " cells, expected " + std::to_string(width),
                       lineno);
    for (int x = 0; x < width; ++x) {
      const char ch = line[static_cast<std::size_t>(x)];
      switch (ch) {
        case '.':
        case 'G':
        case 'S':
          break;
        case '@':
        case 'O':
        case 'T':
        case 'W':
          grid.set_blocked({x, row}, true);
          break;
        default:
          throw ParseError(std::string("unknown map character '") + ch + "'", lineno);
      }
    }
    ++row;
  }
  if (row != height)
    throw ParseError("expected " + std::to_string(height) + " grid rows, found " + std::to_string(row),
                     static_cast<int>(lines.size()));
  return grid;
}

inline std::string write_map(const GridMap& grid) {
  std::ostringstream out;
  out << "type " << grid.type << "\nheight " << grid.height << "\nwidth " << grid.width << "\nmap\n";
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) out << (grid.is_blocked({x, y}) ? '@' : '.');
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// movingai .scen (version 1)
// ---------------------------------------------------------------------------

struct ScenarioEntry {
  int bucket = 0;
  std::string map_name;
  int map_width = 0;
  int map_height = 0;
  Cell start;
  Cell goal;
  double optimal_length = 0.0;
  friend bool operator==(const ScenarioEntry&, const ScenarioEntry&) = default;
};

inline std::vector<ScenarioEntry> parse_scen(const std::string& text) {
  const auto lines = detail::split_lines(text);
  std::vector<ScenarioEntry> out;
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ParseError("missing 'version 1' line", 1);
  {
    std::istringstream ls{std::string(detail::trim(lines[i]))};
    std::string key, ver;
    ls >> key >> ver;
    if (key != "version" || (ver != "1" && ver != "1.0"))
      throw ParseError("expected 'version 1'", static_cast<int>(i) + 1);
  }
  for (++i; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    if (line.find('\t') != std::string_view::npos) {
      std::size_t pos = 0;
      while (true) {
        const auto next = line.find('\t', pos);
        fields.emplace_back(line.substr(pos, next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
      }
    } else {
      std::istringstream ls{std::string(line)};
      std::string f;
      while (ls >> f) fields.push_back(f);
    }
    if (fields.size() != 9)
      throw ParseError("expected 9 fields, found " + std::to_string(fields.size()), lineno);
    ScenarioEntry e;
    e.bucket = detail::parse_int(fields[0], lineno, "bucket");
    e.map_name = fields[1];
    e.map_width = detail::parse_int(fields[2], lineno, "width");
    e.map_height = detail::parse_int(fields[3], lineno, "height");
    e.start = {detail::parse_int(fields[4], lineno, "start x"), detail::parse_int(fields[5], lineno, "start y")};
    e.goal = {detail::parse_int(fields[6], lineno, "goal x"), detail::parse_int(fields[7], lineno, "goal y")};
    e.optimal_length = detail::parse_double(fields[8], lineno, "optimal length");
    out.push_back(std::move(e));
  }
  return out;
}

inline std::string write_scen(const std::vector<ScenarioEntry>& entries) {
  std::ostringstream out;
  out.precision(17);
  out << "version 1\n";
  for (const auto& e : entries) {
    out << e.bucket << '\t' << e.map_name << '\t' << e.map_width << '\t' << e.map_height << '\t' << e.start.x
        << '\t' << e.start.y << '\t' << e.goal.x << '\t' << e.goal.y << '\t' << e.optimal_length << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// 2^k neighborhoods
// ---------------------------------------------------------------------------

/// The 2^k move directions of neighborhood level k (2 <= k <= 5). Each level
/// inserts the mediant of every pair of angularly adjacent directions.
inline std::vector<Cell> neighborhood_offsets(int k) {
  if (k < 2 || k > 5) throw ConfigError("neighborhood level k must be in [2, 5], got " + std::to_string(k));
  // First quadrant, ordered by angle from (1,0) to (0,1).
  std::vector<Cell> quadrant{{1, 0}, {0, 1}};
  for (int level = 2; level < k; ++level) {
    std::vector<Cell> refined;
    for (std::size_t i = 0; i + 1 < quadrant.size(); ++i) {
      refined.push_back(quadrant[i]);
      refined.push_back({quadrant[i].x + quadrant[i + 1].x, quadrant[i].y + quadrant[i + 1].y});
    }
    refined.push_back(quadrant.back());
    quadrant = std::move(refined);
  }
  quadrant.pop_back();  // (0,1) is produced by rotating (1,0)
  std::vector<Cell> out;
  for (int rot = 0; rot < 4; ++rot) {
    for (Cell c : quadrant) {
      Cell r = c;
      for (int i = 0; i < rot; ++i) r = {-r.y, r.x};
      out.push_back(r);
    }
  }
  return out;
}

namespace detail {

// Distance from segment ab to the closed axis-aligned box [lo, hi].
inline double segment_box_distance(Point2 a, Point2 b, Point2 lo, Point2 hi) {
  // Liang-Barsky: does the segment touch the box?
  double t0 = 0.0, t1 = 1.0;
  const Point2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
  bool hit = true;
  for (int i = 0; i < 4 && hit; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) hit = false;
    } else {
      const double r = q[i] / p[i];
      if (p[i] < 0.0) t0 = std::max(t0, r);
      else t1 = std::min(t1, r);
      if (t0 > t1) hit = false;
    }
  }
  if (hit) return 0.0;

  const auto point_box = [&](Point2 p) {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::sqrt(dx * dx + dy * dy);
  };
  const auto point_segment = [&](Point2 p) {
    const double len2 = norm2(d);
    double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + d * t);
  };
  double best = std::min(point_box(a), point_box(b));
  const Point2 corners[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  for (Point2 c : corners) best = std::min(best, point_segment(c));
  return best;
}

}  // namespace detail

/// True iff a disk of `radius` swept from a to b stays strictly clear of every
/// blocked cell (closed unit squares) and inside the map rectangle.
inline bool edge_valid(const GridMap& grid, Point2 a, Point2 b, double radius) {
  const double min_x = std::min(a.x, b.x), max_x = std::max(a.x, b.x);
  const double min_y = std::min(a.y, b.y), max_y = std::max(a.y, b.y);
  if (min_x - radius < 0.0 || min_y - radius < 0.0 || max_x + radius > grid.width ||
      max_y + radius > grid.height)
    return false;
  const int cx0 = std::max(0, static_cast<int>(std::floor(min_x - radius)));
  const int cy0 = std::max(0, static_cast<int>(std::floor(min_y - radius)));
  const int cx1 = std::min(grid.width - 1, static_cast<int>(std::floor(max_x + radius)));
  const int cy1 = std::min(grid.height - 1, static_cast<int>(std::floor(max_y + radius)));
  for (int y = cy0; y <= cy1; ++y) {
    for (int x = cx0; x <= cx1; ++x) {
      if (!grid.is_blocked({x, y})) continue;
      const Point2 lo{static_cast<double>(x), static_cast<double>(y)};
      const Point2 hi{x + 1.0, y + 1.0};
      if (detail::segment_box_distance(a, b, lo, hi) <= radius) return false;
    }
  }
  return true;
}

/// One vertex per passable cell; edges along the 2^k directions that pass
/// edge_valid. Edge length is the Euclidean distance between cell centers.
inline Graph build_graph(const GridMap& grid, int k, double radius = kDefaultRadius) {
  const auto offsets = neighborhood_offsets(k);
  if (!(radius > 0.0) || radius >= 0.5) throw ConfigError("agent radius must lie in (0, 0.5)");
  Graph g;
  g.grid_width = grid.width;
  g.cell_to_vertex.assign(static_cast<std::size_t>(grid.width) * grid.height, -1);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (grid.is_blocked({x, y})) continue;
      const int id = static_cast<int>(g.points.size());
      g.cell_to_vertex[static_cast<std::size_t>(y) * grid.width + x] = id;
      g.points.push_back(cell_center({x, y}));
      g.labels.push_back(id);
      g.cells.push_back({x, y});
    }
  }
  g.adjacency.resize(g.points.size());
  for (std::size_t v = 0; v < g.points.size(); ++v) {
    const Cell c = g.cells[v];
    for (Cell off : offsets) {
      const Cell n{c.x + off.x, c.y + off.y};
      if (!grid.passable(n)) continue;
      const auto u = g.vertex_at(n);
      if (!edge_valid(grid, cell_center(c), cell_center(n), radius)) continue;
      g.adjacency[v].push_back({*u, std::hypot(off.x, off.y)});
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Roadmaps: "v id x y" / "e id1 id2" lines, '#' comments.
// ---------------------------------------------------------------------------

inline Graph load_roadmap(const std::string& text) {
  const auto lines = detail::split_lines(text);
  Graph g;
  std::unordered_map<int, int> by_label;
  std::vector<std::pair<std::pair<int, int>, int>> pending;  // (label pair, line)
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    auto line = detail::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls{std::string(line)};
    std::string kind;
    ls >> kind;
    std::vector<std::string> f;
    std::string tok;
    while (ls >> tok) f.push_back(tok);
    if (kind == "v") {
      if (f.size() != 3) throw ParseError("vertex line needs 'v id x y'", lineno);
      const int label = detail::parse_int(f[0], lineno, "vertex id");
      if (by_label.count(label)) throw ParseError("duplicate vertex id " + f[0], lineno);
      const double x = detail::parse_double(f[1], lineno, "x");
      const double y = detail::parse_double(f[2], lineno, "y");
      by_label[label] = static_cast<int>(g.points.size());
      g.points.push_back({x, y});
      g.labels.push_back(label);
    } else if (kind == "e") {
      if (f.size() != 2) throw ParseError("edge line needs 'e id1 id2'", lineno);
      pending.push_back({{detail::parse_int(f[0], lineno, "edge endpoint"),
                          detail::parse_int(f[1], lineno, "edge endpoint")},
                         lineno});
    } else {
      throw ParseError("unknown record '" + kind + "'", lineno);
    }
  }
  g.adjacency.resize(g.points.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& [ends, lineno] : pending) {
    const auto a = by_label.find(ends.first);
    const auto b = by_label.find(ends.second);
    if (a == by_label.end() || b == by_label.end())
      throw ParseError("edge references unknown vertex", lineno);
    const int u = a->second, v = b->second;
    if (u == v) throw ParseError("self-loop edge", lineno);
    const double len = distance(g.points[static_cast<std::size_t>(u)], g.points[static_cast<std::size_t>(v)]);
    if (!(len > 0.0)) throw ParseError("zero-length edge", lineno);
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second) continue;
    g.adjacency[static_cast<std::size_t>(u)].push_back({v, len});
    g.adjacency[static_cast<std::size_t>(v)].push_back({u, len});
  }
  return g;
}

inline std::string write_roadmap(const Graph& g) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t v = 0; v < g.size(); ++v)
    out << "v " << g.labels[v] << ' ' << g.points[v].x << ' ' << g.points[v].y << '\n';
  for (std::size_t v = 0; v < g.size(); ++v)
    for (const auto& e : g.adjacency[v])
      if (static_cast<std::size_t>(e.to) > v) out << "e " << g.labels[v] << ' ' << g.labels[e.to] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario generation
// ---------------------------------------------------------------------------

/// Hop-count connected components, used to keep generated start/goal pairs
/// reachable from each other.
inline std::vector<int> connected_components(const Graph& g) {
  std::vector<int> comp(g.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& e : g.neighbors(v)) {
        if (comp[static_cast<std::size_t>(e.to)] < 0) {
          comp[static_cast<std::size_t>(e.to)] = next;
          stack.push_back(e.to);
        }
      }
    }
    ++next;
  }
  return comp;
}

/// Random instance with `n_agents` agents whose starts (and goals) are distinct
/// and pairwise at least 2*radius apart, each goal reachable from its start.
/// Deterministic for a given seed.
inline Instance generate_scenario(const Graph& graph, int n_agents, std::uint64_t seed,
                                  double radius = kDefaultRadius, double speed = 1.0, int max_attempts = 200) {
  if (n_agents < 0) throw ConfigError("agent count must be non-negative");
  if (static_cast<std::size_t>(n_agents) > graph.size())
    throw GenerationError("requested " + std::to_string(n_agents) + " agents but the graph has only " +
                          std::to_string(graph.size()) + " vertices");
  const auto comp = connected_components(graph);
  std::mt19937_64 rng(seed);
  const auto n_vertices = static_cast<int>(graph.size());
  std::uniform_int_distribution<int> pick(0, std::max(0, n_vertices - 1));
  const auto clear_of = [&](int v, const std::vector<int>& chosen) {
    for (int u : chosen)
      if (u == v || distance(graph.point(u), graph.point(v)) < 2.0 * radius) return false;
    return true;
  };

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<int> starts, goals;
    bool ok = true;
    for (int a = 0; a < n_agents && ok; ++a) {
      bool placed = false;
      for (int tries = 0; tries < 100 * (n_vertices + 1) && !placed; ++tries) {
        const int s = pick(rng);
        if (!clear_of(s, starts)) continue;
        for (int gtries = 0; gtries < 100; ++gtries) {
          const int gv = pick(rng);
          if (gv == s || comp[static_cast<std::size_t>(gv)] != comp[static_cast<std::size_t>(s)]) continue;
          if (!clear_of(gv, goals)) continue;
          starts.push_back(s);
          goals.push_back(gv);
          placed = true;
          break;
        }
      }
      ok = placed;
    }
    if (!ok) continue;
    Instance inst;
    inst.graph = graph;
    for (int a = 0; a < n_agents; ++a)
      inst.agents.push_back({a, starts[static_cast<std::size_t>(a)], goals[static_cast<std::size_t>(a)], radius, speed});
    return inst;
  }
  throw GenerationError("could not place " + std::to_string(n_agents) + " non-colliding agents after " +
                        std::to_string(max_attempts) + " attempts");
}

/// Builds agents from scenario entries (first `n_agents`, or all when negative).
inline Instance instance_from_scen(const Graph& graph, const std::vector<ScenarioEntry>& entries, int n_agents,
                                   double radius = kDefaultRadius, double speed = 1.0) {
  Instance inst;
  inst.graph = graph;
  const std::size_t n =
      n_agents < 0 ? entries.size() : std::min(entries.size(), static_cast<std::size_t>(n_agents));
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = graph.vertex_at(entries[i].start);
    const auto g = graph.vertex_at(entries[i].goal);
    if (!s || !g) throw InputError("scenario entry " + std::to_string(i) + " uses a blocked or out-of-map cell");
    inst.agents.push_back({static_cast<int>(i), *s, *g, radius, speed});
  }
  return inst;
}

}  // namespace ccbs
