#include "dtnsim/world_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <set>

#include <fmt/format.h>

namespace dtnsim {

MapGraph::MapGraph(std::vector<Vec2> vertices, const std::vector<std::pair<VertexId, VertexId>>& edges,
                   std::vector<VertexTag> tags)
    : vertices_(std::move(vertices)), adjacency_(vertices_.size()), tags_(std::move(tags)) {
  if (vertices_.empty()) throw MapError("map has no vertices");
  if (tags_.empty()) tags_.assign(vertices_.size(), VertexTag::Plain);
  if (tags_.size() != vertices_.size()) throw MapError("tag count does not match vertex count");

  std::set<std::pair<VertexId, VertexId>> seen;
  for (auto [a, b] : edges) {
    if (a >= vertices_.size() || b >= vertices_.size()) throw MapError(fmt::format("edge {}-{} out of range", a, b));
    if (a == b) throw MapError(fmt::format("self-loop at vertex {}", a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) throw MapError(fmt::format("duplicate edge {}-{}", a, b));
    const double len = distance(vertices_[a], vertices_[b]);
    if (!(len > 0)) throw MapError(fmt::format("zero-length edge {}-{}", a, b));
    edges_.push_back({a, b, len});
    adjacency_[a].push_back({b, len});
    adjacency_[b].push_back({a, len});
  }
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Neighbor& x, const Neighbor& y) { return x.vertex < y.vertex; });

  std::vector<bool> reached(vertices_.size(), false);
  std::vector<VertexId> stack{0};
  reached[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (const auto& n : adjacency_[v])
      if (!reached[n.vertex]) {
        reached[n.vertex] = true;
        ++count;
        stack.push_back(n.vertex);
      }
  }
  if (count != vertices_.size())
    throw MapError(fmt::format("map is disconnected ({} of {} vertices reachable)", count, vertices_.size()));
}

std::vector<VertexId> MapGraph::vertices_tagged(VertexTag t) const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < tags_.size(); ++v)
    if (tags_[v] == t) out.push_back(v);
  return out;
}

double MapGraph::edge_length(VertexId a, VertexId b) const {
  const auto& adj = adjacency_.at(a);
  auto it = std::lower_bound(adj.begin(), adj.end(), b, [](const Neighbor& n, VertexId v) { return n.vertex < v; });
  if (it == adj.end() || it->vertex != b) throw MapError(fmt::format("no edge {}-{}", a, b));
  return it->length;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

double read_coord(std::string_view& s, int line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || !std::isfinite(v)) throw MapError(fmt::format("line {}: malformed coordinate", line));
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

MapGraph parse_map(std::string_view text) {
  std::vector<Vec2> vertices;
  std::map<std::pair<double, double>, VertexId> index;
  std::set<std::pair<VertexId, VertexId>> edge_set;
  std::vector<std::pair<VertexId, VertexId>> edges;

  auto vertex_of = [&](Vec2 p) {
    auto [it, inserted] = index.emplace(std::pair{p.x, p.y}, static_cast<VertexId>(vertices.size()));
    if (inserted) vertices.push_back(p);
    return it->second;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (line.empty()) continue;

    constexpr std::string_view kHead = "LINESTRING";
    if (!line.starts_with(kHead)) throw MapError(fmt::format("line {}: expected LINESTRING", line_no));
    line = trim(line.substr(kHead.size()));
    if (line.size() < 2 || line.front() != '(' || line.back() != ')')
      throw MapError(fmt::format("line {}: expected parenthesised point list", line_no));
    std::string_view body = line.substr(1, line.size() - 2);

    std::vector<VertexId> points;
    while (true) {
      const double x = read_coord(body, line_no);
      const double y = read_coord(body, line_no);
      const VertexId v = vertex_of({x, y});
      if (points.empty() || points.back() != v) points.push_back(v);
      body = trim(body);
      if (body.empty()) break;
      if (body.front() != ',') throw MapError(fmt::format("line {}: expected ',' between points", line_no));
      body.remove_prefix(1);
    }
    if (points.size() < 2) throw MapError(fmt::format("line {}: LINESTRING needs at least 2 distinct points", line_no));
    for (std::size_t i = 1; i < points.size(); ++i) {
      auto e = std::minmax(points[i - 1], points[i]);
      if (edge_set.insert(e).second) edges.push_back(e);
    }
  }
  if (vertices.empty()) throw MapError("map file contains no LINESTRING");
  return MapGraph(std::move(vertices), edges);
}

std::string serialize_map(const MapGraph& g) {
  std::string out;
  for (const auto& e : g.edges()) {
    const Vec2 a = g.position(e.a), b = g.position(e.b);
    out += fmt::format("LINESTRING ({} {}, {} {})\n", format_double(a.x), format_double(a.y), format_double(b.x),
                       format_double(b.y));
  }
  return out;
}

Path shortest_path(const MapGraph& g, VertexId from, VertexId to) {
  const auto n = g.vertex_count();
  if (from >= n || to >= n) throw MapError("shortest_path: vertex out of range");
  if (from == to) return {{from}, 0.0};

  // Distances to the target, then a greedy walk from the source that takes
  // the smallest-index neighbor lying on some shortest path.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[to] = 0.0;
  heap.push({0.0, to});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& nb : g.neighbors(v)) {
      const double nd = d + nb.length;
      if (nd < dist[nb.vertex]) {
        dist[nb.vertex] = nd;
        heap.push({nd, nb.vertex});
      }
    }
  }
  if (dist[from] == kInf) throw MapError(fmt::format("vertex {} unreachable from {}", to, from));

  Path path{{from}, 0.0};
  VertexId u = from;
  while (u != to) {
    const double tol = 1e-9 * (1.0 + dist[u]);
    const Neighbor* next = nullptr;
    for (const auto& nb : g.neighbors(u)) {
      if (dist[nb.vertex] < dist[u] && std::abs(nb.length + dist[nb.vertex] - dist[u]) <= tol) {
        next = &nb;
        break;
      }
    }
    if (next == nullptr) throw MapError("shortest_path: inconsistent distance labels");
    path.vertices.push_back(next->vertex);
    path.total_length += next->length;
    u = next->vertex;
  }
  return path;
}

VertexId nearest_vertex(const MapGraph& g, Vec2 p) {
  VertexId best = 0;
  double best_d = distance(g.position(0), p);
  for (VertexId v = 1; v < g.vertex_count(); ++v) {
    const double d = distance(g.position(v), p);
    if (d < best_d) {
      best = v;
      best_d = d;
    }
  }
  return best;
}

MapGraph generate_stadium_map(const StadiumParams& params, RngStream& rng, Vec2 center) {
  if (!(params.ring_radius > 0)) throw MapError("stadium ring radius must be positive");
  if (params.exit_count < 2) throw MapError("stadium needs at least 2 exits");
  if (!(params.road_length > 0)) throw MapError("stadium road length must be positive");

  const double r = params.ring_radius;
  const auto exits = static_cast<std::size_t>(params.exit_count);
  const std::size_t ring_n = std::max<std::size_t>(16, 2 * exits);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(ring_n);

  std::vector<Vec2> pts;
  std::vector<VertexTag> tags;
  std::vector<std::pair<VertexId, VertexId>> edges;
  auto add = [&](Vec2 p, VertexTag t) {
    pts.push_back(p);
    tags.push_back(t);
    return static_cast<VertexId>(pts.size() - 1);
  };
  auto polar = [&](double radius, double angle) {
    return Vec2{center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)};
  };

  // Concourse ring; jitter stays well below half the vertex spacing.
  for (std::size_t i = 0; i < ring_n; ++i) {
    const double angle = step * static_cast<double>(i) + rng.uniform(-0.15, 0.15) * step;
    add(polar(r * rng.uniform(0.97, 1.03), angle), VertexTag::Ring);
  }
  for (std::size_t i = 0; i < ring_n; ++i)
    edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % ring_n));

  // Pitch cross linking four opposite concourse points through the centre.
  const VertexId pitch = add(center, VertexTag::Pitch);
  for (std::size_t q = 0; q < 4; ++q) edges.emplace_back(pitch, static_cast<VertexId>(q * ring_n / 4));

  // Radial corridor to each exit, then an exit road outward.
  const double exit_radius = 1.25 * r;
  std::vector<VertexId> road_ends;
  for (std::size_t e = 0; e < exits; ++e) {
    const auto ring_v = static_cast<VertexId>(e * ring_n / exits);
    const Vec2 rp = pts[ring_v];
    const double angle = std::atan2(rp.y - center.y, rp.x - center.x);
    const VertexId exit_v = add(polar(exit_radius, angle), VertexTag::Exit);
    const VertexId road_v = add(polar(exit_radius + params.road_length, angle), VertexTag::Road);
    edges.emplace_back(ring_v, exit_v);
    edges.emplace_back(exit_v, road_v);
    road_ends.push_back(road_v);
  }
  if (exits > 2) {
    for (std::size_t e = 0; e < exits; ++e) edges.emplace_back(road_ends[e], road_ends[(e + 1) % exits]);
  } else {
    edges.emplace_back(road_ends[0], road_ends[1]);
  }
  return MapGraph(std::move(pts), edges, std::move(tags));
}

}  // namespace dtnsim
