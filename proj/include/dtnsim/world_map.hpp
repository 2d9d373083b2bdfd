#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtnsim/config.hpp"
#include "dtnsim/rng.hpp"
#include "dtnsim/types.hpp"

namespace dtnsim {

/// Role of a vertex in a generated stadium map; parsed maps are all Plain.
enum class VertexTag : std::uint8_t { Plain, Ring, Exit, Road, Pitch };

struct Edge {
  VertexId a = 0;
  VertexId b = 0;
  double length = 0.0;
};

struct Neighbor {
  VertexId vertex = 0;
  double length = 0.0;
};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected, connected, immutable road/corridor graph.
class MapGraph {
 public:
  /// Builds the adjacency index and enforces the graph invariants: no
  /// self-loops, no duplicate edges, positive lengths, connectivity.
  /// Throws MapError on violation.
  MapGraph(std::vector<Vec2> vertices, const std::vector<std::pair<VertexId, VertexId>>& edges,
           std::vector<VertexTag> tags = {});

  std::size_t vertex_count() const { return vertices_.size(); }
  Vec2 position(VertexId v) const { return vertices_[v]; }
  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const Edge> edges() const { return edges_; }
  /// Neighbors sorted by vertex index.
  std::span<const Neighbor> neighbors(VertexId v) const { return adjacency_[v]; }
  VertexTag tag(VertexId v) const { return tags_[v]; }
  std::vector<VertexId> vertices_tagged(VertexTag t) const;
  /// Length of edge (a, b); throws MapError when absent.
  double edge_length(VertexId a, VertexId b) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<VertexTag> tags_;
};

struct Path {
  std::vector<VertexId> vertices;
  double total_length = 0.0;
};

MapGraph parse_map(std::string_view text);
/// One two-point LINESTRING per edge.
std::string serialize_map(const MapGraph& g);

/// Minimum-length path. Among equal-length paths the lexicographically
/// smallest vertex sequence wins, so results do not depend on heap order.
Path shortest_path(const MapGraph& g, VertexId from, VertexId to);

VertexId nearest_vertex(const MapGraph& g, Vec2 p);

/// Concourse ring, radial corridors to exits, exit roads joined by a perimeter
/// road, and a small pitch cross. Centered at `center`.
MapGraph generate_stadium_map(const StadiumParams& params, RngStream& rng, Vec2 center = {0.0, 0.0});

}  // namespace dtnsim
