#pragma once

#include <vector>

#include "dtnsim/config.hpp"
#include "dtnsim/rng.hpp"
#include "dtnsim/world_map.hpp"

namespace dtnsim {

enum class MoveMode { Moving, Paused, Stationary };

struct MovementState {
  MoveMode mode = MoveMode::Stationary;
  Path path;                       // current leg; a single vertex when not moving
  std::vector<double> cumulative;  // cumulative[i] = distance from path start to path.vertices[i]
  double progress = 0.0;           // meters along path
  double speed = 0.0;              // m/s, drawn per leg
  Seconds pause_until = 0.0;
  Vec2 position;

  VertexId current_vertex() const { return path.vertices.back(); }
};

/// Point at `progress` meters along `path`, clamped to its ends.
Vec2 point_along(const MapGraph& map, const Path& path, const std::vector<double>& cumulative, double progress);

/// Mobility for one group on one map. Stationary members are spread evenly
/// over the group's anchor vertices (ring or exit), or over all vertices.
class MovementModel {
 public:
  MovementModel(const GroupConfig& group, const MapGraph& map);

  MovementState init_placement(int member_index, RngStream& rng) const;
  /// Uniform destination different from the current vertex, shortest path to
  /// it, uniform speed from the group's range, progress reset to 0.
  MovementState plan_next_leg(MovementState state, RngStream& rng) const;
  /// Advances the state from time `now` to `now + dt`. Arrival truncates the
  /// leg at the destination and starts a pause; the residual time is dropped.
  MovementState step(MovementState state, Seconds dt, Seconds now, RngStream& rng) const;

  const GroupConfig& group() const { return *group_; }

 private:
  const GroupConfig* group_;
  const MapGraph* map_;
  std::vector<VertexId> anchors_;
};

}  // namespace dtnsim
