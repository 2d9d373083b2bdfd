#include "dtnsim/mobility.hpp"

#include <algorithm>
#include <limits>

namespace dtnsim {

Vec2 point_along(const MapGraph& map, const Path& path, const std::vector<double>& cumulative, double progress) {
  const auto& vs = path.vertices;
  if (vs.size() == 1 || progress <= 0.0) return map.position(vs.front());
  if (progress >= cumulative.back()) return map.position(vs.back());
  // First vertex strictly beyond `progress`; the point lies on the segment before it.
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), progress);
  const auto i = static_cast<std::size_t>(it - cumulative.begin());
  const Vec2 a = map.position(vs[i - 1]);
  const Vec2 b = map.position(vs[i]);
  const double seg = cumulative[i] - cumulative[i - 1];
  return a + (b - a) * ((progress - cumulative[i - 1]) / seg);
}

namespace {

std::vector<double> cumulative_lengths(const MapGraph& map, const Path& path) {
  std::vector<double> c(path.vertices.size(), 0.0);
  for (std::size_t i = 1; i < path.vertices.size(); ++i)
    c[i] = c[i - 1] + map.edge_length(path.vertices[i - 1], path.vertices[i]);
  return c;
}

}  // namespace

MovementModel::MovementModel(const GroupConfig& group, const MapGraph& map) : group_(&group), map_(&map) {
  if (group.anchor == Anchor::Ring) anchors_ = map.vertices_tagged(VertexTag::Ring);
  if (group.anchor == Anchor::Exit) anchors_ = map.vertices_tagged(VertexTag::Exit);
  if (anchors_.empty()) {
    anchors_.resize(map.vertex_count());
    for (VertexId v = 0; v < anchors_.size(); ++v) anchors_[v] = v;
  }
}

MovementState MovementModel::init_placement(int member_index, RngStream& rng) const {
  MovementState s;
  if (group_->movement == Movement::Stationary) {
    const auto count = static_cast<std::size_t>(std::max(group_->count, 1));
    const auto idx = static_cast<std::size_t>(member_index) * anchors_.size() / count;
    const VertexId v = anchors_[idx % anchors_.size()];
    s.mode = MoveMode::Stationary;
    s.path = {{v}, 0.0};
    s.cumulative = {0.0};
    s.position = map_->position(v);
    return s;
  }
  const auto v = static_cast<VertexId>(rng.index(map_->vertex_count()));
  s.path = {{v}, 0.0};
  s.cumulative = {0.0};
  s.position = map_->position(v);
  return plan_next_leg(std::move(s), rng);
}

MovementState MovementModel::plan_next_leg(MovementState s, RngStream& rng) const {
  const VertexId here = s.current_vertex();
  const auto n = map_->vertex_count();
  if (n < 2) {
    s.mode = MoveMode::Paused;
    s.pause_until = std::numeric_limits<double>::infinity();
    return s;
  }
  auto dest = static_cast<VertexId>(rng.index(n - 1));
  if (dest >= here) ++dest;
  s.path = shortest_path(*map_, here, dest);
  s.cumulative = cumulative_lengths(*map_, s.path);
  s.speed = rng.uniform(group_->speed_range.min, group_->speed_range.max);
  s.progress = 0.0;
  s.mode = MoveMode::Moving;
  s.position = map_->position(here);
  return s;
}

MovementState MovementModel::step(MovementState s, Seconds dt, Seconds now, RngStream& rng) const {
  if (s.mode == MoveMode::Stationary) return s;
  if (s.mode == MoveMode::Paused) {
    if (now < s.pause_until) return s;
    s = plan_next_leg(std::move(s), rng);
    if (s.mode != MoveMode::Moving) return s;
  }
  s.progress += s.speed * dt;
  if (s.progress >= s.path.total_length) {
    s.progress = s.path.total_length;
    s.position = map_->position(s.path.vertices.back());
    s.mode = MoveMode::Paused;
    s.pause_until = now + dt + rng.uniform(group_->pause_range.min, group_->pause_range.max);
    return s;
  }
  s.position = point_along(*map_, s.path, s.cumulative, s.progress);
  return s;
}

}  // namespace dtnsim
