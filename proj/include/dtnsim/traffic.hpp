#pragma once

#include <span>
#include <vector>

#include "dtnsim/config.hpp"
#include "dtnsim/event_log.hpp"
#include "dtnsim/net.hpp"
#include "dtnsim/rng.hpp"

namespace dtnsim {

/// Network-wide distress-message generator: one message per interval draw.
class TrafficGenerator {
 public:
  TrafficGenerator(const TrafficConfig& cfg, const RouterConfig& router, std::vector<NodeId> sources,
                   std::vector<NodeId> destinations);

  /// now + uniform(interval_range).
  Seconds schedule_next(Seconds now, RngStream& rng) const;

  /// Arms the first creation at schedule_next(start).
  void start(Seconds start, RngStream& rng) { next_creation_at_ = schedule_next(start, rng); }

  bool due(Seconds now) const { return next_creation_at_ <= now; }
  Seconds next_creation_at() const { return next_creation_at_; }
  std::uint32_t created_count() const { return counter_; }

  /// Draws src, dst and size, stamps `now`, and advances the schedule from
  /// the nominal creation time so that drift does not accumulate.
  Message create_message(Seconds now, RngStream& rng);

 private:
  TrafficConfig cfg_;
  int copies_;
  std::vector<NodeId> sources_;
  std::vector<NodeId> destinations_;
  Seconds next_creation_at_ = 0.0;
  std::uint32_t counter_ = 0;
};

/// Removes expired copies (now - created_at > ttl) from every buffer and logs
/// a ttl-expiry drop for each. Returns (node, message) pairs removed.
std::vector<std::pair<NodeId, Message>> purge_expired(std::span<Buffer*> buffers, Seconds now, EventLog& log);

}  // namespace dtnsim
