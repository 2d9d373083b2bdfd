#include "dtnsim/traffic.hpp"

#include <stdexcept>

namespace dtnsim {

TrafficGenerator::TrafficGenerator(const TrafficConfig& cfg, const RouterConfig& router, std::vector<NodeId> sources,
                                   std::vector<NodeId> destinations)
    : cfg_(cfg),
      copies_(router.protocol == Protocol::SprayAndWait ? router.copy_budget : 1),
      sources_(std::move(sources)),
      destinations_(std::move(destinations)) {
  if (sources_.empty() || destinations_.empty())
    throw std::invalid_argument("traffic needs at least one source and one destination node");
}

Seconds TrafficGenerator::schedule_next(Seconds now, RngStream& rng) const {
  return now + rng.uniform(cfg_.interval_range.min, cfg_.interval_range.max);
}

Message TrafficGenerator::create_message(Seconds now, RngStream& rng) {
  Message m;
  m.id = MessageId{++counter_};
  m.src = sources_[rng.index(sources_.size())];
  // A node flagged both source and destination never addresses itself.
  do {
    m.dst = destinations_[rng.index(destinations_.size())];
  } while (m.dst == m.src && destinations_.size() > 1);
  m.size = rng.integer(cfg_.size_range.min, cfg_.size_range.max);
  m.created_at = now;
  m.ttl = cfg_.ttl;
  m.hops = 0;
  m.copies = copies_;
  next_creation_at_ = schedule_next(next_creation_at_, rng);
  return m;
}

std::vector<std::pair<NodeId, Message>> purge_expired(std::span<Buffer*> buffers, Seconds now, EventLog& log) {
  std::vector<std::pair<NodeId, Message>> out;
  for (NodeId n = 0; n < buffers.size(); ++n) {
    for (auto& m : buffers[n]->purge_expired(now)) {
      log.append({now, EventKind::Dropped, DropReason::TtlExpiry, 0, m.id, n, kNoNode, m.hops});
      out.emplace_back(n, std::move(m));
    }
  }
  return out;
}

}  // namespace dtnsim
