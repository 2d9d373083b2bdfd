#include "dtnsim/routing.hpp"

#include <algorithm>
#include <stdexcept>

namespace dtnsim {
namespace {

// Unexpired messages, oldest-created first (ties by id).
std::vector<const Message*> by_age(const Buffer& buffer, Seconds now) {
  std::vector<const Message*> out;
  out.reserve(buffer.size());
  for (const auto& m : buffer.messages())
    if (!m.expired(now)) out.push_back(&m);
  std::sort(out.begin(), out.end(), [](const Message* a, const Message* b) {
    return a->created_at != b->created_at ? a->created_at < b->created_at : a->id < b->id;
  });
  return out;
}

bool may_relay(const RouterConfig& cfg, const Message& m) {
  return cfg.protocol == Protocol::Epidemic || m.copies >= 2;
}

}  // namespace

std::vector<TransferIntent> on_contact_up(const RouterConfig& cfg, const Buffer& self, const PeerView& peer,
                                          Seconds now) {
  std::vector<TransferIntent> out;
  const auto msgs = by_age(self, now);
  for (const Message* m : msgs)
    if (m->dst == peer.id && !peer.summary.has(m->id)) out.push_back({m->id, peer.id, true});
  for (const Message* m : msgs)
    if (m->dst != peer.id && may_relay(cfg, *m) && !peer.summary.has(m->id)) out.push_back({m->id, peer.id, false});
  return out;
}

std::optional<TransferIntent> next_offer(const RouterConfig& cfg, const Buffer& self, std::span<const PeerView> peers,
                                         Seconds now, const OfferFilter& skip) {
  if (peers.empty() || self.size() == 0) return std::nullopt;
  const auto msgs = by_age(self, now);
  for (const Message* m : msgs)
    for (const auto& p : peers)
      if (m->dst == p.id && !p.summary.has(m->id) && !skip(m->id, p.id)) return TransferIntent{m->id, p.id, true};
  for (const Message* m : msgs) {
    if (!may_relay(cfg, *m)) continue;
    for (const auto& p : peers)
      if (m->dst != p.id && !p.summary.has(m->id) && !skip(m->id, p.id)) return TransferIntent{m->id, p.id, false};
  }
  return std::nullopt;
}

std::pair<int, int> split_copies(int copies, bool binary) {
  if (copies < 2) throw std::invalid_argument("split_copies requires at least 2 copies");
  if (binary) return {(copies + 1) / 2, copies / 2};
  return {copies - 1, 1};
}

CompletionResult on_transfer_complete(const RouterConfig& cfg, NodeRef sender, NodeRef receiver, MessageId id,
                                      Seconds now, EventLog& log) {
  Message* held = sender.buffer.find(id);
  if (held == nullptr) throw std::logic_error("completed transfer of a message the sender no longer holds");

  CompletionResult r;
  Message copy = *held;
  copy.hops = held->hops + 1;

  if (copy.dst == receiver.id) {
    if (receiver.router.delivered.insert(id.value).second) {
      r.outcome = DeliveryOutcome::Delivered;
      log.append({now, EventKind::Delivered, DropReason::None, 0, id, sender.id, receiver.id, copy.hops});
    } else {
      r.outcome = DeliveryOutcome::Duplicate;
      log.append({now, EventKind::Duplicate, DropReason::None, 0, id, sender.id, receiver.id, copy.hops});
    }
    return r;
  }

  if (receiver.buffer.contains(id)) {
    r.outcome = DeliveryOutcome::Duplicate;
    log.append({now, EventKind::Duplicate, DropReason::None, 0, id, sender.id, receiver.id, copy.hops});
    return r;
  }

  if (cfg.protocol == Protocol::SprayAndWait) {
    const auto [kept, given] = split_copies(held->copies, cfg.binary_mode);
    held->copies = kept;
    copy.copies = given;
  } else {
    copy.copies = 1;
  }

  r.outcome = DeliveryOutcome::Relayed;
  log.append({now, EventKind::Relayed, DropReason::None, 0, id, sender.id, receiver.id, copy.hops});
  auto ins = receiver.buffer.insert(copy);
  for (const auto& ev : ins.evicted) {
    log.append({now, EventKind::Dropped, DropReason::BufferOverflow, 0, ev.id, receiver.id, kNoNode, ev.hops});
    r.dropped.push_back(ev);
  }
  if (!ins.accepted) {
    log.append({now, EventKind::Dropped, DropReason::BufferOverflow, 0, id, receiver.id, kNoNode, copy.hops});
    r.dropped.push_back(copy);
  }
  return r;
}

}  // namespace dtnsim
