#pragma once

#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dtnsim/config.hpp"
#include "dtnsim/event_log.hpp"
#include "dtnsim/net.hpp"

namespace dtnsim {

struct RouterState {
  std::unordered_set<std::uint32_t> delivered;  // ids received here as final destination; only grows

  bool has_delivered(MessageId id) const { return delivered.contains(id.value); }
};

/// Ids a node advertises on contact: its buffer plus what it already received as destination.
struct SummaryVector {
  const Buffer* buffer = nullptr;
  const RouterState* router = nullptr;

  bool has(MessageId id) const { return buffer->contains(id) || router->has_delivered(id); }
};

struct TransferIntent {
  MessageId msg;
  NodeId to = 0;
  bool direct_delivery = false;

  friend bool operator==(const TransferIntent&, const TransferIntent&) = default;
};

struct PeerView {
  NodeId id = 0;
  SummaryVector summary;
};

/// Returns true when an intent must be skipped (e.g. already in flight).
using OfferFilter = std::function<bool(MessageId, NodeId)>;

/// Ordered offers from `self` to one peer on a fresh contact.
///
/// Epidemic: every unexpired message the peer lacks, destination matches
/// first, then oldest-created first. Spray-and-wait: messages destined to the
/// peer, then (only for copies >= 2) messages the peer lacks, oldest first.
std::vector<TransferIntent> on_contact_up(const RouterConfig& cfg, const Buffer& self, const PeerView& peer,
                                          Seconds now);

/// First admissible offer from `self` across all of its current contacts on
/// one interface, in the same order as on_contact_up: deliveries to any peer
/// first, then relays by message age, peers in the given order.
std::optional<TransferIntent> next_offer(const RouterConfig& cfg, const Buffer& self, std::span<const PeerView> peers,
                                         Seconds now, const OfferFilter& skip);

/// (kept, given). Binary: (ceil(c/2), floor(c/2)); source spray: (c-1, 1).
/// Throws std::invalid_argument when copies < 2.
std::pair<int, int> split_copies(int copies, bool binary);

enum class DeliveryOutcome { Delivered, Duplicate, Relayed };

struct NodeRef {
  NodeId id = 0;
  Buffer& buffer;
  RouterState& router;
};

struct CompletionResult {
  DeliveryOutcome outcome = DeliveryOutcome::Relayed;
  std::vector<Message> dropped;  // copies evicted or rejected at the receiver
};

/// Hands a completed transfer to the receiver: first arrival at the
/// destination is DELIVERED (not re-buffered), later ones DUPLICATE; anything
/// else is buffered at the receiver and logged RELAYED (with overflow drops).
/// Spray-and-wait relays split the sender's budget.
CompletionResult on_transfer_complete(const RouterConfig& cfg, NodeRef sender, NodeRef receiver, MessageId msg,
                                      Seconds now, EventLog& log);

}  // namespace dtnsim
