#pragma once

#include <compare>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "dtnsim/types.hpp"

namespace dtnsim {

/// One buffered copy of a distress message.
struct Message {
  MessageId id;
  NodeId src = 0;
  NodeId dst = 0;
  Bytes size = 0;
  Seconds created_at = 0.0;
  Seconds ttl = 0.0;
  int hops = 0;    // completed transfers on this copy's path
  int copies = 1;  // replication budget held by this copy (spray-and-wait)

  bool expired(Seconds now) const { return now - created_at > ttl; }
};

/// FIFO message store with a byte capacity; evicts oldest-received first.
class Buffer {
 public:
  struct InsertResult {
    bool accepted = false;
    std::vector<Message> evicted;
  };

  explicit Buffer(Bytes capacity) : capacity_(capacity) {}

  /// Rejects messages larger than the whole buffer and duplicates of an id
  /// already held; otherwise evicts from the front until the message fits.
  InsertResult insert(const Message& msg);
  std::optional<Message> remove(MessageId id);
  std::vector<Message> purge_expired(Seconds now);

  bool contains(MessageId id) const { return ids_.contains(id.value); }
  Message* find(MessageId id);
  const Message* find(MessageId id) const;

  /// Messages in insertion order.
  std::span<const Message> messages() const { return queue_; }
  Bytes occupancy() const { return occupancy_; }
  Bytes capacity() const { return capacity_; }
  Bytes free_bytes() const { return capacity_ - occupancy_; }
  std::size_t size() const { return queue_.size(); }

 private:
  Bytes capacity_;
  Bytes occupancy_ = 0;
  std::vector<Message> queue_;
  std::unordered_set<std::uint32_t> ids_;
};

/// Unordered node pair on one interface; stored with a < b.
struct ContactKey {
  NodeId a = 0;
  NodeId b = 0;
  InterfaceIndex iface = 0;

  static ContactKey make(NodeId x, NodeId y, InterfaceIndex i) { return x < y ? ContactKey{x, y, i} : ContactKey{y, x, i}; }
  NodeId peer_of(NodeId n) const { return n == a ? b : a; }
  bool involves(NodeId n) const { return n == a || n == b; }
  friend auto operator<=>(const ContactKey&, const ContactKey&) = default;
};

struct Contact {
  ContactKey key;
  Seconds up_since = 0.0;
};

struct ContactDelta {
  std::vector<Contact> up;
  std::vector<ContactKey> down;
};

/// Per-node interface capability: `carries[node][iface]`.
using InterfaceTable = std::vector<std::vector<bool>>;

/// Geometric contact sampling. `ranges[iface]` is the radio range; a contact
/// exists per (pair, interface) when both nodes carry the interface and are
/// within range. `active` is updated in place and kept sorted.
ContactDelta detect_contacts(std::span<const Vec2> positions, const InterfaceTable& carries,
                             std::span<const double> ranges, std::vector<Contact>& active, Seconds now);

/// Applies a precomputed set of contact keys (scripted schedules) to `active`.
ContactDelta update_contacts(std::vector<ContactKey> present, std::vector<Contact>& active, Seconds now);

struct Transfer {
  ContactKey contact;
  NodeId from = 0;
  NodeId to = 0;
  MessageId msg;
  Bytes size = 0;
  double bytes_sent = 0.0;
  Seconds started_at = 0.0;
  Seconds finished_at = 0.0;  // set on completion
};

enum class BeginResult { Started, InterfaceBusy, DuplicateAtReceiver, AlreadySending };

struct AdvanceResult {
  std::vector<Transfer> completed;  // ordered by (finished_at, from, iface)
  std::vector<Transfer> aborted;
};

/// Active transfers, at most one outgoing per (node, interface).
class TransferTable {
 public:
  /// `receiver_has` is true when the receiver buffers or already delivered
  /// the message. A message already in flight towards the same receiver also
  /// counts as a duplicate, and a node sends a given message on one
  /// interface at a time.
  BeginResult begin(const ContactKey& contact, NodeId from, const Message& msg, bool receiver_has, Seconds now);

  /// Aborts transfers whose contact is in `down`, then moves every remaining
  /// transfer forward by bandwidth * dt bytes. `bandwidth[iface]` may be
  /// infinite, in which case transfers complete at `now`.
  AdvanceResult advance(Seconds now, Seconds dt, std::span<const double> bandwidth, std::span<const ContactKey> down);

  /// Aborts every transfer matching the predicate (e.g. sender lost its copy).
  template <class Pred>
  std::vector<Transfer> abort_if(Pred pred) {
    std::vector<Transfer> out;
    std::erase_if(active_, [&](const Transfer& t) {
      if (!pred(t)) return false;
      out.push_back(t);
      return true;
    });
    return out;
  }

  bool busy(NodeId node, InterfaceIndex iface) const;
  bool in_flight_to(NodeId receiver, MessageId msg) const;
  bool sending(NodeId sender, MessageId msg) const;
  std::span<const Transfer> active() const { return active_; }

 private:
  std::vector<Transfer> active_;
};

}  // namespace dtnsim
