#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/types.hpp"

namespace dtnsim {

enum class EventKind : std::uint8_t { Created, Relayed, Delivered, Duplicate, Dropped, Aborted, ContactUp, ContactDown };

enum class DropReason : std::uint8_t { None, BufferOverflow, TtlExpiry, Oversize };

std::string_view event_kind_name(EventKind k);
std::string_view drop_reason_name(DropReason r);

inline constexpr NodeId kNoNode = 0xffffffffu;

/// For message events `from` is the node the record concerns (source,
/// sender, or the node that dropped a copy) and `to` the receiver. Contact
/// records carry the pair and the interface index.
struct Event {
  Seconds time = 0.0;
  EventKind kind = EventKind::Created;
  DropReason reason = DropReason::None;
  InterfaceIndex iface = 0;
  MessageId msg;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  int hops = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

class EventLog {
 public:
  void append(const Event& e) { events_.push_back(e); }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  /// Tab-separated `time kind msg_id from to hops reason`, one record per
  /// line. Unused fields print as `-`; contact records put the interface
  /// name in the reason column.
  void write_tsv(std::ostream& out, std::span<const std::string> interface_names) const;

 private:
  std::vector<Event> events_;
};

}  // namespace dtnsim
