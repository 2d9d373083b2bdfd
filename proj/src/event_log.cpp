#include "dtnsim/event_log.hpp"

#include <ostream>

#include <fmt/format.h>

namespace dtnsim {

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Created: return "CREATED";
    case EventKind::Relayed: return "RELAYED";
    case EventKind::Delivered: return "DELIVERED";
    case EventKind::Duplicate: return "DUPLICATE";
    case EventKind::Dropped: return "DROPPED";
    case EventKind::Aborted: return "ABORTED";
    case EventKind::ContactUp: return "CONTACT_UP";
    case EventKind::ContactDown: return "CONTACT_DOWN";
  }
  return "?";
}

std::string_view drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::BufferOverflow: return "buffer-overflow";
    case DropReason::TtlExpiry: return "ttl-expiry";
    case DropReason::Oversize: return "oversize";
    case DropReason::None: break;
  }
  return "-";
}

void EventLog::write_tsv(std::ostream& out, std::span<const std::string> interface_names) const {
  std::string line;
  for (const auto& e : events_) {
    const bool contact = e.kind == EventKind::ContactUp || e.kind == EventKind::ContactDown;
    const auto node = [](NodeId n) { return n == kNoNode ? std::string("-") : std::to_string(n); };
    std::string_view reason = drop_reason_name(e.reason);
    if (contact && e.iface < interface_names.size()) reason = interface_names[e.iface];
    line = fmt::format("{:.3f}\t{}\t{}\t{}\t{}\t{}\t{}\n", e.time, event_kind_name(e.kind),
                       contact ? std::string("-") : e.msg.str(), node(e.from), node(e.to),
                       contact ? std::string("-") : std::to_string(e.hops), reason);
    out << line;
  }
}

}  // namespace dtnsim
