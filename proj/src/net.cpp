#include "dtnsim/net.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dtnsim {

Buffer::InsertResult Buffer::insert(const Message& msg) {
  InsertResult r;
  if (msg.size > capacity_ || contains(msg.id)) return r;
  std::size_t drop = 0;
  Bytes freed = 0;
  while (capacity_ - occupancy_ + freed < msg.size) freed += queue_[drop++].size;
  if (drop > 0) {
    r.evicted.assign(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(drop));
    queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(drop));
    for (const auto& m : r.evicted) ids_.erase(m.id.value);
    occupancy_ -= freed;
  }
  queue_.push_back(msg);
  ids_.insert(msg.id.value);
  occupancy_ += msg.size;
  r.accepted = true;
  return r;
}

std::optional<Message> Buffer::remove(MessageId id) {
  if (!contains(id)) return std::nullopt;
  auto it = std::find_if(queue_.begin(), queue_.end(), [&](const Message& m) { return m.id == id; });
  Message m = *it;
  queue_.erase(it);
  ids_.erase(id.value);
  occupancy_ -= m.size;
  return m;
}

std::vector<Message> Buffer::purge_expired(Seconds now) {
  std::vector<Message> out;
  std::erase_if(queue_, [&](const Message& m) {
    if (!m.expired(now)) return false;
    out.push_back(m);
    return true;
  });
  for (const auto& m : out) {
    ids_.erase(m.id.value);
    occupancy_ -= m.size;
  }
  return out;
}

Message* Buffer::find(MessageId id) {
  if (!contains(id)) return nullptr;
  return &*std::find_if(queue_.begin(), queue_.end(), [&](const Message& m) { return m.id == id; });
}

const Message* Buffer::find(MessageId id) const { return const_cast<Buffer*>(this)->find(id); }

ContactDelta update_contacts(std::vector<ContactKey> present, std::vector<Contact>& active, Seconds now) {
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());

  ContactDelta delta;
  std::vector<Contact> next;
  next.reserve(present.size());
  auto it = active.begin();
  for (const auto& key : present) {
    while (it != active.end() && it->key < key) delta.down.push_back((it++)->key);
    if (it != active.end() && it->key == key) {
      next.push_back(*it++);
    } else {
      next.push_back({key, now});
      delta.up.push_back(next.back());
    }
  }
  for (; it != active.end(); ++it) delta.down.push_back(it->key);
  active = std::move(next);
  return delta;
}

ContactDelta detect_contacts(std::span<const Vec2> positions, const InterfaceTable& carries,
                             std::span<const double> ranges, std::vector<Contact>& active, Seconds now) {
  std::vector<ContactKey> present;
  const auto n = static_cast<NodeId>(positions.size());
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const double d = distance(positions[a], positions[b]);
      for (InterfaceIndex i = 0; i < ranges.size(); ++i)
        if (carries[a][i] && carries[b][i] && d <= ranges[i]) present.push_back({a, b, i});
    }
  }
  return update_contacts(std::move(present), active, now);
}

BeginResult TransferTable::begin(const ContactKey& contact, NodeId from, const Message& msg, bool receiver_has,
                                 Seconds now) {
  const NodeId to = contact.peer_of(from);
  if (busy(from, contact.iface)) return BeginResult::InterfaceBusy;
  if (receiver_has || in_flight_to(to, msg.id)) return BeginResult::DuplicateAtReceiver;
  if (sending(from, msg.id)) return BeginResult::AlreadySending;
  active_.push_back({contact, from, to, msg.id, msg.size, 0.0, now, now});
  return BeginResult::Started;
}

AdvanceResult TransferTable::advance(Seconds now, Seconds dt, std::span<const double> bandwidth,
                                     std::span<const ContactKey> down) {
  AdvanceResult r;
  std::erase_if(active_, [&](const Transfer& t) {
    if (std::find(down.begin(), down.end(), t.contact) == down.end()) return false;
    r.aborted.push_back(t);
    return true;
  });
  std::erase_if(active_, [&](Transfer& t) {
    const double bw = bandwidth[t.contact.iface];
    const double remaining = static_cast<double>(t.size) - t.bytes_sent;
    if (std::isinf(bw) || remaining <= bw * dt) {
      t.finished_at = std::isinf(bw) ? now : now + remaining / bw;
      t.bytes_sent = static_cast<double>(t.size);
      r.completed.push_back(t);
      return true;
    }
    t.bytes_sent += bw * dt;
    return false;
  });
  std::sort(r.completed.begin(), r.completed.end(), [](const Transfer& x, const Transfer& y) {
    return std::tie(x.finished_at, x.from, x.contact.iface) < std::tie(y.finished_at, y.from, y.contact.iface);
  });
  return r;
}

bool TransferTable::busy(NodeId node, InterfaceIndex iface) const {
  return std::any_of(active_.begin(), active_.end(),
                     [&](const Transfer& t) { return t.from == node && t.contact.iface == iface; });
}

bool TransferTable::in_flight_to(NodeId receiver, MessageId msg) const {
  return std::any_of(active_.begin(), active_.end(),
                     [&](const Transfer& t) { return t.to == receiver && t.msg == msg; });
}

bool TransferTable::sending(NodeId sender, MessageId msg) const {
  return std::any_of(active_.begin(), active_.end(), [&](const Transfer& t) { return t.from == sender && t.msg == msg; });
}

}  // namespace dtnsim
