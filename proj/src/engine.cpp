#include "dtnsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace dtnsim {
namespace {

std::string join_findings(const std::vector<Finding>& findings) {
  std::string s = "invalid scenario";
  for (const auto& f : findings) s += "\n  " + f.str();
  return s;
}

std::uint64_t tick_count(Seconds duration, Seconds tick) {
  return static_cast<std::uint64_t>(std::ceil(duration / tick - 1e-9));
}

}  // namespace

InvalidConfig::InvalidConfig(std::vector<Finding> findings)
    : std::runtime_error(join_findings(findings)), findings_(std::move(findings)) {}

MapGraph load_map(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.map_source.synthetic) {
    RngStream rng(seed, "map");
    return generate_stadium_map(cfg.map_source.stadium, rng, {cfg.world_size.x / 2, cfg.world_size.y / 2});
  }
  std::ifstream in(cfg.map_source.path, std::ios::binary);
  if (!in) throw MapError(fmt::format("cannot open map file '{}'", cfg.map_source.path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_map(ss.str());
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed, RunOptions opts)
    : router_(cfg.router), opts_(opts), tick_(cfg.tick) {
  if (auto findings = validate(cfg); !findings.empty()) throw InvalidConfig(std::move(findings));
  total_ticks_ = tick_count(cfg.sim_duration, cfg.tick);

  for (const auto& [name, ic] : cfg.interfaces) {
    iface_names_.push_back(name);
    bandwidth_.push_back(ic.bandwidth);
    range_.push_back(ic.range);
  }

  map_ = std::make_unique<MapGraph>(load_map(cfg, seed));
  groups_ = cfg.groups;
  models_.reserve(groups_.size());
  for (const auto& g : groups_) models_.emplace_back(g, *map_);

  std::vector<NodeId> sources, destinations;
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const auto& g = groups_[gi];
    std::vector<bool> carries(iface_names_.size(), false);
    for (const auto& name : g.interfaces)
      carries[static_cast<std::size_t>(
          std::find(iface_names_.begin(), iface_names_.end(), name) - iface_names_.begin())] = true;
    for (int k = 0; k < g.count; ++k) {
      const auto id = static_cast<NodeId>(nodes_.size());
      mobility_rng_.emplace_back(seed, fmt::format("mobility/{}", id));
      nodes_.push_back({id, gi, models_[gi].init_placement(k, mobility_rng_.back()), carries,
                        Buffer(cfg.buffer_bytes), {}});
      carries_.push_back(carries);
      if (g.message_source) sources.push_back(id);
      if (g.message_destination) destinations.push_back(id);
    }
  }

  traffic_rng_.emplace(seed, "traffic");
  traffic_.emplace(cfg.traffic, cfg.router, std::move(sources), std::move(destinations));
  traffic_->start(0.0, *traffic_rng_);

  peers_.assign(nodes_.size(), std::vector<std::vector<NodeId>>(iface_names_.size()));
  throughput_.resize(nodes_.size() * iface_names_.size());
  holders_.push_back(0);
  destroyed_copies_.push_back(0);
}

Simulation::Simulation(const ContactSchedule& schedule, const RouterConfig& router, RunOptions opts)
    : router_(router), opts_(opts), tick_(1.0), instant_(true) {
  if (schedule.nodes < 2) throw std::invalid_argument("contact schedule needs at least two nodes");
  total_ticks_ = tick_count(schedule.duration, tick_);
  iface_names_ = {"link"};
  bandwidth_ = {std::numeric_limits<double>::infinity()};
  range_ = {0.0};
  for (int i = 0; i < schedule.nodes; ++i) {
    const auto id = static_cast<NodeId>(i);
    MovementState still;
    still.path = {{0}, 0.0};
    still.cumulative = {0.0};
    nodes_.push_back({id, 0, still, {true}, Buffer(std::numeric_limits<Bytes>::max() / 2), {}});
    carries_.push_back({true});
  }
  for (const auto& c : schedule.contacts)
    if (c.a >= nodes_.size() || c.b >= nodes_.size() || c.a == c.b)
      throw std::invalid_argument("scripted contact references an invalid node pair");
  script_contacts_ = schedule.contacts;
  std::stable_sort(script_contacts_.begin(), script_contacts_.end(),
                   [](const auto& x, const auto& y) { return x.time < y.time; });
  script_messages_ = schedule.messages;
  std::stable_sort(script_messages_.begin(), script_messages_.end(),
                   [](const auto& x, const auto& y) { return x.time < y.time; });

  peers_.assign(nodes_.size(), std::vector<std::vector<NodeId>>(1));
  throughput_.resize(nodes_.size());
  holders_.push_back(0);
  destroyed_copies_.push_back(0);
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::tick() {
  if (finished()) return;
  const Seconds now = clock();

  purge_phase(now);
  creation_phase(now);
  mobility_phase(now);
  const ContactDelta delta = contact_phase(now);

  bool first_round = true;
  while (true) {
    const std::size_t started = start_transfers(now);
    auto adv = transfers_.advance(now, tick_, bandwidth_, first_round ? std::span<const ContactKey>(delta.down)
                                                                     : std::span<const ContactKey>());
    first_round = false;
    log_aborted(adv.aborted, now);
    completion_phase(adv.completed);
    if (!instant_ || started == 0) break;
  }

  ++tick_index_;
  if (opts_.check_invariants) check_invariants();
}

void Simulation::run_to_end() {
  while (!finished()) tick();
}

void Simulation::purge_phase(Seconds now) {
  std::vector<Buffer*> buffers;
  buffers.reserve(nodes_.size());
  for (auto& n : nodes_) buffers.push_back(&n.buffer);
  for (const auto& [node, msg] : purge_expired(buffers, now, log_)) {
    destroyed_copies_[msg.id.value] += msg.copies;
    abort_sending(node, msg.id, now);
  }
}

void Simulation::creation_phase(Seconds now) {
  if (traffic_) {
    while (traffic_->due(now)) {
      Message m = traffic_->create_message(now, *traffic_rng_);
      created_ = traffic_->created_count();
      admit_created(m, now);
    }
    return;
  }
  while (next_script_message_ < script_messages_.size() && script_messages_[next_script_message_].time <= now) {
    const auto& sm = script_messages_[next_script_message_++];
    Message m;
    m.id = MessageId{++created_};
    m.src = sm.src;
    m.dst = sm.dst;
    m.size = 1;
    m.created_at = now;
    m.ttl = sm.ttl;
    m.copies = router_.protocol == Protocol::SprayAndWait ? router_.copy_budget : 1;
    admit_created(m, now);
  }
}

void Simulation::admit_created(Message msg, Seconds now) {
  log_.append({now, EventKind::Created, DropReason::None, 0, msg.id, msg.src, msg.dst, 0});
  holders_.resize(msg.id.value + 1, 0);
  destroyed_copies_.resize(msg.id.value + 1, 0);
  holders_[msg.id.value] = 1;
  if (opts_.record_created) created_log_.push_back(msg);

  auto& src = nodes_[msg.src];
  auto ins = src.buffer.insert(msg);
  for (const auto& ev : ins.evicted) {
    log_.append({now, EventKind::Dropped, DropReason::BufferOverflow, 0, ev.id, src.id, kNoNode, ev.hops});
    destroyed_copies_[ev.id.value] += ev.copies;
    abort_sending(src.id, ev.id, now);
  }
  if (!ins.accepted) {
    log_.append({now, EventKind::Dropped, DropReason::Oversize, 0, msg.id, src.id, kNoNode, 0});
    destroyed_copies_[msg.id.value] += msg.copies;
  }
}

void Simulation::mobility_phase(Seconds now) {
  if (models_.empty()) return;
  for (auto& n : nodes_) n.movement = models_[n.group].step(std::move(n.movement), tick_, now, mobility_rng_[n.id]);
}

ContactDelta Simulation::contact_phase(Seconds now) {
  ContactDelta delta;
  if (traffic_) {
    std::vector<Vec2> positions;
    positions.reserve(nodes_.size());
    for (const auto& n : nodes_) positions.push_back(n.movement.position);
    delta = detect_contacts(positions, carries_, range_, contacts_, now);
  } else {
    std::vector<ContactKey> present;
    for (const auto& c : script_contacts_)
      if (c.time >= now && c.time < now + tick_) present.push_back(ContactKey::make(c.a, c.b, 0));
    delta = update_contacts(std::move(present), contacts_, now);
  }

  for (const auto& k : delta.down) log_.append({now, EventKind::ContactDown, DropReason::None, k.iface, {}, k.a, k.b, 0});
  for (const auto& c : delta.up)
    log_.append({now, EventKind::ContactUp, DropReason::None, c.key.iface, {}, c.key.a, c.key.b, 0});

  for (auto& per_iface : peers_)
    for (auto& v : per_iface) v.clear();
  for (const auto& c : contacts_) {
    peers_[c.key.a][c.key.iface].push_back(c.key.b);
    peers_[c.key.b][c.key.iface].push_back(c.key.a);
  }
  for (auto& per_iface : peers_)
    for (auto& v : per_iface) std::sort(v.begin(), v.end());
  return delta;
}

std::size_t Simulation::start_transfers(Seconds now) {
  std::size_t started = 0;
  std::vector<PeerView> views;
  for (auto& n : nodes_) {
    if (n.buffer.size() == 0) continue;
    for (InterfaceIndex i = 0; i < iface_names_.size(); ++i) {
      const auto& peers = peers_[n.id][i];
      if (peers.empty() || transfers_.busy(n.id, i)) continue;
      views.clear();
      for (NodeId p : peers) views.push_back({p, {&nodes_[p].buffer, &nodes_[p].router}});
      const auto intent = next_offer(router_, n.buffer, views, now, [&](MessageId m, NodeId peer) {
        return transfers_.in_flight_to(peer, m) || transfers_.sending(n.id, m);
      });
      if (!intent) continue;
      const Message* msg = n.buffer.find(intent->msg);
      if (transfers_.begin(ContactKey::make(n.id, intent->to, i), n.id, *msg, false, now) == BeginResult::Started)
        ++started;
    }
  }
  return started;
}

void Simulation::completion_phase(const std::vector<Transfer>& completed) {
  // A later entry of this batch is cancelled when its sender loses the copy
  // to an arrival processed first; it is aborted at the moment of that loss.
  std::vector<bool> cancelled(completed.size(), false);
  for (std::size_t k = 0; k < completed.size(); ++k) {
    if (cancelled[k]) continue;
    const auto& t = completed[k];
    auto& s = nodes_[t.from];
    auto& r = nodes_[t.to];
    const auto res = on_transfer_complete(router_, {s.id, s.buffer, s.router}, {r.id, r.buffer, r.router}, t.msg,
                                          t.finished_at, log_);
    if (opts_.record_throughput)
      throughput_[t.from * iface_names_.size() + t.contact.iface].push_back({t.finished_at, t.size});
    if (res.outcome == DeliveryOutcome::Relayed) ++holders_[t.msg.value];
    for (const auto& d : res.dropped) {
      destroyed_copies_[d.id.value] += d.copies;
      abort_sending(r.id, d.id, t.finished_at);
      for (std::size_t j = k + 1; j < completed.size(); ++j) {
        if (cancelled[j] || completed[j].from != r.id || completed[j].msg != d.id) continue;
        cancelled[j] = true;
        log_aborted({completed[j]}, t.finished_at);
      }
    }
  }
}

void Simulation::abort_sending(NodeId node, MessageId msg, Seconds now) {
  const auto aborted = transfers_.abort_if([&](const Transfer& t) { return t.from == node && t.msg == msg; });
  log_aborted(aborted, now);
}

void Simulation::log_aborted(const std::vector<Transfer>& aborted, Seconds now) {
  for (const auto& t : aborted)
    log_.append({now, EventKind::Aborted, DropReason::None, t.contact.iface, t.msg, t.from, t.to, 0});
}

const std::vector<TransferRecord>& Simulation::throughput(NodeId node, InterfaceIndex iface) const {
  return throughput_.at(node * iface_names_.size() + iface);
}

std::vector<std::uint32_t> Simulation::buffered_copies() const {
  std::vector<std::uint32_t> out(created_ + 1, 0);
  for (const auto& n : nodes_)
    for (const auto& m : n.buffer.messages()) ++out[m.id.value];
  return out;
}

void Simulation::check_invariants() const {
  auto fail = [&](const std::string& what) {
    throw InvariantViolation(fmt::format("t={}: {}", clock(), what));
  };
  for (const auto& n : nodes_) {
    Bytes sum = 0;
    for (const auto& m : n.buffer.messages()) sum += m.size;
    if (sum != n.buffer.occupancy()) fail(fmt::format("node {} occupancy {} != sum {}", n.id, n.buffer.occupancy(), sum));
    if (sum > n.buffer.capacity()) fail(fmt::format("node {} buffer over capacity", n.id));
  }
  if (router_.protocol == Protocol::SprayAndWait) {
    std::vector<std::int64_t> live(created_ + 1, 0);
    for (const auto& n : nodes_)
      for (const auto& m : n.buffer.messages()) {
        if (m.copies < 1) fail(fmt::format("{} at node {} holds {} copies", m.id.str(), n.id, m.copies));
        live[m.id.value] += m.copies;
      }
    const std::int64_t budget = router_.copy_budget;
    for (std::uint32_t id = 1; id <= created_; ++id) {
      if (live[id] + destroyed_copies_[id] != budget)
        fail(fmt::format("M{}: {} live + {} destroyed copies != budget {}", id, live[id], destroyed_copies_[id], budget));
      if (holders_[id] > budget) fail(fmt::format("M{}: {} copies created, budget {}", id, holders_[id], budget));
    }
  }
  for (const auto& t : transfers_.active()) {
    if (t.bytes_sent > static_cast<double>(t.size)) fail("transfer progress exceeds message size");
    const auto same = std::count_if(transfers_.active().begin(), transfers_.active().end(), [&](const Transfer& o) {
      return o.from == t.from && o.contact.iface == t.contact.iface;
    });
    if (same > 1) fail(fmt::format("node {} has {} outgoing transfers on one interface", t.from, same));
  }
  const auto events = log_.events();
  for (std::size_t i = std::max<std::size_t>(checked_events_, 1); i < events.size(); ++i)
    if (events[i].time < events[i - 1].time) fail("event log time went backwards");
  const_cast<Simulation*>(this)->checked_events_ = events.size();
}

RunResult Simulation::finish() && {
  RunResult r;
  r.metrics = compute_metrics(log_);
  r.buffered_copies = buffered_copies();
  r.log = std::move(log_);
  return r;
}

RunResult run(const ScenarioConfig& cfg, std::uint64_t seed, RunOptions opts) {
  Simulation sim(cfg, seed, opts);
  sim.run_to_end();
  return std::move(sim).finish();
}

}  // namespace dtnsim
