#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtnsim/config.hpp"
#include "dtnsim/event_log.hpp"
#include "dtnsim/mobility.hpp"
#include "dtnsim/net.hpp"
#include "dtnsim/reports.hpp"
#include "dtnsim/rng.hpp"
#include "dtnsim/routing.hpp"
#include "dtnsim/traffic.hpp"
#include "dtnsim/world_map.hpp"

namespace dtnsim {

class InvalidConfig : public std::runtime_error {
 public:
  explicit InvalidConfig(std::vector<Finding> findings);
  const std::vector<Finding>& findings() const { return findings_; }

 private:
  std::vector<Finding> findings_;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RunOptions {
  /// Re-check buffer, copy-budget and log invariants after every tick.
  bool check_invariants = false;
  /// Keep (finish time, bytes) of every completed transfer per (node, interface).
  bool record_throughput = false;
  /// Keep a copy of every created message (as issued, before buffering).
  bool record_created = false;
};

struct NodeState {
  NodeId id = 0;
  std::size_t group = 0;
  MovementState movement;
  std::vector<bool> carries;  // by interface index
  Buffer buffer;
  RouterState router;
};

/// Idealised scenario for checking routing against a reference: scripted
/// contacts on a single interface with unbounded bandwidth and buffers.
struct ScriptedContact {
  Seconds time = 0.0;
  NodeId a = 0;
  NodeId b = 0;
};

struct ScriptedMessage {
  Seconds time = 0.0;
  NodeId src = 0;
  NodeId dst = 0;
  Seconds ttl = 1e9;
};

struct ContactSchedule {
  int nodes = 0;
  Seconds duration = 0.0;
  std::vector<ScriptedContact> contacts;  // each contact is up for the one tick starting at its time
  std::vector<ScriptedMessage> messages;
};

struct TransferRecord {
  Seconds finished_at = 0.0;
  Bytes bytes = 0;
};

struct RunResult {
  EventLog log;
  MetricsSummary metrics;
  std::vector<std::uint32_t> buffered_copies;  // indexed by message id value
};

/// Owns the world and runs the fixed tick loop:
///   1 purge expired copies   2 create due messages   3 move nodes
///   4 sample contacts        5 start transfers on idle interfaces
///   6 advance transfers      7 hand completed transfers to routers
///   8 advance the clock
/// With unbounded bandwidth, phases 5-7 repeat until no transfer starts.
class Simulation {
 public:
  /// Throws InvalidConfig when validate(cfg) reports findings.
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed, RunOptions opts = {});
  Simulation(const ContactSchedule& schedule, const RouterConfig& router, RunOptions opts = {});
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  void tick();
  void run_to_end();
  bool finished() const { return tick_index_ >= total_ticks_; }
  Seconds clock() const { return static_cast<double>(tick_index_) * tick_; }

  const EventLog& log() const { return log_; }
  std::span<const NodeState> nodes() const { return nodes_; }
  const MapGraph* map() const { return map_.get(); }
  std::span<const std::string> interface_names() const { return iface_names_; }
  std::span<const Contact> contacts() const { return contacts_; }
  std::span<const Transfer> active_transfers() const { return transfers_.active(); }
  const std::vector<TransferRecord>& throughput(NodeId node, InterfaceIndex iface) const;
  double bandwidth(InterfaceIndex iface) const { return bandwidth_[iface]; }
  std::uint32_t created_count() const { return created_; }
  const std::vector<Message>& created_messages() const { return created_log_; }

  std::vector<std::uint32_t> buffered_copies() const;
  /// Throws InvariantViolation describing the first broken invariant.
  void check_invariants() const;

  RunResult finish() &&;

 private:
  void purge_phase(Seconds now);
  void creation_phase(Seconds now);
  void mobility_phase(Seconds now);
  ContactDelta contact_phase(Seconds now);
  std::size_t start_transfers(Seconds now);
  void completion_phase(const std::vector<Transfer>& completed);
  void admit_created(Message msg, Seconds now);
  void abort_sending(NodeId node, MessageId msg, Seconds now);
  void log_aborted(const std::vector<Transfer>& aborted, Seconds now);

  RouterConfig router_;
  RunOptions opts_;
  Seconds tick_ = 1.0;
  std::uint64_t tick_index_ = 0;
  std::uint64_t total_ticks_ = 0;
  bool instant_ = false;

  std::vector<GroupConfig> groups_;
  std::unique_ptr<MapGraph> map_;
  std::vector<MovementModel> models_;
  std::vector<NodeState> nodes_;
  std::vector<RngStream> mobility_rng_;
  std::optional<RngStream> traffic_rng_;
  std::optional<TrafficGenerator> traffic_;

  std::vector<std::string> iface_names_;
  std::vector<double> bandwidth_;
  std::vector<double> range_;
  InterfaceTable carries_;

  std::vector<Contact> contacts_;
  std::vector<std::vector<std::vector<NodeId>>> peers_;  // [node][iface] -> sorted peers
  TransferTable transfers_;
  EventLog log_;
  std::size_t checked_events_ = 0;

  // Scripted mode.
  std::vector<ScriptedContact> script_contacts_;
  std::vector<ScriptedMessage> script_messages_;
  std::size_t next_script_message_ = 0;

  std::uint32_t created_ = 0;
  std::vector<std::int64_t> destroyed_copies_;  // spray-and-wait budget lost to drops, per message
  std::vector<std::int64_t> holders_;           // buffered copies ever created, per message
  std::vector<std::vector<TransferRecord>> throughput_;  // [node * ifaces + iface]
  std::vector<Message> created_log_;
};

/// Runs one experiment end to end. Throws InvalidConfig.
RunResult run(const ScenarioConfig& cfg, std::uint64_t seed, RunOptions opts = {});

/// Loads the configured map: the synthetic stadium or a LINESTRING file.
MapGraph load_map(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace dtnsim
