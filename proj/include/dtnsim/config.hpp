#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/types.hpp"

namespace dtnsim {

enum class Movement { ShortestPathMapBased, Stationary };

/// Where stationary members of a group are pinned on the map.
enum class Anchor { Any, Ring, Exit };

enum class Protocol { Epidemic, SprayAndWait };

struct GroupConfig {
  std::string id;
  int count = 1;
  Movement movement = Movement::ShortestPathMapBased;
  Range<double> speed_range{0.0, 0.0};  // m/s
  Range<double> pause_range{0.0, 0.0};  // s
  std::vector<std::string> interfaces;
  bool message_source = false;
  bool message_destination = false;
  Anchor anchor = Anchor::Any;

  friend bool operator==(const GroupConfig&, const GroupConfig&) = default;
};

struct InterfaceConfig {
  std::string name;
  double bandwidth = 0.0;  // bytes/s
  double range = 0.0;      // m

  friend bool operator==(const InterfaceConfig&, const InterfaceConfig&) = default;
};

struct TrafficConfig {
  Range<Seconds> interval_range{30.0, 60.0};
  Range<Bytes> size_range{100'000, 300'000};
  Seconds ttl = 3 * 3600.0;

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct RouterConfig {
  Protocol protocol = Protocol::Epidemic;
  int copy_budget = 10;
  bool binary_mode = true;

  friend bool operator==(const RouterConfig&, const RouterConfig&) = default;
};

/// Parameters of the synthetic stadium generator.
struct StadiumParams {
  double ring_radius = 100.0;
  int exit_count = 8;
  double road_length = 150.0;

  friend bool operator==(const StadiumParams&, const StadiumParams&) = default;
};

/// Either `synthetic` (generated from `stadium`) or a path to a LINESTRING map file.
struct MapSource {
  bool synthetic = true;
  std::string path;
  StadiumParams stadium;

  friend bool operator==(const MapSource&, const MapSource&) = default;
};

struct ScenarioConfig {
  Seconds sim_duration = 12 * 3600.0;
  Seconds tick = 1.0;
  Vec2 world_size{800.0, 800.0};
  std::vector<GroupConfig> groups;
  std::map<std::string, InterfaceConfig> interfaces;
  TrafficConfig traffic;
  RouterConfig router;
  Bytes buffer_bytes = 5'000'000;
  MapSource map_source;
  std::uint64_t seed = 1;

  int total_nodes() const;
  const GroupConfig* find_group(std::string_view id) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Syntax, type, unknown-key and missing-key errors. `line()` is 0 when the
/// error is not tied to a single line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct Finding {
  std::string field;
  std::string rule;

  std::string str() const { return field + ": " + rule; }
};

/// Stadium-earthquake defaults: six groups totalling 85 nodes, three interfaces.
ScenarioConfig default_scenario();

/// Default interface set: bluetooth, wifi, highspeed.
std::map<std::string, InterfaceConfig> default_interfaces();

ScenarioConfig parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioConfig& cfg);
std::vector<Finding> validate(const ScenarioConfig& cfg);

/// Axes: `buffer_bytes` (size values such as `5M`) and `router.protocol`.
std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg, std::string_view axis,
                                         const std::vector<std::string>& values);

// Value parsers shared with the CLI.
Seconds parse_duration(std::string_view text);
Bytes parse_size(std::string_view text);
Protocol parse_protocol(std::string_view text);
std::string_view protocol_name(Protocol p);
std::string_view movement_name(Movement m);
std::string_view anchor_name(Anchor a);

}  // namespace dtnsim
