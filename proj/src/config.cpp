#include "dtnsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dtnsim {

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

int ScenarioConfig::total_nodes() const {
  int n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

const GroupConfig* ScenarioConfig::find_group(std::string_view id) const {
  for (const auto& g : groups)
    if (g.id == id) return &g;
  return nullptr;
}

std::map<std::string, InterfaceConfig> default_interfaces() {
  return {
      {"bluetooth", {"bluetooth", 250'000.0, 15.0}},
      {"wifi", {"wifi", 10'000'000.0, 500.0}},
      {"highspeed", {"highspeed", 20'000'000.0, 1200.0}},
  };
}

namespace {

std::vector<GroupConfig> default_groups() {
  using M = Movement;
  return {
      {"audience", 50, M::ShortestPathMapBased, {0.4, 1.0}, {0.0, 120.0}, {"bluetooth"}, true, false, Anchor::Any},
      {"rescue", 10, M::ShortestPathMapBased, {2.0, 5.0}, {0.0, 0.0}, {"bluetooth", "wifi"}, false, true, Anchor::Any},
      {"ambulance", 5, M::ShortestPathMapBased, {3.0, 12.0}, {0.0, 0.0}, {"bluetooth", "wifi", "highspeed"}, false, false,
       Anchor::Any},
      {"media", 5, M::ShortestPathMapBased, {1.0, 4.0}, {0.0, 0.0}, {"bluetooth", "wifi"}, false, false, Anchor::Any},
      {"sensors", 10, M::Stationary, {0.0, 0.0}, {0.0, 0.0}, {"bluetooth", "wifi"}, false, false, Anchor::Ring},
      {"exits", 5, M::Stationary, {0.0, 0.0}, {0.0, 0.0}, {"bluetooth", "wifi", "highspeed"}, false, false, Anchor::Exit},
  };
}

constexpr Range<double> kDefaultMobilePause{0.0, 120.0};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double parse_number(std::string_view s) {
  if (auto v = to_double(s)) return *v;
  throw std::invalid_argument(fmt::format("expected a number, got '{}'", s));
}

long long parse_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument(fmt::format("expected an integer, got '{}'", s));
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument(fmt::format("expected true or false, got '{}'", s));
}

template <class T, class F>
Range<T> parse_range(std::string_view s, F&& scalar) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw std::invalid_argument(fmt::format("expected 'min,max', got '{}'", s));
  Range<T> r{scalar(parts[0]), scalar(parts[1])};
  if (r.min > r.max) throw std::invalid_argument(fmt::format("range min exceeds max in '{}'", s));
  return r;
}

Movement parse_movement(std::string_view s) {
  if (s == "shortest-path-map-based") return Movement::ShortestPathMapBased;
  if (s == "stationary") return Movement::Stationary;
  throw std::invalid_argument(fmt::format("unknown movement '{}'", s));
}

Anchor parse_anchor(std::string_view s) {
  if (s == "any") return Anchor::Any;
  if (s == "ring") return Anchor::Ring;
  if (s == "exit") return Anchor::Exit;
  throw std::invalid_argument(fmt::format("unknown anchor '{}'", s));
}

std::vector<std::string> parse_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ',')) {
    if (part.empty()) throw std::invalid_argument("empty list element");
    out.emplace_back(part);
  }
  return out;
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

// Group and interface blocks are assembled after the whole file is read so
// that per-block defaults and required keys can be resolved.
struct PendingGroup {
  std::string id;
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> fields;  // key -> (value, line)
};

struct PendingInterface {
  std::string name;
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> fields;
};

const std::set<std::string, std::less<>> kGroupFields{"count",     "movement",   "speed_range", "pause_range",
                                                      "interfaces", "role_flags", "anchor"};
const std::set<std::string, std::less<>> kInterfaceFields{"bandwidth", "range"};

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Seconds parse_duration(std::string_view text) {
  text = trim(text);
  double scale = 1.0;
  if (!text.empty()) {
    switch (text.back()) {
      case 's': scale = 1.0; text.remove_suffix(1); break;
      case 'm': scale = 60.0; text.remove_suffix(1); break;
      case 'h': scale = 3600.0; text.remove_suffix(1); break;
      default: break;
    }
  }
  return parse_number(trim(text)) * scale;
}

Bytes parse_size(std::string_view text) {
  text = trim(text);
  double scale = 1.0;
  if (!text.empty()) {
    if (text.back() == 'k') {
      scale = 1e3;
      text.remove_suffix(1);
    } else if (text.back() == 'M') {
      scale = 1e6;
      text.remove_suffix(1);
    }
  }
  const double v = parse_number(trim(text)) * scale;
  if (v < 0 || v != std::floor(v) || v > 1e18)
    throw std::invalid_argument(fmt::format("size must be a whole non-negative byte count, got '{}'", text));
  return static_cast<Bytes>(v);
}

Protocol parse_protocol(std::string_view text) {
  if (text == "epidemic") return Protocol::Epidemic;
  if (text == "spray-and-wait") return Protocol::SprayAndWait;
  throw std::invalid_argument(fmt::format("unknown protocol '{}'", text));
}

std::string_view protocol_name(Protocol p) { return p == Protocol::Epidemic ? "epidemic" : "spray-and-wait"; }

std::string_view movement_name(Movement m) {
  return m == Movement::Stationary ? "stationary" : "shortest-path-map-based";
}

std::string_view anchor_name(Anchor a) {
  switch (a) {
    case Anchor::Ring: return "ring";
    case Anchor::Exit: return "exit";
    default: return "any";
  }
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.groups = default_groups();
  cfg.interfaces = default_interfaces();
  return cfg;
}

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  std::vector<PendingGroup> groups;
  std::vector<PendingInterface> ifaces;
  std::map<std::string, int, std::less<>> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (key == "bufferSize") key = "buffer_bytes";
    if (auto [it, inserted] = seen.emplace(key, line_no); !inserted)
      throw ConfigError(line_no, fmt::format("duplicate key '{}' (first set on line {})", key, it->second));

    try {
      if (key == "sim_duration") {
        cfg.sim_duration = parse_duration(value);
      } else if (key == "tick") {
        cfg.tick = parse_duration(value);
      } else if (key == "world_size") {
        const auto r = split(value, ',');
        if (r.size() != 2) throw std::invalid_argument("expected 'width,height'");
        cfg.world_size = {parse_number(r[0]), parse_number(r[1])};
      } else if (key == "buffer_bytes") {
        cfg.buffer_bytes = parse_size(value);
      } else if (key == "seed") {
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || p != value.data() + value.size())
          throw std::invalid_argument(fmt::format("expected a non-negative integer, got '{}'", value));
        cfg.seed = v;
      } else if (key == "map_source") {
        if (value.empty()) throw std::invalid_argument("empty map source");
        cfg.map_source.synthetic = value == "synthetic";
        cfg.map_source.path = cfg.map_source.synthetic ? std::string{} : std::string(value);
      } else if (key == "map.ring_radius") {
        cfg.map_source.stadium.ring_radius = parse_number(value);
      } else if (key == "map.exit_count") {
        cfg.map_source.stadium.exit_count = static_cast<int>(parse_integer(value));
      } else if (key == "map.road_length") {
        cfg.map_source.stadium.road_length = parse_number(value);
      } else if (key == "traffic.interval_range") {
        cfg.traffic.interval_range = parse_range<Seconds>(value, parse_duration);
      } else if (key == "traffic.size_range") {
        cfg.traffic.size_range = parse_range<Bytes>(value, parse_size);
      } else if (key == "traffic.ttl") {
        cfg.traffic.ttl = parse_duration(value);
      } else if (key == "router.protocol") {
        cfg.router.protocol = parse_protocol(value);
      } else if (key == "router.copy_budget") {
        cfg.router.copy_budget = static_cast<int>(parse_integer(value));
      } else if (key == "router.binary_mode") {
        cfg.router.binary_mode = parse_bool(value);
      } else if (key.starts_with("group.") || key.starts_with("interface.")) {
        const bool is_group = key.starts_with("group.");
        const std::string_view rest = std::string_view(key).substr(is_group ? 6 : 10);
        const auto dot = rest.rfind('.');
        if (dot == std::string_view::npos) throw ConfigError(line_no, fmt::format("unknown key '{}'", key));
        const std::string name(rest.substr(0, dot));
        const std::string field(rest.substr(dot + 1));
        if (!valid_name(name)) throw ConfigError(line_no, fmt::format("invalid name '{}' in key '{}'", name, key));
        const auto& allowed = is_group ? kGroupFields : kInterfaceFields;
        if (!allowed.contains(field)) throw ConfigError(line_no, fmt::format("unknown key '{}'", key));
        if (is_group) {
          auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.id == name; });
          if (it == groups.end()) it = groups.insert(groups.end(), PendingGroup{name, line_no, {}});
          it->fields[field] = {std::string(value), line_no};
        } else {
          auto it = std::find_if(ifaces.begin(), ifaces.end(), [&](const auto& i) { return i.name == name; });
          if (it == ifaces.end()) it = ifaces.insert(ifaces.end(), PendingInterface{name, line_no, {}});
          it->fields[field] = {std::string(value), line_no};
        }
      } else {
        throw ConfigError(line_no, fmt::format("unknown key '{}'", key));
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, fmt::format("{}: {}", key, e.what()));
    }
  }

  if (ifaces.empty()) {
    cfg.interfaces = default_interfaces();
  } else {
    for (const auto& pi : ifaces) {
      InterfaceConfig ic{pi.name, 0.0, 0.0};
      for (const char* req : {"bandwidth", "range"})
        if (!pi.fields.contains(req))
          throw ConfigError(pi.line, fmt::format("missing required key 'interface.{}.{}'", pi.name, req));
      const auto& [bw, bw_line] = pi.fields.at("bandwidth");
      const auto& [rg, rg_line] = pi.fields.at("range");
      try {
        ic.bandwidth = static_cast<double>(parse_size(bw));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(bw_line, fmt::format("interface.{}.bandwidth: {}", pi.name, e.what()));
      }
      try {
        ic.range = parse_number(rg);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(rg_line, fmt::format("interface.{}.range: {}", pi.name, e.what()));
      }
      cfg.interfaces.emplace(pi.name, ic);
    }
  }

  if (groups.empty()) {
    cfg.groups = default_groups();
  } else {
    for (const auto& pg : groups) {
      GroupConfig g;
      g.id = pg.id;
      for (const char* req : {"count", "interfaces"})
        if (!pg.fields.contains(req))
          throw ConfigError(pg.line, fmt::format("missing required key 'group.{}.{}'", pg.id, req));
      auto field = [&](const char* name) -> std::optional<std::pair<std::string, int>> {
        auto it = pg.fields.find(name);
        if (it == pg.fields.end() || trim(it->second.first).empty()) return std::nullopt;
        return it->second;
      };
      auto guarded = [&](const char* name, auto&& fn) {
        if (auto f = field(name)) {
          try {
            fn(f->first);
          } catch (const std::invalid_argument& e) {
            throw ConfigError(f->second, fmt::format("group.{}.{}: {}", pg.id, name, e.what()));
          }
          return true;
        }
        return false;
      };
      guarded("movement", [&](std::string_view v) { g.movement = parse_movement(v); });
      const bool mobile = g.movement == Movement::ShortestPathMapBased;
      if (!guarded("count", [&](std::string_view v) { g.count = static_cast<int>(parse_integer(v)); }))
        throw ConfigError(pg.fields.at("count").second, fmt::format("group.{}.count: empty value", pg.id));
      if (!guarded("speed_range", [&](std::string_view v) { g.speed_range = parse_range<double>(v, parse_number); }) &&
          mobile)
        throw ConfigError(pg.line, fmt::format("missing required key 'group.{}.speed_range'", pg.id));
      if (!guarded("pause_range", [&](std::string_view v) { g.pause_range = parse_range<double>(v, parse_duration); }))
        g.pause_range = mobile ? kDefaultMobilePause : Range<double>{0.0, 0.0};
      {
        const auto& [v, l] = pg.fields.at("interfaces");
        try {
          g.interfaces = parse_list(v);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(l, fmt::format("group.{}.interfaces: {}", pg.id, e.what()));
        }
      }
      guarded("role_flags", [&](std::string_view v) {
        for (const auto& flag : parse_list(v)) {
          if (flag == "message_source")
            g.message_source = true;
          else if (flag == "message_destination")
            g.message_destination = true;
          else
            throw std::invalid_argument(fmt::format("unknown role flag '{}'", flag));
        }
      });
      guarded("anchor", [&](std::string_view v) { g.anchor = parse_anchor(v); });
      cfg.groups.push_back(std::move(g));
    }
  }
  return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto range = [](auto r) {
    if constexpr (std::is_same_v<decltype(r.min), Bytes>)
      return fmt::format("{},{}", r.min, r.max);
    else
      return format_double(r.min) + "," + format_double(r.max);
  };

  put("sim_duration", format_double(cfg.sim_duration));
  put("tick", format_double(cfg.tick));
  put("world_size", format_double(cfg.world_size.x) + "," + format_double(cfg.world_size.y));
  put("buffer_bytes", std::to_string(cfg.buffer_bytes));
  put("seed", std::to_string(cfg.seed));
  put("map_source", cfg.map_source.synthetic ? std::string("synthetic") : cfg.map_source.path);
  put("map.ring_radius", format_double(cfg.map_source.stadium.ring_radius));
  put("map.exit_count", std::to_string(cfg.map_source.stadium.exit_count));
  put("map.road_length", format_double(cfg.map_source.stadium.road_length));
  put("traffic.interval_range", range(cfg.traffic.interval_range));
  put("traffic.size_range", range(cfg.traffic.size_range));
  put("traffic.ttl", format_double(cfg.traffic.ttl));
  put("router.protocol", std::string(protocol_name(cfg.router.protocol)));
  put("router.copy_budget", std::to_string(cfg.router.copy_budget));
  put("router.binary_mode", cfg.router.binary_mode ? "true" : "false");
  for (const auto& [name, ic] : cfg.interfaces) {
    put("interface." + name + ".bandwidth", fmt::format("{}", static_cast<Bytes>(ic.bandwidth)));
    put("interface." + name + ".range", format_double(ic.range));
  }
  for (const auto& g : cfg.groups) {
    const std::string p = "group." + g.id + ".";
    put(p + "count", std::to_string(g.count));
    put(p + "movement", std::string(movement_name(g.movement)));
    put(p + "speed_range", range(g.speed_range));
    put(p + "pause_range", range(g.pause_range));
    put(p + "interfaces", fmt::format("{}", fmt::join(g.interfaces, ",")));
    std::vector<std::string> roles;
    if (g.message_source) roles.emplace_back("message_source");
    if (g.message_destination) roles.emplace_back("message_destination");
    put(p + "role_flags", fmt::format("{}", fmt::join(roles, ",")));
    put(p + "anchor", std::string(anchor_name(g.anchor)));
  }
  return out;
}

std::vector<Finding> validate(const ScenarioConfig& cfg) {
  std::vector<Finding> f;
  auto add = [&](std::string field, std::string rule) { f.push_back({std::move(field), std::move(rule)}); };

  if (!(cfg.sim_duration > 0)) add("sim_duration", "must be positive");
  if (!(cfg.tick > 0)) add("tick", "must be positive");
  if (cfg.tick > 0 && cfg.sim_duration > 0 && cfg.tick > cfg.sim_duration) add("tick", "must not exceed sim_duration");
  if (!(cfg.world_size.x > 0 && cfg.world_size.y > 0)) add("world_size", "both dimensions must be positive");

  const auto& t = cfg.traffic;
  if (!(t.interval_range.min > 0 && t.interval_range.min <= t.interval_range.max))
    add("traffic.interval_range", "requires 0 < min <= max");
  if (!(t.size_range.min > 0 && t.size_range.min <= t.size_range.max))
    add("traffic.size_range", "requires 0 < min <= max");
  if (!(t.ttl > 0)) add("traffic.ttl", "must be positive");
  if (cfg.buffer_bytes < t.size_range.max) add("buffer_bytes", "buffer smaller than max message");

  if (cfg.router.protocol == Protocol::SprayAndWait && cfg.router.copy_budget < 1)
    add("router.copy_budget", "must be at least 1 for spray-and-wait");

  if (cfg.map_source.synthetic) {
    const auto& s = cfg.map_source.stadium;
    if (!(s.ring_radius > 0)) add("map.ring_radius", "must be positive");
    if (s.exit_count < 2) add("map.exit_count", "must be at least 2");
    if (!(s.road_length > 0)) add("map.road_length", "must be positive");
  } else if (cfg.map_source.path.empty()) {
    add("map_source", "path must not be empty");
  }

  for (const auto& [name, ic] : cfg.interfaces) {
    if (!(ic.bandwidth > 0)) add("interface." + name + ".bandwidth", "must be positive");
    if (!(ic.range > 0)) add("interface." + name + ".range", "must be positive");
  }

  if (cfg.groups.empty()) add("groups", "at least one group is required");
  std::set<std::string> ids;
  bool any_source = false, any_destination = false;
  for (const auto& g : cfg.groups) {
    const std::string p = "group." + g.id;
    if (!ids.insert(g.id).second) add(p, "duplicate group id");
    if (g.count < 1) add(p + ".count", "must be at least 1");
    if (g.speed_range.min > g.speed_range.max) add(p + ".speed_range", "min exceeds max");
    if (g.pause_range.min < 0 || g.pause_range.min > g.pause_range.max)
      add(p + ".pause_range", "requires 0 <= min <= max");
    if (g.movement == Movement::Stationary) {
      if (g.speed_range != Range<double>{0.0, 0.0}) add(p + ".speed_range", "stationary groups require 0,0");
    } else if (!(g.speed_range.min > 0)) {
      add(p + ".speed_range", "mobile groups require a positive minimum speed");
    }
    if (g.interfaces.empty()) add(p + ".interfaces", "at least one interface is required");
    for (const auto& name : g.interfaces)
      if (!cfg.interfaces.contains(name))
        add(p + ".interfaces", fmt::format("group '{}' references undeclared interface '{}'", g.id, name));
    any_source |= g.message_source;
    any_destination |= g.message_destination;
  }
  if (!cfg.groups.empty()) {
    if (!any_source) add("groups", "no group carries role message_source");
    if (!any_destination) add("groups", "no group carries role message_destination");
  }
  return f;
}

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg, std::string_view axis,
                                         const std::vector<std::string>& values) {
  std::vector<ScenarioConfig> out;
  if (axis == "buffer_bytes") {
    for (const auto& v : values) {
      out.push_back(cfg);
      out.back().buffer_bytes = parse_size(v);
    }
  } else if (axis == "router.protocol") {
    for (const auto& v : values) {
      out.push_back(cfg);
      out.back().router.protocol = parse_protocol(v);
    }
  } else {
    throw std::invalid_argument(fmt::format("axis '{}' is not sweepable (use buffer_bytes or router.protocol)", axis));
  }
  return out;
}

}  // namespace dtnsim
