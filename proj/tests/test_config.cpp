#include <doctest.h>

#include <random>

#include "dtnsim/config.hpp"

using namespace dtnsim;

namespace {

const char* kMinimal = R"(
# two groups and one interface
sim_duration = 1h
interface.bt.bandwidth = 250k
interface.bt.range = 15
group.crowd.count = 3
group.crowd.speed_range = 0.4,1.0
group.crowd.interfaces = bt
group.crowd.role_flags = message_source
group.medics.count = 2
group.medics.speed_range = 2,5
group.medics.pause_range = 0,0
group.medics.interfaces = bt
group.medics.role_flags = message_destination
)";

bool has_finding(const std::vector<Finding>& f, std::string_view field, std::string_view needle) {
  for (const auto& x : f)
    if (x.field == field && x.rule.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("default scenario has six groups totalling 85 nodes and validates clean") {
  const auto cfg = default_scenario();
  CHECK(cfg.groups.size() == 6);
  CHECK(cfg.total_nodes() == 85);
  CHECK(validate(cfg).empty());
  CHECK(cfg.buffer_bytes == 5'000'000);
  CHECK(cfg.sim_duration == 43200.0);
  CHECK(cfg.traffic.ttl == 10800.0);
  CHECK(cfg.interfaces.at("bluetooth").bandwidth == 250'000.0);
  CHECK(cfg.interfaces.at("bluetooth").range == 15.0);
  CHECK(cfg.interfaces.at("wifi").bandwidth == 10'000'000.0);
  CHECK(cfg.interfaces.at("highspeed").range == 1200.0);
  CHECK(cfg.router.copy_budget == 10);
  CHECK(cfg.router.binary_mode);
  const auto* audience = cfg.find_group("audience");
  REQUIRE(audience);
  CHECK(audience->speed_range == Range<double>{0.4, 1.0});
  CHECK(audience->pause_range == Range<double>{0.0, 120.0});
  CHECK(audience->message_source);
  CHECK(cfg.find_group("rescue")->message_destination);
  CHECK(cfg.find_group("ambulance")->speed_range == Range<double>{3.0, 12.0});
  CHECK(cfg.find_group("exits")->movement == Movement::Stationary);
}

TEST_CASE("bufferSize = 5M parses to 5 000 000 bytes") {
  const auto cfg = parse_scenario(std::string(kMinimal) + "bufferSize = 5M\n");
  CHECK(cfg.buffer_bytes == 5'000'000);
  CHECK(parse_scenario(std::string(kMinimal) + "buffer_bytes = 20M\n").buffer_bytes == 20'000'000);
}

TEST_CASE("omitted pause_range defaults to 0..120 s for mobile groups") {
  const auto cfg = parse_scenario(kMinimal);
  CHECK(cfg.find_group("crowd")->pause_range == Range<double>{0.0, 120.0});
  CHECK(cfg.find_group("medics")->pause_range == Range<double>{0.0, 0.0});
  const auto empty = parse_scenario(std::string(kMinimal) + "group.crowd.pause_range =\n");
  CHECK(empty.find_group("crowd")->pause_range == Range<double>{0.0, 120.0});
}

TEST_CASE("range with min > max is a parse error") {
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "traffic.interval_range = 60,30\n"), ConfigError);
}

TEST_CASE("parse errors carry the offending line") {
  try {
    parse_scenario("seed = 1\nbogus_key = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_scenario("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("group.x.speed_range = 1,2\n"), ConfigError);  // count/interfaces missing
  CHECK_THROWS_AS(parse_scenario("sim_duration = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("router.protocol = prophet\n"), ConfigError);
}

TEST_CASE("files without group or interface keys use the defaults") {
  const auto cfg = parse_scenario("seed = 9\nsim_duration = 2h\n");
  CHECK(cfg.seed == 9);
  CHECK(cfg.sim_duration == 7200.0);
  CHECK(cfg.groups == default_scenario().groups);
  CHECK(cfg.interfaces == default_interfaces());
}

TEST_CASE("duration and size suffixes") {
  CHECK(parse_duration("90") == 90.0);
  CHECK(parse_duration("15m") == 900.0);
  CHECK(parse_duration("3h") == 10800.0);
  CHECK(parse_duration("2.5s") == 2.5);
  CHECK(parse_size("250k") == 250'000);
  CHECK(parse_size("5M") == 5'000'000);
  CHECK(parse_size("123") == 123);
  CHECK_THROWS(parse_size("-1"));
  CHECK_THROWS(parse_size("5Q"));
  CHECK(parse_protocol("spray-and-wait") == Protocol::SprayAndWait);
  CHECK(parse_protocol("epidemic") == Protocol::Epidemic);
}

TEST_CASE("validate reports a buffer smaller than the largest message") {
  auto cfg = default_scenario();
  cfg.buffer_bytes = 200'000;
  const auto f = validate(cfg);
  CHECK(has_finding(f, "buffer_bytes", "buffer smaller than max message"));
}

TEST_CASE("validate names a group that references an undeclared interface") {
  auto cfg = default_scenario();
  cfg.groups[1].interfaces.push_back("lte");
  const auto f = validate(cfg);
  REQUIRE(f.size() == 1);
  CHECK(f[0].rule.find("rescue") != std::string::npos);
  CHECK(f[0].rule.find("lte") != std::string::npos);
}

TEST_CASE("validate rejects degenerate durations, speeds and roles") {
  auto cfg = default_scenario();
  cfg.sim_duration = 0;
  CHECK(has_finding(validate(cfg), "sim_duration", "positive"));

  cfg = default_scenario();
  cfg.tick = 2 * cfg.sim_duration;
  CHECK(has_finding(validate(cfg), "tick", "exceed"));

  cfg = default_scenario();
  cfg.groups[4].speed_range = {1.0, 2.0};  // sensors are stationary
  CHECK(has_finding(validate(cfg), "group.sensors.speed_range", "stationary"));

  cfg = default_scenario();
  cfg.groups[0].speed_range = {0.0, 1.0};
  CHECK(has_finding(validate(cfg), "group.audience.speed_range", "positive"));

  cfg = default_scenario();
  for (auto& g : cfg.groups) g.message_destination = false;
  CHECK(has_finding(validate(cfg), "groups", "message_destination"));

  cfg = default_scenario();
  cfg.groups[0].count = 0;
  CHECK(has_finding(validate(cfg), "group.audience.count", "at least 1"));
}

TEST_CASE("expand_sweep over buffers and protocols") {
  const auto base = default_scenario();
  const auto buffers = expand_sweep(base, "buffer_bytes", {"5M", "10M", "15M", "20M"});
  REQUIRE(buffers.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(buffers[i].buffer_bytes == (i + 1) * 5'000'000);
    auto same = buffers[i];
    same.buffer_bytes = base.buffer_bytes;
    CHECK(same == base);  // every other field untouched
  }
  CHECK(expand_sweep(base, "buffer_bytes", {}).empty());
  const auto protos = expand_sweep(base, "router.protocol", {"epidemic", "spray-and-wait"});
  REQUIRE(protos.size() == 2);
  CHECK(protos[0].router.protocol == Protocol::Epidemic);
  CHECK(protos[1].router.protocol == Protocol::SprayAndWait);
  CHECK_THROWS_AS(expand_sweep(base, "tick", {"1"}), std::invalid_argument);
}

TEST_CASE("serialize then parse is the identity on random configs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> real(0.01, 5000.0);
  std::uniform_int_distribution<int> small(1, 40);
  for (int iter = 0; iter < 200; ++iter) {
    auto cfg = default_scenario();
    cfg.sim_duration = real(rng);
    cfg.tick = real(rng) / 1000;
    cfg.world_size = {real(rng), real(rng)};
    cfg.buffer_bytes = static_cast<Bytes>(real(rng) * 1e4);
    cfg.seed = rng();
    cfg.traffic.interval_range = {real(rng) / 10, 600.0};
    cfg.traffic.ttl = real(rng);
    cfg.router.protocol = iter % 2 ? Protocol::SprayAndWait : Protocol::Epidemic;
    cfg.router.copy_budget = small(rng);
    cfg.router.binary_mode = iter % 3 != 0;
    cfg.map_source.stadium.ring_radius = real(rng);
    cfg.map_source.stadium.exit_count = small(rng) + 1;
    if (iter % 5 == 0) {
      cfg.map_source.synthetic = false;
      cfg.map_source.path = "maps/field.wkt";
    }
    cfg.interfaces["wifi"].range = real(rng);
    cfg.interfaces["bluetooth"].bandwidth = std::floor(real(rng) * 100);
    for (auto& g : cfg.groups) {
      g.count = small(rng);
      if (g.movement != Movement::Stationary) {
        const double lo = real(rng) / 100;
        g.speed_range = {lo, lo + real(rng) / 100};
        g.pause_range = {0.0, real(rng)};
      }
    }
    const auto text = serialize_scenario(cfg);
    const auto back = parse_scenario(text);
    REQUIRE_MESSAGE(back == cfg, text);
    CHECK(serialize_scenario(back) == text);
  }
}

TEST_CASE("shipped-style minimal file validates") {
  CHECK(validate(parse_scenario(kMinimal)).empty());
}
