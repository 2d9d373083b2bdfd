#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "dtnsim/engine.hpp"

using namespace dtnsim;

namespace {

// Small, fast scenario: the default groups shrunk to 15 nodes for 20 minutes.
ScenarioConfig small_scenario(Protocol p = Protocol::Epidemic, Bytes buffer = 5'000'000) {
  auto cfg = default_scenario();
  const std::map<std::string, int> counts{{"audience", 8}, {"rescue", 2}, {"ambulance", 1},
                                          {"media", 1},    {"sensors", 2}, {"exits", 1}};
  for (auto& g : cfg.groups) g.count = counts.at(g.id);
  cfg.sim_duration = 1200;
  cfg.traffic.interval_range = {5, 10};
  cfg.router.protocol = p;
  cfg.buffer_bytes = buffer;
  return cfg;
}

}  // namespace

TEST_CASE("invalid configs are rejected before running") {
  auto cfg = default_scenario();
  cfg.sim_duration = 0;
  CHECK_THROWS_AS(Simulation(cfg, 1), InvalidConfig);
  cfg = default_scenario();
  cfg.buffer_bytes = 1000;
  try {
    Simulation sim(cfg, 1);
    FAIL("expected InvalidConfig");
  } catch (const InvalidConfig& e) {
    REQUIRE(e.findings().size() == 1);
    CHECK(e.findings()[0].field == "buffer_bytes");
  }
}

TEST_CASE("clock advances by exactly one tick per iteration") {
  auto cfg = small_scenario();
  cfg.tick = 0.5;
  cfg.sim_duration = 10;
  Simulation sim(cfg, 1);
  for (int i = 0; i < 20; ++i) {
    CHECK(sim.clock() == 0.5 * i);
    CHECK_FALSE(sim.finished());
    sim.tick();
  }
  CHECK(sim.finished());
  CHECK(sim.clock() == 10.0);
}

TEST_CASE("empty schedule: only the clock advances") {
  Simulation sim(ContactSchedule{3, 10, {}, {}}, RouterConfig{});
  sim.run_to_end();
  CHECK(sim.clock() == 10.0);
  CHECK(sim.log().size() == 0);
}

TEST_CASE("a message created in the tick its contact comes up is sent in that tick") {
  const ContactSchedule s{2, 10, {{4, 0, 1}}, {{4, 0, 1}}};
  Simulation sim(s, RouterConfig{});
  sim.run_to_end();
  const auto events = sim.log().events();
  REQUIRE(events.size() == 4);
  CHECK(events[0].kind == EventKind::Created);
  CHECK(events[1].kind == EventKind::ContactUp);
  CHECK(events[2].kind == EventKind::Delivered);
  CHECK(events[2].time == 4.0);
  CHECK(events[3].kind == EventKind::ContactDown);
  CHECK(events[3].time == 5.0);
}

TEST_CASE("identical config and seed give identical event logs") {
  const auto cfg = small_scenario();
  const auto a = run(cfg, 9);
  const auto b = run(cfg, 9);
  CHECK(a.log.size() > 100);
  CHECK(std::equal(a.log.events().begin(), a.log.events().end(), b.log.events().begin(), b.log.events().end()));
  const auto c = run(cfg, 10);
  CHECK_FALSE(std::equal(a.log.events().begin(), a.log.events().end(), c.log.events().begin(), c.log.events().end()));
}

TEST_CASE("routing protocol does not change the mobility trace") {
  Simulation epi(small_scenario(Protocol::Epidemic), 4);
  Simulation snw(small_scenario(Protocol::SprayAndWait), 4);
  while (!epi.finished()) {
    epi.tick();
    snw.tick();
    for (std::size_t n = 0; n < epi.nodes().size(); ++n)
      REQUIRE(epi.nodes()[n].movement.position == snw.nodes()[n].movement.position);
  }
}

TEST_CASE("invariants hold every tick for both protocols and tight buffers") {
  for (auto p : {Protocol::Epidemic, Protocol::SprayAndWait})
    for (Bytes b : {300'000ull, 1'000'000ull, 5'000'000ull}) {
      CAPTURE(b);
      auto cfg = small_scenario(p, b);
      const auto r = run(cfg, 2, {.check_invariants = true});
      const auto audit = audit_conservation(r.log, r.buffered_copies);
      CHECK_MESSAGE(audit.balanced, (audit.problems.empty() ? "" : audit.problems.front()));
      CHECK(r.metrics.delivered <= r.metrics.created);
      CHECK(r.metrics.delivery_probability >= 0.0);
      CHECK(r.metrics.delivery_probability <= 1.0);
    }
}

TEST_CASE("created messages go from source groups to destination groups") {
  const auto cfg = small_scenario();
  Simulation sim(cfg, 5);
  sim.run_to_end();
  std::set<std::uint32_t> ids;
  for (const auto& e : sim.log().events()) {
    if (e.kind != EventKind::Created) continue;
    REQUIRE(ids.insert(e.msg.value).second);
    CHECK(cfg.groups[sim.nodes()[e.from].group].message_source);
    CHECK(cfg.groups[sim.nodes()[e.to].group].message_destination);
  }
  CHECK(ids.size() == sim.created_count());
}

TEST_CASE("every abort follows a lost contact or a lost sender copy in the same instant") {
  const auto cfg = small_scenario(Protocol::Epidemic, 1'000'000);
  Simulation sim(cfg, 6);
  sim.run_to_end();
  const auto ev = sim.log().events();
  int aborts = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind != EventKind::Aborted) continue;
    ++aborts;
    bool explained = false;
    for (std::size_t j = i; j-- > 0 && ev[j].time == ev[i].time;) {
      const auto& e = ev[j];
      if (e.kind == EventKind::ContactDown && e.iface == ev[i].iface &&
          ContactKey::make(e.from, e.to, 0) == ContactKey::make(ev[i].from, ev[i].to, 0))
        explained = true;
      if (e.kind == EventKind::Dropped && e.msg == ev[i].msg && e.from == ev[i].from) explained = true;
    }
    CHECK(explained);
  }
  CHECK(aborts > 0);
}

TEST_CASE("per-interface throughput stays within bandwidth") {
  const auto cfg = small_scenario();
  Simulation sim(cfg, 7, {.record_throughput = true});
  sim.run_to_end();
  std::size_t transfers = 0;
  for (NodeId n = 0; n < sim.nodes().size(); ++n)
    for (InterfaceIndex i = 0; i < sim.interface_names().size(); ++i) {
      const auto& rec = sim.throughput(n, i);
      transfers += rec.size();
      // Any window [start of transfer k, finish of transfer m]: bytes <= bw * window + one message.
      for (std::size_t k = 0; k < rec.size(); ++k) {
        Bytes sum = 0;
        for (std::size_t m = k; m < rec.size(); ++m) {
          sum += rec[m].bytes;
          const double window = rec[m].finished_at - rec[k].finished_at;
          REQUIRE(static_cast<double>(sum) <= sim.bandwidth(i) * window + static_cast<double>(rec[k].bytes) + 1e-6);
        }
      }
    }
  CHECK(transfers > 0);
}

TEST_CASE("epidemic relays at least as much as spray-and-wait") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto e = run(small_scenario(Protocol::Epidemic), seed);
    const auto s = run(small_scenario(Protocol::SprayAndWait), seed);
    CHECK(e.metrics.relayed >= s.metrics.relayed);
    CHECK(e.metrics.created == s.metrics.created);
  }
}

TEST_CASE("maps load from a LINESTRING file") {
  const auto path = std::filesystem::temp_directory_path() / "dtnsim_engine_map.wkt";
  {
    std::ofstream out(path);
    out << "LINESTRING (0 0, 100 0, 100 100)\nLINESTRING (100 100, 0 100, 0 0)\n";
  }
  auto cfg = small_scenario();
  cfg.map_source.synthetic = false;
  cfg.map_source.path = path.string();
  for (auto& g : cfg.groups) g.anchor = Anchor::Any;
  const auto map = load_map(cfg, 1);
  CHECK(map.vertex_count() == 4);
  const auto r = run(cfg, 1, {.check_invariants = true});
  CHECK(r.metrics.created > 0);
  cfg.map_source.path = "/nonexistent/map.wkt";
  CHECK_THROWS_AS(load_map(cfg, 1), MapError);
}
