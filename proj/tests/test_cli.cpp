#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dtnsim/cli.hpp"
#include "dtnsim/config.hpp"
#include "dtnsim/reports.hpp"

namespace fs = std::filesystem;
using namespace dtnsim;

namespace {

const fs::path kScenarios = fs::path(DTNSIM_SOURCE_DIR) / "scenarios";

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dtnsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dtnsim::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dtnsim_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Desk scenario cut to 15 minutes so sweeps stay quick.
fs::path quick_scenario(const fs::path& dir) {
  auto cfg = parse_scenario(slurp(kScenarios / "stadium_desk.cfg"));
  cfg.sim_duration = 900;
  const auto p = dir / "quick.cfg";
  std::ofstream(p) << serialize_scenario(cfg);
  return p;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("validate: shipped scenarios pass") {
  for (const char* f : {"stadium.cfg", "stadium_desk.cfg"}) {
    const auto r = invoke({"validate", (kScenarios / f).string()});
    CHECK(r.code == 0);
  }
}

TEST_CASE("validate: findings exit 1, missing file exits 2") {
  const auto dir = fresh_dir("validate");
  auto cfg = default_scenario();
  cfg.buffer_bytes = 200'000;
  std::ofstream(dir / "small.cfg") << serialize_scenario(cfg);
  const auto r = invoke({"validate", (dir / "small.cfg").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("buffer smaller than max message") != std::string::npos);
  CHECK(invoke({"validate", (dir / "absent.cfg").string()}).code == 2);
  std::ofstream(dir / "broken.cfg") << "nonsense\n";
  CHECK(invoke({"validate", (dir / "broken.cfg").string()}).code == 1);
}

TEST_CASE("usage errors exit 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"run"}).code == 2);
  CHECK(invoke({"run", "x.cfg", "--seed", "notanumber"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("run: metrics row, printed metrics, events file, determinism") {
  const auto dir = fresh_dir("run");
  const auto scenario = quick_scenario(dir);
  const auto a = invoke({"run", scenario.string(), "--seed", "42", "--out", (dir / "a").string(), "--events"});
  REQUIRE(a.code == 0);
  for (const char* metric : {"delivery_probability", "latency_avg_s", "overhead_ratio", "hopcount_avg", "dropped"})
    CHECK(a.out.find(metric) != std::string::npos);
  const auto rows = parse_csv(slurp(dir / "a" / "metrics.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].seed == 42);
  CHECK(rows[0].metrics.delivery_probability >= 0.0);
  CHECK(rows[0].metrics.delivery_probability <= 1.0);
  const auto events = slurp(dir / "a" / "events.tsv");
  const auto first_kind = events.substr(events.find('\t') + 1, events.find('\t', events.find('\t') + 1) - events.find('\t') - 1);
  CHECK((first_kind == "CREATED" || first_kind == "CONTACT_UP"));

  const auto b = invoke({"run", scenario.string(), "--seed", "42", "--out", (dir / "b").string(), "--events"});
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  CHECK(events == slurp(dir / "b" / "events.tsv"));
  CHECK_FALSE(fs::exists(dir / "c" / "events.tsv"));
  CHECK(invoke({"run", scenario.string(), "--out", (dir / "c").string()}).code == 0);
  CHECK_FALSE(fs::exists(dir / "c" / "events.tsv"));
}

TEST_CASE("run: invalid scenario exits 1") {
  const auto dir = fresh_dir("run_invalid");
  auto cfg = default_scenario();
  cfg.groups[0].interfaces = {"lte"};
  std::ofstream(dir / "bad.cfg") << serialize_scenario(cfg);
  const auto r = invoke({"run", (dir / "bad.cfg").string(), "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("lte") != std::string::npos);
}

TEST_CASE("sweep: 4 buffers x 2 protocols x 1 seed gives 8 rows and 5 charts that plot reproduces") {
  const auto dir = fresh_dir("sweep");
  const auto scenario = quick_scenario(dir);
  const auto r = invoke({"sweep", scenario.string(), "--buffers", "5M,10M,15M,20M", "--protocols",
                      "epidemic,spray-and-wait", "--seeds", "1", "--out", (dir / "s").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto csv = slurp(dir / "s" / "sweep.csv");
  CHECK(lines(csv) == 9);
  for (auto metric : chart_metrics()) CHECK(fs::exists(dir / "s" / (std::string(metric) + ".svg")));

  REQUIRE(invoke({"plot", (dir / "s" / "sweep.csv").string(), "--out", (dir / "p").string()}).code == 0);
  for (auto metric : chart_metrics()) {
    const auto name = std::string(metric) + ".svg";
    CHECK(slurp(dir / "s" / name) == slurp(dir / "p" / name));
  }
}

TEST_CASE("sweep: one protocol, one buffer, five seeds gives five rows; order is thread-independent") {
  const auto dir = fresh_dir("sweep5");
  const auto scenario = quick_scenario(dir);
  cli::SweepArgs args;
  args.config = scenario;
  args.buffers = "5M";
  args.protocols = "spray-and-wait";
  args.seeds = "5,4,3,2,1";
  args.out = dir / "one";
  args.threads = 1;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_sweep(args, out, err) == 0);
  args.out = dir / "four";
  args.threads = 4;
  REQUIRE(cli::cmd_sweep(args, out, err) == 0);
  const auto csv = slurp(dir / "one" / "sweep.csv");
  CHECK(lines(csv) == 6);
  CHECK(csv == slurp(dir / "four" / "sweep.csv"));
}

TEST_CASE("sweep: bad lists are errors") {
  const auto dir = fresh_dir("sweep_bad");
  const auto scenario = quick_scenario(dir);
  CHECK(invoke({"sweep", scenario.string(), "--buffers", "", "--out", dir.string()}).code != 0);
  CHECK(invoke({"sweep", scenario.string(), "--seeds", "1,,2", "--out", dir.string()}).code != 0);
  CHECK(invoke({"sweep", scenario.string(), "--protocols", "prophet", "--out", dir.string()}).code != 0);
}

TEST_CASE("plot: 40-row CSV, single row, missing column") {
  const auto dir = fresh_dir("plot");
  std::vector<SummaryRow> rows;
  for (const char* p : {"epidemic", "spray-and-wait"})
    for (std::uint64_t b : {5'000'000ull, 10'000'000ull, 15'000'000ull, 20'000'000ull})
      for (std::uint64_t s = 1; s <= 5; ++s) {
        SummaryRow r{p, b, s, {}};
        r.metrics.created = 100;
        r.metrics.delivered = 20 + s;
        r.metrics.delivery_probability = 0.2 + 0.01 * static_cast<double>(s);
        r.metrics.dropped = p[0] == 'e' ? 800'000 : 1000;
        rows.push_back(r);
      }
  write_csv(rows, dir / "forty.csv");
  CHECK(invoke({"plot", (dir / "forty.csv").string(), "--out", (dir / "forty").string()}).code == 0);
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(dir / "forty")) svgs += e.path().extension() == ".svg";
  CHECK(svgs == 5);

  write_csv({rows.front()}, dir / "one.csv");
  CHECK(invoke({"plot", (dir / "one.csv").string(), "--out", (dir / "one").string()}).code == 0);
  CHECK(slurp(dir / "one" / "dropped.svg").find("class=\"bar\"") != std::string::npos);

  auto text = slurp(dir / "one.csv");
  text.replace(text.find("latency_avg_s"), 13, "latency");
  std::ofstream(dir / "missing.csv") << text;
  const auto r = invoke({"plot", (dir / "missing.csv").string(), "--out", (dir / "m").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("latency_avg_s") != std::string::npos);
  CHECK(invoke({"plot", (dir / "absent.csv").string()}).code == 2);
}
