#include "dtnsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dtnsim/config.hpp"
#include "dtnsim/engine.hpp"
#include "dtnsim/reports.hpp"

namespace dtnsim::cli {
namespace fs = std::filesystem;
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw UsageError(fmt::format("cannot write '{}'", path.string()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError(fmt::format("cannot create output directory '{}'", dir.string()));
}

ScenarioConfig load_scenario(const fs::path& path) { return parse_scenario(read_file(path)); }

std::vector<std::string> split_list(const std::string& flag, const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError(fmt::format("{}: empty list item", flag));
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw UsageError(fmt::format("{}: list is empty", flag));
  return out;
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError(fmt::format("--seeds: bad seed '{}'", s));
  return v;
}

SummaryRow summary_row(const ScenarioConfig& cfg, std::uint64_t seed, const MetricsSummary& m) {
  return {std::string(protocol_name(cfg.router.protocol)), cfg.buffer_bytes, seed, m};
}

void write_charts(std::span<const SummaryRow> rows, const fs::path& dir) {
  for (auto metric : chart_metrics()) write_file(dir / fmt::format("{}.svg", metric), render_bar_chart(metric, rows));
}

unsigned thread_cap(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DTNSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Maps exceptions to the exit-code contract.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

}  // namespace

int cmd_validate(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_scenario(config);
    const auto findings = validate(cfg);
    for (const auto& f : findings) err << f.str() << '\n';
    if (!findings.empty()) return int(kDomainError);
    out << fmt::format("{}: ok ({} nodes)\n", config.string(), cfg.total_nodes());
    return int(kOk);
  });
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_scenario(args.config);
    const std::uint64_t seed = args.seed.value_or(cfg.seed);
    ensure_dir(args.out);
    Simulation sim(cfg, seed);
    sim.run_to_end();
    const std::vector<std::string> ifaces(sim.interface_names().begin(), sim.interface_names().end());
    if (args.events) {
      std::ostringstream ev;
      sim.log().write_tsv(ev, ifaces);
      write_file(args.out / kEventsFile, ev.str());
    }
    const auto result = std::move(sim).finish();
    const auto& m = result.metrics;
    write_file(args.out / kMetricsFile, format_csv({summary_row(cfg, seed, m)}));
    out << fmt::format("delivery_probability {:.6g}\n", m.delivery_probability)
        << fmt::format("latency_avg_s {:.6g}\n", m.latency_avg) << fmt::format("overhead_ratio {:.6g}\n", m.overhead_ratio)
        << fmt::format("hopcount_avg {:.6g}\n", m.hopcount_avg) << fmt::format("dropped {}\n", m.dropped);
    return int(kOk);
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto base = load_scenario(args.config);
    if (auto findings = validate(base); !findings.empty()) throw InvalidConfig(std::move(findings));

    const auto buffers = args.buffers ? split_list("--buffers", *args.buffers)
                                      : std::vector<std::string>{std::to_string(base.buffer_bytes)};
    const auto protocols = args.protocols ? split_list("--protocols", *args.protocols)
                                          : std::vector<std::string>{std::string(protocol_name(base.router.protocol))};
    std::vector<std::uint64_t> seeds;
    if (args.seeds) {
      for (const auto& s : split_list("--seeds", *args.seeds)) seeds.push_back(parse_seed(s));
    } else {
      seeds.push_back(base.seed);
    }

    struct Job {
      ScenarioConfig cfg;
      std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& by_proto : expand_sweep(base, "router.protocol", protocols))
      for (const auto& cfg : expand_sweep(by_proto, "buffer_bytes", buffers))
        for (auto seed : seeds) jobs.push_back({cfg, seed});
    ensure_dir(args.out);

    std::vector<SummaryRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::string first_error;
    auto worker = [&] {
      while (!failed) {
        const std::size_t i = next++;
        if (i >= jobs.size()) return;
        try {
          rows[i] = summary_row(jobs[i].cfg, jobs[i].seed, run(jobs[i].cfg, jobs[i].seed).metrics);
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mu);
          if (!failed.exchange(true))
            first_error = fmt::format("run {} buffer {} seed {}: {}", protocol_name(jobs[i].cfg.router.protocol),
                                      jobs[i].cfg.buffer_bytes, jobs[i].seed, e.what());
        }
      }
    };
    const unsigned n_threads = std::min<std::size_t>(thread_cap(args.threads), jobs.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failed) throw std::runtime_error(first_error);

    // Charts come from the CSV text so that `plot` on this file reproduces them exactly.
    const std::string csv = format_csv(rows);
    write_file(args.out / kSweepFile, csv);
    write_charts(parse_csv(csv), args.out);
    out << fmt::format("{} runs -> {}\n", jobs.size(), (args.out / kSweepFile).string());
    return int(kOk);
  });
}

int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = parse_csv(read_file(args.csv));
    if (rows.empty()) throw ReportError("CSV has no data rows");
    ensure_dir(args.out);
    write_charts(rows, args.out);
    out << fmt::format("{} charts -> {}\n", chart_metrics().size(), args.out.string());
    return int(kOk);
  });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic DTN simulator: stadium evacuation with Epidemic and Spray-and-Wait routing"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("config", validate_path, "Scenario file")->required();

  RunArgs run_args;
  std::string run_config, run_out = ".";
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("config", run_config, "Scenario file")->required();
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "RNG seed (default: scenario seed)");
  run_cmd->add_option("--out", run_out, "Output directory");
  run_cmd->add_flag("--events", run_args.events, "Also write the event log");

  std::string sweep_config, sweep_out = ".", buffers, protocols, seeds;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the protocol x buffer x seed cross product");
  sweep_cmd->add_option("config", sweep_config, "Base scenario file")->required();
  auto* buffers_opt = sweep_cmd->add_option("--buffers", buffers, "Comma-separated buffer sizes, e.g. 5M,20M");
  auto* protocols_opt = sweep_cmd->add_option("--protocols", protocols, "Comma-separated protocols");
  auto* seeds_opt = sweep_cmd->add_option("--seeds", seeds, "Comma-separated seeds");
  sweep_cmd->add_option("--out", sweep_out, "Output directory");

  std::string plot_csv, plot_out = ".";
  auto* plot_cmd = app.add_subcommand("plot", "Render charts from a sweep CSV");
  plot_cmd->add_option("csv", plot_csv, "Sweep CSV")->required();
  plot_cmd->add_option("--out", plot_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? int(kOk) : int(kUsageError);
  }

  if (*validate_cmd) {
    if (!fs::exists(validate_path)) {
      err << "error: no such file '" << validate_path << "'\n";
      return kUsageError;
    }
    return cmd_validate(validate_path, out, err);
  }
  if (*run_cmd) {
    run_args.config = run_config;
    run_args.out = run_out;
    if (*seed_opt) run_args.seed = run_seed;
    return cmd_run(run_args, out, err);
  }
  if (*sweep_cmd) {
    SweepArgs a;
    a.config = sweep_config;
    a.out = sweep_out;
    if (*buffers_opt) a.buffers = buffers;
    if (*protocols_opt) a.protocols = protocols;
    if (*seeds_opt) a.seeds = seeds;
    return cmd_sweep(a, out, err);
  }
  return cmd_plot({plot_csv, plot_out}, out, err);
}

}  // namespace dtnsim::cli
