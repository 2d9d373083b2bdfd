#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtnsim::cli {

/// Exit codes: 0 success, 1 domain error (validation or run), 2 usage or I/O error.
enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Unreadable input, unwritable output or bad command-line usage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // defaults to the scenario's seed
  std::filesystem::path out = ".";
  bool events = false;
};

struct SweepArgs {
  std::filesystem::path config;
  std::optional<std::string> buffers;  // comma list of sizes; scenario value when absent
  std::optional<std::string> protocols;
  std::optional<std::string> seeds;
  std::filesystem::path out = ".";
  unsigned threads = 0;  // 0: DTNSIM_THREADS or hardware concurrency
};

struct PlotArgs {
  std::filesystem::path csv;
  std::filesystem::path out = ".";
};

int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// File names written by the commands.
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kEventsFile = "events.tsv";
inline constexpr const char* kSweepFile = "sweep.csv";

}  // namespace dtnsim::cli
