#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/event_log.hpp"

namespace dtnsim {

/// Run totals. `relayed` counts every completed transfer, the final hop to
/// the destination included, so overhead_ratio = (relayed - delivered) / delivered.
struct MetricsSummary {
  std::uint64_t created = 0;
  std::uint64_t delivered = 0;
  std::uint64_t relayed = 0;
  std::uint64_t dropped = 0;  // every dropped copy, all reasons
  std::uint64_t dropped_overflow = 0;
  std::uint64_t dropped_ttl = 0;
  std::uint64_t dropped_oversize = 0;
  std::uint64_t aborted = 0;
  std::uint64_t duplicates = 0;
  double delivery_probability = 0.0;
  double latency_avg = 0.0;     // NaN when nothing was delivered
  double overhead_ratio = 0.0;  // NaN when nothing was delivered
  double hopcount_avg = 0.0;    // NaN when nothing was delivered
};

MetricsSummary compute_metrics(const EventLog& log);

/// Per-message copy accounting: 1 + relays == still buffered + dropped.
struct ConservationAudit {
  bool balanced = true;
  std::vector<std::string> problems;
};

/// `buffered_copies[id]` is the number of nodes holding message `id` at the
/// end of the run. Also checks log ordering and first-delivery uniqueness.
ConservationAudit audit_conservation(const EventLog& log, std::span<const std::uint32_t> buffered_copies);

struct SummaryRow {
  std::string protocol;
  std::uint64_t buffer_bytes = 0;
  std::uint64_t seed = 0;
  MetricsSummary metrics;
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kCsvHeader =
    "protocol,buffer_bytes,seed,created,delivered,relayed,dropped_total,dropped_overflow,dropped_ttl,aborted,"
    "duplicates,delivery_probability,latency_avg_s,overhead_ratio,hopcount_avg";

/// Header plus rows sorted by (protocol, buffer, seed); floats to 6 significant digits.
std::string format_csv(std::vector<SummaryRow> rows);
void write_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
std::vector<SummaryRow> parse_csv(std::string_view text);

/// Metrics that have a chart: delivery_probability, latency_avg,
/// overhead_ratio, hopcount_avg, dropped.
std::span<const std::string_view> chart_metrics();
double metric_value(const MetricsSummary& m, std::string_view metric);

double median(std::vector<double> values);

/// Grouped bar chart, one group per buffer size and one bar per protocol,
/// seeds collapsed by median. A log-scale y axis is used when the largest
/// positive value exceeds the smallest by more than 1000x.
std::string render_bar_chart(std::string_view metric, std::span<const SummaryRow> rows);
void write_bar_chart(std::string_view metric, std::span<const SummaryRow> rows, const std::filesystem::path& path);

}  // namespace dtnsim
