#include "dtnsim/reports.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

namespace dtnsim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

MetricsSummary compute_metrics(const EventLog& log) {
  MetricsSummary m;
  std::unordered_map<std::uint32_t, Seconds> created_at;
  double latency_sum = 0.0, hops_sum = 0.0;
  for (const auto& e : log.events()) {
    switch (e.kind) {
      case EventKind::Created:
        ++m.created;
        created_at[e.msg.value] = e.time;
        break;
      case EventKind::Delivered:
        ++m.delivered;
        ++m.relayed;
        latency_sum += e.time - created_at.at(e.msg.value);
        hops_sum += e.hops;
        break;
      case EventKind::Relayed: ++m.relayed; break;
      case EventKind::Duplicate:
        ++m.relayed;
        ++m.duplicates;
        break;
      case EventKind::Dropped:
        ++m.dropped;
        if (e.reason == DropReason::BufferOverflow) ++m.dropped_overflow;
        if (e.reason == DropReason::TtlExpiry) ++m.dropped_ttl;
        if (e.reason == DropReason::Oversize) ++m.dropped_oversize;
        break;
      case EventKind::Aborted: ++m.aborted; break;
      case EventKind::ContactUp:
      case EventKind::ContactDown: break;
    }
  }
  m.delivery_probability = m.created == 0 ? 0.0 : static_cast<double>(m.delivered) / static_cast<double>(m.created);
  if (m.delivered == 0) {
    m.latency_avg = m.overhead_ratio = m.hopcount_avg = kNaN;
  } else {
    const auto d = static_cast<double>(m.delivered);
    m.latency_avg = latency_sum / d;
    m.hopcount_avg = hops_sum / d;
    m.overhead_ratio = (static_cast<double>(m.relayed) - d) / d;
  }
  return m;
}

ConservationAudit audit_conservation(const EventLog& log, std::span<const std::uint32_t> buffered_copies) {
  ConservationAudit a;
  auto fail = [&](std::string s) {
    a.balanced = false;
    if (a.problems.size() < 20) a.problems.push_back(std::move(s));
  };
  struct Tally {
    std::int64_t relayed = 0, dropped = 0;
  };
  std::map<std::uint32_t, Tally> per_msg;
  std::set<std::uint32_t> delivered;
  Seconds last = -std::numeric_limits<double>::infinity();
  for (const auto& e : log.events()) {
    if (e.time < last) fail(fmt::format("event times decrease at t={}", e.time));
    last = e.time;
    if (e.kind == EventKind::ContactUp || e.kind == EventKind::ContactDown) continue;
    if (e.kind == EventKind::Created) {
      if (!per_msg.emplace(e.msg.value, Tally{}).second) fail(fmt::format("{} created twice", e.msg.str()));
      continue;
    }
    auto it = per_msg.find(e.msg.value);
    if (it == per_msg.end()) {
      fail(fmt::format("{} appears before its CREATED record", e.msg.str()));
      continue;
    }
    if (e.kind == EventKind::Relayed) ++it->second.relayed;
    if (e.kind == EventKind::Dropped) ++it->second.dropped;
    if (e.kind == EventKind::Delivered && !delivered.insert(e.msg.value).second)
      fail(fmt::format("{} delivered more than once", e.msg.str()));
  }
  for (const auto& [id, t] : per_msg) {
    const std::int64_t buffered = id < buffered_copies.size() ? buffered_copies[id] : 0;
    if (1 + t.relayed != buffered + t.dropped)
      fail(fmt::format("M{}: 1 + {} relayed != {} buffered + {} dropped", id, t.relayed, buffered, t.dropped));
  }
  for (std::size_t id = 0; id < buffered_copies.size(); ++id)
    if (buffered_copies[id] > 0 && !per_msg.contains(static_cast<std::uint32_t>(id)))
      fail(fmt::format("M{} buffered but never created", id));
  return a;
}

namespace {

std::string fmt_float(double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{:.6g}", v); }

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s, std::string_view column, int line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ReportError(fmt::format("line {}: column '{}': malformed value '{}'", line, column, s));
  return v;
}

}  // namespace

std::string format_csv(std::vector<SummaryRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.protocol, a.buffer_bytes, a.seed) < std::tie(b.protocol, b.buffer_bytes, b.seed);
  });
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.protocol, r.buffer_bytes, r.seed, m.created,
                       m.delivered, m.relayed, m.dropped, m.dropped_overflow, m.dropped_ttl, m.aborted, m.duplicates,
                       fmt_float(m.delivery_probability), fmt_float(m.latency_avg), fmt_float(m.overhead_ratio),
                       fmt_float(m.hopcount_avg));
  }
  return out;
}

void write_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw ReportError("write_csv: no summaries to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportError(fmt::format("cannot open '{}' for writing", path.string()));
  out << format_csv(rows);
  if (!out) throw ReportError(fmt::format("failed writing '{}'", path.string()));
}

std::vector<SummaryRow> parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
  }
  if (lines.empty() || lines.front().empty()) throw ReportError("CSV has no header row");

  const auto header = split_csv(lines.front());
  std::map<std::string_view, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (auto name : split_csv(kCsvHeader))
    if (!col.contains(name)) throw ReportError(fmt::format("CSV is missing column '{}'", name));

  std::vector<SummaryRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const int line_no = static_cast<int>(li + 1);
    const auto f = split_csv(lines[li]);
    if (f.size() != header.size())
      throw ReportError(fmt::format("line {}: expected {} fields, got {}", line_no, header.size(), f.size()));
    auto u = [&](std::string_view c) { return parse_field<std::uint64_t>(f[col.at(c)], c, line_no); };
    auto d = [&](std::string_view c) { return parse_field<double>(f[col.at(c)], c, line_no); };
    SummaryRow r;
    r.protocol = std::string(f[col.at("protocol")]);
    if (r.protocol.empty()) throw ReportError(fmt::format("line {}: empty protocol", line_no));
    r.buffer_bytes = u("buffer_bytes");
    r.seed = u("seed");
    auto& m = r.metrics;
    m.created = u("created");
    m.delivered = u("delivered");
    m.relayed = u("relayed");
    m.dropped = u("dropped_total");
    m.dropped_overflow = u("dropped_overflow");
    m.dropped_ttl = u("dropped_ttl");
    m.dropped_oversize = m.dropped - std::min(m.dropped, m.dropped_overflow + m.dropped_ttl);
    m.aborted = u("aborted");
    m.duplicates = u("duplicates");
    m.delivery_probability = d("delivery_probability");
    m.latency_avg = d("latency_avg_s");
    m.overhead_ratio = d("overhead_ratio");
    m.hopcount_avg = d("hopcount_avg");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::span<const std::string_view> chart_metrics() {
  static constexpr std::array<std::string_view, 5> kMetrics{"delivery_probability", "latency_avg", "overhead_ratio",
                                                            "hopcount_avg", "dropped"};
  return kMetrics;
}

double metric_value(const MetricsSummary& m, std::string_view metric) {
  if (metric == "delivery_probability") return m.delivery_probability;
  if (metric == "latency_avg") return m.latency_avg;
  if (metric == "overhead_ratio") return m.overhead_ratio;
  if (metric == "hopcount_avg") return m.hopcount_avg;
  if (metric == "dropped") return static_cast<double>(m.dropped);
  throw ReportError(fmt::format("unknown metric '{}'", metric));
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::string_view metric_title(std::string_view metric) {
  if (metric == "delivery_probability") return "Delivery probability";
  if (metric == "latency_avg") return "Latency average (s)";
  if (metric == "overhead_ratio") return "Overhead ratio";
  if (metric == "hopcount_avg") return "Hop count average";
  return "Dropped messages";
}

std::string buffer_label(std::uint64_t bytes) {
  if (bytes % 1'000'000 == 0) return fmt::format("{}MB", bytes / 1'000'000);
  if (bytes % 1'000 == 0) return fmt::format("{}kB", bytes / 1'000);
  return fmt::format("{}B", bytes);
}

double nice_ceiling(double v) {
  if (!(v > 0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * p >= v * (1 - 1e-12)) return m * p;
  return 10.0 * p;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_bar_chart(std::string_view metric, std::span<const SummaryRow> rows) {
  if (std::find(chart_metrics().begin(), chart_metrics().end(), metric) == chart_metrics().end())
    throw ReportError(fmt::format("unknown metric '{}'", metric));
  if (rows.empty()) throw ReportError("render_bar_chart: no data");

  std::set<std::string> protocols;
  std::set<std::uint64_t> buffers;
  std::map<std::pair<std::string, std::uint64_t>, std::vector<double>> samples;
  for (const auto& r : rows) {
    protocols.insert(r.protocol);
    buffers.insert(r.buffer_bytes);
    samples[{r.protocol, r.buffer_bytes}].push_back(metric_value(r.metrics, metric));
  }
  std::map<std::pair<std::string, std::uint64_t>, double> value;
  double vmax = 0.0, vmin_pos = std::numeric_limits<double>::infinity();
  for (auto& [key, vs] : samples) {
    const double v = median(vs);
    value[key] = v;
    if (!std::isnan(v)) {
      vmax = std::max(vmax, v);
      if (v > 0) vmin_pos = std::min(vmin_pos, v);
    }
  }
  const bool log_scale = std::isfinite(vmin_pos) && vmax / vmin_pos > 1000.0;

  constexpr double W = 720, H = 440, L = 90, R = 170, T = 50, B = 70;
  const double plot_w = W - L - R, plot_h = H - T - B;
  double lo = 0.0, hi = nice_ceiling(vmax);
  if (log_scale) {
    lo = std::pow(10.0, std::floor(std::log10(vmin_pos)));
    hi = std::pow(10.0, std::ceil(std::log10(vmax)));
    if (hi <= lo) hi = lo * 10.0;
  }
  auto y_of = [&](double v) {
    double f = log_scale ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    f = std::clamp(f, 0.0, 1.0);
    return T + plot_h * (1.0 - f);
  };

  static constexpr std::array<std::string_view, 6> kColors{"#1f77b4", "#ff7f0e", "#2ca02c",
                                                           "#d62728", "#9467bd", "#8c564b"};
  std::string s;
  s += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      W, H);
  s += fmt::format("<text x=\"{:.2f}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n", L + plot_w / 2,
                   metric_title(metric));

  // Y axis and grid.
  std::vector<double> ticks;
  if (log_scale) {
    for (double t = lo; t <= hi * 1.0000001; t *= 10.0) ticks.push_back(t);
  } else {
    for (int i = 0; i <= 5; ++i) ticks.push_back(lo + (hi - lo) * i / 5.0);
  }
  for (double t : ticks) {
    const double y = y_of(t);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", L, y,
                     L + plot_w, y);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", L - 6, y + 4, t);
  }
  s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", L, T,
                   T + plot_h);
  s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n", L,
                   T + plot_h, L + plot_w);
  s += fmt::format(
      "<text x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.2f})\">{1}{2}</text>\n",
      T + plot_h / 2, metric_title(metric), log_scale ? " (log scale)" : "");
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Buffer size</text>\n", L + plot_w / 2,
                   H - 20);

  // Bars.
  const double group_w = plot_w / static_cast<double>(buffers.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(protocols.size());
  std::size_t gi = 0;
  for (auto buf : buffers) {
    const double gx = L + group_w * static_cast<double>(gi) + group_w * 0.1;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", gx + group_w * 0.4,
                     T + plot_h + 18, buffer_label(buf));
    std::size_t pi = 0;
    for (const auto& proto : protocols) {
      const double x = gx + bar_w * static_cast<double>(pi);
      const auto it = value.find({proto, buf});
      const std::string_view color = kColors[pi % kColors.size()];
      ++pi;
      if (it == value.end()) continue;
      const double v = it->second;
      const double base = T + plot_h;
      std::string label;
      double top = base;
      if (std::isnan(v)) {
        label = "n/a";
      } else {
        label = fmt::format("{:.4g}", v);
        if (!log_scale || v > 0) top = y_of(v);
        s += fmt::format("<rect class=\"bar\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", x, top,
                         bar_w, base - top, color);
      }
      s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                       x + bar_w / 2, top - 4, label);
    }
    ++gi;
  }

  // Legend.
  std::size_t li = 0;
  for (const auto& proto : protocols) {
    const double y = T + 10 + 20.0 * static_cast<double>(li);
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", W - R + 15, y,
                     kColors[li % kColors.size()]);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", W - R + 33, y + 10, escape_xml(proto));
    ++li;
  }
  s += "</svg>\n";
  return s;
}

void write_bar_chart(std::string_view metric, std::span<const SummaryRow> rows, const std::filesystem::path& path) {
  const std::string svg = render_bar_chart(metric, rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportError(fmt::format("cannot open '{}' for writing", path.string()));
  out << svg;
  if (!out) throw ReportError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace dtnsim
