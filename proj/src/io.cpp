#include "nhpp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nhpp/analytic.hpp"

namespace nhpp::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buffer, ptr);
}

TimestampTable read_timestamps(std::istream& in) {
  TimestampTable table;
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> columns;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line);

    if (!columns) {
      columns = fields.size();
      if (*columns != 1 && *columns != 2) {
        throw FormatError("line " + std::to_string(line_no) +
                          ": expected columns `t` or `replica,t`");
      }
      double probe = 0.0;
      if (!parse_number(fields.back(), probe)) {
        // Header row.
        if (fields.back() != "t" || (*columns == 2 && fields.front() != "replica")) {
          throw FormatError("line " + std::to_string(line_no) +
                            ": unrecognised header `" + std::string(line) + "`");
        }
        continue;
      }
    }
    if (fields.size() != *columns) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(*columns) + " column(s)");
    }
    double t = 0.0;
    long long replica = 0;
    if (!parse_number(fields.back(), t) ||
        (*columns == 2 && !parse_number(fields.front(), replica))) {
      throw FormatError("line " + std::to_string(line_no) + ": not a number: `" +
                        std::string(line) + "`");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": timestamps must be finite and >= 0");
    }
    table[replica].push_back(t);
  }
  for (auto& [_, times] : table) std::sort(times.begin(), times.end());
  return table;
}

TimestampTable read_timestamps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_timestamps(in);
}

std::vector<EventSeries> to_series(const TimestampTable& table,
                                   std::optional<double> window_end) {
  std::vector<EventSeries> out;
  out.reserve(table.size());
  for (const auto& [_, times] : table) {
    const double end = window_end ? *window_end : (times.empty() ? 0.0 : times.back());
    if (!times.empty() && end < times.back()) {
      throw std::invalid_argument("observation window ends before the last event");
    }
    out.emplace_back(times, end);
  }
  return out;
}

void write_series_csv(std::ostream& out, const EventSeries& series) {
  out << "t\n";
  for (double t : series.times()) out << format_double(t) << '\n';
}

void write_ensemble_csv(std::ostream& out, std::span<const EventSeries> paths) {
  out << "replica,t\n";
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (double t : paths[r].times()) out << r << ',' << format_double(t) << '\n';
  }
}

void write_intervals_csv(std::ostream& out, const IntervalSample& sample) {
  out << "interval\n";
  for (double v : sample.intervals) out << format_double(v) << '\n';
}

void write_distribution_csv(std::ostream& out, const BinnedDistribution& dist) {
  out << "t,value\n";
  for (const auto& p : dist.points) {
    out << format_double(p.t_center) << ',' << format_double(p.value) << '\n';
  }
}

nlohmann::ordered_json to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["exponent"] = fit.exponent;
  if (fit.method == FitMethod::kLogLogRegression) {
    j["intercept"] = fit.intercept;
  } else {
    j["intercept"] = nullptr;
  }
  if (fit.correlation) {
    j["correlation"] = *fit.correlation;
  } else {
    j["correlation"] = nullptr;
  }
  j["method"] = to_string(fit.method);
  j["fit_range"] = {fit.fit_range.lo, fit.fit_range.hi};
  j["sample_count"] = fit.sample_count;
  return j;
}

nlohmann::ordered_json to_json(const NhppFit& fit) {
  nlohmann::ordered_json j;
  j["a_hat"] = fit.a_hat;
  j["b_hat"] = fit.b_hat;
  j["log_likelihood"] = fit.log_likelihood;
  j["t_obs"] = fit.t_obs;
  j["event_count"] = fit.event_count;
  j["series_count"] = fit.series_count;
  const auto tail = tail_exponent(IntensityParams(fit.a_hat, fit.b_hat));
  if (tail.valid()) {
    j["tail_exponent"] = *tail.exponent;
  } else {
    j["tail_exponent"] = nullptr;
  }
  return j;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nhpp::io
