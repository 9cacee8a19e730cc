#ifndef NHPP_IO_HPP_
#define NHPP_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nhpp/inference.hpp"
#include "nhpp/simulate.hpp"

namespace nhpp::io {

// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

// Timestamps grouped by replica id; single-column files land in replica 0.
// Each group is sorted ascending.
using TimestampTable = std::map<long long, std::vector<double>>;

// Reads either a single column `t` or two columns `replica,t`, header
// optional, rows in any order. Throws FormatError on bad rows and on
// negative or non-finite times.
TimestampTable read_timestamps(std::istream& in);
TimestampTable read_timestamps(const std::filesystem::path& path);

// One series per replica. The window ends at `window_end` when given,
// otherwise at the series' last event.
std::vector<EventSeries> to_series(const TimestampTable& table,
                                   std::optional<double> window_end = {});

void write_series_csv(std::ostream& out, const EventSeries& series);
void write_ensemble_csv(std::ostream& out, std::span<const EventSeries> paths);
void write_intervals_csv(std::ostream& out, const IntervalSample& sample);
void write_distribution_csv(std::ostream& out, const BinnedDistribution& dist);

nlohmann::ordered_json to_json(const FitResult& fit);
nlohmann::ordered_json to_json(const NhppFit& fit);

// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace nhpp::io

#endif  // NHPP_IO_HPP_
