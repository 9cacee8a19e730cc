#ifndef NHPP_VALIDATION_HPP_
#define NHPP_VALIDATION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace nhpp {

struct ValidationOptions {
  std::uint64_t seed = 20240601;
  // Replicas per simulation-vs-theory check.
  std::size_t replicas = 10000;
  // Adds a check of n = 1 samples against the n = 2 law, which must fail.
  bool negative_control = false;
  unsigned threads = 0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t seed = 0;  // 0 for deterministic checks
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  // Recorded measurements that are not pass/fail.
  nlohmann::ordered_json observations = nlohmann::ordered_json::object();

  bool all_pass() const;
};

ValidationReport run_validation(const ValidationOptions& options);

nlohmann::ordered_json to_json(const ValidationReport& report,
                               const ValidationOptions& options);

// Least-squares slope of ln f against ln t at `points` log-spaced abscissae.
double loglog_slope(const std::function<double(double)>& f, double t_lo,
                    double t_hi, int points);

// The n = 1, a = b tail: exact density against the mean-value form over
// [1e3, 1e6]. Both slopes and the drift of t^2 f(t) across the range.
nlohmann::ordered_json log_correction_record();

}  // namespace nhpp

#endif  // NHPP_VALIDATION_HPP_
