#ifndef NHPP_INFERENCE_HPP_
#define NHPP_INFERENCE_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhpp/simulate.hpp"

namespace nhpp {

// Fewer data than an operation needs (empty sample, < 3 regression points,
// nothing above t_min, ...).
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Interval extraction

enum class TiePolicy { kResolve, kDrop };

struct TieHandling {
  TiePolicy policy = TiePolicy::kResolve;
  // Replacement for zero gaps under kResolve; empty means the smallest
  // positive gap in the sample.
  std::optional<double> resolution;
};

// Pooled mode: successive differences of every series. Fixed-index mode: the
// gap S_{n+1} - S_n of each series that has it. Zero gaps are then resolved
// or dropped. Throws InsufficientDataError if no interval can be formed.
IntervalSample intervals_from_events(std::span<const EventSeries> series,
                                     CollectionMode mode, std::size_t n = 1,
                                     const TieHandling& ties = {});
IntervalSample intervals_from_events(const EventSeries& series,
                                     const TieHandling& ties = {});

// ---------------------------------------------------------------------------
// Log-binned distributions

enum class DistributionKind { kPdf, kCcdf };

struct BinnedPoint {
  double t_center;  // geometric bin centre
  double value;
  double lo;        // bin edges
  double hi;
  std::size_t count;
};

struct BinnedDistribution {
  std::vector<BinnedPoint> points;
  DistributionKind kind = DistributionKind::kPdf;
  int bins_per_decade = 10;
  std::size_t sample_count = 0;
};

// Geometric bins starting at the sample minimum; density = count / (N width).
// Empty bins are omitted. Throws std::invalid_argument naming the first
// nonpositive interval.
BinnedDistribution log_binned_pdf(const IntervalSample& sample,
                                  int bins_per_decade = 10);

// P{T > t} at the same geometric bin centres; zero values are omitted.
BinnedDistribution log_binned_ccdf(const IntervalSample& sample,
                                   int bins_per_decade = 10);

// ---------------------------------------------------------------------------
// Exponent fits

enum class FitMethod { kLogLogRegression, kHillMle };

std::string to_string(FitMethod method);

struct FitRange {
  double lo;
  double hi;
};

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;  // log10 space; regression only
  std::optional<double> correlation;
  FitMethod method = FitMethod::kLogLogRegression;
  FitRange fit_range{0.0, 0.0};
  // Regressed bins for the regression; intervals >= t_min for Hill.
  std::size_t sample_count = 0;
};

// Time range spanned by the empirical quantiles [q_lo, q_hi] of the sample.
// The default (0, 0.95) is the "main body" used for regression.
FitRange mass_fit_range(const IntervalSample& sample, double q_lo = 0.0,
                        double q_hi = 0.95);

// Tail range for exponent recovery: upper quartile up to the 99.9th
// percentile. The sparsest bins past it are dropped.
inline constexpr double kTailQuantileLo = 0.75;
inline constexpr double kTailQuantileHi = 0.999;

// OLS of log10(value) on log10(t) over the bins overlapping `range`.
// exponent = -slope; correlation = Pearson R of the regressed points.
FitResult fit_loglog_regression(const BinnedDistribution& dist,
                                const FitRange& range);
FitResult fit_loglog_regression(const BinnedDistribution& dist);

// Continuous power-law MLE over intervals >= t_min:
// 1 + m / sum ln(t_i / t_min).
FitResult fit_hill_mle(const IntervalSample& sample, double t_min);

// Sample median, the default Hill threshold.
double median(std::span<const double> values);
double quantile(std::span<const double> values, double q);

// ---------------------------------------------------------------------------
// Maximum-likelihood fit of (a, b)

struct NhppFit {
  double a_hat = 0.0;
  double b_hat = 0.0;
  double log_likelihood = 0.0;
  double t_obs = 0.0;             // longest observation window
  std::size_t event_count = 0;
  std::size_t series_count = 0;
};

// l(a, b) summed over independent series observed on [0, window_end]:
//   sum ln(b / (a s_i + 1)) - sum_r (b/a) ln(a T_r + 1).
double nhpp_log_likelihood(std::span<const EventSeries> series, double a,
                           double b);

// argmax_b l(a, b) = N a / sum_r ln(a T_r + 1), or N / sum_r T_r at a = 0.
double profile_b(std::span<const EventSeries> series, double a);

// Maximizes the profile l(a, profile_b(a)) over a in [0, 10^3 / T_obs]:
// log-spaced bracketing, golden-section refinement, and an explicit
// comparison with the a = 0 boundary. Throws InsufficientDataError for fewer
// than two events and std::invalid_argument when all events coincide.
NhppFit fit_nhpp_mle(std::span<const EventSeries> series);
NhppFit fit_nhpp_mle(const EventSeries& series);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

struct KsResult {
  double statistic = 0.0;
  double effective_size = 0.0;  // m, or n1 n2 / (n1 + n2) for two samples
  double critical_05 = 0.0;   // 1.36 / sqrt(m)
  double critical_01 = 0.0;   // 1.63 / sqrt(m)
  bool pass_05() const noexcept { return statistic < critical_05; }
  bool pass_01() const noexcept { return statistic < critical_01; }
};

// sup |F_m - F| against a continuous cdf.
KsResult ks_distance(std::span<const double> sample,
                     const std::function<double(double)>& cdf);

// Two-sample statistic sup |F_x - F_y|.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

}  // namespace nhpp

#endif  // NHPP_INFERENCE_HPP_
