#include "nhpp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nhpp {

namespace {

void check_positive(std::span<const double> values) {
  if (values.empty()) throw InsufficientDataError("interval sample is empty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(
          "log binning needs positive finite intervals, found " +
          std::to_string(v));
    }
  }
}

struct BinGrid {
  std::vector<double> edges;  // size nb + 1
};

BinGrid make_bins(double lo, double hi, int bins_per_decade) {
  const double step = 1.0 / bins_per_decade;
  BinGrid grid;
  if (lo == hi) {
    grid.edges = {lo * std::pow(10.0, -0.5 * step), lo * std::pow(10.0, 0.5 * step)};
    return grid;
  }
  const double decades = std::log10(hi / lo);
  const auto nb = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(decades * bins_per_decade - 1e-9)));
  grid.edges.resize(nb + 1);
  for (std::size_t k = 0; k <= nb; ++k) {
    grid.edges[k] = lo * std::pow(10.0, static_cast<double>(k) * step);
  }
  grid.edges.front() = lo;
  grid.edges.back() = std::max(grid.edges.back(), hi);
  return grid;
}

std::size_t bin_index(const BinGrid& grid, double v) {
  const std::size_t nb = grid.edges.size() - 1;
  auto it = std::upper_bound(grid.edges.begin(), grid.edges.end(), v);
  if (it == grid.edges.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - grid.edges.begin()) - 1,
                               nb - 1);
}

std::vector<std::size_t> histogram(const BinGrid& grid,
                                   std::span<const double> values) {
  std::vector<std::size_t> counts(grid.edges.size() - 1, 0);
  for (double v : values) ++counts[bin_index(grid, v)];
  return counts;
}

double profile_loglik(std::span<const EventSeries> series, double a) {
  return nhpp_log_likelihood(series, a, profile_b(series, a));
}

}  // namespace

// ---------------------------------------------------------------------------

IntervalSample intervals_from_events(std::span<const EventSeries> series,
                                     CollectionMode mode, std::size_t n,
                                     const TieHandling& ties) {
  IntervalSample sample = mode == CollectionMode::kPooled
                              ? pooled_intervals(series)
                              : fixed_index_intervals(series, n);
  auto& v = sample.intervals;
  if (v.empty()) {
    throw InsufficientDataError(
        mode == CollectionMode::kPooled
            ? "need at least 2 events to form an interval"
            : "no series has event n + 1 = " + std::to_string(n + 1));
  }

  if (ties.policy == TiePolicy::kDrop) {
    std::erase_if(v, [](double x) { return x <= 0.0; });
  } else if (std::any_of(v.begin(), v.end(), [](double x) { return x <= 0.0; })) {
    double delta = 0.0;
    if (ties.resolution) {
      delta = *ties.resolution;
      if (!(delta > 0.0)) throw std::invalid_argument("tie resolution must be > 0");
    } else {
      delta = std::numeric_limits<double>::infinity();
      for (double x : v) {
        if (x > 0.0) delta = std::min(delta, x);
      }
      if (std::isinf(delta)) {
        throw InsufficientDataError("all gaps are zero; no resolution available");
      }
    }
    for (double& x : v) {
      if (x <= 0.0) x = delta;
    }
  }
  if (v.empty()) throw InsufficientDataError("no positive intervals remain");
  return sample;
}

IntervalSample intervals_from_events(const EventSeries& series,
                                     const TieHandling& ties) {
  return intervals_from_events(std::span(&series, 1), CollectionMode::kPooled, 1,
                               ties);
}

// ---------------------------------------------------------------------------

BinnedDistribution log_binned_pdf(const IntervalSample& sample,
                                  int bins_per_decade) {
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  check_positive(sample.intervals);
  const auto [lo_it, hi_it] =
      std::minmax_element(sample.intervals.begin(), sample.intervals.end());
  const BinGrid grid = make_bins(*lo_it, *hi_it, bins_per_decade);
  const auto counts = histogram(grid, sample.intervals);
  const double total = static_cast<double>(sample.intervals.size());

  BinnedDistribution dist;
  dist.kind = DistributionKind::kPdf;
  dist.bins_per_decade = bins_per_decade;
  dist.sample_count = sample.intervals.size();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    const double lo = grid.edges[k];
    const double hi = grid.edges[k + 1];
    dist.points.push_back({lo * std::sqrt(hi / lo),
                           static_cast<double>(counts[k]) / (total * (hi - lo)), lo,
                           hi, counts[k]});
  }
  return dist;
}

BinnedDistribution log_binned_ccdf(const IntervalSample& sample,
                                   int bins_per_decade) {
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  check_positive(sample.intervals);
  std::vector<double> sorted = sample.intervals;
  std::sort(sorted.begin(), sorted.end());
  const BinGrid grid = make_bins(sorted.front(), sorted.back(), bins_per_decade);
  const auto counts = histogram(grid, sorted);
  const double total = static_cast<double>(sorted.size());

  BinnedDistribution dist;
  dist.kind = DistributionKind::kCcdf;
  dist.bins_per_decade = bins_per_decade;
  dist.sample_count = sorted.size();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double lo = grid.edges[k];
    const double hi = grid.edges[k + 1];
    const double centre = lo * std::sqrt(hi / lo);
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), centre);
    if (above == 0) continue;
    dist.points.push_back({centre, static_cast<double>(above) / total, lo, hi, counts[k]});
  }
  return dist;
}

// ---------------------------------------------------------------------------

std::string to_string(FitMethod method) {
  return method == FitMethod::kLogLogRegression ? "loglog-regression" : "hill-mle";
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InsufficientDataError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must be in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

FitRange mass_fit_range(const IntervalSample& sample, double q_lo, double q_hi) {
  if (!(q_lo >= 0.0 && q_hi <= 1.0 && q_lo < q_hi)) {
    throw std::invalid_argument("fit range quantiles must satisfy 0 <= lo < hi <= 1");
  }
  return {quantile(sample.intervals, q_lo), quantile(sample.intervals, q_hi)};
}

FitResult fit_loglog_regression(const BinnedDistribution& dist,
                                const FitRange& range) {
  std::vector<double> xs;
  std::vector<double> ys;
  double t_lo = std::numeric_limits<double>::infinity();
  double t_hi = 0.0;
  for (const auto& p : dist.points) {
    if (p.hi < range.lo || p.lo > range.hi || !(p.value > 0.0)) continue;
    xs.push_back(std::log10(p.t_center));
    ys.push_back(std::log10(p.value));
    t_lo = std::min(t_lo, p.t_center);
    t_hi = std::max(t_hi, p.t_center);
  }
  if (xs.size() < 3) {
    throw InsufficientDataError("log-log regression needs >= 3 occupied bins in range, got " +
                                std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InsufficientDataError("regression points share one abscissa");
  const double slope = sxy / sxx;

  FitResult fit;
  fit.method = FitMethod::kLogLogRegression;
  fit.exponent = -slope;
  fit.intercept = my - slope * mx;
  fit.correlation = syy > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;
  fit.fit_range = {t_lo, t_hi};
  fit.sample_count = xs.size();
  return fit;
}

FitResult fit_loglog_regression(const BinnedDistribution& dist) {
  return fit_loglog_regression(
      dist, {0.0, std::numeric_limits<double>::infinity()});
}

FitResult fit_hill_mle(const IntervalSample& sample, double t_min) {
  if (!(t_min > 0.0) || !std::isfinite(t_min)) {
    throw std::invalid_argument("t_min must be finite and > 0");
  }
  std::size_t m = 0;
  double log_sum = 0.0;
  double t_max = t_min;
  for (double t : sample.intervals) {
    if (t >= t_min) {
      ++m;
      log_sum += std::log(t / t_min);
      t_max = std::max(t_max, t);
    }
  }
  if (m < 2) {
    throw InsufficientDataError("Hill estimator needs >= 2 intervals >= t_min, got " +
                                std::to_string(m));
  }
  if (!(log_sum > 0.0)) {
    throw InsufficientDataError("all intervals above t_min equal t_min");
  }
  FitResult fit;
  fit.method = FitMethod::kHillMle;
  fit.exponent = 1.0 + static_cast<double>(m) / log_sum;
  fit.fit_range = {t_min, t_max};
  fit.sample_count = m;
  return fit;
}

// ---------------------------------------------------------------------------

double nhpp_log_likelihood(std::span<const EventSeries> series, double a, double b) {
  if (!(a >= 0.0) || !(b > 0.0)) return -std::numeric_limits<double>::infinity();
  double events = 0.0;
  double log_decay = 0.0;
  double compensator = 0.0;
  for (const auto& s : series) {
    events += static_cast<double>(s.size());
    for (double t : s.times()) log_decay += std::log1p(a * t);
    compensator += a > 0.0 ? b / a * std::log1p(a * s.window_end()) : b * s.window_end();
  }
  return events * std::log(b) - log_decay - compensator;
}

double profile_b(std::span<const EventSeries> series, double a) {
  double events = 0.0;
  double exposure = 0.0;
  for (const auto& s : series) {
    events += static_cast<double>(s.size());
    exposure += a > 0.0 ? std::log1p(a * s.window_end()) / a : s.window_end();
  }
  if (!(exposure > 0.0)) throw std::invalid_argument("observation windows have zero length");
  return events / exposure;
}

NhppFit fit_nhpp_mle(std::span<const EventSeries> series) {
  std::size_t events = 0;
  double t_obs = 0.0;
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    events += s.size();
    t_obs = std::max(t_obs, s.window_end());
    if (!s.empty()) {
      first = std::min(first, s.times().front());
      last = std::max(last, s.times().back());
    }
  }
  if (events < 2) throw InsufficientDataError("MLE needs at least 2 events");
  if (!(last > first)) {
    throw std::invalid_argument("degenerate series: all events at one instant");
  }

  auto loglik = [&](double a) { return profile_loglik(series, a); };

  // Log-spaced scan of (0, a_max], 8 points per decade over 12 decades.
  const double a_max = 1e3 / t_obs;
  constexpr int kPerDecade = 8;
  constexpr int kGrid = 12 * kPerDecade;
  std::vector<double> grid(kGrid + 1);
  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= kGrid; ++j) {
    grid[j] = a_max * std::pow(10.0, -static_cast<double>(j) / kPerDecade);
    const double ll = loglik(grid[j]);
    if (ll > best_ll) {
      best_ll = ll;
      best = static_cast<std::size_t>(j);
    }
  }
  double lo = best + 1 <= static_cast<std::size_t>(kGrid) ? grid[best + 1] : 0.0;
  double hi = best > 0 ? grid[best - 1] : a_max;

  // Golden-section refinement to relative width 1e-6.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = loglik(x1);
  double f2 = loglik(x2);
  while (hi - lo > 1e-6 * std::max(0.5 * (hi + lo), std::numeric_limits<double>::min())) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = loglik(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = loglik(x1);
    }
  }
  double a_hat = 0.5 * (lo + hi);
  double ll_hat = loglik(a_hat);
  if (best_ll > ll_hat) {
    a_hat = grid[best];
    ll_hat = best_ll;
  }
  // The a = 0 boundary is compared explicitly.
  const double ll_zero = loglik(0.0);
  if (ll_zero >= ll_hat) {
    a_hat = 0.0;
    ll_hat = ll_zero;
  }

  NhppFit fit;
  fit.a_hat = a_hat;
  fit.b_hat = profile_b(series, a_hat);
  fit.log_likelihood = ll_hat;
  fit.t_obs = t_obs;
  fit.event_count = events;
  fit.series_count = series.size();
  return fit;
}

NhppFit fit_nhpp_mle(const EventSeries& series) {
  return fit_nhpp_mle(std::span(&series, 1));
}

// ---------------------------------------------------------------------------

namespace {

KsResult make_ks(double statistic, double effective_size) {
  KsResult r;
  r.statistic = statistic;
  r.effective_size = effective_size;
  r.critical_05 = 1.36 / std::sqrt(effective_size);
  r.critical_01 = 1.63 / std::sqrt(effective_size);
  return r;
}

}  // namespace

KsResult ks_distance(std::span<const double> sample,
                     const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InsufficientDataError("KS test on an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double i_d = static_cast<double>(i);
    d = std::max({d, (i_d + 1.0) / m - f, f - i_d / m});
  }
  return make_ks(d, m);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InsufficientDataError("KS test on an empty sample");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return make_ks(d, nx * ny / (nx + ny));
}

}  // namespace nhpp
