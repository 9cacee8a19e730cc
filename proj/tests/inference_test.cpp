#include "nhpp/inference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhpp/analytic.hpp"

using namespace nhpp;

namespace {

IntervalSample sample_of(std::vector<double> v) {
  IntervalSample s;
  s.intervals = std::move(v);
  return s;
}

BinnedDistribution points_of(const std::vector<std::pair<double, double>>& pts) {
  BinnedDistribution d;
  for (auto [t, v] : pts) d.points.push_back({t, v, t, t, 1});
  return d;
}

// Pareto draws with density exponent gamma on [1, inf): t = u^{-1/(gamma-1)}.
std::vector<double> pareto(double gamma, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& t : out) t = std::pow(1.0 - rng.uniform(), -1.0 / (gamma - 1.0));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(IntervalsFromEvents, SuccessiveDifferences) {
  const auto s = intervals_from_events(EventSeries({1, 3, 6}, 6));
  EXPECT_EQ(s.intervals, (std::vector<double>{2, 3}));
  EXPECT_EQ(s.mode, CollectionMode::kPooled);
}

TEST(IntervalsFromEvents, SingleEventIsEmpty) {
  EXPECT_THROW(intervals_from_events(EventSeries({5}, 5)), InsufficientDataError);
}

TEST(IntervalsFromEvents, TiePolicies) {
  const EventSeries series({1, 1, 2}, 2);
  TieHandling fixed{TiePolicy::kResolve, 0.5};
  EXPECT_EQ(intervals_from_events(series, fixed).intervals, (std::vector<double>{0.5, 1}));

  const EventSeries more({0, 0.25, 0.25, 2}, 2);
  EXPECT_EQ(intervals_from_events(more).intervals,
            (std::vector<double>{0.25, 0.25, 1.75}));
  TieHandling drop{TiePolicy::kDrop, {}};
  EXPECT_EQ(intervals_from_events(more, drop).intervals, (std::vector<double>{0.25, 1.75}));

  EXPECT_THROW(intervals_from_events(EventSeries({3, 3}, 3)), InsufficientDataError);
}

TEST(IntervalsFromEvents, FixedIndexMode) {
  const std::vector<EventSeries> paths{EventSeries({1, 2, 4}, 5), EventSeries({1}, 5),
                                       EventSeries({0.5, 3}, 5)};
  const auto s = intervals_from_events(paths, CollectionMode::kFixedIndex, 1);
  EXPECT_EQ(s.intervals, (std::vector<double>{1, 2.5}));
  EXPECT_EQ(s.index, 1u);
  EXPECT_THROW(intervals_from_events(paths, CollectionMode::kFixedIndex, 3),
               InsufficientDataError);
}

// ---------------------------------------------------------------------------

TEST(LogBinnedPdf, SingleValue) {
  const auto d = log_binned_pdf(sample_of({3.0}), 10);
  ASSERT_EQ(d.points.size(), 1u);
  const auto& p = d.points[0];
  EXPECT_LE(p.lo, 3.0);
  EXPECT_GE(p.hi, 3.0);
  EXPECT_DOUBLE_EQ(p.value, 1.0 / (p.hi - p.lo));
}

TEST(LogBinnedPdf, OneBinPerDecade) {
  const auto d = log_binned_pdf(sample_of({1, 2, 5, 10, 20, 99, 100, 500, 1000}), 1);
  EXPECT_LE(d.points.size(), 4u);
  std::size_t total = 0;
  for (const auto& p : d.points) total += p.count;
  EXPECT_EQ(total, 9u);
}

TEST(LogBinnedPdf, RejectsNonPositive) {
  try {
    log_binned_pdf(sample_of({1.0, -2.5, 3.0}));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("-2.5"), std::string::npos);
  }
  EXPECT_THROW(log_binned_pdf(sample_of({})), InsufficientDataError);
}

TEST(LogBinnedPdf, NormalisedAndOrdered) {
  const auto d = log_binned_pdf(sample_of(pareto(1.8, 5000, 3)), 10);
  double mass = 0.0;
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    mass += d.points[i].value * (d.points[i].hi - d.points[i].lo);
    EXPECT_GE(d.points[i].value, 0.0);
    if (i > 0) EXPECT_GT(d.points[i].t_center, d.points[i - 1].t_center);
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(LogBinnedCcdf, MonotoneInUnitInterval) {
  const auto d = log_binned_ccdf(sample_of(pareto(2.2, 5000, 4)), 10);
  ASSERT_GT(d.points.size(), 3u);
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    EXPECT_GT(d.points[i].value, 0.0);
    EXPECT_LE(d.points[i].value, 1.0);
    if (i > 0) EXPECT_LE(d.points[i].value, d.points[i - 1].value);
  }
}

TEST(LogBinnedPdf, ParetoSlope) {
  const auto sample = sample_of(pareto(2.0, 1000, 5));
  const auto fit = fit_loglog_regression(log_binned_pdf(sample), mass_fit_range(sample));
  EXPECT_NEAR(fit.exponent, 2.0, 0.2);
}

// ---------------------------------------------------------------------------

TEST(LogLogRegression, CollinearPoints) {
  const auto fit = fit_loglog_regression(points_of({{1, 1}, {10, 1e-2}, {100, 1e-4}}));
  EXPECT_DOUBLE_EQ(fit.exponent, 2.0);
  ASSERT_TRUE(fit.correlation);
  EXPECT_DOUBLE_EQ(*fit.correlation, -1.0);
  EXPECT_EQ(fit.method, FitMethod::kLogLogRegression);
}

TEST(LogLogRegression, ConstructedExponent) {
  const double c = 3.7;
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < 5; ++k) {
    const double t = std::pow(10.0, k);
    pts.emplace_back(t, c * std::pow(t, -1.47));
  }
  const auto fit = fit_loglog_regression(points_of(pts));
  EXPECT_NEAR(fit.exponent, 1.47, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log10(c), 1e-12);
}

TEST(LogLogRegression, ExactOnRandomLines) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> slope(-4, 1), icept(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const double s = slope(gen), c = icept(gen);
    std::vector<std::pair<double, double>> pts;
    for (int k = -2; k <= 4; ++k) pts.emplace_back(std::pow(10.0, k), std::pow(10.0, c + s * k));
    const auto fit = fit_loglog_regression(points_of(pts));
    EXPECT_NEAR(fit.exponent, -s, 1e-12);
    EXPECT_NEAR(fit.intercept, c, 1e-12);
    EXPECT_NEAR(std::abs(*fit.correlation), 1.0, 1e-12);
  }
}

TEST(LogLogRegression, NeedsThreePoints) {
  EXPECT_THROW(fit_loglog_regression(points_of({{1, 1}, {10, 0.1}})), InsufficientDataError);
  EXPECT_THROW(fit_loglog_regression(points_of({{1, 1}, {10, 0.1}, {100, 0.01}}), {5, 50}),
               InsufficientDataError);
}

TEST(LogLogRegression, SimulatedTailExponent) {
  // 5e4 replicas stopped at their second event: 1e5 events, one gap each.
  SimulationConfig cfg;
  cfg.params = IntensityParams(1, 1);
  cfg.horizon = EventCount{2};
  cfg.replicas = 50000;
  cfg.master_seed = 101;
  const auto sample = intervals_from_events(simulate_ensemble(cfg).paths,
                                            CollectionMode::kPooled);
  const auto fit = fit_loglog_regression(log_binned_pdf(sample),
                                         mass_fit_range(sample, kTailQuantileLo,
                                                        kTailQuantileHi));
  EXPECT_GE(fit.exponent, 1.7);
  EXPECT_LE(fit.exponent, 2.3);
}

// ---------------------------------------------------------------------------

TEST(HillMle, FormulaAndErrors) {
  const double e = std::numbers::e;
  EXPECT_DOUBLE_EQ(fit_hill_mle(sample_of({e, e, e}), 1.0).exponent, 2.0);
  EXPECT_FALSE(fit_hill_mle(sample_of({e, e, e}), 1.0).correlation);
  EXPECT_THROW(fit_hill_mle(sample_of({0.5, 0.7}), 1.0), InsufficientDataError);
  EXPECT_THROW(fit_hill_mle(sample_of({2.0}), 1.0), InsufficientDataError);
  EXPECT_THROW(fit_hill_mle(sample_of({2.0, 3.0}), 0.0), std::invalid_argument);
}

TEST(HillMle, ScaleInvariant) {
  auto base = pareto(1.9, 2000, 6);
  const double t_min = median(base);
  const double reference = fit_hill_mle(sample_of(base), t_min).exponent;

  std::vector<double> doubled;
  for (double t : base) doubled.push_back(t * 8.0);
  EXPECT_EQ(fit_hill_mle(sample_of(doubled), t_min * 8.0).exponent, reference);

  for (double c : {0.37, 12.5, 1e5}) {
    std::vector<double> scaled;
    for (double t : base) scaled.push_back(t * c);
    EXPECT_NEAR(fit_hill_mle(sample_of(scaled), t_min * c).exponent, reference,
                1e-12 * reference);
  }
}

TEST(HillMle, ParetoRecovery) {
  const auto fit = fit_hill_mle(sample_of(pareto(2.5, 100000, 7)), 1.0);
  EXPECT_GE(fit.exponent, 2.45);
  EXPECT_LE(fit.exponent, 2.55);
  EXPECT_EQ(fit.sample_count, 100000u);
}

// ---------------------------------------------------------------------------

TEST(NhppMle, ProfileRelation) {
  std::vector<double> times;
  const double t_obs = std::exp(2.0) - 1.0;
  for (int i = 0; i < 10; ++i) times.push_back(t_obs * (i + 0.5) / 10.0);
  const EventSeries s(times, t_obs);
  EXPECT_NEAR(profile_b(std::span(&s, 1), 1.0), 5.0, 1e-12);
}

TEST(NhppMle, HomogeneousBoundary) {
  std::vector<double> times;
  for (int i = 0; i < 100; ++i) times.push_back(0.5 * i);
  const EventSeries s(times, 50.0);
  EXPECT_DOUBLE_EQ(profile_b(std::span(&s, 1), 0.0), 2.0);
  const std::span<const EventSeries> one(&s, 1);
  EXPECT_GE(fit_nhpp_mle(s).log_likelihood, nhpp_log_likelihood(one, 0.0, 2.0));
}

TEST(NhppMle, Errors) {
  EXPECT_THROW(fit_nhpp_mle(EventSeries({1.0}, 2.0)), InsufficientDataError);
  EXPECT_THROW(fit_nhpp_mle(EventSeries({1.0, 1.0, 1.0}, 2.0)), std::invalid_argument);
}

TEST(NhppMle, RecoversRatio) {
  SimulationConfig cfg;
  cfg.params = IntensityParams(0.5, 2.0);
  cfg.horizon = TimeHorizon{1000.0};
  cfg.replicas = 400;
  cfg.master_seed = 55;
  const auto paths = simulate_ensemble(cfg).paths;
  const auto fit = fit_nhpp_mle(paths);
  EXPECT_GT(fit.event_count, 9000u);
  EXPECT_LT(std::abs(fit.b_hat / fit.a_hat / 4.0 - 1.0), 0.1);
  EXPECT_NEAR(fit.b_hat,
              fit.event_count * fit.a_hat / (400.0 * std::log1p(fit.a_hat * 1000.0)),
              1e-9 * fit.b_hat);
}

TEST(NhppMle, NoSpuriousOptimum) {
  const auto s = sample_path_inversion(IntensityParams(0.2, 3.0), 500.0, 12);
  const std::span<const EventSeries> one(&s, 1);
  const auto fit = fit_nhpp_mle(s);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> probe(0.0, 1e3 / s.window_end());
  for (int i = 0; i < 100; ++i) {
    const double a = probe(gen);
    EXPECT_GE(fit.log_likelihood + 1e-9 * std::abs(fit.log_likelihood),
              nhpp_log_likelihood(one, a, profile_b(one, a)));
  }
}

TEST(NhppMle, HomogeneousDataSelectsZeroDecay) {
  int near_zero = 0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const auto s = sample_path_inversion(IntensityParams(0, 1), 1e4, child_seed(808, trial));
    const auto fit = fit_nhpp_mle(s);
    if (fit.a_hat * fit.t_obs < 0.1) ++near_zero;
  }
  EXPECT_GE(near_zero, 95);
}

// ---------------------------------------------------------------------------

TEST(KsDistance, SelfConsistentSample) {
  const double b = 1.5;
  Rng rng(77);
  std::vector<double> x(10000);
  for (auto& v : x) v = rng.exponential() / b;
  const auto ks = ks_distance(x, [b](double t) { return -std::expm1(-b * t); });
  EXPECT_LT(ks.statistic, 1.63 / 100.0);
  EXPECT_DOUBLE_EQ(ks.critical_01, 0.0163);
  EXPECT_DOUBLE_EQ(ks.critical_05, 0.0136);
}

TEST(KsDistance, DisjointSupport) {
  const std::vector<double> x{1, 2, 3};
  const auto ks = ks_distance(x, [](double t) { return t < 10 ? 0.0 : 1.0; });
  EXPECT_DOUBLE_EQ(ks.statistic, 1.0);
  EXPECT_FALSE(ks.pass_05());
}

TEST(KsDistance, EmpiricalAgainstItself) {
  const auto x = pareto(2.0, 500, 8);
  EXPECT_EQ(ks_two_sample(x, x).statistic, 0.0);
  const std::vector<double> y{1, 2, 3}, z{4, 5};
  EXPECT_DOUBLE_EQ(ks_two_sample(y, z).statistic, 1.0);
}

TEST(KsDistance, FixedIndexAgainstTheory) {
  SimulationConfig cfg;
  cfg.params = IntensityParams(0.5, 2.0);
  cfg.horizon = EventCount{3};
  cfg.replicas = 4000;
  cfg.master_seed = 4;
  const auto sample = fixed_index_intervals(simulate_ensemble(cfg).paths, 2);
  const auto ks = ks_distance(sample.intervals, [&](double t) {
    return 1.0 - survival_Tn(cfg.params, 2, t);
  });
  EXPECT_TRUE(ks.pass_01()) << ks.statistic;
}
