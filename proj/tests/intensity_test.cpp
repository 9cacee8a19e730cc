#include "nhpp/intensity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using nhpp::IntensityParams;

namespace {

constexpr double kE = std::numbers::e;

// Adaptive Simpson, kept independent of the library's quadrature.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               double eps, double whole, double flo, double fmid, double fhi,
               int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = f(lm), frm = f(rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, lo, mid, eps / 2, left, flo, flm, fmid, depth - 1) +
         simpson(f, mid, hi, eps / 2, right, fmid, frm, fhi, depth - 1);
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double eps) {
  const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return simpson(f, lo, hi, eps, whole, flo, fmid, fhi, 50);
}

}  // namespace

TEST(IntensityParams, RejectsInvalid) {
  EXPECT_THROW(IntensityParams(-0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(IntensityParams(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(IntensityParams(1.0, -2.0), std::invalid_argument);
  EXPECT_THROW(IntensityParams(NAN, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(IntensityParams(0.0, 1.0));
}

TEST(Intensity, Examples) {
  EXPECT_DOUBLE_EQ(intensity_at(IntensityParams(0, 2), 5), 2.0);
  EXPECT_DOUBLE_EQ(intensity_at(IntensityParams(1, 1), 0), 1.0);
  EXPECT_DOUBLE_EQ(intensity_at(IntensityParams(1, 3), 2), 1.0);
  EXPECT_THROW(intensity_at(IntensityParams(1, 1), -1.0), std::invalid_argument);
}

TEST(CumulativeIntensity, Examples) {
  EXPECT_DOUBLE_EQ(cumulative_intensity(IntensityParams(0, 2), 3), 6.0);
  EXPECT_NEAR(cumulative_intensity(IntensityParams(1, 1), kE - 1), 1.0, 1e-15);
  EXPECT_NEAR(cumulative_intensity(IntensityParams(2, 4), (kE - 1) / 2), 2.0, 1e-15);
  EXPECT_EQ(cumulative_intensity(IntensityParams(0.3, 2), 0.0), 0.0);
  EXPECT_THROW(cumulative_intensity(IntensityParams(1, 1), -0.5), std::invalid_argument);
}

TEST(InverseCumulative, Examples) {
  EXPECT_DOUBLE_EQ(inverse_cumulative(IntensityParams(0, 2), 6), 3.0);
  EXPECT_NEAR(inverse_cumulative(IntensityParams(1, 1), 1), 1.718281828459045, 1e-15);
  const IntensityParams p(0.8, 1.7);
  EXPECT_NEAR(inverse_cumulative(p, cumulative_intensity(p, 7.3)), 7.3, 1e-12);
  EXPECT_THROW(inverse_cumulative(p, -1.0), std::invalid_argument);
}

TEST(InverseCumulative, OverflowIsAnError) {
  const IntensityParams p(1.0, 1.0);
  EXPECT_THROW(inverse_cumulative(p, 800.0), nhpp::OverflowError);
  EXPECT_TRUE(std::isfinite(inverse_cumulative(p, 700.0)));
}

TEST(IntensityProperties, MonotoneDecay) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ua(0.0, 5.0), ub(0.01, 5.0), ut(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const IntensityParams p(i % 10 == 0 ? 0.0 : ua(gen), ub(gen));
    double t1 = ut(gen), t2 = ut(gen);
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) continue;
    if (p.homogeneous()) {
      EXPECT_EQ(intensity_at(p, t2), intensity_at(p, t1));
    } else {
      EXPECT_LT(intensity_at(p, t2), intensity_at(p, t1));
    }
  }
}

TEST(IntensityProperties, InverseRoundTrip) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> ua(0.0, 5.0), ub(0.01, 5.0), ulogt(-6, 6);
  for (int i = 0; i < 2000; ++i) {
    const IntensityParams p(i % 10 == 0 ? 0.0 : ua(gen), ub(gen));
    const double t = std::pow(10.0, ulogt(gen));
    const double back = inverse_cumulative(p, cumulative_intensity(p, t));
    EXPECT_LE(std::abs(back - t), 1e-9 * (1.0 + t)) << p.a() << " " << p.b() << " " << t;
  }
}

TEST(IntensityProperties, CumulativeIsIntegralOfRate) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ua(0.0, 3.0), ub(0.1, 3.0), ut(0.01, 50.0);
  for (int i = 0; i < 100; ++i) {
    const IntensityParams p(ua(gen), ub(gen));
    const double t = ut(gen);
    const double numeric = integrate([&](double x) { return intensity_at(p, x); }, 0.0,
                                     t, 1e-13);
    const double exact = cumulative_intensity(p, t);
    EXPECT_LE(std::abs(exact - numeric), 1e-8 * exact);
  }
}

TEST(IntensityProperties, SmallDecayApproachesHomogeneous) {
  const double b = 1.7;
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    const double lambda = cumulative_intensity(IntensityParams(1e-10, b), t);
    EXPECT_LE(std::abs(lambda - b * t), 1e-6 * b * t);
  }
}
