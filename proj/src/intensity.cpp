#include "nhpp/intensity.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nhpp {

namespace {

void require_time(double t, const char* what) {
  if (!(t >= 0.0) || std::isinf(t)) {
    throw std::invalid_argument(std::string(what) +
                                " must be finite and >= 0, got " +
                                std::to_string(t));
  }
}

}  // namespace

IntensityParams::IntensityParams(double a, double b) : a_(a), b_(b) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("decay rate a must satisfy a >= 0, got " +
                                std::to_string(a));
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("initial rate b must satisfy b > 0, got " +
                                std::to_string(b));
  }
}

double intensity_at(const IntensityParams& params, double t) {
  require_time(t, "time t");
  return params.b() / (params.a() * t + 1.0);
}

double cumulative_intensity(const IntensityParams& params, double t) {
  require_time(t, "time t");
  if (params.homogeneous()) return params.b() * t;
  return params.b() / params.a() * std::log1p(params.a() * t);
}

double inverse_cumulative(const IntensityParams& params, double u) {
  require_time(u, "cumulative count u");
  if (params.homogeneous()) return u / params.b();

  const double exponent = params.a() * u / params.b();
  // expm1(x) / a must stay finite: x <= log(max * a) with a margin.
  const double limit =
      std::log(std::numeric_limits<double>::max()) + std::log(params.a());
  if (!(exponent < limit)) {
    throw OverflowError("inverse_cumulative: a*u/b = " +
                        std::to_string(exponent) +
                        " exceeds the representable exponent range");
  }
  const double t = std::expm1(exponent) / params.a();
  if (!std::isfinite(t)) {
    throw OverflowError("inverse_cumulative: result is not finite");
  }
  return t;
}

}  // namespace nhpp
