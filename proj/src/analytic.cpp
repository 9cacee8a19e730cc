#include "nhpp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nhpp/quadrature.hpp"

namespace nhpp {

namespace {

void require_index(std::size_t n) {
  if (n < 1) throw std::invalid_argument("event index n must be >= 1");
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time t must be finite and >= 0, got " +
                                std::to_string(t));
  }
}

enum class Kernel { kSurvival, kDensity };

// Integrates the Gamma(n,1)-weighted kernel over u in [0, inf).
double gamma_expectation(const IntensityParams& params, std::size_t n, double t,
                         const QuadratureConfig& quad, Kernel kernel) {
  quad.validate();
  const double a = params.a();
  const double b = params.b();
  const double k = a / b;        // e^{-a u / b} = e^{-k u}
  const double inv_k = b / a;
  const double c = a * t;
  const double shape = static_cast<double>(n) - 1.0;
  const double log_norm = std::lgamma(static_cast<double>(n));

  auto weight = [&](double u) {
    if (u <= 0.0) return n == 1 ? 1.0 : 0.0;
    return std::exp(shape * std::log(u) - u - log_norm);
  };
  auto integrand = [&](double u) {
    const double decay = std::exp(-k * u);
    const double log_base = std::log1p(c * decay);
    const double w = weight(u);
    if (kernel == Kernel::kSurvival) return w * std::exp(-inv_k * log_base);
    return w * b * decay * std::exp(-(inv_k + 1.0) * log_base);
  };
  // The kernel is bounded by 1 (survival) or b (density), so the part of the
  // integral beyond U is at most that bound times Q(n, U).
  const double kernel_bound = kernel == Kernel::kSurvival ? 1.0 : b;

  // Past u* = ln(c)/k the kernel switches from its power-law to its
  // saturated regime over a width ~ 1/k.
  const double transition = c > 1.0 ? inv_k * std::log(c) : 0.0;
  double upper = std::max(shape + 40.0 + 12.0 * std::sqrt(shape + 1.0),
                          transition + 40.0);

  for (int attempt = 0;; ++attempt) {
    std::vector<double> cuts{0.0, upper};
    if (shape > 0.0 && shape < upper) cuts.push_back(shape);
    if (transition > 0.0 && transition < upper) cuts.push_back(transition);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> breakpoints;
    constexpr double kMaxPanel = 8.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double len = cuts[i + 1] - cuts[i];
      const auto pieces =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / kMaxPanel)));
      for (std::size_t j = 0; j < pieces; ++j) {
        breakpoints.push_back(cuts[i] + len * static_cast<double>(j) /
                                            static_cast<double>(pieces));
      }
    }
    breakpoints.push_back(upper);

    const auto est = integrate_panels(
        integrand, breakpoints, quad.node_count, quad.relative_tolerance,
        std::numeric_limits<double>::min(), quad.max_refinements);
    const double tail = kernel_bound * regularized_upper_gamma(n, upper);
    const double bound = est.error + tail;

    if (tail > 0.01 * quad.relative_tolerance * est.value && attempt < 16 &&
        upper < 1e6) {
      upper *= 2.0;
      continue;
    }
    if (!est.converged || tail > quad.relative_tolerance * est.value) {
      throw AccuracyError("quadrature for T_{n+1} did not converge (n=" +
                              std::to_string(n) + ", t=" + std::to_string(t) +
                              ")",
                          est.value, bound);
    }
    return est.value;
  }
}

}  // namespace

void QuadratureConfig::validate() const {
  if (node_count < 8) throw std::invalid_argument("node_count must be >= 8");
  if (!(relative_tolerance > 0.0 && relative_tolerance <= 1e-3)) {
    throw std::invalid_argument("relative_tolerance must be in (0, 1e-3]");
  }
  if (max_refinements < 0) {
    throw std::invalid_argument("max_refinements must be >= 0");
  }
}

AccuracyError::AccuracyError(const std::string& what, double best_estimate,
                             double error_bound)
    : std::runtime_error(what + ": best estimate " +
                         std::to_string(best_estimate) + ", error bound " +
                         std::to_string(error_bound)),
      best_estimate_(best_estimate),
      error_bound_(error_bound) {}

double survival_Tn(const IntensityParams& params, std::size_t n, double t,
                   const QuadratureConfig& quad) {
  require_index(n);
  require_time(t);
  if (t == 0.0) return 1.0;
  if (params.homogeneous()) return std::exp(-params.b() * t);
  return std::clamp(gamma_expectation(params, n, t, quad, Kernel::kSurvival),
                    0.0, 1.0);
}

double density_Tn(const IntensityParams& params, std::size_t n, double t,
                  const QuadratureConfig& quad) {
  require_index(n);
  require_time(t);
  if (params.homogeneous()) return params.b() * std::exp(-params.b() * t);
  return gamma_expectation(params, n, t, quad, Kernel::kDensity);
}

TailAsymptote tail_exponent(const IntensityParams& params) {
  if (params.homogeneous()) return {};
  return {params.b() / params.a() + 1.0};
}

double upper_incomplete_gamma(std::size_t n, double x) {
  require_index(n);
  if (!(x >= 0.0)) throw std::invalid_argument("x must be >= 0");
  double value = std::exp(-x);  // Gamma(1, x)
  for (std::size_t j = 1; j < n; ++j) {
    const double jj = static_cast<double>(j);
    const double term = x > 0.0 ? std::exp(jj * std::log(x) - x) : 0.0;
    value = jj * value + term;
  }
  return value;
}

double regularized_upper_gamma(std::size_t n, double x) {
  require_index(n);
  if (!(x >= 0.0)) throw std::invalid_argument("x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_x = std::log(x);
  auto log_term = [&](std::size_t j) {
    const double jj = static_cast<double>(j);
    return jj * log_x - x - std::lgamma(jj + 1.0);
  };
  // Terms increase up to j ~ x, so the largest is at min(n-1, floor(x)).
  const auto peak = std::min<std::size_t>(n - 1, static_cast<std::size_t>(x));
  const double log_max = log_term(peak);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += std::exp(log_term(j) - log_max);
  return std::min(1.0, std::exp(log_max + std::log(sum)));
}

double tail_approximation(const IntensityParams& params, std::size_t n, double t,
                          double truncation, double xi) {
  require_index(n);
  require_time(t);
  if (params.homogeneous()) {
    throw std::invalid_argument("tail_approximation requires a > 0");
  }
  if (!(truncation > 0.0) || !std::isfinite(truncation)) {
    throw std::invalid_argument("truncation T must be finite and > 0");
  }
  if (!(xi >= 0.0 && xi <= truncation)) {
    throw std::invalid_argument("xi must lie in [0, T]");
  }
  const double a = params.a();
  const double b = params.b();
  const double gamma = b / a + 1.0;
  const double remainder = regularized_upper_gamma(n, gamma * truncation);
  if (!(remainder < 0.01)) {
    throw std::invalid_argument(
        "truncation T too small: Gamma(n, gamma T)/(n-1)! = " +
        std::to_string(remainder) + " >= 0.01");
  }
  const double prefactor =
      b * std::pow(b / (a + b), static_cast<double>(n)) * (1.0 - remainder);
  return prefactor * std::pow(1.0 + a * std::exp(-xi) * t, -gamma);
}

}  // namespace nhpp
