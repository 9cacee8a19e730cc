#ifndef NHPP_ANALYTIC_HPP_
#define NHPP_ANALYTIC_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "nhpp/intensity.hpp"

namespace nhpp {

// Controls the composite Gauss-Legendre evaluation of the inter-event
// distribution. node_count is the rule order per panel; max_refinements
// bounds the number of panel-bisection rounds.
struct QuadratureConfig {
  std::size_t node_count = 64;
  double relative_tolerance = 1e-8;
  int max_refinements = 8;

  // Throws std::invalid_argument unless node_count >= 8 and
  // relative_tolerance in (0, 1e-3].
  void validate() const;
};

// Quadrature did not reach the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_estimate,
                double error_bound);
  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

// P{T_{n+1} > t}: the gap after the n-th event, averaged over S_n.
//
// For a > 0 this is the Gamma(n, 1) expectation
//
//   (1/(n-1)!) Int_0^inf u^{n-1} e^{-u} (1 + a t e^{-a u / b})^{-b/a} du,
//
// where u = Lambda(S_n). For a == 0 it is exp(-b t).
double survival_Tn(const IntensityParams& params, std::size_t n, double t,
                   const QuadratureConfig& quad = {});

// Density of T_{n+1}, i.e. -d/dt survival_Tn:
//
//   (b/(n-1)!) Int_0^inf u^{n-1} e^{-u} e^{-a u/b}
//              (1 + a t e^{-a u/b})^{-(b/a + 1)} du,
//
// or b exp(-b t) when a == 0.
double density_Tn(const IntensityParams& params, std::size_t n, double t,
                  const QuadratureConfig& quad = {});

// Power-law exponent of the inter-event density tail, gamma = b/a + 1.
// Empty for a == 0, where the law is exponential.
struct TailAsymptote {
  std::optional<double> exponent;
  bool valid() const noexcept { return exponent.has_value(); }
};

TailAsymptote tail_exponent(const IntensityParams& params);

// Gamma(n, x) = Int_x^inf e^{-y} y^{n-1} dy by the integer-order recurrence
// Gamma(k+1, x) = k Gamma(k, x) + x^k e^{-x}. Overflows to +inf past n ~ 171.
double upper_incomplete_gamma(std::size_t n, double x);

// Gamma(n, x) / (n-1)! = e^{-x} sum_{j<n} x^j / j!, summed in log space so it
// stays finite for any n.
double regularized_upper_gamma(std::size_t n, double x);

// Mean-value approximation of the density tail:
//
//   b^{n+1} / (a+b)^n * (1 - Gamma(n, gamma T)/(n-1)!) * (1 + a e^{-xi} t)^{-gamma}
//
// with gamma = b/a + 1. Requires a > 0, xi in [0, T], and T large enough that
// Gamma(n, gamma T)/(n-1)! < 0.01. For demonstration only: the exact density
// carries logarithmic corrections this form drops.
double tail_approximation(const IntensityParams& params, std::size_t n, double t,
                          double truncation, double xi);

}  // namespace nhpp

#endif  // NHPP_ANALYTIC_HPP_
