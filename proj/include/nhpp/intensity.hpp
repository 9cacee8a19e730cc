#ifndef NHPP_INTENSITY_HPP_
#define NHPP_INTENSITY_HPP_

#include <stdexcept>

namespace nhpp {

// Raised when a closed-form evaluation would leave the double range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Parameters of the decaying-interest intensity lambda(t) = b / (a t + 1).
//
// `a` is the decay rate (1/time) and `b` the initial event rate (1/time).
// a == 0 is the homogeneous Poisson process with rate b.
class IntensityParams {
 public:
  // Throws std::invalid_argument unless a >= 0 and b > 0 (both finite).
  IntensityParams(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  bool homogeneous() const noexcept { return a_ == 0.0; }

  friend bool operator==(const IntensityParams&,
                         const IntensityParams&) = default;

 private:
  double a_;
  double b_;
};

// lambda(t) = b / (a t + 1), t >= 0.
double intensity_at(const IntensityParams& params, double t);

// Lambda(t) = (b/a) ln(a t + 1), or b t when a == 0.
double cumulative_intensity(const IntensityParams& params, double t);

// Solves Lambda(t) = u for t. Closed form (exp(a u / b) - 1) / a, or u / b
// when a == 0. Throws OverflowError when the result is not representable.
double inverse_cumulative(const IntensityParams& params, double u);

}  // namespace nhpp

#endif  // NHPP_INTENSITY_HPP_
