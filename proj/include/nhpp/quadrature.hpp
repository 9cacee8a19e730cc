#ifndef NHPP_QUADRATURE_HPP_
#define NHPP_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nhpp {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rules are computed once per order and shared; safe to call concurrently.
std::shared_ptr<const GaussLegendreRule> gauss_legendre(std::size_t order);

struct QuadratureEstimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

namespace detail {

template <class F>
double apply_rule(const GaussLegendreRule& rule, F& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

}  // namespace detail

// Composite Gauss-Legendre over the panels delimited by `breakpoints`
// (sorted, at least two). Each panel's error is estimated as the difference
// between the rule on the panel and on its two halves; in each round the
// panels carrying more than their share of the tolerance are bisected.
// Stops when the summed error is below max(rel_tol * |I|, abs_tol) or after
// max_rounds bisection rounds.
template <class F>
QuadratureEstimate integrate_panels(F&& f, std::span<const double> breakpoints,
                                    std::size_t order, double rel_tol,
                                    double abs_tol, int max_rounds) {
  const auto rule = gauss_legendre(order);
  struct Panel {
    double lo, hi, value, error;
  };
  auto evaluate = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double whole = detail::apply_rule(*rule, f, lo, hi);
    const double halves = detail::apply_rule(*rule, f, lo, mid) +
                          detail::apply_rule(*rule, f, mid, hi);
    return Panel{lo, hi, halves, std::abs(whole - halves)};
  };

  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) {
      panels.push_back(evaluate(breakpoints[i], breakpoints[i + 1]));
    }
  }

  QuadratureEstimate out;
  for (int round = 0;; ++round) {
    out.value = 0.0;
    out.error = 0.0;
    for (const auto& p : panels) {
      out.value += p.value;
      out.error += p.error;
    }
    const double target = std::max(rel_tol * std::abs(out.value), abs_tol);
    if (out.error <= target) {
      out.converged = true;
      return out;
    }
    if (round >= max_rounds) return out;

    const double share = target / static_cast<double>(panels.size());
    std::vector<Panel> next;
    next.reserve(panels.size() * 2);
    for (const auto& p : panels) {
      if (p.error > share && p.hi - p.lo > 1e-12 * std::max(1.0, std::abs(p.hi))) {
        const double mid = 0.5 * (p.lo + p.hi);
        next.push_back(evaluate(p.lo, mid));
        next.push_back(evaluate(mid, p.hi));
      } else {
        next.push_back(p);
      }
    }
    panels = std::move(next);
  }
}

}  // namespace nhpp

#endif  // NHPP_QUADRATURE_HPP_
