#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "stepscatter/error.hpp"
#include "stepscatter/numerics/summation.hpp"

namespace stepscatter::numerics {

/// Nodes and weights of an n-point Gauss-Legendre rule, ascending in x.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  // legendre_p_zeros returns the non-negative half of the zeros.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(n);
  QuadratureRule rule;
  rule.nodes.reserve(n);
  for (double z : half) {
    rule.nodes.push_back(z);
    if (z != 0.0) rule.nodes.push_back(-z);
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());
  rule.weights.reserve(n);
  for (double x : rule.nodes) {
    const double dp = boost::math::legendre_p_prime(n, x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

/// The same rule mapped affinely onto [lo, hi].
inline QuadratureRule gauss_legendre(int n, double lo, double hi) {
  QuadratureRule rule = gauss_legendre(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

struct AdaptiveOptions {
  double abs_tolerance = 1e-12;
  int max_subdivisions = 60;
};

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod integration: the interval with
/// the largest local error estimate is bisected until the summed estimate
/// drops below the absolute tolerance. Throws QuadratureNotConverged once the
/// subdivision budget is exhausted.
template <class F>
AdaptiveResult adaptive_integrate(F&& f, double lo, double hi, AdaptiveOptions opts = {}) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Piece {
    double lo, hi, value, error;
    bool operator<(const Piece& other) const { return error < other.error; }
  };
  auto evaluate = [&f](double a, double b) {
    double err = 0.0;
    const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
    return Piece{a, b, v, err};
  };

  std::priority_queue<Piece> pieces;
  pieces.push(evaluate(lo, hi));
  double total_error = pieces.top().error;
  int splits = 0;
  while (total_error > opts.abs_tolerance) {
    if (splits >= opts.max_subdivisions) {
      fail(ErrorCode::QuadratureNotConverged,
           "error estimate " + std::to_string(total_error) + " above tolerance after " +
               std::to_string(splits) + " subdivisions");
    }
    const Piece worst = pieces.top();
    pieces.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Piece left = evaluate(worst.lo, mid);
    const Piece right = evaluate(mid, worst.hi);
    pieces.push(left);
    pieces.push(right);
    ++splits;
    // Re-sum rather than update incrementally so the estimate never drifts.
    CompensatedSum err;
    auto copy = pieces;
    while (!copy.empty()) {
      err.add(copy.top().error);
      copy.pop();
    }
    total_error = err.value();
  }

  // Sum in ascending position so the result does not depend on heap layout.
  std::vector<Piece> ordered;
  ordered.reserve(pieces.size());
  while (!pieces.empty()) {
    ordered.push_back(pieces.top());
    pieces.pop();
  }
  std::sort(ordered.begin(), ordered.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  CompensatedSum sum;
  for (const Piece& p : ordered) sum.add(p.value);
  return {sum.value(), total_error, splits};
}

}  // namespace stepscatter::numerics
