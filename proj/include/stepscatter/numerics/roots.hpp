#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace stepscatter::numerics {

/// Refines a sign-changing bracket [lo, hi] to full double precision.
template <class F>
double refine_root(F&& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t max_iter = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

/// Scans [lo, hi] with a fixed step and returns up to `max_roots` refined
/// zeros in ascending order. Every zero is assumed simple.
template <class F>
std::vector<double> scan_roots(F&& f, double lo, double hi, double step, std::size_t max_roots) {
  std::vector<double> roots;
  double x0 = lo;
  double f0 = f(x0);
  for (std::size_t i = 1; roots.size() < max_roots; ++i) {
    const double x1 = std::min(hi, lo + static_cast<double>(i) * step);
    const double f1 = f(x1);
    if (f0 != 0.0 && ((f0 < 0.0) != (f1 < 0.0) || f1 == 0.0)) {
      roots.push_back(refine_root(f, x0, x1));
    }
    if (x1 >= hi) break;
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace stepscatter::numerics
