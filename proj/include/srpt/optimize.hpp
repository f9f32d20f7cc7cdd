#pragma once

// Scalar search helpers shared by the classical and mean-field minimizers.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace srpt::optimize {

struct Minimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct GridScan {
  std::vector<double> x;
  std::vector<double> value;
  std::size_t best = 0;
};

/// Samples f on `points` evenly spaced abscissae in [lo, hi] (both ends included).
template <class F>
GridScan grid_scan(F&& f, double lo, double hi, std::size_t points) {
  GridScan scan;
  if (points == 0) return scan;
  scan.x.resize(points);
  scan.value.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    scan.x[i] = lo + (hi - lo) * t;
    scan.value[i] = f(scan.x[i]);
    if (scan.value[i] < scan.value[scan.best]) scan.best = i;
  }
  return scan;
}

/// Golden-section search for a minimum of f on [a, b]. Stops once the bracket
/// is narrower than rel_tol * max(|x|, abs_floor).
template <class F>
Minimum golden_section(F&& f, double a, double b, double rel_tol, double abs_floor,
                       int max_evaluations = 400) {
  constexpr double inv_phi = 0.6180339887498949;
  Minimum m;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  m.evaluations = 2;
  while (m.evaluations < max_evaluations) {
    const double mid = 0.5 * (a + b);
    if (std::abs(b - a) <= rel_tol * std::max(std::abs(mid), abs_floor)) {
      m.converged = true;
      break;
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++m.evaluations;
  }
  if (fc <= fd) {
    m.x = c;
    m.value = fc;
  } else {
    m.x = d;
    m.value = fd;
  }
  return m;
}

struct Root {
  double x = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Bisection on a sign change of g in [lo, hi]; g(lo) and g(hi) must differ in sign.
template <class G>
Root bisect(G&& g, double lo, double hi, double glo, double abs_tol, int max_evaluations = 200) {
  Root r;
  if (std::signbit(glo) == std::signbit(g(hi))) {
    r.evaluations = 1;
    return r;
  }
  r.evaluations = 1;
  while (r.evaluations < max_evaluations) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= abs_tol || mid <= lo || mid >= hi) {
      r.converged = true;
      break;
    }
    const double gm = g(mid);
    ++r.evaluations;
    if (gm == 0.0) {
      lo = hi = mid;
      r.converged = true;
      break;
    }
    if (std::signbit(gm) == std::signbit(glo)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  r.x = 0.5 * (lo + hi);
  return r;
}

}  // namespace srpt::optimize
