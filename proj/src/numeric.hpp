#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mfduopoly/errors.hpp"

namespace mfd::detail {

inline void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw InputError(std::string(name) + " must be finite");
}

inline void require_unit(double x, const char* name) {
  require_finite(x, name);
  if (x < 0.0 || x > 1.0) {
    std::ostringstream os;
    os << name << " = " << x << " outside [0,1]";
    throw InputError(os.str());
  }
}

inline void require_nonnegative(double x, const char* name) {
  require_finite(x, name);
  if (x < 0.0) {
    std::ostringstream os;
    os << name << " = " << x << " must be nonnegative";
    throw InputError(os.str());
  }
}

inline void require_positive(double x, const char* name) {
  require_finite(x, name);
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << name << " = " << x << " must be positive";
    throw InputError(os.str());
  }
}

inline double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

struct BisectResult {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

// Root of an increasing function on [lo, hi], bisected down to adjacent
// doubles (about 52 halvings of a unit bracket). The caller checks signs.
template <class F>
BisectResult bisect_increasing(F&& f, double lo, double hi, int max_iter) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto width_reached = [](double a, double b) {
    return b - a <= 2.0 * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::abs(b));
  };
  const auto [a, b] =
      boost::math::tools::bisect(f, lo, hi, width_reached, iters);
  BisectResult r;
  r.lo = a;
  r.hi = b;
  r.iterations = static_cast<int>(iters);
  // Pick whichever end has the smaller residual.
  r.root = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
  return r;
}

struct MinimizeResult {
  double x = 0.0;
  double value = 0.0;
};

// Global-ish minimization on [lo, hi]: uniform scan, then Brent refinement on
// the cell around the best sample. Exact for unimodal objectives; for
// piecewise objectives the scan picks the right basin at its resolution.
template <class F>
MinimizeResult minimize_on_interval(F&& f, double lo, double hi,
                                    int scan_points = 201) {
  double best_x = lo;
  double best_v = f(lo);
  const double step = (hi - lo) / (scan_points - 1);
  for (int i = 1; i < scan_points; ++i) {
    const double x = (i == scan_points - 1) ? hi : lo + step * i;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double a = std::max(lo, best_x - step);
  const double b = std::min(hi, best_x + step);
  std::uintmax_t iters = 200;
  const auto [x, v] = boost::math::tools::brent_find_minima(
      f, a, b, std::numeric_limits<double>::digits / 2, iters);
  if (v <= best_v) return {x, v};
  return {best_x, best_v};
}

}  // namespace mfd::detail
