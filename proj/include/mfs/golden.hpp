#pragma once

#include <cmath>
#include <utility>

namespace mfs::detail {

// Golden-section search for a minimiser of f on [lo, hi]. Returns (x, f(x)).
template <class F>
std::pair<double, double> golden_minimize(F&& f, double lo, double hi, double xtol = 1e-13,
                                          int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > xtol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
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
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

template <class F>
std::pair<double, double> golden_maximize(F&& f, double lo, double hi, double xtol = 1e-13,
                                          int max_iter = 200) {
  auto [x, fx] = golden_minimize([&](double t) { return -f(t); }, lo, hi, xtol, max_iter);
  return {x, -fx};
}

}  // namespace mfs::detail
