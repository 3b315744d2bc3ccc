#include "gaplab/mathutil.hpp"

#include <cmath>
#include <stdexcept>

namespace gaplab::mathutil {

double bessel_j(int m, double x) {
  double term = 1.0;
  for (int j = 1; j <= m; ++j) term *= x / (2.0 * j);
  double sum = term;
  const double q = -0.25 * x * x;
  for (int j = 1; j < 200; ++j) {
    term *= q / (static_cast<double>(j) * (j + m));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double first_bessel_zero(int m) {
  if (m < 0 || m > 3)
    throw std::invalid_argument("first_bessel_zero: order outside [0, 3]");
  // j_{m,1} is increasing in m: 2.40, 3.83, 5.14, 6.38.
  static const double lo_tab[4] = {2.0, 3.5, 5.0, 6.0};
  static const double hi_tab[4] = {3.0, 4.5, 5.5, 7.0};
  double lo = lo_tab[m], hi = hi_tab[m];
  if (bessel_j(m, lo) * bessel_j(m, hi) >= 0.0)
    throw std::logic_error("first_bessel_zero: bracket does not straddle");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j(m, lo) * bessel_j(m, mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  const int n = static_cast<int>(h.size());
  if (n < 2 || err.size() != h.size())
    throw std::invalid_argument("fit_order: need matching arrays, size >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gaplab::mathutil
