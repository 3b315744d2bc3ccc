#ifndef GAPLAB_SPECIAL_HPP
#define GAPLAB_SPECIAL_HPP

// Generalized trigonometric functions for curvature k.  sn solves
// u'' + k u = 0 with u(0)=0, u'(0)=1; cs is its derivative; tn = k sn/cs.
// They reduce to sin/cos/tan scaled by sqrt(k) for k>0, to s/1/0 for k=0,
// and to sinh/cosh/tanh scaled by sqrt(-k) for k<0.

#include <cmath>
#include <string>

#include "gaplab/errors.hpp"

namespace gaplab::geom {

inline double sn(double k, double s) {
  if (k > 0.0) {
    const double rk = std::sqrt(k);
    return std::sin(rk * s) / rk;
  }
  if (k < 0.0) {
    const double rk = std::sqrt(-k);
    return std::sinh(rk * s) / rk;
  }
  return s;
}

inline double cs(double k, double s) {
  if (k > 0.0) return std::cos(std::sqrt(k) * s);
  if (k < 0.0) return std::cosh(std::sqrt(-k) * s);
  return 1.0;
}

// tn(k, .) has poles where cs vanishes (|s| = pi/(2 sqrt(k)) for k > 0).
inline double tn(double k, double s) {
  if (k == 0.0) return 0.0;
  const double c = cs(k, s);
  if (std::abs(c) < 1e-13) {
    throw PoleError("tn(k=" + std::to_string(k) + ", s=" + std::to_string(s) +
                    "): cs vanishes");
  }
  return k * sn(k, s) / c;
}

}  // namespace gaplab::geom

#endif
