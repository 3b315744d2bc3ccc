#ifndef GAPLAB_INTERP_HPP
#define GAPLAB_INTERP_HPP

#include <Eigen/Dense>

#include "gaplab/errors.hpp"

namespace gaplab {

// Natural cubic spline on strictly increasing abscissae.  Evaluation
// tolerates roundoff-sized excursions past the ends and throws DomainError
// beyond that.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(Eigen::ArrayXd x, Eigen::ArrayXd y);

  double value(double x) const;
  double deriv(double x) const;

  double x_min() const { return x_[0]; }
  double x_max() const { return x_[x_.size() - 1]; }
  bool empty() const { return x_.size() == 0; }

 private:
  int locate(double x) const;

  Eigen::ArrayXd x_, y_, m_;  // m_ holds second derivatives at the knots
};

}  // namespace gaplab

#endif
