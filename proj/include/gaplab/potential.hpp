#ifndef GAPLAB_POTENTIAL_HPP
#define GAPLAB_POTENTIAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "gaplab/interp.hpp"

namespace gaplab {

// Potential term for the model operators: zero, a polynomial, or a sampled
// table with cubic interpolation.  Polynomials evaluate anywhere; sampled
// tables only inside their knot range.
class Potential {
 public:
  Potential() : kind_(Kind::zero) {}

  static Potential zero() { return Potential(); }
  static Potential polynomial(std::vector<double> coeffs);
  static Potential sampled(Eigen::ArrayXd x, Eigen::ArrayXd v);

  double value(double x) const;
  double deriv(double x) const;

  bool is_zero() const { return kind_ == Kind::zero; }
  // true when only even powers appear (polynomial) or the sampled table is
  // symmetric about 0 within 1e-12 (requires a symmetric grid)
  bool is_even() const;

 private:
  enum class Kind { zero, poly, samples };
  Kind kind_;
  std::vector<double> coeffs_;
  CubicSpline spline_;
  Eigen::ArrayXd sx_, sv_;
};

}  // namespace gaplab

#endif
