#ifndef GAPLAB_MATHUTIL_HPP
#define GAPLAB_MATHUTIL_HPP

#include <vector>

namespace gaplab::mathutil {

// Bessel J_m by power series.  Adequate for |x| <= 10, which covers the
// first zeros of the orders used here (m <= 3).
double bessel_j(int m, double x);

// First positive zero of J_m, m in [0, 3], by bisection on a fixed bracket.
// The flat-disk eigenvalues are squares of these divided by the radius.
double first_bessel_zero(int m);

// Least-squares slope of log(err) against log(h).  Used to certify the
// second-order convergence of the finite-difference spectra.
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace gaplab::mathutil

#endif
