#ifndef GAPLAB_TRIDIAG_HPP
#define GAPLAB_TRIDIAG_HPP

// Symmetric tridiagonal eigensolver: Sturm-sequence bisection for values,
// inverse iteration for vectors.  Small, dependency free, and robust for
// the banded operators the spectral modules assemble.

#include <Eigen/Dense>

#include "gaplab/errors.hpp"

namespace gaplab {

struct SymTridiag {
  Eigen::ArrayXd diag;  // size m
  Eigen::ArrayXd off;   // size m-1
};

// Number of eigenvalues strictly below x.
int sturm_count(const SymTridiag& T, double x);

// j-th smallest eigenvalue (0-based), bisected to 1e-12 absolute (or a few
// ulps for large magnitudes).  Throws ConvergenceError past 200 iterations.
double tridiag_eigenvalue(const SymTridiag& T, int j);

// Inverse iteration at an accurate eigenvalue.  The result has unit 2-norm
// and residual |T z - lambda z|_inf below 1e-10 * |T|_inf; ConvergenceError
// otherwise.  `orthogonal_to` (optional) is deflated from the iterates.
Eigen::VectorXd tridiag_eigenvector(const SymTridiag& T, double lambda,
                                    const Eigen::VectorXd* orthogonal_to = nullptr);

}  // namespace gaplab

#endif
