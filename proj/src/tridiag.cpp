#include "gaplab/tridiag.hpp"

#include <cmath>
#include <limits>

namespace gaplab {

namespace {

double inf_norm(const SymTridiag& T) {
  const int m = static_cast<int>(T.diag.size());
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = std::abs(T.diag[i]);
    if (i > 0) row += std::abs(T.off[i - 1]);
    if (i + 1 < m) row += std::abs(T.off[i]);
    best = std::max(best, row);
  }
  return best;
}

}  // namespace

int sturm_count(const SymTridiag& T, double x) {
  const int m = static_cast<int>(T.diag.size());
  const double pivmin =
      std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double d = T.diag[0] - x;
  if (std::abs(d) < pivmin) d = -pivmin;
  if (d < 0.0) ++count;
  for (int i = 1; i < m; ++i) {
    d = T.diag[i] - x - T.off[i - 1] * T.off[i - 1] / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

double tridiag_eigenvalue(const SymTridiag& T, int j) {
  const int m = static_cast<int>(T.diag.size());
  if (j < 0 || j >= m) throw DomainError("tridiag_eigenvalue: bad index");
  // Gershgorin bracket
  double lo = T.diag[0], hi = T.diag[0];
  for (int i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.off[i - 1]);
    if (i + 1 < m) r += std::abs(T.off[i]);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double tol =
        std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(lo), std::abs(hi)));
    if (hi - lo <= tol) return mid;
    if (sturm_count(T, mid) > j)
      hi = mid;
    else
      lo = mid;
  }
  throw ConvergenceError("tridiag_eigenvalue: bisection exceeded 200 steps");
}

Eigen::VectorXd tridiag_eigenvector(const SymTridiag& T, double lambda,
                                    const Eigen::VectorXd* orthogonal_to) {
  const int m = static_cast<int>(T.diag.size());
  const double scale = inf_norm(T);

  // LU factors of (T - lambda I) with partial pivoting; U has two
  // superdiagonals.  Reused for every iterate.
  Eigen::ArrayXd d(m), u1(std::max(m - 1, 0)), u2(std::max(m - 2, 0));
  Eigen::ArrayXd lmul(std::max(m - 1, 0));
  Eigen::Array<bool, Eigen::Dynamic, 1> swapped(std::max(m - 1, 0));
  {
    Eigen::ArrayXd a = T.diag - lambda;  // working diagonal
    Eigen::ArrayXd b = T.off;            // working subdiagonal copy
    Eigen::ArrayXd c = T.off;            // working superdiagonal copy
    Eigen::ArrayXd e = Eigen::ArrayXd::Zero(std::max(m - 2, 0));
    const double pivmin = 1e-30 * std::max(scale, 1.0);
    for (int i = 0; i + 1 < m; ++i) {
      if (std::abs(b[i]) > std::abs(a[i])) {
        swapped[i] = true;
        std::swap(a[i], b[i]);
        double ci = c[i];
        c[i] = a[i + 1];
        a[i + 1] = ci;
        if (i + 2 < m) {
          e[i] = c[i + 1];
          c[i + 1] = 0.0;
        }
      } else {
        swapped[i] = false;
        if (i + 2 < m) e[i] = 0.0;
      }
      double piv = a[i];
      if (std::abs(piv) < pivmin) piv = piv < 0 ? -pivmin : pivmin;
      const double mult = b[i] / piv;
      lmul[i] = mult;
      a[i + 1] -= mult * c[i];
      if (i + 2 < m) c[i + 1] -= mult * e[i];
      d[i] = piv;
      u1[i] = c[i];
      if (i + 2 < m) u2[i] = e[i];
    }
    double last = a[m - 1];
    if (std::abs(last) < pivmin) last = last < 0 ? -pivmin : pivmin;
    d[m - 1] = last;
  }

  auto solve = [&](Eigen::VectorXd rhs) {
    for (int i = 0; i + 1 < m; ++i) {
      if (swapped[i]) std::swap(rhs[i], rhs[i + 1]);
      rhs[i + 1] -= lmul[i] * rhs[i];
    }
    for (int i = m - 1; i >= 0; --i) {
      double v = rhs[i];
      if (i + 1 < m) v -= u1[i] * rhs[i + 1];
      if (i + 2 < m) v -= u2[i] * rhs[i + 2];
      rhs[i] = v / d[i];
    }
    return rhs;
  };

  // Deterministic start vector that is unlikely to be orthogonal to the
  // target eigenvector.
  Eigen::VectorXd z(m);
  uint64_t s = 0x2545F4914F6CDD1Dull ^ (static_cast<uint64_t>(m) << 17);
  for (int i = 0; i < m; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    z[i] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  }
  z.normalize();

  const double resid_tol = 1e-10 * std::max(scale, 1.0);
  for (int iter = 0; iter < 20; ++iter) {
    if (orthogonal_to) z -= orthogonal_to->dot(z) * (*orthogonal_to);
    z = solve(std::move(z));
    if (orthogonal_to) z -= orthogonal_to->dot(z) * (*orthogonal_to);
    z.normalize();
    // residual check
    double resid = 0.0;
    for (int i = 0; i < m; ++i) {
      double r = (T.diag[i] - lambda) * z[i];
      if (i > 0) r += T.off[i - 1] * z[i - 1];
      if (i + 1 < m) r += T.off[i] * z[i + 1];
      resid = std::max(resid, std::abs(r));
    }
    if (resid <= resid_tol) return z;
  }
  throw ConvergenceError("tridiag_eigenvector: residual did not converge");
}

}  // namespace gaplab
