#include "gaplab/interp.hpp"

#include <cmath>
#include <string>

namespace gaplab {

CubicSpline::CubicSpline(Eigen::ArrayXd x, Eigen::ArrayXd y)
    : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 3 || y_.size() != n)
    throw DomainError("CubicSpline: need at least 3 matching knots");
  for (int i = 0; i + 1 < n; ++i)
    if (!(x_[i + 1] > x_[i]))
      throw DomainError("CubicSpline: abscissae must increase strictly");

  // Tridiagonal system for the interior second derivatives, natural ends.
  m_ = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd diag(n - 2), rhs(n - 2), sub(n - 2), sup(n - 2);
  for (int i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    sub[i - 1] = hl / 6.0;
    diag[i - 1] = (hl + hr) / 3.0;
    sup[i - 1] = hr / 6.0;
    rhs[i - 1] =
        (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  // Thomas elimination (diagonally dominant, no pivoting needed).
  for (int i = 1; i < n - 2; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (n > 2) {
    m_[n - 2] = rhs[n - 3] / diag[n - 3];
    for (int i = n - 4; i >= 0; --i)
      m_[i + 1] = (rhs[i] - sup[i] * m_[i + 2]) / diag[i];
  }
}

int CubicSpline::locate(double x) const {
  const int n = static_cast<int>(x_.size());
  const double span = x_[n - 1] - x_[0];
  const double slack = 1e-12 * std::max(1.0, std::abs(span));
  if (x < x_[0] - slack || x > x_[n - 1] + slack)
    throw DomainError("CubicSpline: query " + std::to_string(x) +
                      " outside [" + std::to_string(x_[0]) + ", " +
                      std::to_string(x_[n - 1]) + "]");
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (x_[mid] <= x ? lo : hi) = mid;
  }
  return lo;
}

double CubicSpline::value(double x) const {
  const int i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h /
             6.0;
}

double CubicSpline::deriv(double x) const {
  const int i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) *
             h / 6.0;
}

}  // namespace gaplab
