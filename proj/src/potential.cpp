#include "gaplab/potential.hpp"

#include <cmath>

#include "gaplab/errors.hpp"

namespace gaplab {

Potential Potential::polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  Potential p;
  if (coeffs.empty()) return p;
  p.kind_ = Kind::poly;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Potential Potential::sampled(Eigen::ArrayXd x, Eigen::ArrayXd v) {
  Potential p;
  p.kind_ = Kind::samples;
  p.sx_ = x;
  p.sv_ = v;
  p.spline_ = CubicSpline(std::move(x), std::move(v));
  return p;
}

double Potential::value(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::poly: {
      double acc = 0.0;
      for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i)
        acc = acc * x + coeffs_[i];
      return acc;
    }
    case Kind::samples:
      return spline_.value(x);
  }
  return 0.0;
}

double Potential::deriv(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::poly: {
      double acc = 0.0;
      for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 1; --i)
        acc = acc * x + i * coeffs_[i];
      return acc;
    }
    case Kind::samples:
      return spline_.deriv(x);
  }
  return 0.0;
}

bool Potential::is_even() const {
  switch (kind_) {
    case Kind::zero:
      return true;
    case Kind::poly: {
      for (size_t i = 1; i < coeffs_.size(); i += 2)
        if (coeffs_[i] != 0.0) return false;
      return true;
    }
    case Kind::samples: {
      const int n = static_cast<int>(sx_.size());
      for (int i = 0; i < n; ++i) {
        const int j = n - 1 - i;
        if (std::abs(sx_[i] + sx_[j]) > 1e-12) return false;
        if (std::abs(sv_[i] - sv_[j]) > 1e-12) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace gaplab
