#ifndef GAPLAB_GEOM_HPP
#define GAPLAB_GEOM_HPP

// Geometry kernel for the simply connected space forms M^n_k.
//
// Representation is extrinsic:
//   k > 0  sphere of radius 1/sqrt(k) in R^{n+1},   <p,p>  = 1/k
//   k = 0  R^n itself
//   k < 0  upper hyperboloid sheet in R^{n+1} with the Minkowski pairing
//          <u,v> = -u0 v0 + sum_{i>=1} ui vi,        <p,p>  = 1/k, p0 > 0
//
// All formulas below are written against the curvature-adapted pairing, so
// the sphere and the hyperboloid share one code path.  Geodesics from p with
// unit tangent u are gamma(s) = cs_k(s) p + sn_k(s) u, and transport along
// them rotates the {p,u} plane while fixing its orthogonal complement.

#include <Eigen/Dense>

#include "gaplab/errors.hpp"
#include "gaplab/special.hpp"

namespace gaplab::geom {

// Ambient dimension never exceeds kMaxAmbient, so vectors live on the stack.
// The Monte Carlo stepper calls these ops in a tight loop.
inline constexpr int kMaxAmbient = 12;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;

struct ModelSpace {
  double k = 0.0;  // sectional curvature
  int n = 2;       // intrinsic dimension, n >= 2

  ModelSpace(double k_, int n_);
  int ambient_dim() const { return k == 0.0 ? n : n + 1; }
};

struct Point {
  Vec coords;
};

struct Tangent {
  Point base;
  Vec vec;  // ambient coordinates; <base, vec> = 0 in the adapted pairing
};

// Curvature-adapted ambient pairing (Minkowski for k < 0).
double dot(const ModelSpace& space, const Vec& u, const Vec& v);

// Canonical center: (0,..,0,1)/sqrt(k) on the sphere, the hyperboloid apex
// (1/sqrt(-k),0,..,0) for k < 0, the origin for k = 0.
Point base_point(const ModelSpace& space);

// Point at parameter 1 along the geodesic with initial velocity v.  The
// input is re-tangentialized and the output re-normalized onto the quadric;
// long trajectories stay on the manifold to roundoff.  For k > 0 requires
// |v| < pi/sqrt(k).
Point exp_map(const ModelSpace& space, const Tangent& v);

// Inverse of exp_map: tangent at `from` reaching `to` at parameter 1.
// Throws AntipodalError when k > 0 and the points are conjugate.
Tangent log_map(const ModelSpace& space, const Point& from, const Point& to);

double distance(const ModelSpace& space, const Point& p, const Point& q);

// Transport of v along the unique geodesic from v.base to `to`.
Tangent parallel_transport(const ModelSpace& space, const Tangent& v,
                           const Point& to);

// Transport x -> y followed by reflection about the hyperplane orthogonal
// to the geodesic direction at y.  Throws CoincidentError when x == y.
Tangent mirror_map(const ModelSpace& space, const Point& x, const Point& y,
                   const Tangent& v);

// Sum of index forms over the reflection variation fields of a geodesic of
// length rho: exactly -2 (n-1) tn_k(rho/2) on M^n_k.  rho must lie in
// (0, pi/sqrt(k)).
double index_form_sum(const ModelSpace& space, double rho);

enum class JacobiEnd { left, right, both };

// Scalar coefficient of the transverse Jacobi field on [-d0/2, d0/2] with
// boundary data 0 <-> e_i (left), e_i <-> 0 (right) or e_i <-> e_i (both).
double jacobi_boundary(const ModelSpace& space, double d0, JacobiEnd which,
                       double s);

// Helpers shared with the samplers and the coupling engine.

// |v| in the adapted pairing (tangent vectors are spacelike for k < 0).
double norm(const ModelSpace& space, const Vec& v);

// Remove the component of v normal to the quadric at p.
Vec tangentialize(const ModelSpace& space, const Point& p, const Vec& v);

// Orthonormal tangent basis at p with column n-1 equal to `along` (unit,
// tangent at p); the remaining columns complete it deterministically.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient,
              kMaxAmbient>
adapted_frame(const ModelSpace& space, const Point& p, const Vec& along);

}  // namespace gaplab::geom

#endif
