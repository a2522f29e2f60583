#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "geom.hpp"

namespace minmax {

enum class Mode { Planar2D, Body3D };

// Scalar field phi sampled on a regular grid, bilinear interpolation.
// Metric in 2-D mode is g = e^{2 phi} * euclidean.
struct PhiGrid {
  int nx = 0, ny = 0;
  double ox = 0, oy = 0;  // origin (lower-left sample)
  double h = 1;           // spacing
  std::vector<double> v;  // row-major, v[j*nx+i] at (ox+i*h, oy+j*h)

  bool empty() const { return v.empty(); }
  double eval(const Vec2& p) const;
  Vec2 grad(const Vec2& p) const;
  // Rasterize a Gaussian bump field onto a grid covering [-R,R]^2.
  static PhiGrid gaussian_bump(double height, Vec2 center, double sigma, double extent, int n);
};

// Closed convex boundary curve of the planar domain.
struct Boundary2D {
  enum class Kind { Circle, Ellipse, Polygon };
  Kind kind = Kind::Circle;
  double radius = 1;      // Circle
  double a = 1, b = 1;    // Ellipse semi-axes
  std::vector<Vec2> poly; // Polygon vertices, CCW

  // Parametrization by t in [0,1).
  Vec2 point(double t) const;
  Vec2 dpoint(double t) const;           // d point / d t
  Vec2 tangent(double t) const;          // unit, CCW
  double curvature(double t) const;      // euclidean, >0 convex
  double total_param() const { return 1.0; }

  bool inside(const Vec2& p, double tol = 0) const;
  // Nearest boundary point; returns parameter t and distance.
  double project(const Vec2& p, double* t_out = nullptr) const;
  // Cheap lower bound for the distance to the boundary curve.
  double dist_lower_bound(const Vec2& p) const;
  double euclid_diameter() const;
};

// Convex analytic body: ellipsoid (sphere when axes equal), euclidean metric.
struct Body3D {
  Vec3 semi{1, 1, 1};

  bool inside(const Vec3& p, double tol = 0) const;
  double project(const Vec3& p, Vec3* nearest = nullptr) const;  // distance to surface
  Vec3 outward_normal(const Vec3& p_on_surface) const;
  void principal_curvatures(const Vec3& p_on_surface, double* k1, double* k2) const;
  double euclid_diameter() const;
};

// The fixed (n-1)-boundary gamma on dM. 2-D: points; 3-D: latitude rings
// (requires semi.x == semi.y).
struct GammaRing {
  double z = 0, r = 0;
};

struct BoundaryConstraint {
  std::vector<Vec2> points;     // 2-D components
  std::vector<GammaRing> rings; // 3-D components
  bool empty() const { return points.empty() && rings.empty(); }
  int component_count() const { return int(points.size() + rings.size()); }
  // Min distance between distinct components (inf -> separation 0 means D=0).
  double separation() const;
};

struct BoundaryFrame {
  // 2-D: nu + tangent (z unused). 3-D: nu + two tangents.
  Vec3 nu;                 // unit inward normal (metric-normalized)
  Vec3 tangent1, tangent2; // tangent basis of dM at p
  double k1 = 0, k2 = 0;   // principal curvatures (2-D: k1 only)
};

class AmbientDomain {
 public:
  static AmbientDomain from_json(const std::string& json_text);
  static AmbientDomain disk(double radius, PhiGrid phi = {});
  static AmbientDomain ellipse(double a, double b, PhiGrid phi = {});
  static AmbientDomain ball(Vec3 semi_axes);

  Mode mode() const { return mode_; }
  const Boundary2D& boundary2d() const { return b2_; }
  const Body3D& body3d() const { return b3_; }
  const PhiGrid& phi_grid() const { return phi_; }
  const BoundaryConstraint& gamma() const { return gamma_; }
  void set_gamma(BoundaryConstraint g);

  double tol_bdry() const { return 1e-8 * diameter_; }
  double diameter() const { return diameter_; }

  // Conformal factor and its gradient (phi = 0 in 3-D mode).
  double phi(const Vec2& p) const { return phi_.empty() ? 0.0 : phi_.eval(p); }
  Vec2 grad_phi(const Vec2& p) const { return phi_.empty() ? Vec2{0, 0} : phi_.grad(p); }
  double conf(const Vec2& p) const { return std::exp(phi(p)); }

  bool inside2(const Vec2& p, double tol = 0) const { return b2_.inside(p, tol); }
  bool inside3(const Vec3& p, double tol = 0) const { return b3_.inside(p, tol); }
  double dist_to_boundary2(const Vec2& p) const { return b2_.project(p); }
  double dist_to_boundary3(const Vec3& p) const { return b3_.project(p); }

  // Distance of p to gamma (0 if empty gamma -> +inf).
  double dist_to_gamma2(const Vec2& p) const;
  double dist_to_gamma3(const Vec3& p) const;

  // Boundary frame at a point within tol_bdry of dM; throws PointNotOnBoundary.
  BoundaryFrame boundary_frame(const Vec3& p) const;
  BoundaryFrame boundary_frame2(const Vec2& p) const;

  // Lower bound of boundary principal curvatures over samples; throws
  // NotUniformlyConvex if any sample <= 0.
  double convexity_modulus() const;

  // Geodesic distance. 2-D: shortest path on the metric grid graph refined by
  // local smoothing; 3-D: straight segment (euclidean metric, convex body).
  double metric_distance(const Vec2& x, const Vec2& y) const;
  double metric_distance3(const Vec3& x, const Vec3& y) const;

  // Upper bound for the metric diameter of the domain.
  double metric_diameter() const;

  std::string to_json() const;

 private:
  void finalize();

  Mode mode_ = Mode::Planar2D;
  Boundary2D b2_;
  Body3D b3_;
  PhiGrid phi_;
  BoundaryConstraint gamma_;
  double diameter_ = 2;

  // Lazy geodesic grid for 2-D metric distances.
  struct GeoGrid;
  mutable std::shared_ptr<const GeoGrid> geo_;
  const GeoGrid& geo() const;
};

}  // namespace minmax
