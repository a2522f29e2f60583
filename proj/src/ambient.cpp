#include "ambient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "json.hpp"

namespace minmax {

using nlohmann::json;

// ---------------------------------------------------------------- PhiGrid

double PhiGrid::eval(const Vec2& p) const {
  if (empty()) return 0.0;
  double fx = (p.x - ox) / h, fy = (p.y - oy) / h;
  fx = std::clamp(fx, 0.0, double(nx - 1));
  fy = std::clamp(fy, 0.0, double(ny - 1));
  int i = std::min(int(fx), nx - 2), j = std::min(int(fy), ny - 2);
  if (nx == 1 || ny == 1) return v[0];
  double u = fx - i, w = fy - j;
  double v00 = v[j * nx + i], v10 = v[j * nx + i + 1];
  double v01 = v[(j + 1) * nx + i], v11 = v[(j + 1) * nx + i + 1];
  return (1 - u) * (1 - w) * v00 + u * (1 - w) * v10 + (1 - u) * w * v01 + u * w * v11;
}

Vec2 PhiGrid::grad(const Vec2& p) const {
  if (empty()) return {0, 0};
  // Gradient of the bilinear interpolant (piecewise constant per cell in each
  // direction); adequate for descent and first-variation terms.
  double fx = (p.x - ox) / h, fy = (p.y - oy) / h;
  fx = std::clamp(fx, 0.0, double(nx - 1));
  fy = std::clamp(fy, 0.0, double(ny - 1));
  int i = std::min(int(fx), nx - 2), j = std::min(int(fy), ny - 2);
  double u = fx - i, w = fy - j;
  double v00 = v[j * nx + i], v10 = v[j * nx + i + 1];
  double v01 = v[(j + 1) * nx + i], v11 = v[(j + 1) * nx + i + 1];
  double gx = ((1 - w) * (v10 - v00) + w * (v11 - v01)) / h;
  double gy = ((1 - u) * (v01 - v00) + u * (v11 - v10)) / h;
  return {gx, gy};
}

PhiGrid PhiGrid::gaussian_bump(double height, Vec2 center, double sigma, double extent, int n) {
  PhiGrid g;
  g.nx = g.ny = n;
  g.h = 2 * extent / (n - 1);
  g.ox = -extent;
  g.oy = -extent;
  g.v.resize(size_t(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double x = g.ox + i * g.h - center.x, y = g.oy + j * g.h - center.y;
      g.v[size_t(j) * n + i] = height * std::exp(-(x * x + y * y) / (2 * sigma * sigma));
    }
  return g;
}

// ------------------------------------------------------------- Boundary2D

Vec2 Boundary2D::point(double t) const {
  t -= std::floor(t);
  switch (kind) {
    case Kind::Circle: {
      double a0 = 2 * kPi * t;
      return {radius * std::cos(a0), radius * std::sin(a0)};
    }
    case Kind::Ellipse: {
      double a0 = 2 * kPi * t;
      return {a * std::cos(a0), b * std::sin(a0)};
    }
    case Kind::Polygon: {
      double total = 0;
      size_t n = poly.size();
      for (size_t i = 0; i < n; ++i) total += norm(poly[(i + 1) % n] - poly[i]);
      double s = t * total;
      for (size_t i = 0; i < n; ++i) {
        double len = norm(poly[(i + 1) % n] - poly[i]);
        if (s <= len || i + 1 == n) {
          double u = len > 0 ? s / len : 0;
          return poly[i] + (poly[(i + 1) % n] - poly[i]) * u;
        }
        s -= len;
      }
      return poly[0];
    }
  }
  return {0, 0};
}

Vec2 Boundary2D::dpoint(double t) const {
  t -= std::floor(t);
  switch (kind) {
    case Kind::Circle: {
      double a0 = 2 * kPi * t;
      return {-2 * kPi * radius * std::sin(a0), 2 * kPi * radius * std::cos(a0)};
    }
    case Kind::Ellipse: {
      double a0 = 2 * kPi * t;
      return {-2 * kPi * a * std::sin(a0), 2 * kPi * b * std::cos(a0)};
    }
    case Kind::Polygon: {
      double total = 0;
      for (size_t i = 0; i < poly.size(); ++i)
        total += norm(poly[(i + 1) % poly.size()] - poly[i]);
      return tangent(t) * total;
    }
  }
  return {0, 0};
}

Vec2 Boundary2D::tangent(double t) const {
  t -= std::floor(t);
  switch (kind) {
    case Kind::Circle: {
      double a0 = 2 * kPi * t;
      return {-std::sin(a0), std::cos(a0)};
    }
    case Kind::Ellipse: {
      double a0 = 2 * kPi * t;
      return normalized(Vec2{-a * std::sin(a0), b * std::cos(a0)});
    }
    case Kind::Polygon: {
      // Tangent of the edge containing t.
      double eps = 1e-9;
      return normalized(point(t + eps) - point(t - eps));
    }
  }
  return {1, 0};
}

double Boundary2D::curvature(double t) const {
  switch (kind) {
    case Kind::Circle:
      return 1.0 / radius;
    case Kind::Ellipse: {
      double a0 = 2 * kPi * t;
      double s = a * std::sin(a0), c = b * std::cos(a0);
      double den = std::pow(s * s + c * c, 1.5);
      return a * b / den;
    }
    case Kind::Polygon: {
      // Turning angle at the nearest vertex over the average adjacent edge.
      size_t n = poly.size();
      Vec2 p = point(t);
      size_t best = 0;
      double bd = std::numeric_limits<double>::max();
      for (size_t i = 0; i < n; ++i) {
        double d = norm(poly[i] - p);
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      Vec2 e0 = poly[best] - poly[(best + n - 1) % n];
      Vec2 e1 = poly[(best + 1) % n] - poly[best];
      double turn = std::atan2(cross(e0, e1), dot(e0, e1));
      double len = 0.5 * (norm(e0) + norm(e1));
      return len > 0 ? turn / len : 0;
    }
  }
  return 0;
}

bool Boundary2D::inside(const Vec2& p, double tol) const {
  switch (kind) {
    case Kind::Circle:
      return norm(p) <= radius + tol;
    case Kind::Ellipse: {
      double f = (p.x / a) * (p.x / a) + (p.y / b) * (p.y / b);
      if (f <= 1) return true;
      // sqrt(f) is 1/min(a,b)-Lipschitz, so this rules out near misses fast.
      if ((std::sqrt(f) - 1) * std::min(a, b) > tol + 1e-15) return false;
      return project(p) <= tol;
    }
    case Kind::Polygon: {
      size_t n = poly.size();
      for (size_t i = 0; i < n; ++i) {
        Vec2 e = poly[(i + 1) % n] - poly[i];
        if (cross(e, p - poly[i]) < -tol * std::max(1.0, norm(e))) return false;
      }
      return true;
    }
  }
  return false;
}

double Boundary2D::project(const Vec2& p, double* t_out) const {
  switch (kind) {
    case Kind::Circle: {
      double r = norm(p);
      if (t_out) *t_out = std::atan2(p.y, p.x) / (2 * kPi);
      return std::abs(r - radius);
    }
    case Kind::Ellipse: {
      // Coarse sampling then a few Newton steps on d/dt |p - c(t)|^2.
      int N = 256;
      double bt = 0, bd = std::numeric_limits<double>::max();
      for (int i = 0; i < N; ++i) {
        double t = double(i) / N;
        double d = norm(p - point(t));
        if (d < bd) {
          bd = d;
          bt = t;
        }
      }
      double t = bt;
      for (int it = 0; it < 30; ++it) {
        double a0 = 2 * kPi * t;
        Vec2 c{a * std::cos(a0), b * std::sin(a0)};
        Vec2 dc{-a * std::sin(a0), b * std::cos(a0)};
        Vec2 ddc{-a * std::cos(a0), -b * std::sin(a0)};
        Vec2 r = c - p;
        double f = dot(r, dc);
        double fp = dot(dc, dc) + dot(r, ddc);
        if (std::abs(fp) < 1e-30) break;
        double step = f / fp / (2 * kPi);
        t -= step;
        if (std::abs(step) < 1e-16) break;
      }
      if (t_out) *t_out = t - std::floor(t);
      return norm(p - point(t));
    }
    case Kind::Polygon: {
      size_t n = poly.size();
      double total = 0;
      std::vector<double> acc(n + 1, 0);
      for (size_t i = 0; i < n; ++i) {
        total += norm(poly[(i + 1) % n] - poly[i]);
        acc[i + 1] = total;
      }
      double bd = std::numeric_limits<double>::max(), bs = 0;
      for (size_t i = 0; i < n; ++i) {
        Vec2 a0 = poly[i], b0 = poly[(i + 1) % n];
        Vec2 ab = b0 - a0;
        double len2 = dot(ab, ab);
        double u = len2 > 0 ? std::clamp(dot(p - a0, ab) / len2, 0.0, 1.0) : 0;
        double d = norm(p - (a0 + ab * u));
        if (d < bd) {
          bd = d;
          bs = (acc[i] + u * std::sqrt(len2)) / total;
        }
      }
      if (t_out) *t_out = bs;
      return bd;
    }
  }
  return 0;
}

double Boundary2D::dist_lower_bound(const Vec2& p) const {
  switch (kind) {
    case Kind::Circle:
      return std::abs(norm(p) - radius);
    case Kind::Ellipse: {
      double f = std::sqrt((p.x / a) * (p.x / a) + (p.y / b) * (p.y / b));
      return std::abs(f - 1) * std::min(a, b);
    }
    case Kind::Polygon: {
      double best = std::numeric_limits<double>::max();
      for (size_t i = 0; i < poly.size(); ++i)
        best = std::min(best, dist_point_segment(p, poly[i], poly[(i + 1) % poly.size()]));
      return best;
    }
  }
  return 0;
}

double Boundary2D::euclid_diameter() const {
  switch (kind) {
    case Kind::Circle:
      return 2 * radius;
    case Kind::Ellipse:
      return 2 * std::max(a, b);
    case Kind::Polygon: {
      double d = 0;
      for (size_t i = 0; i < poly.size(); ++i)
        for (size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, norm(poly[i] - poly[j]));
      return d;
    }
  }
  return 2;
}

// ----------------------------------------------------------------- Body3D

bool Body3D::inside(const Vec3& p, double tol) const {
  double f = (p.x / semi.x) * (p.x / semi.x) + (p.y / semi.y) * (p.y / semi.y) +
             (p.z / semi.z) * (p.z / semi.z);
  if (f <= 1) return true;
  return project(p) <= tol;
}

double Body3D::project(const Vec3& p, Vec3* nearest) const {
  // Nearest point on the ellipsoid: x_i = s_i^2 p_i / (s_i^2 + t), root of
  // g(t) = sum (s_i p_i / (s_i^2+t))^2 - 1, bracketed and bisected.
  double s[3] = {semi.x, semi.y, semi.z};
  double q[3] = {p.x, p.y, p.z};
  auto g = [&](double t) {
    double r = -1;
    for (int i = 0; i < 3; ++i) {
      double d = s[i] * q[i] / (s[i] * s[i] + t);
      r += d * d;
    }
    return r;
  };
  double smin = std::min({s[0], s[1], s[2]});
  double lo = -smin * smin + 1e-14 * smin * smin;
  double f0 = (q[0] / s[0]) * (q[0] / s[0]) + (q[1] / s[1]) * (q[1] / s[1]) +
              (q[2] / s[2]) * (q[2] / s[2]);
  if (f0 < 1e-30) {
    // Center: nearest point lies on the shortest axis.
    Vec3 n{0, 0, 0};
    if (smin == s[0]) n = {smin, 0, 0};
    else if (smin == s[1]) n = {0, smin, 0};
    else n = {0, 0, smin};
    if (nearest) *nearest = n;
    return smin;
  }
  double hi = std::max(norm(p), smin) * (std::max({s[0], s[1], s[2]}) + norm(p));
  while (g(hi) > 0) hi *= 2;
  if (g(lo) < 0) lo = -smin * smin * 0.999999;  // deep interior guard
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-16 * (1 + std::abs(hi))) break;
  }
  double t = 0.5 * (lo + hi);
  Vec3 x{s[0] * s[0] * q[0] / (s[0] * s[0] + t), s[1] * s[1] * q[1] / (s[1] * s[1] + t),
         s[2] * s[2] * q[2] / (s[2] * s[2] + t)};
  if (nearest) *nearest = x;
  return norm(p - x);
}

Vec3 Body3D::outward_normal(const Vec3& p) const {
  Vec3 g{2 * p.x / (semi.x * semi.x), 2 * p.y / (semi.y * semi.y), 2 * p.z / (semi.z * semi.z)};
  return normalized(g);
}

void Body3D::principal_curvatures(const Vec3& p, double* k1, double* k2) const {
  Vec3 grad{2 * p.x / (semi.x * semi.x), 2 * p.y / (semi.y * semi.y),
            2 * p.z / (semi.z * semi.z)};
  double gn = norm(grad);
  Vec3 n = grad / gn;
  // Orthonormal tangent basis.
  Vec3 ref = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 t1 = normalized(cross(n, ref));
  Vec3 t2 = cross(n, t1);
  // Hessian of the level function F = sum x_i^2/s_i^2 is 2 diag(1/s_i^2).
  auto H = [&](const Vec3& u) {
    return Vec3{2 * u.x / (semi.x * semi.x), 2 * u.y / (semi.y * semi.y),
                2 * u.z / (semi.z * semi.z)};
  };
  double a11 = dot(t1, H(t1)) / gn, a12 = dot(t1, H(t2)) / gn, a22 = dot(t2, H(t2)) / gn;
  double tr = a11 + a22, det = a11 * a22 - a12 * a12;
  double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  double l1 = tr / 2 - disc, l2 = tr / 2 + disc;
  *k1 = l1;
  *k2 = l2;
}

double Body3D::euclid_diameter() const { return 2 * std::max({semi.x, semi.y, semi.z}); }

// ------------------------------------------------------ BoundaryConstraint

double BoundaryConstraint::separation() const {
  if (component_count() < 2) return 0.0;  // D = 0 convention: single component
  double best = std::numeric_limits<double>::max();
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) best = std::min(best, norm(points[i] - points[j]));
  for (size_t i = 0; i < rings.size(); ++i)
    for (size_t j = i + 1; j < rings.size(); ++j) {
      double dr = rings[i].r - rings[j].r, dz = rings[i].z - rings[j].z;
      best = std::min(best, std::sqrt(dr * dr + dz * dz));
    }
  return best;
}

// ------------------------------------------------------------ AmbientDomain

AmbientDomain AmbientDomain::disk(double radius, PhiGrid phi) {
  AmbientDomain d;
  d.mode_ = Mode::Planar2D;
  d.b2_.kind = Boundary2D::Kind::Circle;
  d.b2_.radius = radius;
  d.phi_ = std::move(phi);
  d.finalize();
  return d;
}

AmbientDomain AmbientDomain::ellipse(double a, double b, PhiGrid phi) {
  AmbientDomain d;
  d.mode_ = Mode::Planar2D;
  d.b2_.kind = Boundary2D::Kind::Ellipse;
  d.b2_.a = a;
  d.b2_.b = b;
  d.phi_ = std::move(phi);
  d.finalize();
  return d;
}

AmbientDomain AmbientDomain::ball(Vec3 semi) {
  AmbientDomain d;
  d.mode_ = Mode::Body3D;
  d.b3_.semi = semi;
  d.finalize();
  return d;
}

void AmbientDomain::finalize() {
  diameter_ = mode_ == Mode::Planar2D ? b2_.euclid_diameter() : b3_.euclid_diameter();
}

void AmbientDomain::set_gamma(BoundaryConstraint g) {
  double tol = tol_bdry();
  for (auto& p : g.points) {
    double t;
    double d = b2_.project(p, &t);
    if (d > 1e4 * tol)
      throw Error(ErrorCode::Config, "gamma point not on the domain boundary");
    p = b2_.point(t);  // snap exactly
  }
  gamma_ = std::move(g);
}

double AmbientDomain::dist_to_gamma2(const Vec2& p) const {
  double best = std::numeric_limits<double>::max();
  for (const auto& q : gamma_.points) best = std::min(best, norm(p - q));
  return best;
}

double AmbientDomain::dist_to_gamma3(const Vec3& p) const {
  double best = std::numeric_limits<double>::max();
  for (const auto& r : gamma_.rings) {
    double rp = std::sqrt(p.x * p.x + p.y * p.y);
    double dr = rp - r.r, dz = p.z - r.z;
    best = std::min(best, std::sqrt(dr * dr + dz * dz));
  }
  return best;
}

BoundaryFrame AmbientDomain::boundary_frame2(const Vec2& p) const {
  double t;
  double d = b2_.project(p, &t);
  if (d > tol_bdry())
    throw Error(ErrorCode::PointNotOnBoundary, "dist to boundary " + std::to_string(d));
  Vec2 q = b2_.point(t);
  Vec2 tan = b2_.tangent(t);
  Vec2 nu_e = perp(tan) * -1.0;  // CCW boundary: inward = -perp(tangent)
  // Make sure nu points inside.
  if (!b2_.inside(q + nu_e * (1e-6 * diameter_), tol_bdry())) nu_e = nu_e * -1.0;
  double ph = phi(q);
  double ke = b2_.curvature(t);
  Vec2 gp = grad_phi(q);
  // Conformal geodesic curvature, inward-normal convention: convex > 0.
  double kg = std::exp(-ph) * (ke + dot(gp, nu_e * -1.0));
  BoundaryFrame f;
  double scale = std::exp(-ph);  // metric-unit vectors
  f.nu = {nu_e.x * scale, nu_e.y * scale, 0};
  f.tangent1 = {tan.x * scale, tan.y * scale, 0};
  f.tangent2 = {0, 0, 0};
  f.k1 = kg;
  f.k2 = kg;
  return f;
}

BoundaryFrame AmbientDomain::boundary_frame(const Vec3& p) const {
  if (mode_ == Mode::Planar2D) return boundary_frame2({p.x, p.y});
  Vec3 q;
  double d = b3_.project(p, &q);
  if (d > tol_bdry())
    throw Error(ErrorCode::PointNotOnBoundary, "dist to boundary " + std::to_string(d));
  Vec3 n_out = b3_.outward_normal(q);
  BoundaryFrame f;
  f.nu = n_out * -1.0;
  Vec3 ref = std::abs(n_out.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  f.tangent1 = normalized(cross(n_out, ref));
  f.tangent2 = cross(n_out, f.tangent1);
  b3_.principal_curvatures(q, &f.k1, &f.k2);
  return f;
}

double AmbientDomain::convexity_modulus() const {
  double xi = std::numeric_limits<double>::max();
  if (mode_ == Mode::Planar2D) {
    int N = 512;
    for (int i = 0; i < N; ++i) {
      double t = double(i) / N;
      Vec2 q = b2_.point(t);
      BoundaryFrame f = boundary_frame2(q);
      xi = std::min(xi, f.k1);
    }
  } else {
    int N = 128;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double th = kPi * (i + 0.5) / N, ps = 2 * kPi * j / N;
        Vec3 q{b3_.semi.x * std::sin(th) * std::cos(ps), b3_.semi.y * std::sin(th) * std::sin(ps),
               b3_.semi.z * std::cos(th)};
        double k1, k2;
        b3_.principal_curvatures(q, &k1, &k2);
        xi = std::min(xi, std::min(k1, k2));
      }
  }
  if (!(xi > 0))
    throw Error(ErrorCode::NotUniformlyConvex, "min principal curvature " + std::to_string(xi));
  return xi;
}

// ------------------------------------------------ 2-D geodesic distances

struct AmbientDomain::GeoGrid {
  int n = 0;
  double ox = 0, oy = 0, h = 1;
  std::vector<int> node_id;   // -1 outside
  std::vector<Vec2> nodes;
  std::vector<std::vector<std::pair<int, double>>> adj;
  bool flat = true;
};

const AmbientDomain::GeoGrid& AmbientDomain::geo() const {
  if (geo_) return *geo_;
  auto g = std::make_shared<GeoGrid>();
  int n = 121;
  double R = 0.5 * diameter_ * 1.02;
  g->n = n;
  g->h = 2 * R / (n - 1);
  g->ox = -R;
  g->oy = -R;
  g->flat = phi_.empty();
  g->node_id.assign(size_t(n) * n, -1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Vec2 p{g->ox + i * g->h, g->oy + j * g->h};
      if (b2_.inside(p, 0)) {
        g->node_id[size_t(j) * n + i] = int(g->nodes.size());
        g->nodes.push_back(p);
      }
    }
  g->adj.resize(g->nodes.size());
  const int offs[8][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1}, {1, -2}};
  auto wlen = [&](const Vec2& a, const Vec2& b) {
    Vec2 m = (a + b) * 0.5;
    double w = (std::exp(phi(a)) + 4 * std::exp(phi(m)) + std::exp(phi(b))) / 6.0;
    return w * norm(b - a);
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int u = g->node_id[size_t(j) * n + i];
      if (u < 0) continue;
      for (auto& o : offs) {
        int i2 = i + o[0], j2 = j + o[1];
        if (i2 < 0 || j2 < 0 || i2 >= n || j2 >= n) continue;
        int v = g->node_id[size_t(j2) * n + i2];
        if (v < 0) continue;
        double w = wlen(g->nodes[u], g->nodes[v]);
        g->adj[u].push_back({v, w});
        g->adj[v].push_back({u, w});
      }
    }
  geo_ = g;
  return *geo_;
}

namespace {

// Local curve shortening used to refine graph distances: projected gradient
// descent on int e^phi ds with fixed endpoints, vertices kept inside.
double refine_path_length(const AmbientDomain& dom, std::vector<Vec2> path) {
  auto curve_len = [&](const std::vector<Vec2>& c) {
    double L = 0;
    for (size_t i = 0; i + 1 < c.size(); ++i) {
      Vec2 m = (c[i] + c[i + 1]) * 0.5;
      L += dom.conf(m) * norm(c[i + 1] - c[i]);
    }
    return L;
  };
  // Resample to uniform count.
  int N = 65;
  std::vector<double> acc(path.size(), 0);
  for (size_t i = 1; i < path.size(); ++i) acc[i] = acc[i - 1] + norm(path[i] - path[i - 1]);
  double total = acc.back();
  std::vector<Vec2> c(N);
  if (total <= 0) return 0.0;
  size_t k = 0;
  for (int i = 0; i < N; ++i) {
    double s = total * i / (N - 1);
    while (k + 1 < acc.size() && acc[k + 1] < s) ++k;
    double seg = acc[k + 1] - acc[k];
    double u = seg > 0 ? (s - acc[k]) / seg : 0;
    c[i] = path[k] + (path[std::min(k + 1, path.size() - 1)] - path[k]) * u;
  }
  double step = 0.25 * total / N;
  double L = curve_len(c);
  for (int it = 0; it < 400; ++it) {
    std::vector<Vec2> grad(N, Vec2{0, 0});
    for (int i = 0; i + 1 < N; ++i) {
      Vec2 d = c[i + 1] - c[i];
      double len = norm(d);
      if (len < 1e-15) continue;
      Vec2 m = (c[i] + c[i + 1]) * 0.5;
      double w = dom.conf(m);
      Vec2 u = d / len;
      Vec2 gphi = dom.grad_phi(m) * (0.5 * w * len);
      grad[i] += u * -w + gphi;
      grad[i + 1] += u * w + gphi;
    }
    double gmax = 0;
    for (int i = 1; i + 1 < N; ++i) gmax = std::max(gmax, norm(grad[i]));
    if (gmax < 1e-12) break;
    double tau = step;
    bool ok = false;
    for (int bt = 0; bt < 20; ++bt) {
      std::vector<Vec2> cand = c;
      bool insideok = true;
      for (int i = 1; i + 1 < N; ++i) {
        cand[i] = c[i] - grad[i] * tau;
        if (!dom.inside2(cand[i], dom.tol_bdry())) {
          insideok = false;
          break;
        }
      }
      if (insideok) {
        double L2 = curve_len(cand);
        if (L2 < L) {
          c = std::move(cand);
          L = L2;
          ok = true;
          break;
        }
      }
      tau *= 0.5;
    }
    if (!ok) break;
  }
  return L;
}

}  // namespace

double AmbientDomain::metric_distance(const Vec2& x, const Vec2& y) const {
  if (mode_ != Mode::Planar2D) throw Error(ErrorCode::Config, "metric_distance: planar domains");
  if (!inside2(x, tol_bdry()) || !inside2(y, tol_bdry()))
    throw Error(ErrorCode::PointOutsideDomain, "metric_distance endpoint outside domain");
  // Canonical order keeps the result exactly symmetric.
  Vec2 a = x, b = y;
  if (std::make_pair(b.x, b.y) < std::make_pair(a.x, a.y)) std::swap(a, b);
  if (phi_.empty()) return norm(b - a);  // flat convex domain: segment inside
  const GeoGrid& g = geo();
  // Attach endpoints to nearby nodes.
  auto near_nodes = [&](const Vec2& p) {
    std::vector<std::pair<int, double>> out;
    int i0 = int(std::floor((p.x - g.ox) / g.h)), j0 = int(std::floor((p.y - g.oy) / g.h));
    for (int dj = -2; dj <= 3; ++dj)
      for (int di = -2; di <= 3; ++di) {
        int i = i0 + di, j = j0 + dj;
        if (i < 0 || j < 0 || i >= g.n || j >= g.n) continue;
        int id = g.node_id[size_t(j) * g.n + i];
        if (id < 0) continue;
        Vec2 q = g.nodes[id];
        Vec2 m = (p + q) * 0.5;
        double w = (conf(p) + 4 * conf(m) + conf(q)) / 6.0 * norm(q - p);
        out.push_back({id, w});
      }
    return out;
  };
  auto sa = near_nodes(a), sb = near_nodes(b);
  if (sa.empty() || sb.empty()) return norm(b - a) * conf((a + b) * 0.5);
  size_t n = g.nodes.size();
  std::vector<double> dist(n, std::numeric_limits<double>::max());
  std::vector<int> prev(n, -1);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  for (auto& [id, w] : sa) {
    if (w < dist[id]) {
      dist[id] = w;
      prev[id] = -1;
      pq.push({w, id});
    }
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto& [v, w] : g.adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        prev[v] = u;
        pq.push({dist[v], v});
      }
    }
  }
  double best = std::numeric_limits<double>::max();
  int bid = -1;
  for (auto& [id, w] : sb) {
    if (dist[id] + w < best) {
      best = dist[id] + w;
      bid = id;
    }
  }
  if (bid < 0) return norm(b - a) * conf((a + b) * 0.5);
  std::vector<Vec2> path;
  path.push_back(b);
  for (int u = bid; u >= 0; u = prev[u]) path.push_back(g.nodes[u]);
  path.push_back(a);
  std::reverse(path.begin(), path.end());
  double refined = refine_path_length(*this, path);
  return std::min(best, refined);
}

double AmbientDomain::metric_distance3(const Vec3& x, const Vec3& y) const {
  if (!inside3(x, tol_bdry()) || !inside3(y, tol_bdry()))
    throw Error(ErrorCode::PointOutsideDomain, "metric_distance endpoint outside domain");
  return norm(y - x);
}

double AmbientDomain::metric_diameter() const {
  if (mode_ == Mode::Body3D) return b3_.euclid_diameter();
  double phimax = 0;
  for (double t : phi_.v) phimax = std::max(phimax, t);
  return b2_.euclid_diameter() * std::exp(phimax);
}

// ----------------------------------------------------------------- JSON

AmbientDomain AmbientDomain::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Config, std::string("domain json: ") + e.what());
  }
  AmbientDomain d;
  std::string mode = j.value("mode", "planar2d");
  if (mode == "planar2d") {
    d.mode_ = Mode::Planar2D;
    auto bj = j.value("boundary", json{{"kind", "circle"}, {"radius", 1.0}});
    std::string kind = bj.value("kind", "circle");
    if (kind == "circle") {
      d.b2_.kind = Boundary2D::Kind::Circle;
      d.b2_.radius = bj.value("radius", 1.0);
    } else if (kind == "ellipse") {
      d.b2_.kind = Boundary2D::Kind::Ellipse;
      d.b2_.a = bj.value("a", 1.0);
      d.b2_.b = bj.value("b", 1.0);
    } else if (kind == "polygon") {
      d.b2_.kind = Boundary2D::Kind::Polygon;
      for (auto& p : bj.at("points")) d.b2_.poly.push_back({p.at(0), p.at(1)});
      if (d.b2_.poly.size() < 3) throw Error(ErrorCode::Config, "polygon needs >= 3 points");
    } else {
      throw Error(ErrorCode::Config, "unknown 2-D boundary kind " + kind);
    }
    if (j.contains("phi_grid")) {
      auto& pg = j["phi_grid"];
      if (pg.contains("gaussian_bump")) {
        auto& gb = pg["gaussian_bump"];
        double height = gb.value("height", 1.0);
        double sigma = gb.value("sigma", 0.25);
        Vec2 c{0, 0};
        if (gb.contains("center")) c = {gb["center"][0], gb["center"][1]};
        double extent = gb.value("extent", 0.55 * d.b2_.euclid_diameter());
        int n = gb.value("n", 201);
        d.phi_ = PhiGrid::gaussian_bump(height, c, sigma, extent, n);
      } else {
        d.phi_.nx = pg.at("nx");
        d.phi_.ny = pg.at("ny");
        d.phi_.ox = pg.at("origin")[0];
        d.phi_.oy = pg.at("origin")[1];
        d.phi_.h = pg.at("spacing");
        d.phi_.v = pg.at("values").get<std::vector<double>>();
        if (int(d.phi_.v.size()) != d.phi_.nx * d.phi_.ny)
          throw Error(ErrorCode::Config, "phi_grid values size mismatch");
      }
    }
  } else if (mode == "body3d") {
    d.mode_ = Mode::Body3D;
    if (j.contains("semi_axes")) {
      auto& s = j["semi_axes"];
      d.b3_.semi = {s[0], s[1], s[2]};
    } else if (j.contains("boundary")) {
      auto& bj = j["boundary"];
      if (bj.value("kind", "sphere") == "sphere") {
        double r = bj.value("radius", 1.0);
        d.b3_.semi = {r, r, r};
      } else {
        auto& s = bj.at("semi_axes");
        d.b3_.semi = {s[0], s[1], s[2]};
      }
    }
  } else {
    throw Error(ErrorCode::Config, "unknown mode " + mode);
  }
  d.finalize();
  if (j.contains("gamma") && !j["gamma"].is_null()) {
    BoundaryConstraint g;
    auto& gj = j["gamma"];
    if (gj.contains("points"))
      for (auto& p : gj["points"]) g.points.push_back({p.at(0), p.at(1)});
    if (gj.contains("rings"))
      for (auto& r : gj["rings"]) {
        GammaRing ring;
        ring.z = r.at("z");
        double sx = d.b3_.semi.x, sz = d.b3_.semi.z;
        if (std::abs(d.b3_.semi.x - d.b3_.semi.y) > 1e-12)
          throw Error(ErrorCode::Config, "latitude rings require semi.x == semi.y");
        double q = 1 - (ring.z * ring.z) / (sz * sz);
        if (q <= 0) throw Error(ErrorCode::Config, "ring z outside body");
        ring.r = sx * std::sqrt(q);
        g.rings.push_back(ring);
      }
    d.set_gamma(std::move(g));
  }
  return d;
}

std::string AmbientDomain::to_json() const {
  json j;
  if (mode_ == Mode::Planar2D) {
    j["mode"] = "planar2d";
    json bj;
    switch (b2_.kind) {
      case Boundary2D::Kind::Circle:
        bj = {{"kind", "circle"}, {"radius", b2_.radius}};
        break;
      case Boundary2D::Kind::Ellipse:
        bj = {{"kind", "ellipse"}, {"a", b2_.a}, {"b", b2_.b}};
        break;
      case Boundary2D::Kind::Polygon: {
        bj["kind"] = "polygon";
        json pts = json::array();
        for (auto& p : b2_.poly) pts.push_back({p.x, p.y});
        bj["points"] = pts;
        break;
      }
    }
    j["boundary"] = bj;
    if (!phi_.empty()) {
      j["phi_grid"] = {{"nx", phi_.nx},
                       {"ny", phi_.ny},
                       {"origin", {phi_.ox, phi_.oy}},
                       {"spacing", phi_.h},
                       {"values", phi_.v}};
    }
  } else {
    j["mode"] = "body3d";
    j["semi_axes"] = {b3_.semi.x, b3_.semi.y, b3_.semi.z};
  }
  json gj;
  if (!gamma_.points.empty()) {
    json pts = json::array();
    for (auto& p : gamma_.points) pts.push_back({p.x, p.y});
    gj["points"] = pts;
  }
  if (!gamma_.rings.empty()) {
    json rs = json::array();
    for (auto& r : gamma_.rings) rs.push_back({{"z", r.z}});
    gj["rings"] = rs;
  }
  j["gamma"] = gj;
  return j.dump();
}

}  // namespace minmax
