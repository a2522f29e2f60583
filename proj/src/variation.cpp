#include "variation.hpp"

#include <cmath>

namespace minmax {

const char* field_class_name(VectorFieldClass c) {
  switch (c) {
    case VectorFieldClass::VanishOnBoundary: return "vanish_on_boundary";
    case VectorFieldClass::TangentToBoundary: return "tangent_to_boundary";
    case VectorFieldClass::InwardVanishOnGamma: return "inward_vanish_on_gamma";
  }
  return "";
}

VectorFieldClass field_class_for(BC bc) {
  switch (bc) {
    case BC::ConstrainedToGamma: return VectorFieldClass::InwardVanishOnGamma;
    case BC::FreeBoundary: return VectorFieldClass::TangentToBoundary;
    case BC::Closed:
    case BC::Trivial: return VectorFieldClass::VanishOnBoundary;
  }
  return VectorFieldClass::VanishOnBoundary;
}

std::vector<double> mass_gradient(const AmbientDomain& dom, const Slice& s) {
  std::vector<double> g(s.x.size(), 0.0);
  double mult = s.multiplicity;
  if (s.dim == 2) {
    size_t n = s.nv();
    size_t segs = s.closed_polyline ? n : (n ? n - 1 : 0);
    for (size_t i = 0; i < segs; ++i) {
      size_t j = (i + 1) % n;
      Vec2 a = s.p2(i), b = s.p2(j);
      Vec2 d = b - a;
      double len = norm(d);
      if (len < 1e-300) continue;
      Vec2 mid = (a + b) * 0.5;
      double w = dom.conf(mid);
      Vec2 u = d / len;
      Vec2 gp = dom.grad_phi(mid) * (0.5 * w * len);
      Vec2 ga = u * (-w) + gp;
      Vec2 gb = u * w + gp;
      g[2 * i] += mult * ga.x;
      g[2 * i + 1] += mult * ga.y;
      g[2 * j] += mult * gb.x;
      g[2 * j + 1] += mult * gb.y;
    }
  } else {
    for (const auto& f : s.faces) {
      Vec3 a = s.p3(f[0]), b = s.p3(f[1]), c = s.p3(f[2]);
      Vec3 nrm = cross(b - a, c - a);
      double nn = norm(nrm);
      if (nn < 1e-14) continue;  // pinched face: no well-defined normal
      Vec3 nh = nrm / nn;
      Vec3 ga = cross(nh, c - b) * 0.5;
      Vec3 gb = cross(nh, a - c) * 0.5;
      Vec3 gc = cross(nh, b - a) * 0.5;
      const int idx[3] = {f[0], f[1], f[2]};
      const Vec3 gs[3] = {ga, gb, gc};
      for (int k = 0; k < 3; ++k) {
        g[3 * idx[k]] += mult * gs[k].x;
        g[3 * idx[k] + 1] += mult * gs[k].y;
        g[3 * idx[k] + 2] += mult * gs[k].z;
      }
    }
  }
  return g;
}

Vec2 inward_normal2(const AmbientDomain& dom, const Vec2& p) {
  double t;
  dom.boundary2d().project(p, &t);
  Vec2 tan = dom.boundary2d().tangent(t);
  Vec2 nu = perp(tan) * -1.0;
  Vec2 q = dom.boundary2d().point(t);
  if (!dom.inside2(q + nu * (1e-6 * dom.diameter()), dom.tol_bdry())) nu = nu * -1.0;
  return nu;
}

Vec3 inward_normal3(const AmbientDomain& dom, const Vec3& p) {
  Vec3 q;
  dom.body3d().project(p, &q);
  return dom.body3d().outward_normal(q) * -1.0;
}

double first_variation(const AmbientDomain& dom, const Slice& s, const std::vector<double>& field,
                       VectorFieldClass cls) {
  if (field.size() != s.x.size())
    throw Error(ErrorCode::ClassViolation, "field size mismatch");
  VertexClass vc = classify_vertices(dom, s);
  double scale = dom.diameter();
  double tol = 1e-7 * scale;
  for (size_t i = 0; i < s.nv(); ++i) {
    if (!vc.on_bdry[i]) continue;
    if (s.dim == 2) {
      Vec2 f{field[2 * i], field[2 * i + 1]};
      Vec2 nu = inward_normal2(dom, s.p2(i));
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          if (norm(f) > tol) throw Error(ErrorCode::ClassViolation, "field must vanish on dM");
          break;
        case VectorFieldClass::TangentToBoundary:
          if (std::abs(dot(f, nu)) > tol)
            throw Error(ErrorCode::ClassViolation, "field not tangent to dM");
          break;
        case VectorFieldClass::InwardVanishOnGamma:
          if (vc.on_gamma[i]) {
            if (norm(f) > tol) throw Error(ErrorCode::ClassViolation, "field must vanish on gamma");
          } else if (dot(f, nu) < -tol) {
            throw Error(ErrorCode::ClassViolation, "field not inward at dM");
          }
          break;
      }
    } else {
      Vec3 f{field[3 * i], field[3 * i + 1], field[3 * i + 2]};
      Vec3 nu = inward_normal3(dom, s.p3(i));
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          if (norm(f) > tol) throw Error(ErrorCode::ClassViolation, "field must vanish on dM");
          break;
        case VectorFieldClass::TangentToBoundary:
          if (std::abs(dot(f, nu)) > tol)
            throw Error(ErrorCode::ClassViolation, "field not tangent to dM");
          break;
        case VectorFieldClass::InwardVanishOnGamma:
          if (vc.on_gamma[i]) {
            if (norm(f) > tol) throw Error(ErrorCode::ClassViolation, "field must vanish on gamma");
          } else if (dot(f, nu) < -tol) {
            throw Error(ErrorCode::ClassViolation, "field not inward at dM");
          }
          break;
      }
    }
  }
  std::vector<double> g = mass_gradient(dom, s);
  double dv = 0;
  for (size_t i = 0; i < g.size(); ++i) dv += g[i] * field[i];
  return dv;
}

void project_field(const AmbientDomain& dom, const Slice& s, const VertexClass& vc,
                   VectorFieldClass cls, std::vector<double>& field, bool as_descent) {
  for (size_t i = 0; i < s.nv(); ++i) {
    if (!vc.on_bdry[i]) continue;
    if (s.dim == 2) {
      Vec2 f{field[2 * i], field[2 * i + 1]};
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          f = {0, 0};
          break;
        case VectorFieldClass::TangentToBoundary: {
          Vec2 nu = inward_normal2(dom, s.p2(i));
          f = f - nu * dot(f, nu);
          break;
        }
        case VectorFieldClass::InwardVanishOnGamma: {
          if (vc.on_gamma[i]) {
            f = {0, 0};
          } else {
            Vec2 nu = inward_normal2(dom, s.p2(i));
            double fn = dot(f, nu);
            // Admissible motions point inward; clip the disallowed part.
            if (as_descent && fn < 0) f = f - nu * fn;
          }
          break;
        }
      }
      field[2 * i] = f.x;
      field[2 * i + 1] = f.y;
    } else {
      Vec3 f{field[3 * i], field[3 * i + 1], field[3 * i + 2]};
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          f = {0, 0, 0};
          break;
        case VectorFieldClass::TangentToBoundary: {
          Vec3 nu = inward_normal3(dom, s.p3(i));
          f = f - nu * dot(f, nu);
          break;
        }
        case VectorFieldClass::InwardVanishOnGamma: {
          if (vc.on_gamma[i]) {
            f = {0, 0, 0};
          } else {
            Vec3 nu = inward_normal3(dom, s.p3(i));
            double fn = dot(f, nu);
            if (as_descent && fn < 0) f = f - nu * fn;
          }
          break;
        }
      }
      field[3 * i] = f.x;
      field[3 * i + 1] = f.y;
      field[3 * i + 2] = f.z;
    }
  }
}

double stationarity_residual(const AmbientDomain& dom, const Slice& s, VectorFieldClass cls) {
  std::vector<double> g = mass_gradient(dom, s);
  VertexClass vc = classify_vertices(dom, s);
  double r2 = 0;
  for (size_t i = 0; i < s.nv(); ++i) {
    if (s.dim == 2) {
      Vec2 gi{g[2 * i], g[2 * i + 1]};
      if (!vc.on_bdry[i]) {
        r2 += dot(gi, gi);
        continue;
      }
      Vec2 nu = inward_normal2(dom, s.p2(i));
      double gn = dot(gi, nu);
      Vec2 gt = gi - nu * gn;
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          break;  // no admissible motion here
        case VectorFieldClass::TangentToBoundary:
          r2 += dot(gt, gt);
          break;
        case VectorFieldClass::InwardVanishOnGamma:
          if (vc.on_gamma[i]) break;
          // Stationarity needs dV(chi) >= 0 for inward chi: tangential part
          // must vanish and the inward derivative must be >= 0.
          r2 += dot(gt, gt);
          if (gn < 0) r2 += gn * gn;
          break;
      }
    } else {
      Vec3 gi{g[3 * i], g[3 * i + 1], g[3 * i + 2]};
      if (!vc.on_bdry[i]) {
        r2 += dot(gi, gi);
        continue;
      }
      Vec3 nu = inward_normal3(dom, s.p3(i));
      double gn = dot(gi, nu);
      Vec3 gt = gi - nu * gn;
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          break;
        case VectorFieldClass::TangentToBoundary:
          r2 += dot(gt, gt);
          break;
        case VectorFieldClass::InwardVanishOnGamma:
          if (vc.on_gamma[i]) break;
          r2 += dot(gt, gt);
          if (gn < 0) r2 += gn * gn;
          break;
      }
    }
  }
  return std::sqrt(r2);
}

}  // namespace minmax
