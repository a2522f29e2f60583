#include "solve.hpp"

#include <cmath>
#include <limits>

namespace minmax {

SliceProblem::SliceProblem(const AmbientDomain& dom, const Slice& base, VectorFieldClass cls,
                           std::vector<uint8_t> movable)
    : dom_(&dom), base_(base), cls_(cls) {
  VertexClass vc = classify_vertices(dom, base);
  size_t n = base.nv();
  if (movable.empty()) movable.assign(n, 1);
  entries_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Entry e;
    if (!movable[i]) {
      e.kind = VKind::Fixed;
    } else if (vc.on_bdry[i]) {
      switch (cls) {
        case VectorFieldClass::VanishOnBoundary:
          e.kind = VKind::Fixed;
          break;
        case VectorFieldClass::InwardVanishOnGamma:
          if (vc.on_gamma[i]) {
            e.kind = VKind::Fixed;
          } else {
            // One-sided motions; feasibility handles the inequality.
            e.kind = VKind::Full;
          }
          break;
        case VectorFieldClass::TangentToBoundary:
          if (base.dim == 2) {
            e.kind = VKind::BdryParam2D;
            dom.boundary2d().project(base.p2(i), &e.bparam);
          } else {
            e.kind = VKind::BdryTangent3D;
            Vec3 q;
            dom.body3d().project(base.p3(i), &q);
            e.anchor = q;
            Vec3 nrm = dom.body3d().outward_normal(q);
            Vec3 ref = std::abs(nrm.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            e.fu = normalized(cross(nrm, ref));
            e.fv = cross(nrm, e.fu);
          }
          break;
      }
    } else {
      e.kind = VKind::Full;
    }
    if (e.kind == VKind::Full) {
      e.z_off = n_z_;
      n_z_ += base.dim;
    } else if (e.kind == VKind::BdryParam2D) {
      e.z_off = n_z_;
      n_z_ += 1;
    } else if (e.kind == VKind::BdryTangent3D) {
      e.z_off = n_z_;
      n_z_ += 2;
    }
    entries_[i] = e;
  }
}

std::vector<double> SliceProblem::pack() const {
  std::vector<double> z(n_z_, 0.0);
  for (size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    switch (e.kind) {
      case VKind::Fixed:
        break;
      case VKind::Full:
        for (int d = 0; d < base_.dim; ++d) z[e.z_off + d] = base_.x[base_.dim * i + d];
        break;
      case VKind::BdryParam2D:
        z[e.z_off] = e.bparam;
        break;
      case VKind::BdryTangent3D:
        z[e.z_off] = 0;
        z[e.z_off + 1] = 0;
        break;
    }
  }
  return z;
}

Slice SliceProblem::unpack(const std::vector<double>& z) const {
  Slice s = base_;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    switch (e.kind) {
      case VKind::Fixed:
        break;
      case VKind::Full:
        for (int d = 0; d < base_.dim; ++d) s.x[base_.dim * i + d] = z[e.z_off + d];
        break;
      case VKind::BdryParam2D: {
        Vec2 p = dom_->boundary2d().point(z[e.z_off]);
        s.set2(i, p);
        break;
      }
      case VKind::BdryTangent3D: {
        Vec3 p = e.anchor + e.fu * z[e.z_off] + e.fv * z[e.z_off + 1];
        Vec3 q;
        dom_->body3d().project(p, &q);
        s.set3(i, q);
        break;
      }
    }
  }
  return s;
}

double SliceProblem::eval(const std::vector<double>& z, std::vector<double>* grad) const {
  Slice s = unpack(z);
  double tol = dom_->tol_bdry();
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].kind != VKind::Full) continue;
    bool in = s.dim == 2 ? dom_->inside2(s.p2(i), tol) : dom_->inside3(s.p3(i), tol);
    if (!in) return std::numeric_limits<double>::infinity();
  }
  double m = slice_mass(*dom_, s);
  if (grad) {
    grad->assign(n_z_, 0.0);
    std::vector<double> g = mass_gradient(*dom_, s);
    for (size_t i = 0; i < entries_.size(); ++i) {
      const Entry& e = entries_[i];
      switch (e.kind) {
        case VKind::Fixed:
          break;
        case VKind::Full:
          for (int d = 0; d < base_.dim; ++d) (*grad)[e.z_off + d] = g[base_.dim * i + d];
          break;
        case VKind::BdryParam2D: {
          Vec2 dp = dom_->boundary2d().dpoint(z[e.z_off]);
          Vec2 gi{g[2 * i], g[2 * i + 1]};
          (*grad)[e.z_off] = dot(gi, dp);
          break;
        }
        case VKind::BdryTangent3D: {
          Vec3 gi{g[3 * i], g[3 * i + 1], g[3 * i + 2]};
          Vec3 nrm = dom_->body3d().outward_normal(s.p3(i));
          Vec3 gt = gi - nrm * dot(gi, nrm);
          (*grad)[e.z_off] = dot(gt, e.fu);
          (*grad)[e.z_off + 1] = dot(gt, e.fv);
          break;
        }
      }
    }
  }
  return m;
}

void SliceProblem::reanchor(const Slice& current) {
  base_ = current;
  for (size_t i = 0; i < entries_.size(); ++i) {
    Entry& e = entries_[i];
    if (e.kind == VKind::BdryParam2D) {
      dom_->boundary2d().project(current.p2(i), &e.bparam);
    } else if (e.kind == VKind::BdryTangent3D) {
      Vec3 q;
      dom_->body3d().project(current.p3(i), &q);
      e.anchor = q;
      Vec3 nrm = dom_->body3d().outward_normal(q);
      Vec3 ref = std::abs(nrm.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      e.fu = normalized(cross(nrm, ref));
      e.fv = cross(nrm, e.fu);
    }
  }
}

LbfgsResult lbfgs_minimize(const SliceProblem& prob, std::vector<double>& z,
                           const LbfgsOptions& opts) {
  LbfgsResult res;
  int n = prob.dofs();
  if (n == 0) {
    res.final_value = prob.eval(z, nullptr);
    res.converged = true;
    return res;
  }
  std::vector<double> g(n), gn(n);
  double f = prob.eval(z, &g);
  std::vector<std::vector<double>> S, Y;
  std::vector<double> rho;
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
  };
  for (int it = 0; it < opts.max_iters; ++it) {
    double gl = norm2(g);
    res.grad_norm = gl;
    if (gl <= opts.gtol) {
      res.converged = true;
      break;
    }
    // Two-loop recursion.
    std::vector<double> q = g;
    int m = int(S.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      double a = 0;
      for (int k = 0; k < n; ++k) a += S[i][k] * q[k];
      a *= rho[i];
      alpha[i] = a;
      for (int k = 0; k < n; ++k) q[k] -= a * Y[i][k];
    }
    double gamma = 1.0;
    if (m > 0) {
      double sy = 0, yy = 0;
      for (int k = 0; k < n; ++k) {
        sy += S[m - 1][k] * Y[m - 1][k];
        yy += Y[m - 1][k] * Y[m - 1][k];
      }
      if (yy > 0) gamma = sy / yy;
    }
    for (auto& c : q) c *= gamma;
    for (int i = 0; i < m; ++i) {
      double b = 0;
      for (int k = 0; k < n; ++k) b += Y[i][k] * q[k];
      b *= rho[i];
      for (int k = 0; k < n; ++k) q[k] += (alpha[i] - b) * S[i][k];
    }
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) d[k] = -q[k];
    double gd = 0;
    for (int k = 0; k < n; ++k) gd += g[k] * d[k];
    if (!(gd < 0)) {
      S.clear();
      Y.clear();
      rho.clear();
      for (int k = 0; k < n; ++k) d[k] = -g[k];
      gd = -gl * gl;
    }
    // Armijo backtracking.
    double step = opts.init_step;
    bool accepted = false;
    std::vector<double> zn(n);
    double fn = f;
    for (int bt = 0; bt < 40; ++bt) {
      for (int k = 0; k < n; ++k) zn[k] = z[k] + step * d[k];
      fn = prob.eval(zn, &gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * gd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = gl <= 10 * opts.gtol;
      break;
    }
    std::vector<double> s(n), y(n);
    for (int k = 0; k < n; ++k) {
      s[k] = zn[k] - z[k];
      y[k] = gn[k] - g[k];
    }
    double sy = 0;
    for (int k = 0; k < n; ++k) sy += s[k] * y[k];
    if (sy > 1e-14) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (int(S.size()) > opts.memory) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho.erase(rho.begin());
      }
    }
    z = zn;
    g = gn;
    f = fn;
    res.iters = it + 1;
    if (opts.on_step) opts.on_step(it, f);
    if (opts.on_iterate) opts.on_iterate(z);
  }
  res.final_value = f;
  return res;
}

RelaxResult relax_slice(const AmbientDomain& dom, const Slice& s, VectorFieldClass cls,
                        int max_iters, double gtol, std::vector<uint8_t> movable) {
  RelaxResult out;
  Slice cur = s;
  int rounds = 4;
  int iters_total = 0;
  for (int r = 0; r < rounds; ++r) {
    SliceProblem prob(dom, cur, cls, movable);
    if (prob.dofs() == 0) break;
    std::vector<double> z = prob.pack();
    LbfgsOptions opts;
    opts.max_iters = max_iters / rounds;
    opts.gtol = gtol;
    LbfgsResult lr = lbfgs_minimize(prob, z, opts);
    cur = prob.unpack(z);
    iters_total += lr.iters;
    if (lr.converged && r > 0) break;
  }
  out.slice = cur;
  out.mass = slice_mass(dom, cur);
  out.residual = stationarity_residual(dom, cur, cls);
  out.iters = iters_total;
  return out;
}

}  // namespace minmax
