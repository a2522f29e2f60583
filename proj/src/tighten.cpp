#include "tighten.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace minmax {

namespace {

struct SliceState {
  std::vector<double> step;  // proposed displacement field
  double residual = 0;
  double mass = 0;
  double h = 0;  // vertex spacing
};

// Re-pin boundary vertices after a candidate displacement: free-boundary
// vertices are projected back onto dM, gamma vertices are left untouched
// (their step is identically zero).
void reproject(const AmbientDomain& dom, const VertexClass& vc, VectorFieldClass cls, Slice& s) {
  if (cls != VectorFieldClass::TangentToBoundary) return;
  for (size_t i = 0; i < s.nv(); ++i) {
    if (!vc.on_bdry[i]) continue;
    if (s.dim == 2) {
      double t;
      dom.boundary2d().project(s.p2(i), &t);
      s.set2(i, dom.boundary2d().point(t));
    } else {
      Vec3 q;
      dom.body3d().project(s.p3(i), &q);
      s.set3(i, q);
    }
  }
}

bool candidate_feasible(const AmbientDomain& dom, const VertexClass& vc, const Slice& s) {
  double tol = dom.tol_bdry();
  for (size_t i = 0; i < s.nv(); ++i) {
    if (vc.on_bdry[i]) continue;  // reprojected or pinned
    bool in = s.dim == 2 ? dom.inside2(s.p2(i), tol) : dom.inside3(s.p3(i), tol);
    if (!in) return false;
  }
  return true;
}

}  // namespace

TightenResult pull_tight(const AmbientDomain& dom, const SweepoutFamily& fam,
                         const TightenParams& params) {
  TightenResult out;
  out.family = fam;
  SweepoutFamily& F = out.family;
  if (F.slices.empty()) throw Error(ErrorCode::EmptyFamily, "pull_tight: empty family");
  const VectorFieldClass cls = F.mode == FamilyMode::Constrained
                                   ? VectorFieldClass::InwardVanishOnGamma
                                   : VectorFieldClass::TangentToBoundary;
  const int n = F.count();

  // Lattice distance to the boundary of P, in steps.
  std::vector<double> bfac(n, 0.0);
  for (int j = 0; j < F.res[1]; ++j)
    for (int i = 0; i < F.res[0]; ++i) {
      int d = std::min(i, F.res[0] - 1 - i);
      if (F.k == 2) d = std::min(d, std::min(j, F.res[1] - 1 - j));
      bfac[F.index(i, j)] = std::min(1.0, double(d) / params.bdry_ramp);
    }

  std::vector<VertexClass> vcs(n);
  std::vector<SliceState> st(n);
  std::vector<double> masses(n, 0.0);
  for (int t = 0; t < n; ++t) masses[t] = slice_mass(dom, F.slices[t]);

  auto speed_cap = [&](double res) {
    double r = (res - params.residual_tol) / params.residual_tol;
    return std::min(1.0, std::max(0.0, r));
  };

  for (int iter = 0; iter < params.max_iters; ++iter) {
    // Phase 1: per-slice projected descent directions.
    parallel_for(n, params.threads, [&](int t) {
      Slice& s = F.slices[t];
      SliceState& ss = st[t];
      vcs[t] = classify_vertices(dom, s);
      std::vector<double> g = mass_gradient(dom, s);
      for (auto& c : g) c = -c;
      project_field(dom, s, vcs[t], cls, g, /*as_descent=*/true);
      double r = 0;
      for (double c : g) r += c * c;
      r = std::sqrt(r);
      ss.residual = r;
      ss.h = max_vertex_spacing(s);
      double cap = params.step_size * ss.h * speed_cap(r) * bfac[t];
      if (r > 1e-300 && cap > 0) {
        double sc = cap / r;
        for (auto& c : g) c *= sc;
        ss.step = std::move(g);
      } else {
        ss.step.assign(s.x.size(), 0.0);
      }
    });

    // Phase 2: smooth the step field over the lattice (3-tap per axis),
    // keeping boundary-of-P slices exactly zero.
    std::vector<std::vector<double>> smoothed(n);
    bool uniform = true;
    for (int t = 1; t < n; ++t)
      if (st[t].step.size() != st[0].step.size()) uniform = false;
    double w = params.smooth_weight;
    if (uniform && w > 0) {
      auto tap = [&](int tc, int tm, int tp) {
        std::vector<double> r(st[tc].step.size());
        for (size_t k = 0; k < r.size(); ++k)
          r[k] = (1 - 2 * w) * st[tc].step[k] + w * st[tm].step[k] + w * st[tp].step[k];
        return r;
      };
      for (int j = 0; j < F.res[1]; ++j)
        for (int i = 0; i < F.res[0]; ++i) {
          int t = F.index(i, j);
          if (F.on_boundary_of_P(i, j) || bfac[t] == 0) {
            smoothed[t].assign(st[t].step.size(), 0.0);
            continue;
          }
          int im = F.index(std::max(0, i - 1), j), ip = F.index(std::min(F.res[0] - 1, i + 1), j);
          smoothed[t] = tap(t, im, ip);
          if (F.k == 2) {
            int jm = F.index(i, std::max(0, j - 1)), jp = F.index(i, std::min(F.res[1] - 1, j + 1));
            auto sy = tap(t, jm, jp);
            for (size_t k = 0; k < smoothed[t].size(); ++k)
              smoothed[t][k] = 0.5 * (smoothed[t][k] + sy[k]);
          }
        }
    } else {
      for (int t = 0; t < n; ++t) smoothed[t] = st[t].step;
    }

    // Phase 3: apply with per-slice backtracking; mass never increases.
    parallel_for(n, params.threads, [&](int t) {
      Slice& s = F.slices[t];
      const std::vector<double>& d = smoothed[t];
      double dn = 0;
      for (double c : d) dn = std::max(dn, std::abs(c));
      if (dn == 0) return;
      double m0 = masses[t];
      double scale = 1.0;
      for (int bt = 0; bt < 25; ++bt) {
        Slice cand = s;
        for (size_t k = 0; k < cand.x.size(); ++k) cand.x[k] += scale * d[k];
        reproject(dom, vcs[t], cls, cand);
        if (candidate_feasible(dom, vcs[t], cand)) {
          double m1 = slice_mass(dom, cand);
          if (std::isfinite(m1) && m1 <= m0) {
            s = std::move(cand);
            masses[t] = m1;
            return;
          }
        }
        scale *= 0.5;
      }
      // No admissible decrease at any scale: keep the slice.
    });

    // Trace: masses reduced in index order.
    double m0 = -1;
    int ai = 0, aj = 0;
    for (int j = 0; j < F.res[1]; ++j)
      for (int i = 0; i < F.res[0]; ++i) {
        double m = masses[F.index(i, j)];
        if (m > m0) {
          m0 = m;
          ai = i;
          aj = j;
        }
      }
    double res_arg = stationarity_residual(dom, F.at(ai, aj), cls);
    if (iter % params.trace_every == 0 || res_arg <= params.residual_tol)
      out.trace.push_back({iter, m0, ai, aj, res_arg});
    out.iters = iter + 1;
    if (res_arg <= params.residual_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::string tighten_trace_csv(const std::vector<TightenTraceRow>& trace) {
  std::ostringstream os;
  os << "iter,m0,argmax_i,argmax_j,residual\n";
  char buf[128];
  for (const auto& r : trace) {
    snprintf(buf, sizeof buf, "%d,%.17g,%d,%d,%.17g\n", r.iter, r.m0, r.argmax_i, r.argmax_j,
             r.residual);
    os << buf;
  }
  return os.str();
}

}  // namespace minmax
