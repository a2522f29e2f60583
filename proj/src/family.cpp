#include "family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace minmax {

using nlohmann::json;

MinMaxReport minmax_report(const AmbientDomain& dom, const SweepoutFamily& fam,
                           double strict_margin_rel) {
  if (fam.slices.empty()) throw Error(ErrorCode::EmptyFamily, "no slices");
  MinMaxReport r;
  r.m0 = -1;
  r.bM0 = 0;
  for (int j = 0; j < fam.res[1]; ++j)
    for (int i = 0; i < fam.res[0]; ++i) {
      double m = slice_mass(dom, fam.at(i, j));
      if (m > r.m0) {
        r.m0 = m;
        r.argmax = {i, j};
      }
      if (fam.on_boundary_of_P(i, j)) r.bM0 = std::max(r.bM0, m);
    }
  r.strict_margin = strict_margin_rel * std::max(r.m0, 0.0);
  r.gap = r.m0 - r.bM0;
  r.passes_condition = r.m0 > r.bM0 + r.strict_margin;
  return r;
}

double max_vertex_spacing(const Slice& s) {
  double h = 0;
  if (s.dim == 2) {
    size_t n = s.nv();
    size_t segs = s.closed_polyline ? n : (n ? n - 1 : 0);
    for (size_t i = 0; i < segs; ++i) h = std::max(h, norm(s.p2((i + 1) % n) - s.p2(i)));
  } else {
    for (const auto& f : s.faces) {
      Vec3 a = s.p3(f[0]), b = s.p3(f[1]), c = s.p3(f[2]);
      h = std::max({h, norm(b - a), norm(c - b), norm(a - c)});
    }
  }
  return h;
}

double hausdorff_distance(const Slice& a, const Slice& b) {
  if (a.nv() == 0 || b.nv() == 0) return 0;
  auto one_sided_2d = [](const Slice& p, const Slice& q) {
    double worst = 0;
    size_t nq = q.nv();
    size_t segs = q.closed_polyline ? nq : nq - 1;
    for (size_t i = 0; i < p.nv(); ++i) {
      Vec2 v = p.p2(i);
      double best = std::numeric_limits<double>::max();
      if (segs == 0) best = norm(v - q.p2(0));
      for (size_t jj = 0; jj < segs; ++jj)
        best = std::min(best, dist_point_segment(v, q.p2(jj), q.p2((jj + 1) % nq)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.dim == 2 && b.dim == 2) return std::max(one_sided_2d(a, b), one_sided_2d(b, a));
  // Meshes from the same builder share a vertex layout; the max vertex
  // displacement bounds the Hausdorff distance from above.
  if (a.nv() == b.nv()) {
    double worst = 0;
    for (size_t i = 0; i < a.nv(); ++i) worst = std::max(worst, norm(a.p3(i) - b.p3(i)));
    return worst;
  }
  double worst = 0;
  for (size_t i = 0; i < a.nv(); ++i) {
    double best = std::numeric_limits<double>::max();
    for (size_t j = 0; j < b.nv(); ++j) best = std::min(best, norm(a.p3(i) - b.p3(j)));
    worst = std::max(worst, best);
  }
  return worst;
}

ValidationReport validate_family(const AmbientDomain& dom, const SweepoutFamily& fam,
                                 ValidationBudgets budgets) {
  ValidationReport rep;
  if (fam.slices.empty()) {
    rep.ok = false;
    rep.items.push_back({"nonempty", false, 0, 0, {-1, -1}, {-1, -1}, "no slices"});
    return rep;
  }
  double hmax = 0, mmax = 0;
  std::vector<double> masses(fam.slices.size(), 0.0);
  for (int j = 0; j < fam.res[1]; ++j)
    for (int i = 0; i < fam.res[0]; ++i) {
      hmax = std::max(hmax, max_vertex_spacing(fam.at(i, j)));
      masses[fam.index(i, j)] = slice_mass(dom, fam.at(i, j));
      mmax = std::max(mmax, masses[fam.index(i, j)]);
    }
  double cont_budget = budgets.continuity > 0 ? budgets.continuity : 4.0 * hmax;
  double mass_budget = budgets.mass_continuity > 0 ? budgets.mass_continuity : 0.25 * mmax;

  ValidationItem cont{"continuity", true, 0, cont_budget, {-1, -1}, {-1, -1}, ""};
  ValidationItem massc{"mass_continuity", true, 0, mass_budget, {-1, -1}, {-1, -1}, ""};
  auto check_pair = [&](int i0, int j0, int i1, int j1) {
    double d = hausdorff_distance(fam.at(i0, j0), fam.at(i1, j1));
    if (d > cont.worst) {
      cont.worst = d;
      cont.at_a = {i0, j0};
      cont.at_b = {i1, j1};
    }
    double dm = std::abs(masses[fam.index(i0, j0)] - masses[fam.index(i1, j1)]);
    if (dm > massc.worst) {
      massc.worst = dm;
      massc.at_a = {i0, j0};
      massc.at_b = {i1, j1};
    }
  };
  for (int j = 0; j < fam.res[1]; ++j)
    for (int i = 0; i + 1 < fam.res[0]; ++i) check_pair(i, j, i + 1, j);
  if (fam.k == 2)
    for (int j = 0; j + 1 < fam.res[1]; ++j)
      for (int i = 0; i < fam.res[0]; ++i) check_pair(i, j, i, j + 1);
  cont.ok = cont.worst <= cont.budget;
  massc.ok = massc.worst <= massc.budget;
  rep.items.push_back(cont);
  rep.items.push_back(massc);

  // Shared bc mode (Trivial endpoint slices are compatible with either mode).
  ValidationItem bcu{"bc_uniform", true, 0, 0, {-1, -1}, {-1, -1}, ""};
  BC ref = fam.slices[0].bc;
  for (const auto& s : fam.slices)
    if (s.bc != BC::Trivial) {
      ref = s.bc;
      break;
    }
  for (int j = 0; j < fam.res[1] && bcu.ok; ++j)
    for (int i = 0; i < fam.res[0]; ++i) {
      BC b = fam.at(i, j).bc;
      if (b != BC::Trivial && b != ref) {
        bcu.ok = false;
        bcu.at_a = {i, j};
        bcu.message = "mixed bc modes";
        break;
      }
    }
  rep.items.push_back(bcu);

  // Containment and face non-degeneracy.
  ValidationItem inm{"inside_domain", true, 0, 0, {-1, -1}, {-1, -1}, ""};
  ValidationItem nde{"faces_nondegenerate", true, 0, 0, {-1, -1}, {-1, -1}, ""};
  double tol = 1e3 * dom.tol_bdry();
  double scale2 = dom.diameter() * dom.diameter();
  for (int j = 0; j < fam.res[1]; ++j)
    for (int i = 0; i < fam.res[0]; ++i) {
      const Slice& s = fam.at(i, j);
      for (size_t vtx = 0; vtx < s.nv(); ++vtx) {
        bool in = s.dim == 2 ? dom.inside2(s.p2(vtx), tol) : dom.inside3(s.p3(vtx), tol);
        if (!in) {
          double d = s.dim == 2 ? dom.dist_to_boundary2(s.p2(vtx)) : dom.dist_to_boundary3(s.p3(vtx));
          if (d > inm.worst) {
            inm.worst = d;
            inm.at_a = {i, j};
          }
          inm.ok = false;
        }
      }
      for (const auto& f : s.faces) {
        Vec3 a = s.p3(f[0]), b = s.p3(f[1]), c = s.p3(f[2]);
        double area = 0.5 * norm(cross(b - a, c - a));
        if (area <= 1e-12 * scale2) {
          nde.ok = false;
          nde.at_a = {i, j};
          nde.worst = std::max(nde.worst, 1e-12 * scale2 - area);
        }
      }
    }
  rep.items.push_back(inm);
  rep.items.push_back(nde);

  // Constrained families: every non-trivial slice's boundary equals gamma.
  if (fam.mode == FamilyMode::Constrained) {
    ValidationItem gb{"boundary_is_gamma", true, 0, tol, {-1, -1}, {-1, -1}, ""};
    for (int j = 0; j < fam.res[1]; ++j)
      for (int i = 0; i < fam.res[0]; ++i) {
        const Slice& s = fam.at(i, j);
        if (s.bc == BC::Trivial) continue;
        if (s.dim == 2) {
          if (s.nv() < 2) continue;
          double d0 = dom.dist_to_gamma2(s.p2(0));
          double d1 = dom.dist_to_gamma2(s.p2(s.nv() - 1));
          double w = std::max(d0, d1);
          if (w > gb.worst) {
            gb.worst = w;
            gb.at_a = {i, j};
          }
          if (w > tol) gb.ok = false;
        } else {
          auto bvs = mesh_boundary_vertices(s);
          for (size_t vtx = 0; vtx < s.nv(); ++vtx) {
            if (!bvs[vtx]) continue;
            double d = dom.dist_to_gamma3(s.p3(vtx));
            if (d > gb.worst) {
              gb.worst = d;
              gb.at_a = {i, j};
            }
            if (d > tol) gb.ok = false;
          }
        }
      }
    rep.items.push_back(gb);
  }

  for (const auto& it : rep.items) rep.ok = rep.ok && it.ok;
  return rep;
}

// ----------------------------------------------------------- level sets

namespace {

// Chord of the planar domain at level <x,u> = c; empty if no intersection.
bool chord_endpoints(const AmbientDomain& dom, Vec2 u, double c, Vec2* pa, Vec2* pb) {
  const Boundary2D& b = dom.boundary2d();
  int N = 2048;
  std::vector<double> f(N);
  for (int i = 0; i < N; ++i) f[i] = dot(b.point(double(i) / N), u) - c;
  std::vector<double> roots;
  for (int i = 0; i < N; ++i) {
    double f0 = f[i], f1 = f[(i + 1) % N];
    if (f0 == 0) roots.push_back(double(i) / N);
    else if (f0 * f1 < 0) {
      double lo = double(i) / N, hi = double(i + 1) / N;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = dot(b.point(mid), u) - c;
        if (fm == 0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0) == (f0 > 0)) lo = mid;
        else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
  }
  if (roots.size() < 2) return false;
  *pa = b.point(roots[0]);
  *pb = b.point(roots[1]);
  return true;
}

Slice disk_mesh_at_level(const AmbientDomain& dom, double z, int rings, int angular) {
  // Level disk of the convex body at height z (axis = +z), polar grid.
  const Vec3 s = dom.body3d().semi;
  double q = 1 - (z * z) / (s.z * s.z);
  Slice sl;
  sl.dim = 3;
  sl.bc = BC::FreeBoundary;
  if (q <= 0) {
    sl.bc = BC::Trivial;
    double zc = std::clamp(z, -s.z, s.z);
    sl.x = {0, 0, zc};
    return sl;
  }
  double rim = std::sqrt(q);  // scale factor for the boundary ellipse at z
  sl.x.push_back(0);
  sl.x.push_back(0);
  sl.x.push_back(z);
  for (int r = 1; r <= rings; ++r) {
    double fr = double(r) / rings;
    for (int a = 0; a < angular; ++a) {
      double th = 2 * kPi * a / angular;
      sl.x.push_back(fr * rim * s.x * std::cos(th));
      sl.x.push_back(fr * rim * s.y * std::sin(th));
      sl.x.push_back(z);
    }
  }
  auto vid = [&](int r, int a) { return r == 0 ? 0 : 1 + (r - 1) * angular + (a % angular); };
  for (int a = 0; a < angular; ++a) sl.faces.push_back({0, vid(1, a), vid(1, a + 1)});
  for (int r = 1; r < rings; ++r)
    for (int a = 0; a < angular; ++a) {
      sl.faces.push_back({vid(r, a), vid(r + 1, a), vid(r + 1, a + 1)});
      sl.faces.push_back({vid(r, a), vid(r + 1, a + 1), vid(r, a + 1)});
    }
  return sl;
}

}  // namespace

SweepoutFamily build_level_set_sweepout(const AmbientDomain& dom, Vec3 axis, int n_slices,
                                        int n_vertices) {
  SweepoutFamily fam;
  fam.k = 1;
  fam.res = {n_slices, 1};
  fam.mode = FamilyMode::Unconstrained;
  fam.slices.resize(n_slices);
  if (dom.mode() == Mode::Planar2D) {
    Vec2 u = normalized(Vec2{axis.x, axis.y});
    // Support interval of <x,u> over the boundary.
    double lo = std::numeric_limits<double>::max(), hi = -lo;
    double tlo = 0, thi = 0;
    int N = 4096;
    for (int i = 0; i < N; ++i) {
      double t = double(i) / N;
      double c = dot(dom.boundary2d().point(t), u);
      if (c < lo) {
        lo = c;
        tlo = t;
      }
      if (c > hi) {
        hi = c;
        thi = t;
      }
    }
    for (int i = 0; i < n_slices; ++i) {
      double t = fam.t_of(i);
      double c = lo + (hi - lo) * t;
      Vec2 a, b;
      if (i == 0 || i == n_slices - 1 || !chord_endpoints(dom, u, c, &a, &b)) {
        Vec2 p = dom.boundary2d().point(i == 0 ? tlo : thi);
        std::vector<Vec2> pts(n_vertices, p);
        fam.slices[i] = Slice::polyline(pts, BC::Trivial);
        continue;
      }
      std::vector<Vec2> pts(n_vertices);
      for (int v = 0; v < n_vertices; ++v) {
        double s = double(v) / (n_vertices - 1);
        pts[v] = a + (b - a) * s;
      }
      fam.slices[i] = Slice::polyline(pts, BC::FreeBoundary);
    }
  } else {
    // Sweep along +z through the body.
    double zmax = dom.body3d().semi.z;
    int angular = std::max(12, n_vertices / 4);
    int rings = std::max(3, n_vertices / 32);
    for (int i = 0; i < n_slices; ++i) {
      double t = fam.t_of(i);
      double z = -zmax + 2 * zmax * t;
      fam.slices[i] = disk_mesh_at_level(dom, z, rings, angular);
      if (i == 0 || i == n_slices - 1) {
        Slice sl;
        sl.dim = 3;
        sl.bc = BC::Trivial;
        sl.x = {0, 0, i == 0 ? -zmax : zmax};
        fam.slices[i] = sl;
      }
    }
  }
  return fam;
}

// ----------------------------------------------------- connecting sweepout

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
  int s1 = sgn(cross(b - a, c - a)), s2 = sgn(cross(b - a, d - a));
  int s3 = sgn(cross(d - c, a - c)), s4 = sgn(cross(d - c, b - c));
  return s1 != s2 && s3 != s4 && s1 != 0 && s2 != 0 && s3 != 0 && s4 != 0;
}

}  // namespace

SweepoutFamily build_connecting_sweepout(const AmbientDomain& dom, const Slice& s0,
                                         const Slice& s1, int n_slices) {
  if (s0.dim != s1.dim || s0.nv() != s1.nv())
    throw Error(ErrorCode::NoCommonBoundary, "incompatible slice discretizations");
  if (s0.bc != BC::ConstrainedToGamma || s1.bc != BC::ConstrainedToGamma)
    throw Error(ErrorCode::NoCommonBoundary, "inputs must be constrained slices");
  double tol = 1e3 * dom.tol_bdry();
  if (s0.dim == 2) {
    if (norm(s0.p2(0) - s1.p2(0)) > tol || norm(s0.p2(s0.nv() - 1) - s1.p2(s1.nv() - 1)) > tol)
      throw Error(ErrorCode::NoCommonBoundary, "endpoint mismatch");
    // Disjoint except at gamma: no interior segment crossings.
    size_t n = s0.nv();
    bool identical = true;
    for (size_t i = 0; i < n && identical; ++i)
      if (norm(s0.p2(i) - s1.p2(i)) > 0) identical = false;
    if (!identical) {
      for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = 0; j + 1 < n; ++j) {
          if (i == 0 && j == 0) continue;  // shares the start point
          if (i + 2 == n && j + 2 == n) continue;
          if (segments_intersect(s0.p2(i), s0.p2(i + 1), s1.p2(j), s1.p2(j + 1)))
            throw Error(ErrorCode::NotDisjoint, "input slices cross in the interior");
        }
    }
  } else {
    auto b0 = mesh_boundary_vertices(s0);
    for (size_t i = 0; i < s0.nv(); ++i)
      if (b0[i] && norm(s0.p3(i) - s1.p3(i)) > tol)
        throw Error(ErrorCode::NoCommonBoundary, "gamma rings mismatch");
  }
  SweepoutFamily fam;
  fam.k = 1;
  fam.res = {n_slices, 1};
  fam.mode = FamilyMode::Constrained;
  fam.slices.resize(n_slices);
  fam.slices[0] = s0;
  fam.slices[n_slices - 1] = s1;
  double scale2 = dom.diameter() * dom.diameter();
  for (int t = 1; t + 1 < n_slices; ++t) {
    double u = fam.t_of(t);
    Slice s = s0;
    for (size_t i = 0; i < s.nv(); ++i) {
      for (int d = 0; d < s.dim; ++d)
        s.x[s.dim * i + d] = (1 - u) * s0.x[s.dim * i + d] + u * s1.x[s.dim * i + d];
    }
    if (s.dim == 3) {
      // Drop faces pinched to zero area by the interpolation.
      std::vector<std::array<int, 3>> kept;
      for (const auto& f : s.faces) {
        Vec3 a = s.p3(f[0]), b = s.p3(f[1]), c = s.p3(f[2]);
        if (0.5 * norm(cross(b - a, c - a)) > 1e-12 * scale2) kept.push_back(f);
      }
      s.faces = std::move(kept);
    }
    fam.slices[t] = std::move(s);
  }
  return fam;
}

// ----------------------------------------------------------- serialization

std::string family_to_jsonl(const SweepoutFamily& fam) {
  std::ostringstream os;
  json hdr;
  hdr["family"] = {{"k", fam.k},
                   {"res", {fam.res[0], fam.res[1]}},
                   {"mode", fam.mode == FamilyMode::Constrained ? "constrained" : "unconstrained"}};
  os << hdr.dump() << "\n";
  for (int j = 0; j < fam.res[1]; ++j)
    for (int i = 0; i < fam.res[0]; ++i) {
      std::vector<int> idx = fam.k == 2 ? std::vector<int>{i, j} : std::vector<int>{i};
      os << slice_to_jsonl(fam.at(i, j), idx) << "\n";
    }
  return os.str();
}

SweepoutFamily family_from_jsonl(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  SweepoutFamily fam;
  bool have_hdr = false;
  std::vector<std::pair<std::vector<int>, Slice>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (!have_hdr) {
      json hdr = json::parse(line);
      if (hdr.contains("family")) {
        auto& h = hdr["family"];
        fam.k = h.value("k", 1);
        fam.res = {h["res"][0], h["res"][1]};
        fam.mode = h.value("mode", "unconstrained") == std::string("constrained")
                       ? FamilyMode::Constrained
                       : FamilyMode::Unconstrained;
        have_hdr = true;
        continue;
      }
      have_hdr = true;  // header-less stream of slices
    }
    std::vector<int> idx;
    Slice s = slice_from_jsonl(line, &idx);
    rows.push_back({idx, std::move(s)});
  }
  if (fam.res[0] * fam.res[1] != int(rows.size())) {
    fam.k = 1;
    fam.res = {int(rows.size()), 1};
  }
  fam.slices.resize(rows.size());
  for (auto& [idx, s] : rows) {
    int i = idx.empty() ? 0 : idx[0];
    int j = idx.size() > 1 ? idx[1] : 0;
    fam.slices[fam.index(i, j)] = std::move(s);
  }
  return fam;
}

std::string mass_profile_csv(const AmbientDomain& dom, const SweepoutFamily& fam) {
  std::ostringstream os;
  os << "t,mass\n";
  char buf[64];
  for (int j = 0; j < fam.res[1]; ++j)
    for (int i = 0; i < fam.res[0]; ++i) {
      double t = fam.t_of(i);
      if (fam.k == 2) t = fam.t_of(i) + 1000 * fam.t_of(j, 1);  // flattened index
      snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, slice_mass(dom, fam.at(i, j)));
      os << buf;
    }
  return os.str();
}

}  // namespace minmax
