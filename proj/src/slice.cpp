#include "slice.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace minmax {

using nlohmann::json;

const char* bc_name(BC bc) {
  switch (bc) {
    case BC::ConstrainedToGamma: return "constrained";
    case BC::FreeBoundary: return "free";
    case BC::Closed: return "closed";
    case BC::Trivial: return "trivial";
  }
  return "free";
}

BC bc_from_name(const std::string& s) {
  if (s == "constrained") return BC::ConstrainedToGamma;
  if (s == "free") return BC::FreeBoundary;
  if (s == "closed") return BC::Closed;
  if (s == "trivial") return BC::Trivial;
  throw Error(ErrorCode::Config, "unknown bc " + s);
}

Slice Slice::polyline(const std::vector<Vec2>& pts, BC bc, int mult) {
  Slice s;
  s.dim = 2;
  s.bc = bc;
  s.multiplicity = mult;
  s.x.resize(pts.size() * 2);
  for (size_t i = 0; i < pts.size(); ++i) s.set2(i, pts[i]);
  return s;
}

double slice_mass(const AmbientDomain& dom, const Slice& s) {
  for (double c : s.x)
    if (!std::isfinite(c)) throw Error(ErrorCode::DegenerateGeometry, "non-finite vertex");
  double m = 0;
  if (s.dim == 2) {
    size_t n = s.nv();
    size_t segs = s.closed_polyline ? n : (n ? n - 1 : 0);
    for (size_t i = 0; i < segs; ++i) {
      Vec2 a = s.p2(i), b = s.p2((i + 1) % n);
      Vec2 mid = (a + b) * 0.5;
      m += dom.conf(mid) * norm(b - a);
    }
  } else {
    for (const auto& f : s.faces) {
      Vec3 a = s.p3(f[0]), b = s.p3(f[1]), c = s.p3(f[2]);
      m += 0.5 * norm(cross(b - a, c - a));
    }
  }
  return m * s.multiplicity;
}

VertexClass classify_vertices(const AmbientDomain& dom, const Slice& s) {
  VertexClass vc;
  size_t n = s.nv();
  vc.on_gamma.assign(n, 0);
  vc.on_bdry.assign(n, 0);
  double tol = 1e3 * dom.tol_bdry();
  for (size_t i = 0; i < n; ++i) {
    if (s.dim == 2) {
      Vec2 p = s.p2(i);
      if (dom.boundary2d().dist_lower_bound(p) <= tol && dom.dist_to_boundary2(p) <= tol)
        vc.on_bdry[i] = 1;
      if (!dom.gamma().points.empty() && dom.dist_to_gamma2(p) <= tol) vc.on_gamma[i] = 1;
    } else {
      Vec3 p = s.p3(i);
      if (dom.dist_to_boundary3(p) <= tol) vc.on_bdry[i] = 1;
      if (!dom.gamma().rings.empty() && dom.dist_to_gamma3(p) <= tol) vc.on_gamma[i] = 1;
    }
  }
  return vc;
}

std::vector<uint8_t> mesh_boundary_vertices(const Slice& s) {
  std::vector<uint8_t> out(s.nv(), 0);
  if (s.dim != 3) return out;
  // Count undirected edge usage.
  std::vector<std::pair<uint64_t, int>> edges;
  edges.reserve(s.faces.size() * 3);
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
  };
  for (const auto& f : s.faces) {
    edges.push_back({key(f[0], f[1]), 0});
    edges.push_back({key(f[1], f[2]), 0});
    edges.push_back({key(f[2], f[0]), 0});
  }
  std::sort(edges.begin(), edges.end());
  for (size_t i = 0; i < edges.size();) {
    size_t j = i;
    while (j < edges.size() && edges[j].first == edges[i].first) ++j;
    if (j - i == 1) {
      int a = int(edges[i].first >> 32), b = int(edges[i].first & 0xffffffffu);
      out[a] = 1;
      out[b] = 1;
    }
    i = j;
  }
  return out;
}

DiscreteVarifold to_varifold(const AmbientDomain& dom, const Slice& s) {
  DiscreteVarifold v;
  v.dim = s.dim;
  if (s.dim == 2) {
    size_t n = s.nv();
    size_t segs = s.closed_polyline ? n : (n ? n - 1 : 0);
    for (size_t i = 0; i < segs; ++i) {
      Vec2 a = s.p2(i), b = s.p2((i + 1) % n);
      double len = norm(b - a);
      if (len <= 0) continue;
      Vec2 mid = (a + b) * 0.5;
      VarifoldAtom at;
      at.pos = {mid.x, mid.y, 0};
      Vec2 u = (b - a) / len;
      at.dir = {u.x, u.y, 0};
      at.weight = dom.conf(mid) * len * s.multiplicity;
      v.atoms.push_back(at);
    }
  } else {
    for (const auto& f : s.faces) {
      Vec3 a = s.p3(f[0]), b = s.p3(f[1]), c = s.p3(f[2]);
      Vec3 nrm = cross(b - a, c - a);
      double area2 = norm(nrm);
      if (area2 <= 0) continue;
      VarifoldAtom at;
      at.pos = (a + b + c) / 3.0;
      at.dir = nrm / area2;
      at.weight = 0.5 * area2 * s.multiplicity;
      v.atoms.push_back(at);
    }
  }
  // Same sum, same order as slice_mass: equality is exact for nondegenerate
  // input (zero-length atoms contribute exactly zero there too).
  double m = 0;
  for (const auto& a : v.atoms) m += a.weight;
  v.total_mass = m;
  return v;
}

std::string slice_to_jsonl(const Slice& s, const std::vector<int>& t_index) {
  json j;
  j["t_index"] = t_index;
  j["bc"] = bc_name(s.bc);
  j["multiplicity"] = s.multiplicity;
  j["dim"] = s.dim;
  if (s.closed_polyline) j["closed"] = true;
  json verts = json::array();
  for (size_t i = 0; i < s.nv(); ++i) {
    if (s.dim == 2)
      verts.push_back({s.x[2 * i], s.x[2 * i + 1]});
    else
      verts.push_back({s.x[3 * i], s.x[3 * i + 1], s.x[3 * i + 2]});
  }
  j["vertices"] = verts;
  if (!s.faces.empty()) {
    json fs = json::array();
    for (const auto& f : s.faces) fs.push_back({f[0], f[1], f[2]});
    j["faces"] = fs;
  }
  return j.dump();
}

Slice slice_from_jsonl(const std::string& line, std::vector<int>* t_index) {
  json j;
  try {
    j = json::parse(line);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Io, std::string("slice jsonl: ") + e.what());
  }
  Slice s;
  s.dim = j.value("dim", j.contains("faces") ? 3 : 2);
  s.bc = bc_from_name(j.value("bc", "free"));
  s.multiplicity = j.value("multiplicity", 1);
  s.closed_polyline = j.value("closed", false);
  for (auto& v : j.at("vertices"))
    for (auto& c : v) s.x.push_back(double(c));
  if (j.contains("faces"))
    for (auto& f : j["faces"]) s.faces.push_back({int(f[0]), int(f[1]), int(f[2])});
  if (t_index && j.contains("t_index")) *t_index = j["t_index"].get<std::vector<int>>();
  return s;
}

}  // namespace minmax
