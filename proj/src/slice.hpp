#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ambient.hpp"

namespace minmax {

enum class BC { ConstrainedToGamma, FreeBoundary, Closed, Trivial };

const char* bc_name(BC bc);
BC bc_from_name(const std::string& s);

// Discrete hypersurface: polyline (2-D) or triangle mesh (3-D).
struct Slice {
  int dim = 2;
  std::vector<double> x;  // interleaved vertex coords
  std::vector<std::array<int, 3>> faces;
  BC bc = BC::FreeBoundary;
  int multiplicity = 1;
  bool closed_polyline = false;

  size_t nv() const { return x.size() / size_t(dim); }
  Vec2 p2(size_t i) const { return {x[2 * i], x[2 * i + 1]}; }
  void set2(size_t i, const Vec2& p) {
    x[2 * i] = p.x;
    x[2 * i + 1] = p.y;
  }
  Vec3 p3(size_t i) const { return {x[3 * i], x[3 * i + 1], x[3 * i + 2]}; }
  void set3(size_t i, const Vec3& p) {
    x[3 * i] = p.x;
    x[3 * i + 1] = p.y;
    x[3 * i + 2] = p.z;
  }
  static Slice polyline(const std::vector<Vec2>& pts, BC bc, int mult = 1);
};

// Metric-weighted mass (length in 2-D, area in 3-D) times multiplicity.
double slice_mass(const AmbientDomain& dom, const Slice& s);

// Per-vertex classification against gamma and dM.
struct VertexClass {
  std::vector<uint8_t> on_gamma;
  std::vector<uint8_t> on_bdry;  // includes gamma vertices
};
VertexClass classify_vertices(const AmbientDomain& dom, const Slice& s);

// Boundary vertices of a triangle mesh (vertices on edges used by one face).
std::vector<uint8_t> mesh_boundary_vertices(const Slice& s);

// Varifold atom: (position, tangent direction / plane normal, weight).
struct VarifoldAtom {
  Vec3 pos;
  Vec3 dir;  // 2-D: unit tangent; 3-D: unit plane normal
  double weight = 0;
};

struct DiscreteVarifold {
  int dim = 2;
  std::vector<VarifoldAtom> atoms;
  double total_mass = 0;
};

DiscreteVarifold to_varifold(const AmbientDomain& dom, const Slice& s);

// JSONL record <-> slice.
std::string slice_to_jsonl(const Slice& s, const std::vector<int>& t_index);
Slice slice_from_jsonl(const std::string& line, std::vector<int>* t_index = nullptr);

}  // namespace minmax
