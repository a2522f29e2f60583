#pragma once

#include <array>
#include <string>
#include <vector>

#include "slice.hpp"

namespace minmax {

enum class FamilyMode { Constrained, Unconstrained };

// Grid-indexed family {Sigma_t}, t on a uniform lattice in [0,1]^k, k <= 2.
struct SweepoutFamily {
  int k = 1;
  std::array<int, 2> res = {2, 1};  // lattice points per axis; res[1]==1 for k==1
  FamilyMode mode = FamilyMode::Unconstrained;
  std::vector<Slice> slices;  // row major: idx = j*res[0] + i

  int count() const { return res[0] * res[1]; }
  int index(int i, int j = 0) const { return j * res[0] + i; }
  Slice& at(int i, int j = 0) { return slices[index(i, j)]; }
  const Slice& at(int i, int j = 0) const { return slices[index(i, j)]; }
  bool on_boundary_of_P(int i, int j = 0) const {
    if (i == 0 || i == res[0] - 1) return true;
    if (k == 2 && (j == 0 || j == res[1] - 1)) return true;
    return false;
  }
  double t_of(int i, int axis = 0) const {
    int r = res[axis];
    return r > 1 ? double(i) / (r - 1) : 0.0;
  }
};

struct MinMaxReport {
  double m0 = 0;
  double bM0 = 0;
  std::array<int, 2> argmax = {0, 0};
  double gap = 0;
  bool passes_condition = false;
  double strict_margin = 0;
};

MinMaxReport minmax_report(const AmbientDomain& dom, const SweepoutFamily& fam,
                           double strict_margin_rel = 1e-6);

struct ValidationItem {
  std::string name;
  bool ok = true;
  double worst = 0;
  double budget = 0;
  std::array<int, 2> at_a = {-1, -1};
  std::array<int, 2> at_b = {-1, -1};
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationItem> items;
};

struct ValidationBudgets {
  double continuity = -1;       // <0: 4 * max vertex spacing
  double mass_continuity = -1;  // <0: 0.25 * max slice mass
};

ValidationReport validate_family(const AmbientDomain& dom, const SweepoutFamily& fam,
                                 ValidationBudgets budgets = {});

// Level sets of a linear height function <x, axis> intersected with M.
// Endpoint slices are trivial (points); bc Free in between.
SweepoutFamily build_level_set_sweepout(const AmbientDomain& dom, Vec3 axis, int n_slices,
                                        int n_vertices);

// Connects two constrained slices sharing gamma and disjoint otherwise; the
// interior slices interpolate vertex-wise through the enclosed region.
// Endpoints of the family are bit-identical copies of the inputs.
SweepoutFamily build_connecting_sweepout(const AmbientDomain& dom, const Slice& s0,
                                         const Slice& s1, int n_slices);

// Serialization: JSON-lines (one slice per line) and mass-profile CSV.
std::string family_to_jsonl(const SweepoutFamily& fam);
SweepoutFamily family_from_jsonl(const std::string& text);
std::string mass_profile_csv(const AmbientDomain& dom, const SweepoutFamily& fam);

double max_vertex_spacing(const Slice& s);
double hausdorff_distance(const Slice& a, const Slice& b);

}  // namespace minmax
