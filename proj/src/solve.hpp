#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "variation.hpp"

namespace minmax {

// Mass minimization over the admissible vertex degrees of freedom of one
// slice, in reduced coordinates:
//   - interior vertices: dim coordinates;
//   - gamma vertices (constrained class): fixed;
//   - dM vertices under the tangent class: 2-D boundary parameter /
//     3-D tangent-plane offsets with reprojection;
//   - vertices outside the movable mask: fixed.
// Feasibility (staying inside the closed domain) is enforced by rejecting
// infeasible line-search candidates.
class SliceProblem {
 public:
  SliceProblem(const AmbientDomain& dom, const Slice& base, VectorFieldClass cls,
               std::vector<uint8_t> movable = {});

  int dofs() const { return n_z_; }
  std::vector<double> pack() const;
  Slice unpack(const std::vector<double>& z) const;
  // Mass and reduced gradient; returns +inf when some movable vertex leaves
  // the closed domain.
  double eval(const std::vector<double>& z, std::vector<double>* grad) const;
  const Slice& base() const { return base_; }
  // Re-anchor tangent frames at the given point (used between restarts).
  void reanchor(const Slice& current);

 private:
  enum class VKind : uint8_t { Fixed, Full, BdryParam2D, BdryTangent3D };
  struct Entry {
    VKind kind = VKind::Fixed;
    int z_off = -1;
    double bparam = 0;    // 2-D boundary parameter at anchor
    Vec3 anchor{0, 0, 0};
    Vec3 fu{0, 0, 0}, fv{0, 0, 0};  // 3-D tangent frame
  };

  const AmbientDomain* dom_;
  Slice base_;
  VectorFieldClass cls_;
  std::vector<Entry> entries_;
  int n_z_ = 0;
};

struct LbfgsOptions {
  int max_iters = 500;
  double gtol = 1e-9;
  int memory = 8;
  double init_step = 1.0;
  // Called after each accepted step with (iter, slice mass).
  std::function<void(int, double)> on_step;
  // Optional witness recorder: receives every accepted iterate.
  std::function<void(const std::vector<double>&)> on_iterate;
};

struct LbfgsResult {
  int iters = 0;
  double final_value = 0;
  double grad_norm = 0;
  bool converged = false;
};

LbfgsResult lbfgs_minimize(const SliceProblem& prob, std::vector<double>& z,
                           const LbfgsOptions& opts);

// Convenience: relax a slice to discrete stationarity within its class.
// Restarts the optimizer a few times re-anchoring boundary frames.
struct RelaxResult {
  Slice slice;
  double mass = 0;
  double residual = 0;
  int iters = 0;
};
RelaxResult relax_slice(const AmbientDomain& dom, const Slice& s, VectorFieldClass cls,
                        int max_iters = 2000, double gtol = 1e-10,
                        std::vector<uint8_t> movable = {});

}  // namespace minmax
