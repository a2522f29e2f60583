#pragma once

#include <vector>

#include "solve.hpp"

namespace minmax {

struct SpectrumResult {
  std::vector<double> eigenvalues;              // ascending, lowest k computed
  std::vector<std::vector<double>> vectors;     // matching unit eigenvectors (reduced coords)
  int dofs = 0;
  int index = 0;  // count of computed eigenvalues < -spec_tol
};

struct SpectrumOptions {
  int k = 6;
  double spec_tol = 1e-6;
  double residual_tol = -1;  // <0: 1e-3 * (1 + mass); pre-check, NotStationary
  double fd_step = 1e-6;
  int lanczos_iters = 160;
  int dense_limit = 900;
  bool skip_stationarity_check = false;
  std::vector<uint8_t> movable;  // restrict to a region (empty: all)
};

// Discrete Hessian of mass over the admissible reduced coordinates,
// lowest-k spectrum. Dense solve for small problems, Lanczos with
// finite-difference Hessian-vector products otherwise.
SpectrumResult second_variation_spectrum(const AmbientDomain& dom, const Slice& s,
                                         VectorFieldClass cls, const SpectrumOptions& opts = {});

// The reduced problem matching the spectrum dof layout (for Rayleigh checks
// and for turning reduced vectors into vertex displacements).
SliceProblem spectrum_problem(const AmbientDomain& dom, const Slice& s, VectorFieldClass cls,
                              std::vector<uint8_t> movable = {});

}  // namespace minmax
