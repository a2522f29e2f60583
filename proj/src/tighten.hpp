#pragma once

#include <string>
#include <vector>

#include "family.hpp"
#include "variation.hpp"

namespace minmax {

// Pull-tight parameters. The per-slice speed is capped by
// T(residual) * b(lattice distance to the family boundary); T ramps from 0
// on [0, residual_tol] so already-stationary slices do not move, and b is 0
// on the boundary of the parameter lattice, which stays fixed bit-exactly.
struct TightenParams {
  double step_size = 0.75;    // displacement per iteration, in vertex spacings
  int max_iters = 2000;
  double residual_tol = 1e-3;
  double bdry_ramp = 4;       // lattice steps over which b ramps to 1
  double smooth_weight = 0.25;
  int threads = 1;
  int trace_every = 1;
};

struct TightenTraceRow {
  int iter = 0;
  double m0 = 0;
  int argmax_i = 0, argmax_j = 0;
  double residual = 0;  // residual of the argmax slice
};

struct TightenResult {
  SweepoutFamily family;
  std::vector<TightenTraceRow> trace;
  int iters = 0;
  bool converged = false;
};

TightenResult pull_tight(const AmbientDomain& dom, const SweepoutFamily& fam,
                         const TightenParams& params);

std::string tighten_trace_csv(const std::vector<TightenTraceRow>& trace);

}  // namespace minmax
