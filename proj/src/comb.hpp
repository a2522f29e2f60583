#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ambient.hpp"

namespace minmax {

// Abstract open sets with diameter and pairwise-distance oracles. Balls,
// annuli and ball complements are radially symmetric around a center, which
// gives exact closed-form distances; intervals are 1-D balls.
struct OpenSetDesc {
  enum class Kind { Ball, Annulus, ComplementBall, Interval };
  Kind kind = Kind::Ball;
  Vec3 center{0, 0, 0};
  double r = 0;            // Ball / ComplementBall
  double tau = 0, t = 0;   // Annulus: tau < |x-c| < t
  double a = 0, b = 0;     // Interval (a, b)
  double domain_diam = 0;  // cap for unbounded descriptors; 0 = none

  void validate() const;
  // Radial range [lo, hi] around the effective center.
  void radial_range(double* lo, double* hi) const;
  Vec3 effective_center() const;
  double diam() const;
  std::string describe() const;
};

double set_dist(const OpenSetDesc& u, const OpenSetDesc& v);

// d-tuples with dist >= 4 min diam pairwise.
struct COTuple {
  std::vector<OpenSetDesc> sets;
  // Verifies the defining inequality with a relative slack on ties.
  bool verify(double factor = 4.0, double rel_slack = 1e-12, std::string* why = nullptr) const;
};

struct SubfamilyResult {
  std::vector<std::vector<int>> kept;  // indices into each input family
  // Direct re-verification of the two conclusion bullets.
  bool cross_separated = true;
  double min_cross_dist = 0;
  int min_size = 0;
};

// The clearing algorithm of the combinatorial lemma. Requires each family of
// equal size omega >= 4^p satisfying dist >= 2 min diam within the family,
// and at most 2^p families. Deterministic: diameter sort with ties broken by
// input order.
SubfamilyResult extract_subfamilies(const std::vector<std::vector<OpenSetDesc>>& families, int p);

// Exhaustive feasibility oracle: is there a choice of >= need sets per family
// with positive pairwise cross-family distances? Exponential; for small
// instances only (p = 1 acceptance checks).
bool brute_force_feasible(const std::vector<std::vector<OpenSetDesc>>& families, int need,
                          std::vector<std::vector<int>>* witness = nullptr);

// Concentric annulus tuple at x: complement of B_{r1}, annuli
// B_{r_{l-1}/9} \ B_{r_l}, inner ball B_{r_last}. Radii strictly descending
// with ratio < 1/9. Verified COTuple.
COTuple make_annulus_tuple(const AmbientDomain& dom, Vec3 x, const std::vector<double>& radii);

// Staggered cube covering of [0,1]^m and its 2^m-child refinement with
// subfamily-based open-set assignment (m <= 2).
struct CubeCovering {
  int m = 1;
  double eta = 0, eta_tilde = 0, delta = 0;
  struct Parent {
    std::array<int, 2> r = {0, 0};
    std::array<double, 2> center = {0, 0};
  };
  struct Child {
    int parent = -1;
    std::array<double, 2> a = {0, 0};       // offset signs * 2/5
    std::array<double, 2> center = {0, 0};
    double half = 0;                        // 3 eta / 5
    OpenSetDesc assigned;
    int assigned_index = -1;                // index within the parent family
  };
  std::vector<Parent> parents;
  std::vector<Child> children;
  int max_overlap = 0;         // measured on the check lattice
  bool overlap_ok = false;     // <= 2^m everywhere
  bool adjacency_ok = false;   // cross-parent intersecting children separated
};

using FamilyAssignment = std::function<std::vector<OpenSetDesc>(const std::array<int, 2>&)>;

CubeCovering refine_covering(const std::vector<std::array<double, 2>>& K, int m, double eta,
                             const FamilyAssignment& assignment);

// Instance (de)serialization for the standalone lemma harness.
std::vector<std::vector<OpenSetDesc>> comb_instance_from_json(const std::string& text, int* p);
std::string comb_result_to_json(const std::vector<std::vector<OpenSetDesc>>& families, int p,
                                const SubfamilyResult& res, bool oracle_ran, bool oracle_feasible);

// Seeded random instance satisfying the lemma hypothesis; some cross-family
// tangencies are planted to exercise the clearing step.
std::vector<std::vector<OpenSetDesc>> generate_comb_instance(int p, int omega, uint64_t seed);

}  // namespace minmax
