#include "comb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace minmax {

using nlohmann::json;

// ----------------------------------------------------------- descriptors

void OpenSetDesc::validate() const {
  switch (kind) {
    case Kind::Ball:
    case Kind::ComplementBall:
      if (!(r > 0)) throw Error(ErrorCode::Config, "ball radius must be > 0");
      break;
    case Kind::Annulus:
      if (!(0 < tau && tau < t)) throw Error(ErrorCode::Config, "annulus needs 0 < tau < t");
      break;
    case Kind::Interval:
      if (!(a < b)) throw Error(ErrorCode::Config, "interval needs a < b");
      break;
  }
}

Vec3 OpenSetDesc::effective_center() const {
  if (kind == Kind::Interval) return {(a + b) / 2, 0, 0};
  return center;
}

void OpenSetDesc::radial_range(double* lo, double* hi) const {
  switch (kind) {
    case Kind::Ball:
      *lo = 0;
      *hi = r;
      break;
    case Kind::Annulus:
      *lo = tau;
      *hi = t;
      break;
    case Kind::ComplementBall:
      *lo = r;
      *hi = domain_diam > 0 ? std::max(domain_diam, r) : std::numeric_limits<double>::max() / 4;
      break;
    case Kind::Interval:
      *lo = 0;
      *hi = (b - a) / 2;
      break;
  }
}

double OpenSetDesc::diam() const {
  double d = 0;
  switch (kind) {
    case Kind::Ball: d = 2 * r; break;
    case Kind::Annulus: d = 2 * t; break;
    case Kind::ComplementBall: d = domain_diam > 0 ? domain_diam : std::numeric_limits<double>::max() / 4; break;
    case Kind::Interval: d = b - a; break;
  }
  if (domain_diam > 0) d = std::min(d, domain_diam);
  return d;
}

std::string OpenSetDesc::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Ball: os << "Ball(r=" << r << ")"; break;
    case Kind::Annulus: os << "An(" << tau << "," << t << ")"; break;
    case Kind::ComplementBall: os << "CompBall(r=" << r << ")"; break;
    case Kind::Interval: os << "(" << a << "," << b << ")"; break;
  }
  return os.str();
}

double set_dist(const OpenSetDesc& u, const OpenSetDesc& v) {
  double l1, h1, l2, h2;
  u.radial_range(&l1, &h1);
  v.radial_range(&l2, &h2);
  double D = norm(u.effective_center() - v.effective_center());
  // Reachable distances s = |x - c2| for x in the first set form an interval.
  double s_lo, s_hi;
  if (D >= l1 && D <= h1) s_lo = 0;
  else s_lo = std::min(std::abs(D - l1), std::abs(D - h1));
  s_hi = D + h1;
  if (s_hi >= l2 && s_lo <= h2) return 0.0;
  if (s_lo > h2) return s_lo - h2;
  return l2 - s_hi;
}

bool COTuple::verify(double factor, double rel_slack, std::string* why) const {
  for (size_t i = 0; i < sets.size(); ++i)
    for (size_t j = i + 1; j < sets.size(); ++j) {
      double d = set_dist(sets[i], sets[j]);
      double need = factor * std::min(sets[i].diam(), sets[j].diam());
      double slack = rel_slack * std::max(1.0, need);
      if (d + slack < need) {
        if (why) {
          std::ostringstream os;
          os << "pair (" << i << "," << j << "): dist " << d << " < " << factor << " * min diam "
             << need / factor;
          *why = os.str();
        }
        return false;
      }
    }
  return true;
}

// ------------------------------------------------------ combinatorial lemma

SubfamilyResult extract_subfamilies(const std::vector<std::vector<OpenSetDesc>>& families, int p) {
  int nf = int(families.size());
  int quota = 1 << p;       // 2^p surviving sets per family
  int omega_min = 1 << (2 * p);  // 4^p
  if (nf == 0 || nf > quota)
    throw Error(ErrorCode::HypothesisViolated,
                "expected between 1 and 2^p families, got " + std::to_string(nf));
  size_t omega = families[0].size();
  for (const auto& f : families)
    if (f.size() != omega)
      throw Error(ErrorCode::HypothesisViolated, "families must have equal size");
  if (int(omega) < omega_min)
    throw Error(ErrorCode::TooFewSets,
                "omega = " + std::to_string(omega) + " < 4^p = " + std::to_string(omega_min));

  double scale = 0;
  for (const auto& f : families)
    for (const auto& s : f) scale = std::max(scale, s.diam());
  double zero_tol = 1e-12 * std::max(1.0, scale);

  // Hypothesis: within each family, dist >= 2 min diam.
  for (int fi = 0; fi < nf; ++fi)
    for (size_t i = 0; i < omega; ++i)
      for (size_t j = i + 1; j < omega; ++j) {
        double d = set_dist(families[fi][i], families[fi][j]);
        double need = 2 * std::min(families[fi][i].diam(), families[fi][j].diam());
        if (d + 1e-12 * std::max(1.0, need) < need) {
          std::ostringstream os;
          os << "family " << fi << " pair (" << i << "," << j << "): dist " << d
             << " < 2 min diam " << need / 2;
          throw Error(ErrorCode::HypothesisViolated, os.str());
        }
      }

  // All sets in ascending diameter order; ties broken by input order.
  struct Item {
    int fam, idx;
    double diam;
  };
  std::vector<Item> items;
  for (int fi = 0; fi < nf; ++fi)
    for (size_t j = 0; j < omega; ++j) items.push_back({fi, int(j), families[fi][j].diam()});
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.diam < b.diam; });

  std::vector<uint8_t> removed(items.size(), 0);
  std::vector<uint8_t> cleared(nf, 0);
  // The clearing scan: fix the leftmost remaining set; drop later sets at
  // distance zero from it; once the fixed set's family has secured 2^p
  // remaining sets up to the fixed position, drop the family's later sets.
  for (size_t pos = 0; pos < items.size(); ++pos) {
    if (removed[pos]) continue;
    const Item& fx = items[pos];
    const OpenSetDesc& fixed_set = families[fx.fam][fx.idx];
    for (size_t q = pos + 1; q < items.size(); ++q) {
      if (removed[q]) continue;
      double d = set_dist(fixed_set, families[items[q].fam][items[q].idx]);
      if (d <= zero_tol) removed[q] = 1;
    }
    if (!cleared[fx.fam]) {
      int secured = 0;
      for (size_t q = 0; q <= pos; ++q)
        if (!removed[q] && items[q].fam == fx.fam) ++secured;
      if (secured >= quota) {
        cleared[fx.fam] = 1;
        for (size_t q = pos + 1; q < items.size(); ++q)
          if (items[q].fam == fx.fam) removed[q] = 1;
      }
    }
  }

  SubfamilyResult res;
  res.kept.assign(nf, {});
  for (size_t q = 0; q < items.size(); ++q)
    if (!removed[q]) res.kept[items[q].fam].push_back(items[q].idx);
  for (auto& k : res.kept) std::sort(k.begin(), k.end());

  // Re-verify both conclusion bullets by direct distance checks.
  res.min_size = int(omega);
  for (const auto& k : res.kept) res.min_size = std::min(res.min_size, int(k.size()));
  res.min_cross_dist = std::numeric_limits<double>::max();
  for (int fi = 0; fi < nf; ++fi)
    for (int fj = fi + 1; fj < nf; ++fj)
      for (int i : res.kept[fi])
        for (int j : res.kept[fj]) {
          double d = set_dist(families[fi][i], families[fj][j]);
          res.min_cross_dist = std::min(res.min_cross_dist, d);
          if (d <= zero_tol) res.cross_separated = false;
        }
  if (nf == 1) res.min_cross_dist = std::numeric_limits<double>::max();
  if (res.min_size < quota || !res.cross_separated)
    throw Error(ErrorCode::Internal, "clearing algorithm postcondition failed");
  return res;
}

bool brute_force_feasible(const std::vector<std::vector<OpenSetDesc>>& families, int need,
                          std::vector<std::vector<int>>* witness) {
  int nf = int(families.size());
  double scale = 0;
  for (const auto& f : families)
    for (const auto& s : f) scale = std::max(scale, s.diam());
  double zero_tol = 1e-12 * std::max(1.0, scale);
  // Enumerate subsets of each family of size >= need, depth-first across
  // families, pruning on cross-family separation.
  std::vector<std::vector<std::vector<int>>> options(nf);
  for (int fi = 0; fi < nf; ++fi) {
    int n = int(families[fi].size());
    for (int mask = 1; mask < (1 << n); ++mask) {
      if (__builtin_popcount(unsigned(mask)) < need) continue;
      std::vector<int> sel;
      for (int b = 0; b < n; ++b)
        if (mask & (1 << b)) sel.push_back(b);
      options[fi].push_back(std::move(sel));
    }
  }
  std::vector<std::vector<int>> chosen(nf);
  std::function<bool(int)> rec = [&](int fi) -> bool {
    if (fi == nf) return true;
    for (const auto& sel : options[fi]) {
      bool ok = true;
      for (int fj = 0; fj < fi && ok; ++fj)
        for (int i : chosen[fj]) {
          for (int j : sel)
            if (set_dist(families[fj][i], families[fi][j]) <= zero_tol) {
              ok = false;
              break;
            }
          if (!ok) break;
        }
      if (!ok) continue;
      chosen[fi] = sel;
      if (rec(fi + 1)) return true;
    }
    return false;
  };
  bool feasible = rec(0);
  if (feasible && witness) *witness = chosen;
  return feasible;
}

// ----------------------------------------------------------- annulus tuple

COTuple make_annulus_tuple(const AmbientDomain& dom, Vec3 x, const std::vector<double>& radii) {
  if (radii.size() < 2) throw Error(ErrorCode::Config, "need at least two radii");
  double inj_scale = dom.metric_diameter();
  if (!(radii[0] < inj_scale))
    throw Error(ErrorCode::Config, "r1 must be below the injectivity-scale estimate");
  for (size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1] / 9.0))
      throw Error(ErrorCode::RadiiTooClose,
                  "radius ratio " + std::to_string(radii[i] / radii[i - 1]) + " >= 1/9");
  }
  double dd = dom.metric_diameter();
  COTuple tup;
  OpenSetDesc comp;
  comp.kind = OpenSetDesc::Kind::ComplementBall;
  comp.center = x;
  comp.r = radii[0];
  comp.domain_diam = dd;
  tup.sets.push_back(comp);
  for (size_t l = 1; l + 1 < radii.size(); ++l) {
    OpenSetDesc an;
    an.kind = OpenSetDesc::Kind::Annulus;
    an.center = x;
    an.tau = radii[l];
    an.t = radii[l - 1] / 9.0;
    an.domain_diam = dd;
    tup.sets.push_back(an);
  }
  OpenSetDesc inner;
  inner.kind = OpenSetDesc::Kind::Ball;
  inner.center = x;
  inner.r = radii.back();
  inner.domain_diam = dd;
  tup.sets.push_back(inner);
  std::string why;
  if (!tup.verify(4.0, 1e-12, &why))
    throw Error(ErrorCode::Internal, "annulus tuple failed CO check: " + why);
  return tup;
}

// --------------------------------------------------------- cube covering

CubeCovering refine_covering(const std::vector<std::array<double, 2>>& K, int m, double eta,
                             const FamilyAssignment& assignment) {
  if (m < 1 || m > 2) throw Error(ErrorCode::Config, "m must be 1 or 2");
  CubeCovering cov;
  cov.m = m;
  cov.eta = eta;
  double et = 0.9 * eta;
  cov.eta_tilde = et;
  int quota = 1 << m;
  if (K.empty()) {
    cov.overlap_ok = true;
    cov.adjacency_ok = true;
    return cov;
  }
  int xi = 0;
  while ((2 * xi + 1) * et <= 1 - eta) ++xi;

  auto center_of = [&](const std::array<int, 2>& r) {
    return std::array<double, 2>{(2 * r[0] + 1) * et, m == 2 ? (2 * r[1] + 1) * et : 0.0};
  };
  auto cube_hits_K = [&](const std::array<double, 2>& c, double half) {
    for (const auto& k : K) {
      bool in = std::abs(k[0] - c[0]) < half && (m == 1 || std::abs(k[1] - c[1]) < half);
      if (in) return true;
    }
    return false;
  };

  std::map<std::array<int, 2>, int> parent_of;
  for (int r1 = 0; r1 <= (m == 2 ? xi : 0); ++r1)
    for (int r0 = 0; r0 <= xi; ++r0) {
      std::array<int, 2> r = {r0, r1};
      auto c = center_of(r);
      if (!cube_hits_K(c, eta)) continue;
      for (int d = 0; d < m; ++d)
        if (c[d] - eta < 0 || c[d] + eta > 1)
          throw Error(ErrorCode::Config, "eta too large: covering cube meets the boundary of P");
      parent_of[r] = int(cov.parents.size());
      cov.parents.push_back({r, c});
    }
  if (cov.parents.empty()) throw Error(ErrorCode::CoverageGap, "no covering cube meets K");

  // Children: 2^m per parent, centers offset by +-2/5 eta, half-width 3/5 eta.
  double half = 0.6 * eta;
  std::vector<std::array<double, 2>> offsets;
  if (m == 1)
    offsets = {{-0.4, 0}, {0.4, 0}};
  else
    offsets = {{-0.4, -0.4}, {0.4, -0.4}, {-0.4, 0.4}, {0.4, 0.4}};
  for (size_t pi = 0; pi < cov.parents.size(); ++pi)
    for (const auto& a : offsets) {
      CubeCovering::Child ch;
      ch.parent = int(pi);
      ch.a = a;
      ch.center = {cov.parents[pi].center[0] + a[0] * eta,
                   m == 2 ? cov.parents[pi].center[1] + a[1] * eta : 0.0};
      ch.half = half;
      cov.children.push_back(ch);
    }

  auto boxes_intersect = [&](const std::array<double, 2>& c1, double h1,
                             const std::array<double, 2>& c2, double h2) {
    for (int d = 0; d < m; ++d)
      if (std::abs(c1[d] - c2[d]) >= h1 + h2) return false;
    return true;
  };

  // Group the child-cluster lemma calls by the set of parents each child
  // touches; intersecting children share the same cluster, so their
  // subfamilies come from one deterministic call.
  std::map<std::vector<int>, std::vector<std::vector<int>>> cluster_cache;
  std::vector<std::vector<int>> child_cluster(cov.children.size());
  std::vector<int> child_pos_in_cluster(cov.children.size(), -1);
  for (size_t ci = 0; ci < cov.children.size(); ++ci) {
    auto& ch = cov.children[ci];
    std::vector<int> cluster;
    for (size_t pi = 0; pi < cov.parents.size(); ++pi)
      if (boxes_intersect(ch.center, ch.half, cov.parents[pi].center, eta))
        cluster.push_back(int(pi));
    std::sort(cluster.begin(), cluster.end());
    if (int(cluster.size()) > quota)
      throw Error(ErrorCode::Internal, "child touches more than 2^m parents");
    child_cluster[ci] = cluster;
    child_pos_in_cluster[ci] =
        int(std::find(cluster.begin(), cluster.end(), ch.parent) - cluster.begin());
    if (!cluster_cache.count(cluster)) {
      std::vector<std::vector<OpenSetDesc>> fams;
      for (int pi : cluster) fams.push_back(assignment(cov.parents[pi].r));
      SubfamilyResult sr = extract_subfamilies(fams, m);
      cluster_cache[cluster] = sr.kept;
    }
  }

  // Distinct set per child within each parent (pools of >= 2^m candidates
  // admit a system of distinct representatives; a tiny DFS finds one).
  for (size_t pi = 0; pi < cov.parents.size(); ++pi) {
    std::vector<int> kids;
    for (size_t ci = 0; ci < cov.children.size(); ++ci)
      if (cov.children[ci].parent == int(pi)) kids.push_back(int(ci));
    std::vector<int> pick(kids.size(), -1);
    std::function<bool(size_t)> assign_rec = [&](size_t ki) -> bool {
      if (ki == kids.size()) return true;
      int ci = kids[ki];
      const auto& pool = cluster_cache[child_cluster[ci]][child_pos_in_cluster[ci]];
      for (int cand : pool) {
        bool used = false;
        for (size_t kj = 0; kj < ki; ++kj)
          if (pick[kj] == cand) used = true;
        if (used) continue;
        pick[ki] = cand;
        if (assign_rec(ki + 1)) return true;
      }
      pick[ki] = -1;
      return false;
    };
    if (!assign_rec(0))
      throw Error(ErrorCode::Internal, "distinct representative assignment failed");
    for (size_t ki = 0; ki < kids.size(); ++ki) {
      int ci = kids[ki];
      auto fam = assignment(cov.parents[pi].r);
      cov.children[ci].assigned_index = pick[ki];
      cov.children[ci].assigned = fam[pick[ki]];
    }
  }

  // Property (ii): intersecting children of distinct parents get separated sets.
  cov.adjacency_ok = true;
  for (size_t ci = 0; ci < cov.children.size(); ++ci)
    for (size_t cj = ci + 1; cj < cov.children.size(); ++cj) {
      const auto& a = cov.children[ci];
      const auto& b = cov.children[cj];
      if (a.parent == b.parent) continue;
      if (!boxes_intersect(a.center, a.half, b.center, b.half)) continue;
      if (set_dist(a.assigned, b.assigned) <= 0) cov.adjacency_ok = false;
    }
  if (!cov.adjacency_ok)
    throw Error(ErrorCode::Internal, "refined covering adjacency separation failed");

  // Property (iii): every point lies in at most 2^m refined cubes, checked
  // exhaustively on the eta/20 lattice.
  cov.max_overlap = 0;
  double step = eta / 20;
  int nsteps = int(1.0 / step) + 1;
  for (int i = 0; i <= nsteps; ++i) {
    double x = std::min(1.0, i * step);
    int jmax = m == 2 ? nsteps : 0;
    for (int j = 0; j <= jmax; ++j) {
      double y = std::min(1.0, j * step);
      int cnt = 0;
      for (const auto& ch : cov.children) {
        bool in = std::abs(x - ch.center[0]) < ch.half &&
                  (m == 1 || std::abs(y - ch.center[1]) < ch.half);
        if (in) ++cnt;
      }
      cov.max_overlap = std::max(cov.max_overlap, cnt);
    }
  }
  cov.overlap_ok = cov.max_overlap <= quota;

  // Shrunk cubes still covering K, with the largest margin delta.
  cov.delta = std::numeric_limits<double>::max();
  for (const auto& k : K) {
    double best = -std::numeric_limits<double>::max();
    for (const auto& ch : cov.children) {
      double depth = ch.half - std::abs(k[0] - ch.center[0]);
      if (m == 2) depth = std::min(depth, ch.half - std::abs(k[1] - ch.center[1]));
      best = std::max(best, depth);
    }
    cov.delta = std::min(cov.delta, best);
  }
  if (!(cov.delta > 0))
    throw Error(ErrorCode::CoverageGap, "shrunk refined cubes do not cover K");
  return cov;
}

// ------------------------------------------------------------ harness I/O

static OpenSetDesc desc_from_json(const json& d) {
  OpenSetDesc s;
  std::string k = d.at("kind");
  if (k == "ball") {
    s.kind = OpenSetDesc::Kind::Ball;
    s.r = d.at("r");
  } else if (k == "annulus") {
    s.kind = OpenSetDesc::Kind::Annulus;
    s.tau = d.at("tau");
    s.t = d.at("t");
  } else if (k == "complement_ball") {
    s.kind = OpenSetDesc::Kind::ComplementBall;
    s.r = d.at("r");
  } else if (k == "interval") {
    s.kind = OpenSetDesc::Kind::Interval;
    s.a = d.at("a");
    s.b = d.at("b");
  } else {
    throw Error(ErrorCode::Config, "unknown set kind " + k);
  }
  if (d.contains("center")) {
    auto& c = d["center"];
    s.center = {c[0], c.size() > 1 ? double(c[1]) : 0.0, c.size() > 2 ? double(c[2]) : 0.0};
  }
  s.domain_diam = d.value("domain_diam", 0.0);
  s.validate();
  return s;
}

static json desc_to_json(const OpenSetDesc& s) {
  json d;
  switch (s.kind) {
    case OpenSetDesc::Kind::Ball:
      d["kind"] = "ball";
      d["r"] = s.r;
      break;
    case OpenSetDesc::Kind::Annulus:
      d["kind"] = "annulus";
      d["tau"] = s.tau;
      d["t"] = s.t;
      break;
    case OpenSetDesc::Kind::ComplementBall:
      d["kind"] = "complement_ball";
      d["r"] = s.r;
      break;
    case OpenSetDesc::Kind::Interval:
      d["kind"] = "interval";
      d["a"] = s.a;
      d["b"] = s.b;
      break;
  }
  if (s.kind != OpenSetDesc::Kind::Interval) d["center"] = {s.center.x, s.center.y, s.center.z};
  if (s.domain_diam > 0) d["domain_diam"] = s.domain_diam;
  return d;
}

std::vector<std::vector<OpenSetDesc>> comb_instance_from_json(const std::string& text, int* p) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Config, std::string("comb instance: ") + e.what());
  }
  if (p) *p = j.value("p", 1);
  std::vector<std::vector<OpenSetDesc>> fams;
  for (auto& fj : j.at("families")) {
    std::vector<OpenSetDesc> f;
    for (auto& dj : fj) f.push_back(desc_from_json(dj));
    fams.push_back(std::move(f));
  }
  return fams;
}

std::string comb_result_to_json(const std::vector<std::vector<OpenSetDesc>>& families, int p,
                                const SubfamilyResult& res, bool oracle_ran,
                                bool oracle_feasible) {
  json j;
  j["p"] = p;
  json fams = json::array();
  for (const auto& f : families) {
    json fj = json::array();
    for (const auto& s : f) fj.push_back(desc_to_json(s));
    fams.push_back(fj);
  }
  j["families"] = fams;
  j["kept"] = res.kept;
  j["min_cross_dist"] = res.min_cross_dist == std::numeric_limits<double>::max()
                            ? json(nullptr)
                            : json(res.min_cross_dist);
  j["min_subfamily_size"] = res.min_size;
  j["bullets_verified"] = res.cross_separated && res.min_size >= (1 << p);
  if (oracle_ran) j["oracle_feasible"] = oracle_feasible;
  return j.dump(2);
}

std::vector<std::vector<OpenSetDesc>> generate_comb_instance(int p, int omega, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> upos(0.0, 10.0);
  std::uniform_real_distribution<double> urad(0.06, 0.22);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int nf = 1 << p;
  std::vector<std::vector<OpenSetDesc>> fams(nf);
  for (int fi = 0; fi < nf; ++fi) {
    auto& f = fams[fi];
    int guard = 0;
    while (int(f.size()) < omega) {
      if (++guard > 100000) throw Error(ErrorCode::Internal, "instance generation stalled");
      OpenSetDesc s;
      s.kind = OpenSetDesc::Kind::Ball;
      s.center = {upos(rng), upos(rng), 0};
      s.r = urad(rng);
      bool ok = true;
      for (const auto& o : f) {
        double need = 2 * std::min(s.diam(), o.diam());
        if (set_dist(s, o) < need * 1.05) {
          ok = false;
          break;
        }
      }
      if (ok) f.push_back(s);
    }
  }
  // Plant tangencies: move some later-family balls to touch an earlier one.
  for (int fi = 1; fi < nf; ++fi) {
    for (int j = 0; j < omega; ++j) {
      if (u01(rng) > 0.4) continue;
      int fo = int(u01(rng) * fi);
      int jo = int(u01(rng) * omega);
      auto& target = fams[fo][jo];
      auto& s = fams[fi][j];
      double ang = 2 * kPi * u01(rng);
      Vec3 c = target.center +
               Vec3{std::cos(ang), std::sin(ang), 0} * (target.r + s.r);
      OpenSetDesc cand = s;
      cand.center = c;
      bool ok = true;
      for (int j2 = 0; j2 < omega; ++j2) {
        if (j2 == j) continue;
        double need = 2 * std::min(cand.diam(), fams[fi][j2].diam());
        if (set_dist(cand, fams[fi][j2]) < need * 1.0000001) {
          ok = false;
          break;
        }
      }
      if (ok) s = cand;
    }
  }
  return fams;
}

}  // namespace minmax
