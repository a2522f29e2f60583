#include "spectrum.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace minmax {

SliceProblem spectrum_problem(const AmbientDomain& dom, const Slice& s, VectorFieldClass cls,
                              std::vector<uint8_t> movable) {
  return SliceProblem(dom, s, cls, std::move(movable));
}

namespace {

// Hessian-vector product by central differences of the reduced gradient.
std::vector<double> hess_vec(const SliceProblem& prob, const std::vector<double>& z0,
                             const std::vector<double>& v, double h) {
  int n = prob.dofs();
  std::vector<double> zp(n), zm(n), gp(n), gm(n), out(n);
  for (int i = 0; i < n; ++i) {
    zp[i] = z0[i] + h * v[i];
    zm[i] = z0[i] - h * v[i];
  }
  prob.eval(zp, &gp);
  prob.eval(zm, &gm);
  for (int i = 0; i < n; ++i) out[i] = (gp[i] - gm[i]) / (2 * h);
  return out;
}

}  // namespace

SpectrumResult second_variation_spectrum(const AmbientDomain& dom, const Slice& s,
                                         VectorFieldClass cls, const SpectrumOptions& opts) {
  SpectrumResult res;
  double mass = slice_mass(dom, s);
  if (!opts.skip_stationarity_check) {
    double rtol = opts.residual_tol > 0 ? opts.residual_tol : 1e-3 * (1 + mass);
    double r = stationarity_residual(dom, s, cls);
    if (r > rtol)
      throw Error(ErrorCode::NotStationary,
                  "residual " + std::to_string(r) + " > " + std::to_string(rtol));
  }
  SliceProblem prob(dom, s, cls, opts.movable);
  int n = prob.dofs();
  res.dofs = n;
  if (n == 0) return res;
  std::vector<double> z0 = prob.pack();
  double zs = 1.0;
  for (double c : z0) zs = std::max(zs, std::abs(c));
  double h = opts.fd_step * zs;

  int k = std::min(opts.k, n);
  if (n <= opts.dense_limit) {
    Eigen::MatrixXd H(n, n);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
      e[j] = 1.0;
      std::vector<double> col = hess_vec(prob, z0, e, h);
      for (int i = 0; i < n; ++i) H(i, j) = col[i];
      e[j] = 0.0;
    }
    Eigen::MatrixXd Hs = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs);
    for (int i = 0; i < k; ++i) {
      res.eigenvalues.push_back(es.eigenvalues()(i));
      std::vector<double> v(n);
      for (int r2 = 0; r2 < n; ++r2) v[r2] = es.eigenvectors()(r2, i);
      res.vectors.push_back(std::move(v));
    }
  } else {
    // Lanczos with full reorthogonalization on FD matvecs.
    int m = std::min(opts.lanczos_iters, n);
    std::vector<std::vector<double>> Q;
    std::vector<double> alpha, beta;
    std::vector<double> q(n);
    uint64_t sseed = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < n; ++i) {
      sseed = sseed * 6364136223846793005ull + 1442695040888963407ull;
      q[i] = double((sseed >> 11) % 2048) / 1024.0 - 1.0;
    }
    auto nrm = [&](const std::vector<double>& v) {
      double t = 0;
      for (double c : v) t += c * c;
      return std::sqrt(t);
    };
    double qn = nrm(q);
    for (auto& c : q) c /= qn;
    Q.push_back(q);
    std::vector<double> prev(n, 0.0);
    double b_prev = 0;
    for (int it = 0; it < m; ++it) {
      std::vector<double> w = hess_vec(prob, z0, Q[it], h);
      for (int i = 0; i < n; ++i) w[i] -= b_prev * prev[i];
      double a = 0;
      for (int i = 0; i < n; ++i) a += w[i] * Q[it][i];
      alpha.push_back(a);
      for (int i = 0; i < n; ++i) w[i] -= a * Q[it][i];
      // full reorthogonalization
      for (const auto& qq : Q) {
        double d = 0;
        for (int i = 0; i < n; ++i) d += w[i] * qq[i];
        for (int i = 0; i < n; ++i) w[i] -= d * qq[i];
      }
      double b = nrm(w);
      if (it + 1 < m) {
        if (b < 1e-12) break;
        beta.push_back(b);
        prev = Q[it];
        b_prev = b;
        for (auto& c : w) c /= b;
        Q.push_back(w);
      }
    }
    int mm = int(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mm, mm);
    for (int i = 0; i < mm; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < mm) {
        T(i, i + 1) = beta[i];
        T(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    int kk = std::min(k, mm);
    for (int i = 0; i < kk; ++i) {
      res.eigenvalues.push_back(es.eigenvalues()(i));
      std::vector<double> v(n, 0.0);
      for (int j2 = 0; j2 < mm; ++j2) {
        double c = es.eigenvectors()(j2, i);
        for (int r2 = 0; r2 < n; ++r2) v[r2] += c * Q[j2][r2];
      }
      double vn = nrm(v);
      if (vn > 0)
        for (auto& c : v) c /= vn;
      res.vectors.push_back(std::move(v));
    }
  }
  for (double ev : res.eigenvalues)
    if (ev < -opts.spec_tol) ++res.index;
  return res;
}

}  // namespace minmax
