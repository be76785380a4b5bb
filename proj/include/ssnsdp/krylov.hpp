#pragma once
// Matrix-free Krylov pieces for operators too big to factor densely:
// restarted GMRES (MGS with one reorthogonalisation pass) and a Lanczos
// estimate of the smallest eigenvalue of a symmetric PSD operator.

#include "common.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace ssnsdp {

using LinearMap = std::function<Vector(const Vector&)>;

struct GmresOptions {
  double rel_tol = 1e-13;   // on ||b - A x|| / ||b||
  int restart = 200;
  int max_iter = 3000;
};

struct GmresResult {
  Vector x;
  double residual = 0;      // true residual norm at exit
  int iterations = 0;
  bool converged = false;
};

inline GmresResult gmres(const LinearMap& a, const Vector& b, const GmresOptions& opt = {}) {
  const Index n = b.size();
  GmresResult res;
  res.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0) {
    res.converged = true;
    return res;
  }
  const double target = opt.rel_tol * bnorm;
  const int m = std::max(1, std::min<int>(opt.restart, static_cast<int>(n)));
  Matrix v(n, m + 1);
  Matrix h = Matrix::Zero(m + 1, m);
  Vector cs(m), sn(m), g(m + 1);
  Vector r = b;
  double rnorm = bnorm;
  int total = 0;
  double best = rnorm;
  int stall = 0;

  while (total < opt.max_iter) {
    v.col(0) = r / rnorm;
    g.setZero();
    g[0] = rnorm;
    h.setZero();
    int k = 0;
    for (; k < m && total < opt.max_iter; ++k, ++total) {
      Vector w = a(v.col(k));
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const double c = v.col(i).dot(w);
          h(i, k) += c;
          w -= c * v.col(i);
        }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      const double den = std::hypot(h(k, k), h(k + 1, k));
      if (den == 0) {
        cs[k] = 1;
        sn[k] = 0;
      } else {
        cs[k] = h(k, k) / den;
        sn[k] = h(k + 1, k) / den;
      }
      h(k, k) = den;
      h(k + 1, k) = 0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= 0.5 * target || h(k, k) == 0) {
        ++k;
        ++total;
        break;
      }
    }
    // back substitution on the k x k triangle
    Vector y = Vector::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
      y[i] = h(i, i) != 0 ? s / h(i, i) : 0.0;
    }
    res.x += v.leftCols(k) * y;
    r = b - a(res.x);
    rnorm = r.norm();
    res.iterations = total;
    if (rnorm <= target) {
      res.converged = true;
      break;
    }
    if (rnorm < 0.5 * best) {
      best = rnorm;
      stall = 0;
    } else if (++stall >= 3) {
      break;  // restarts no longer help
    }
    if (!std::isfinite(rnorm)) break;
  }
  res.residual = rnorm;
  return res;
}

struct LanczosOptions {
  int max_iter = 500;
  double rel_tol = 1e-9;    // Ritz residual relative to the largest Ritz value
  int check_every = 10;     // Ritz extraction is not free; do it periodically
  std::uint64_t seed = 20240917;
};

struct LanczosResult {
  double value = 0;         // smallest Ritz value (an upper bound on lambda_min)
  int iterations = 0;
  bool converged = false;
};

// a must be symmetric positive semidefinite; full reorthogonalisation.
inline LanczosResult lanczos_smallest(const LinearMap& a, Index n, const LanczosOptions& opt = {}) {
  LanczosResult res;
  if (n == 0) return res;
  const int kmax = static_cast<int>(std::min<Index>(opt.max_iter, n));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  Matrix q(n, kmax + 1);
  Vector q0(n);
  for (Index i = 0; i < n; ++i) q0[i] = nd(rng);
  q.col(0) = q0.normalized();
  std::vector<double> al, be;
  for (int k = 0; k < kmax; ++k) {
    Vector w = a(q.col(k));
    const double ak = q.col(k).dot(w);
    al.push_back(ak);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    const double bk = w.norm();
    const bool last = k + 1 == kmax || bk == 0;
    if ((k + 1) % opt.check_every == 0 || last) {
      // Ritz values of the (k+1)-tridiagonal
      const int m = k + 1;
      Vector d = Eigen::Map<const Vector>(al.data(), m);
      Vector e = m > 1 ? Vector(Eigen::Map<const Vector>(be.data(), m - 1)) : Vector(0);
      Eigen::SelfAdjointEigenSolver<Matrix> es;
      es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      const double theta = es.eigenvalues()[0];
      const double tmax = std::max(std::abs(es.eigenvalues()[m - 1]), 1e-300);
      const double resid = bk * std::abs(es.eigenvectors()(m - 1, 0));
      res.value = std::max(theta, 0.0);
      res.iterations = m;
      if (resid <= opt.rel_tol * tmax || bk <= 1e-14 * tmax) {
        res.converged = true;
        break;
      }
      if (last) break;
    }
    be.push_back(bk);
    q.col(k + 1) = w / bk;
  }
  return res;
}

}  // namespace ssnsdp
