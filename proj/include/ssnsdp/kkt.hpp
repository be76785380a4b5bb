#pragma once
// KKT residual
//   F(x, xi, Gamma) = ( ∇_x L,  h(x),  -g(x) + Π(g(x) + Gamma) )
// and elements of its generalized Jacobian. The Jacobian is kept in
// apply form; dense matrices are only formed on request (or when small).

#include "krylov.hpp"
#include "problem.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace ssnsdp {

struct KktResidual {
  Vector stationarity;
  Vector feasibility_eq;
  BlockSymMatrix cone_residual;

  Vector to_vector() const {
    Vector v(stationarity.size() + feasibility_eq.size() + cone_residual.svec_size());
    v << stationarity, feasibility_eq, svec(cone_residual);
    return v;
  }
  double norm() const {
    const double c = cone_residual.norm();
    return std::sqrt(stationarity.squaredNorm() + feasibility_eq.squaredNorm() + c * c);
  }
};

inline BlockSymMatrix cone_argument(const NlsdpProblem& p, const KktPoint& z) { return p.g(z.x) + z.gamma; }

inline KktResidual kkt_residual(const NlsdpProblem& p, const KktPoint& z, const BlockSpectral& dec) {
  const BlockSymMatrix gx = p.g(z.x);
  return {lagrangian_gradient(p, z), p.h(z.x), project_psd(dec) - gx};
}

inline KktResidual kkt_residual(const NlsdpProblem& p, const KktPoint& z) {
  check_point(p, z);
  return kkt_residual(p, z, eig_blocks(cone_argument(p, z)));
}

struct DenseOperator {
  Matrix matrix;
  Index dim() const { return matrix.rows(); }
};

// U(dx, dxi, dGamma) =
//   ( ∇²L dx + h'^* dxi + g'^* dGamma,  h' dx,  -g' dx + V(g' dx + dGamma) )
// with V acting blockwise as a Hadamard multiplier in an eigenbasis.
// Holds a pointer to the problem: the problem must outlive it.
class KktJacobian {
 public:
  KktJacobian(const NlsdpProblem& p, KktPoint z, std::vector<HadamardMap> v)
      : prob_(&p), z_(std::move(z)), v_(std::move(v)), orders_(p.cone_blocks()) {
    check_point(p, z_);
    if (v_.size() != orders_.size()) throw DimensionError("KktJacobian: one V map per cone block");
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (v_[i].order() != orders_[i]) throw DimensionError("KktJacobian: V map order mismatch");
    nx_ = p.x_dim();
    nm_ = p.eq_dim();
    ng_ = p.gamma_dim();
  }

  Index dim() const { return nx_ + nm_ + ng_; }
  const KktPoint& point() const { return z_; }
  const NlsdpProblem& problem() const { return *prob_; }

  Vector apply(const Vector& d) const {
    if (d.size() != dim()) throw DimensionError("KktJacobian::apply: wrong length");
    const Vector dx = d.head(nx_), dxi = d.segment(nx_, nm_);
    const BlockSymMatrix dg = smat_blocks(d.tail(ng_), orders_);
    const auto& p = *prob_;
    Vector out(dim());
    Vector top = p.hess_lagrangian(z_.x, z_.xi, z_.gamma, dx) + p.jac_g_adj(z_.x, dg);
    if (nm_ > 0) {
      top += p.jac_h_adj(z_.x, dxi);
      out.segment(nx_, nm_) = p.jac_h(z_.x, dx);
    }
    out.head(nx_) = top;
    const BlockSymMatrix gdx = p.jac_g(z_.x, dx);
    out.tail(ng_) = svec(apply_v(gdx + dg) - gdx);
    return out;
  }

  // V is self-adjoint on svec coordinates, ∇²L symmetric
  Vector apply_transpose(const Vector& d) const {
    if (d.size() != dim()) throw DimensionError("KktJacobian::apply_transpose: wrong length");
    const Vector a = d.head(nx_), b = d.segment(nx_, nm_);
    const BlockSymMatrix c = smat_blocks(d.tail(ng_), orders_);
    const auto& p = *prob_;
    const BlockSymMatrix vc = apply_v(c);
    Vector out(dim());
    Vector top = p.hess_lagrangian(z_.x, z_.xi, z_.gamma, a) + p.jac_g_adj(z_.x, vc - c);
    if (nm_ > 0) {
      top += p.jac_h_adj(z_.x, b);
      out.segment(nx_, nm_) = p.jac_h(z_.x, a);
    }
    out.head(nx_) = top;
    out.tail(ng_) = svec(p.jac_g(z_.x, a) + vc);
    return out;
  }

  Matrix to_dense() const {
    const Index n = dim();
    Matrix u(n, n);
    Vector e = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
      e[j] = 1.0;
      u.col(j) = apply(e);
      e[j] = 0.0;
    }
    return u;
  }

 private:
  BlockSymMatrix apply_v(const BlockSymMatrix& h) const {
    std::vector<SymMatrix> r;
    r.reserve(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) r.push_back(v_[i].apply(h.block(i)));
    return BlockSymMatrix(std::move(r));
  }

  const NlsdpProblem* prob_;
  KktPoint z_;
  std::vector<HadamardMap> v_;
  std::vector<Index> orders_;
  Index nx_ = 0, nm_ = 0, ng_ = 0;
};

// t = 1 gives U0, t = 0 gives UI, anything in between is a Clarke combination
inline KktJacobian make_jacobian(const NlsdpProblem& p, const KktPoint& z, const BlockSpectral& dec, double t) {
  std::vector<HadamardMap> v;
  v.reserve(dec.size());
  for (const auto& d : dec) v.push_back(v_map(d, t));
  return KktJacobian(p, z, std::move(v));
}

inline KktJacobian make_jacobian(const NlsdpProblem& p, const KktPoint& z, const BlockSpectral& dec, Variant var) {
  return make_jacobian(p, z, dec, var == Variant::zero ? 1.0 : 0.0);
}

inline KktJacobian make_jacobian(const NlsdpProblem& p, const KktPoint& z, Variant var, double class_tol = -1.0) {
  check_point(p, z);
  return make_jacobian(p, z, eig_blocks(cone_argument(p, z), class_tol), var);
}

inline DenseOperator assemble_U(const NlsdpProblem& p, const KktPoint& z, Variant var, double class_tol = -1.0) {
  return {make_jacobian(p, z, var, class_tol).to_dense()};
}

inline DenseOperator clarke_combination(const DenseOperator& u0, const DenseOperator& ui, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("clarke_combination: t must lie in [0, 1]");
  if (u0.matrix.rows() != ui.matrix.rows() || u0.matrix.cols() != ui.matrix.cols())
    throw DimensionError("clarke_combination: shape mismatch");
  return {t * u0.matrix + (1.0 - t) * ui.matrix};
}

// Is omega one of the 2x2 matrices 0, E, [[0,t],[t,1]], [[1,t],[t,0]] (t in [0,1])?
inline bool in_example2_family(const Matrix& w, double tol = 1e-14) {
  if (w.rows() != 2 || w.cols() != 2) return false;
  if (std::abs(w(0, 1) - w(1, 0)) > tol) return false;
  auto near = [&](double a, double b) { return std::abs(a - b) <= tol; };
  const double a = w(0, 0), t = w(0, 1), d = w(1, 1);
  if (near(a, 0) && near(t, 0) && near(d, 0)) return true;
  if (near(a, 1) && near(t, 1) && near(d, 1)) return true;
  const bool t_ok = t >= -tol && t <= 1 + tol;
  return t_ok && ((near(a, 0) && near(d, 1)) || (near(a, 1) && near(d, 0)));
}

// ex2 at its solution (all zero), with V replaced by H -> Omega o H.
// The caller keeps ex2's problem object alive.
inline KktJacobian example2_operator(const NlsdpProblem& ex2, const Matrix& omega) {
  if (!in_example2_family(omega))
    throw PreconditionError("example2_family: Omega is not in the admissible set");
  if (ex2.cone_blocks() != std::vector<Index>{2} || ex2.x_dim() != 3 || ex2.eq_dim() != 1)
    throw PreconditionError("example2_family: expects the ex2 problem");
  std::vector<HadamardMap> v{{Matrix::Identity(2, 2), omega}};
  return KktJacobian(ex2, zero_point(ex2), std::move(v));
}

inline DenseOperator example2_family(const NlsdpProblem& ex2, const Matrix& omega) {
  return {example2_operator(ex2, omega).to_dense()};
}

inline double min_singular_value(const Matrix& a) {
  if (a.size() == 0) return std::numeric_limits<double>::infinity();
  if (!a.allFinite()) throw NumericalError("min_singular_value: non-finite entries");
  if (a.rows() <= 64) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().minCoeff();
  }
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().minCoeff();
}

inline double min_singular_value(const DenseOperator& u) { return min_singular_value(u.matrix); }

struct SigmaOptions {
  Index dense_limit = 1500;
  LanczosOptions lanczos{};
};

// Dense SVD when small, otherwise Lanczos on U'U (the estimate is then an
// upper bound that is tight once the smallest Ritz value has converged).
inline double min_singular_value(const KktJacobian& u, const SigmaOptions& opt = {}) {
  if (u.dim() <= opt.dense_limit) return min_singular_value(u.to_dense());
  const LinearMap utu = [&u](const Vector& v) { return u.apply_transpose(u.apply(v)); };
  const LanczosResult r = lanczos_smallest(utu, u.dim(), opt.lanczos);
  if (!r.converged)
    log_msg(LogLevel::info, "sigma_min: Lanczos stopped after " + std::to_string(r.iterations) +
                                " steps without meeting its tolerance");
  return std::sqrt(r.value);
}

// Smallest distance of an eigenvalue of g(x) + Gamma to zero; F is
// differentiable near z when it is comfortably positive.
inline double differentiability_margin(const NlsdpProblem& p, const KktPoint& z) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& d : eig_blocks(cone_argument(p, z)))
    for (Index i = 0; i < d.order(); ++i) m = std::min(m, std::abs(d.lambda()[i]));
  return m;
}

inline DenseOperator fd_jacobian(const NlsdpProblem& p, const KktPoint& z, double step = 1e-7) {
  check_point(p, z);
  if (!(step > 0)) throw PreconditionError("fd_jacobian: step must be positive");
  const double margin = differentiability_margin(p, z);
  if (margin <= 10.0 * step)
    log_msg(LogLevel::warn, "fd_jacobian: eigenvalue within " + std::to_string(margin) +
                                " of zero; F may not be differentiable at this point");
  const Index n = kkt_dim(p);
  const Vector z0 = to_vector(z);
  Matrix j(n, n);
  for (Index c = 0; c < n; ++c) {
    Vector zp = z0, zm = z0;
    zp[c] += step;
    zm[c] -= step;
    j.col(c) = (kkt_residual(p, kkt_point_from_vector(p, zp)).to_vector() -
                kkt_residual(p, kkt_point_from_vector(p, zm)).to_vector()) / (2.0 * step);
  }
  return {j};
}

}  // namespace ssnsdp
