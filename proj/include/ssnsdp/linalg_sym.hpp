#pragma once
// Symmetric-matrix toolkit: svec/smat, block-diagonal symmetric matrices,
// sorted spectral decompositions with alpha/beta/gamma index sets, the PSD
// projection and its directional derivative, the first divided-difference
// matrix and the V0/VI generalized-Jacobian elements.

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace ssnsdp {

inline constexpr double kSqrt2 = 1.41421356237309504880;

inline Index svec_dim(Index n) { return n * (n + 1) / 2; }

// Column-major upper triangle: (0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ...
inline Index svec_index(Index i, Index j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

inline Index order_from_svec_dim(Index len) {
  // n(n+1)/2 = len
  Index n = static_cast<Index>(std::llround((std::sqrt(8.0 * double(len) + 1.0) - 1.0) / 2.0));
  if (n < 0 || svec_dim(n) != len)
    throw DimensionError("svec length " + std::to_string(len) + " is not triangular");
  return n;
}

// Symmetric matrix; the upper triangle of whatever it is built from wins, so
// the stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : m_(Matrix::Zero(n, n)) {}
  explicit SymMatrix(const Matrix& a) : m_(a) {
    if (a.rows() != a.cols())
      throw DimensionError("SymMatrix needs a square matrix, got " + std::to_string(a.rows()) +
                           "x" + std::to_string(a.cols()));
    m_.triangularView<Eigen::StrictlyLower>() = m_.transpose();
  }

  static SymMatrix zero(Index n) { return SymMatrix(n); }
  static SymMatrix identity(Index n) { return SymMatrix(Matrix(Matrix::Identity(n, n))); }
  static SymMatrix diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

  Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double norm() const { return m_.norm(); }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    check_same(a, b);
    return SymMatrix(Matrix(a.m_ + b.m_));
  }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    check_same(a, b);
    return SymMatrix(Matrix(a.m_ - b.m_));
  }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(Matrix(s * a.m_)); }
  friend SymMatrix operator-(const SymMatrix& a) { return SymMatrix(Matrix(-a.m_)); }

 private:
  static void check_same(const SymMatrix& a, const SymMatrix& b) {
    if (a.order() != b.order())
      throw DimensionError("order mismatch: " + std::to_string(a.order()) + " vs " +
                           std::to_string(b.order()));
  }
  Matrix m_;
};

inline double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw DimensionError("inner: order mismatch");
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

inline Vector svec(const SymMatrix& a) {
  const Index n = a.order();
  Vector v(svec_dim(n));
  const Matrix& m = a.matrix();
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) v[k++] = (i == j) ? m(i, j) : kSqrt2 * m(i, j);
  return v;
}

inline SymMatrix smat(const Eigen::Ref<const Vector>& v, Index n) {
  if (svec_dim(n) != v.size())
    throw DimensionError("smat: length " + std::to_string(v.size()) + " does not match order " +
                         std::to_string(n));
  Matrix m(n, n);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      const double x = (i == j) ? v[k] : v[k] / kSqrt2;
      m(i, j) = x;
      m(j, i) = x;
      ++k;
    }
  return SymMatrix(m);
}

inline SymMatrix smat(const Eigen::Ref<const Vector>& v) { return smat(v, order_from_svec_dim(v.size())); }

// Element of S^{n_1} x ... x S^{n_p}
class BlockSymMatrix {
 public:
  BlockSymMatrix() = default;
  explicit BlockSymMatrix(std::vector<SymMatrix> blocks) : blocks_(std::move(blocks)) {}

  static BlockSymMatrix zeros(const std::vector<Index>& orders) {
    std::vector<SymMatrix> b;
    b.reserve(orders.size());
    for (Index n : orders) b.emplace_back(n);
    return BlockSymMatrix(std::move(b));
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  const SymMatrix& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<SymMatrix>& blocks() const { return blocks_; }

  std::vector<Index> orders() const {
    std::vector<Index> o;
    o.reserve(blocks_.size());
    for (const auto& b : blocks_) o.push_back(b.order());
    return o;
  }
  Index svec_size() const {
    Index s = 0;
    for (const auto& b : blocks_) s += svec_dim(b.order());
    return s;
  }
  double norm() const {
    double s = 0;
    for (const auto& b : blocks_) s += b.matrix().squaredNorm();
    return std::sqrt(s);
  }

  friend BlockSymMatrix operator+(const BlockSymMatrix& a, const BlockSymMatrix& b) {
    return zip(a, b, [](const SymMatrix& x, const SymMatrix& y) { return x + y; });
  }
  friend BlockSymMatrix operator-(const BlockSymMatrix& a, const BlockSymMatrix& b) {
    return zip(a, b, [](const SymMatrix& x, const SymMatrix& y) { return x - y; });
  }
  friend BlockSymMatrix operator*(double s, const BlockSymMatrix& a) {
    std::vector<SymMatrix> r;
    r.reserve(a.blocks_.size());
    for (const auto& b : a.blocks_) r.push_back(s * b);
    return BlockSymMatrix(std::move(r));
  }

 private:
  template <class Op>
  static BlockSymMatrix zip(const BlockSymMatrix& a, const BlockSymMatrix& b, Op op) {
    if (a.orders() != b.orders()) throw DimensionError("block structure mismatch");
    std::vector<SymMatrix> r;
    r.reserve(a.blocks_.size());
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) r.push_back(op(a.blocks_[i], b.blocks_[i]));
    return BlockSymMatrix(std::move(r));
  }
  std::vector<SymMatrix> blocks_;
};

inline double inner(const BlockSymMatrix& a, const BlockSymMatrix& b) {
  if (a.orders() != b.orders()) throw DimensionError("inner: block structure mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.num_blocks(); ++i) s += inner(a.block(i), b.block(i));
  return s;
}

inline Index svec_size(const std::vector<Index>& orders) {
  Index s = 0;
  for (Index n : orders) s += svec_dim(n);
  return s;
}

inline Vector svec(const BlockSymMatrix& a) {
  Vector v(a.svec_size());
  Index off = 0;
  for (const auto& b : a.blocks()) {
    const Index d = svec_dim(b.order());
    v.segment(off, d) = svec(b);
    off += d;
  }
  return v;
}

inline BlockSymMatrix smat_blocks(const Eigen::Ref<const Vector>& v, const std::vector<Index>& orders) {
  if (v.size() != svec_size(orders))
    throw DimensionError("smat_blocks: length " + std::to_string(v.size()) + ", expected " +
                         std::to_string(svec_size(orders)));
  std::vector<SymMatrix> b;
  b.reserve(orders.size());
  Index off = 0;
  for (Index n : orders) {
    b.push_back(smat(v.segment(off, svec_dim(n)), n));
    off += svec_dim(n);
  }
  return BlockSymMatrix(std::move(b));
}

// ---------------------------------------------------------------------------
// spectral decomposition

enum class EigClass : unsigned char { alpha, beta, gamma };

inline double default_class_tol(double spectral_norm) { return 1e-12 * std::max(1.0, spectral_norm); }

class SpectralDecomposition {
 public:
  SpectralDecomposition() = default;

  // lambda need not be sorted; columns of p are reordered along with it.
  static SpectralDecomposition from_factors(Matrix p, Vector lambda, double class_tol) {
    if (p.rows() != p.cols() || p.cols() != lambda.size())
      throw DimensionError("from_factors: P and lambda disagree");
    const Index n = lambda.size();
    std::vector<Index> perm(n);
    for (Index i = 0; i < n; ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) { return lambda[a] > lambda[b]; });
    SpectralDecomposition d;
    d.p_.resize(n, n);
    d.lambda_.resize(n);
    for (Index k = 0; k < n; ++k) {
      d.p_.col(k) = p.col(perm[k]);
      d.lambda_[k] = lambda[perm[k]];
    }
    d.tol_ = class_tol;
    d.classify();
    return d;
  }

  Index order() const { return lambda_.size(); }
  const Matrix& P() const { return p_; }
  const Vector& lambda() const { return lambda_; }
  const std::vector<Index>& alpha() const { return alpha_; }
  const std::vector<Index>& beta() const { return beta_; }
  const std::vector<Index>& gamma() const { return gamma_; }
  double class_tol() const { return tol_; }
  EigClass cls(Index i) const { return cls_[static_cast<std::size_t>(i)]; }

  // lambda with the beta entries pinned to zero
  Vector lambda_classified() const {
    Vector l = lambda_;
    for (Index i : beta_) l[i] = 0.0;
    return l;
  }

  SymMatrix reconstruct() const { return SymMatrix(Matrix(p_ * lambda_.asDiagonal() * p_.transpose())); }

  Matrix rotate_in(const Matrix& h) const { return p_.transpose() * h * p_; }
  Matrix rotate_out(const Matrix& h) const { return p_ * h * p_.transpose(); }

 private:
  void classify() {
    alpha_.clear();
    beta_.clear();
    gamma_.clear();
    cls_.assign(static_cast<std::size_t>(lambda_.size()), EigClass::beta);
    for (Index i = 0; i < lambda_.size(); ++i) {
      if (lambda_[i] > tol_) {
        alpha_.push_back(i);
        cls_[i] = EigClass::alpha;
      } else if (lambda_[i] < -tol_) {
        gamma_.push_back(i);
        cls_[i] = EigClass::gamma;
      } else {
        beta_.push_back(i);
      }
    }
  }

  Matrix p_;
  Vector lambda_;
  double tol_ = 0;
  std::vector<Index> alpha_, beta_, gamma_;
  std::vector<EigClass> cls_;
};

// class_tol < 0 selects the default 1e-12 * max(1, ||A||_2)
inline SpectralDecomposition eig_sym(const SymMatrix& a, double class_tol = -1.0) {
  const Index n = a.order();
  if (n == 0) return SpectralDecomposition::from_factors(Matrix(0, 0), Vector(0), 0.0);
  if (!a.matrix().allFinite()) throw NumericalError("eig_sym: matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  if (es.info() != Eigen::Success)
    throw NumericalError("eig_sym: eigensolver did not converge (order " + std::to_string(n) +
                         ", norm " + std::to_string(a.norm()) + ")");
  const Vector& ev = es.eigenvalues();
  const double nrm = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
  const double tol = class_tol < 0 ? default_class_tol(nrm) : class_tol;
  // ascending from Eigen; flip to nonincreasing without touching ties
  Matrix p = es.eigenvectors().rowwise().reverse();
  Vector l = ev.reverse();
  return SpectralDecomposition::from_factors(std::move(p), std::move(l), tol);
}

inline SymMatrix project_psd(const SpectralDecomposition& d) {
  const Vector lp = d.lambda().cwiseMax(0.0);
  return SymMatrix(Matrix(d.P() * lp.asDiagonal() * d.P().transpose()));
}

inline SymMatrix project_psd(const SymMatrix& a) { return project_psd(eig_sym(a)); }

// First divided differences of t -> max(t, 0) at the classified eigenvalues.
struct XiMatrix {
  Matrix entries;
};

inline XiMatrix xi_matrix(const SpectralDecomposition& d) {
  const Index n = d.order();
  const Vector& l = d.lambda();
  Matrix xi(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const EigClass ci = d.cls(i), cj = d.cls(j);
      double v;
      if (ci == EigClass::gamma && cj == EigClass::gamma)
        v = 0.0;
      else if (ci == EigClass::gamma || cj == EigClass::gamma) {
        if (ci == EigClass::alpha)
          v = l[i] / (l[i] - l[j]);
        else if (cj == EigClass::alpha)
          v = l[j] / (l[j] - l[i]);
        else
          v = 0.0;  // beta-gamma
      } else {
        v = 1.0;  // alpha/beta with alpha/beta (0/0 := 1 on beta-beta)
      }
      xi(i, j) = v;
    }
  return {xi};
}

enum class Variant { zero, identity };  // V0/U0 and VI/UI

inline const char* variant_name(Variant v) { return v == Variant::zero ? "U0" : "UI"; }

// H -> P (mask o (P^T H P)) P^T. Every V-type element used here has this form.
struct HadamardMap {
  Matrix P;
  Matrix mask;

  Index order() const { return mask.rows(); }
  SymMatrix apply(const SymMatrix& h) const {
    if (h.order() != order()) throw DimensionError("HadamardMap: order mismatch");
    if (order() == 0) return h;
    Matrix t = P.transpose() * h.matrix() * P;
    t.array() *= mask.array();
    return SymMatrix(Matrix(P * t * P.transpose()));
  }
};

// t*V0 + (1-t)*VI; t = 0 gives VI, t = 1 gives V0
inline HadamardMap v_map(const SpectralDecomposition& d, double t) {
  Matrix mask = xi_matrix(d).entries;
  for (Index i : d.beta())
    for (Index j : d.beta()) mask(i, j) = 1.0 - t;
  return {d.P(), std::move(mask)};
}

inline HadamardMap v_map(const SpectralDecomposition& d, Variant v) {
  return v_map(d, v == Variant::zero ? 1.0 : 0.0);
}

inline SymMatrix apply_V(const SpectralDecomposition& d, Variant v, const SymMatrix& h) {
  return v_map(d, v).apply(h);
}

// Directional derivative of the PSD projection (exists in any direction).
inline SymMatrix dproj_psd(const SpectralDecomposition& d, const SymMatrix& h) {
  if (h.order() != d.order()) throw DimensionError("dproj_psd: order mismatch");
  const Index n = d.order();
  if (n == 0) return h;
  Matrix t = d.rotate_in(h.matrix());
  const Matrix xi = xi_matrix(d).entries;
  const auto& b = d.beta();
  const Index nb = static_cast<Index>(b.size());
  Matrix hbb(nb, nb);
  for (Index r = 0; r < nb; ++r)
    for (Index c = 0; c < nb; ++c) hbb(r, c) = t(b[r], b[c]);
  t.array() *= xi.array();
  if (nb > 0) {
    const Matrix pbb = project_psd(SymMatrix(hbb)).matrix();
    for (Index r = 0; r < nb; ++r)
      for (Index c = 0; c < nb; ++c) t(b[r], b[c]) = pbb(r, c);
  }
  return SymMatrix(d.rotate_out(t));
}

// 2 * sum_{i in alpha, j in gamma} (lambda_j / lambda_i) * B_ij^2, B already rotated
inline double sigma_quadratic(const SpectralDecomposition& d, const SymMatrix& b_rot) {
  if (b_rot.order() != d.order()) throw DimensionError("sigma_quadratic: order mismatch");
  double s = 0;
  for (Index i : d.alpha())
    for (Index j : d.gamma()) {
      const double bij = b_rot(i, j);
      s += d.lambda()[j] / d.lambda()[i] * bij * bij;
    }
  return 2.0 * s;
}

// ---- block versions

using BlockSpectral = std::vector<SpectralDecomposition>;

inline BlockSpectral eig_blocks(const BlockSymMatrix& a, double class_tol = -1.0) {
  BlockSpectral r;
  r.reserve(a.num_blocks());
  for (const auto& b : a.blocks()) r.push_back(eig_sym(b, class_tol));
  return r;
}

inline BlockSymMatrix project_psd(const BlockSpectral& d) {
  std::vector<SymMatrix> r;
  r.reserve(d.size());
  for (const auto& x : d) r.push_back(project_psd(x));
  return BlockSymMatrix(std::move(r));
}

inline BlockSymMatrix project_psd(const BlockSymMatrix& a) { return project_psd(eig_blocks(a)); }

inline BlockSymMatrix dproj_psd(const BlockSpectral& d, const BlockSymMatrix& h) {
  if (d.size() != h.num_blocks()) throw DimensionError("dproj_psd: block count mismatch");
  std::vector<SymMatrix> r;
  r.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r.push_back(dproj_psd(d[i], h.block(i)));
  return BlockSymMatrix(std::move(r));
}

inline BlockSymMatrix apply_V(const BlockSpectral& d, Variant v, const BlockSymMatrix& h) {
  if (d.size() != h.num_blocks()) throw DimensionError("apply_V: block count mismatch");
  std::vector<SymMatrix> r;
  r.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r.push_back(apply_V(d[i], v, h.block(i)));
  return BlockSymMatrix(std::move(r));
}

}  // namespace ssnsdp
