#pragma once
// Problem data for
//     min f(x)  s.t.  h(x) = 0,  g(x) in S^{n_1}_+ x ... x S^{n_p}_+
// as evaluator callbacks, plus KKT points, the QSDP instance class,
// derivative checks and reproducible perturbed starts.

#include "linalg_sym.hpp"

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ssnsdp {

class NlsdpProblem {
 public:
  virtual ~NlsdpProblem() = default;

  virtual std::string name() const = 0;
  virtual Index x_dim() const = 0;
  virtual Index eq_dim() const = 0;
  virtual const std::vector<Index>& cone_blocks() const = 0;

  virtual double f(const Vector& x) const = 0;
  virtual Vector grad_f(const Vector& x) const = 0;
  virtual Vector h(const Vector& x) const = 0;
  virtual Vector jac_h(const Vector& x, const Vector& v) const = 0;        // h'(x) v
  virtual Vector jac_h_adj(const Vector& x, const Vector& xi) const = 0;   // h'(x)^* xi
  virtual BlockSymMatrix g(const Vector& x) const = 0;
  virtual BlockSymMatrix jac_g(const Vector& x, const Vector& v) const = 0;
  virtual Vector jac_g_adj(const Vector& x, const BlockSymMatrix& gamma) const = 0;
  // Hessian of L(x, xi, Gamma) = f + <xi, h> + <Gamma, g> applied to v
  virtual Vector hess_lagrangian(const Vector& x, const Vector& xi, const BlockSymMatrix& gamma,
                                 const Vector& v) const = 0;

  Index gamma_dim() const { return svec_size(cone_blocks()); }
};

using ProblemPtr = std::shared_ptr<const NlsdpProblem>;

struct KktPoint {
  Vector x;
  Vector xi;
  BlockSymMatrix gamma;
};

inline Index kkt_dim(const NlsdpProblem& p) { return p.x_dim() + p.eq_dim() + p.gamma_dim(); }

inline void check_point(const NlsdpProblem& p, const KktPoint& z) {
  if (z.x.size() != p.x_dim() || z.xi.size() != p.eq_dim() || z.gamma.orders() != p.cone_blocks())
    throw DimensionError("KKT point does not match problem '" + p.name() + "' (x " +
                         std::to_string(z.x.size()) + "/" + std::to_string(p.x_dim()) + ", xi " +
                         std::to_string(z.xi.size()) + "/" + std::to_string(p.eq_dim()) + ")");
}

// (x, xi, svec(Gamma_1), ..., svec(Gamma_p))
inline Vector to_vector(const KktPoint& z) {
  Vector v(z.x.size() + z.xi.size() + z.gamma.svec_size());
  v << z.x, z.xi, svec(z.gamma);
  return v;
}

inline KktPoint kkt_point_from_vector(const NlsdpProblem& p, const Eigen::Ref<const Vector>& v) {
  if (v.size() != kkt_dim(p)) throw DimensionError("kkt vector has wrong length");
  const Index nx = p.x_dim(), nm = p.eq_dim();
  return {v.head(nx), v.segment(nx, nm), smat_blocks(v.tail(p.gamma_dim()), p.cone_blocks())};
}

inline KktPoint zero_point(const NlsdpProblem& p) {
  return {Vector::Zero(p.x_dim()), Vector::Zero(p.eq_dim()), BlockSymMatrix::zeros(p.cone_blocks())};
}

inline KktPoint operator+(const KktPoint& a, const KktPoint& b) {
  return {a.x + b.x, a.xi + b.xi, a.gamma + b.gamma};
}
inline KktPoint operator-(const KktPoint& a, const KktPoint& b) {
  return {a.x - b.x, a.xi - b.xi, a.gamma - b.gamma};
}
inline double norm(const KktPoint& z) {
  return std::sqrt(z.x.squaredNorm() + z.xi.squaredNorm() + z.gamma.norm() * z.gamma.norm());
}
inline double distance(const KktPoint& a, const KktPoint& b) { return norm(a - b); }

// ∇_x L
inline Vector lagrangian_gradient(const NlsdpProblem& p, const KktPoint& z) {
  Vector r = p.grad_f(z.x);
  if (p.eq_dim() > 0) r += p.jac_h_adj(z.x, z.xi);
  r += p.jac_g_adj(z.x, z.gamma);
  return r;
}

// ---------------------------------------------------------------------------
// quadratic SDP: f = 1/2 x'Qx + c'x + f0,  h = Hx - p,  g = smat(Gx - q)

struct QsdpData {
  Index x_dim = 0;
  Index eq_dim = 0;
  std::vector<Index> cone_blocks;
  SparseMatrix Q;  // x_dim x x_dim, symmetric
  Vector c;
  SparseMatrix H;  // eq_dim x x_dim
  Vector p;
  SparseMatrix G;  // svec_size(blocks) x x_dim
  Vector q;        // stacked svec
  double f0 = 0;   // constant term; optional in files
};

inline void validate(const QsdpData& d) {
  const Index sg = svec_size(d.cone_blocks);
  auto fail = [](const std::string& what) { throw DimensionError("qsdp: " + what); };
  if (d.x_dim < 1) fail("x_dim must be positive");
  if (d.eq_dim < 0) fail("eq_dim must be nonnegative");
  for (Index n : d.cone_blocks)
    if (n < 1) fail("cone block orders must be positive");
  if (d.Q.rows() != d.x_dim || d.Q.cols() != d.x_dim) fail("Q must be x_dim x x_dim");
  if (d.c.size() != d.x_dim) fail("c must have length x_dim");
  if (d.H.rows() != d.eq_dim || d.H.cols() != d.x_dim) fail("H must be eq_dim x x_dim");
  if (d.p.size() != d.eq_dim) fail("p must have length eq_dim");
  if (d.G.rows() != sg || d.G.cols() != d.x_dim) fail("G must map x to the stacked svec space");
  if (d.q.size() != sg) fail("q must have the stacked svec length");
  const SparseMatrix asym = SparseMatrix(d.Q.transpose()) - d.Q;
  double qmax = 0, amax = 0;
  for (Index k = 0; k < d.Q.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d.Q, k); it; ++it) qmax = std::max(qmax, std::abs(it.value()));
  for (Index k = 0; k < asym.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(asym, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  if (amax > 1e-14 * std::max(1.0, qmax)) throw PreconditionError("qsdp: Q is not symmetric");
}

class QsdpProblem final : public NlsdpProblem {
 public:
  explicit QsdpProblem(QsdpData d, std::string name = "qsdp") : d_(std::move(d)), name_(std::move(name)) {
    validate(d_);
    d_.Q.makeCompressed();
    d_.H.makeCompressed();
    d_.G.makeCompressed();
    gt_ = d_.G.transpose();
    ht_ = d_.H.transpose();
  }

  const QsdpData& data() const { return d_; }

  std::string name() const override { return name_; }
  Index x_dim() const override { return d_.x_dim; }
  Index eq_dim() const override { return d_.eq_dim; }
  const std::vector<Index>& cone_blocks() const override { return d_.cone_blocks; }

  double f(const Vector& x) const override {
    chk(x);
    return 0.5 * x.dot(d_.Q * x) + d_.c.dot(x) + d_.f0;
  }
  Vector grad_f(const Vector& x) const override {
    chk(x);
    return d_.Q * x + d_.c;
  }
  Vector h(const Vector& x) const override {
    chk(x);
    return d_.H * x - d_.p;
  }
  Vector jac_h(const Vector&, const Vector& v) const override {
    chk(v);
    return d_.H * v;
  }
  Vector jac_h_adj(const Vector&, const Vector& xi) const override {
    if (xi.size() != d_.eq_dim) throw DimensionError("jac_h_adj: xi has wrong length");
    return ht_ * xi;
  }
  BlockSymMatrix g(const Vector& x) const override {
    chk(x);
    return smat_blocks(d_.G * x - d_.q, d_.cone_blocks);
  }
  BlockSymMatrix jac_g(const Vector&, const Vector& v) const override {
    chk(v);
    return smat_blocks(d_.G * v, d_.cone_blocks);
  }
  Vector jac_g_adj(const Vector&, const BlockSymMatrix& gamma) const override {
    if (gamma.orders() != d_.cone_blocks) throw DimensionError("jac_g_adj: block structure mismatch");
    return gt_ * svec(gamma);
  }
  Vector hess_lagrangian(const Vector&, const Vector&, const BlockSymMatrix&, const Vector& v) const override {
    chk(v);
    return d_.Q * v;
  }

 private:
  void chk(const Vector& v) const {
    if (v.size() != d_.x_dim)
      throw DimensionError("vector of length " + std::to_string(v.size()) + " where x_dim = " +
                           std::to_string(d_.x_dim) + " expected");
  }
  QsdpData d_;
  std::string name_;
  SparseMatrix gt_, ht_;
};

// ---------------------------------------------------------------------------
// derivative checks along a few random directions

struct FdReport {
  double grad_f = 0;           // relative mismatches
  double jac_h = 0;
  double jac_g = 0;
  double hess_lagrangian = 0;
  double adjoint_h = 0;        // |<h'v, xi> - <v, h'^*xi>| / scale
  double adjoint_g = 0;
  double hess_symmetry = 0;    // |<u, Hv> - <v, Hu>| / scale
  double threshold = 1e-5;

  bool ok() const {
    return grad_f <= threshold && jac_h <= threshold && jac_g <= threshold &&
           hess_lagrangian <= threshold && adjoint_h <= 1e-10 && adjoint_g <= 1e-10 &&
           hess_symmetry <= 1e-10;
  }
};

inline FdReport fd_check_derivatives(const NlsdpProblem& prob, const Vector& x, const Vector& xi,
                                     const BlockSymMatrix& gamma, double step = 1e-5, int directions = 4,
                                     std::uint64_t seed = 7) {
  check_point(prob, {x, xi, gamma});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto randv = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = nd(rng);
    return n > 0 ? Vector(v.normalized()) : v;
  };
  auto rel = [](double err, double ref) { return err / (1.0 + ref); };
  const auto orders = prob.cone_blocks();
  auto gradL = [&](const Vector& y) { return lagrangian_gradient(prob, {y, xi, gamma}); };

  FdReport r;
  for (int k = 0; k < directions; ++k) {
    const Vector v = randv(prob.x_dim());
    const Vector xp = x + step * v, xm = x - step * v;

    const double dfd = (prob.f(xp) - prob.f(xm)) / (2 * step);
    const double dan = prob.grad_f(x).dot(v);
    r.grad_f = std::max(r.grad_f, rel(std::abs(dfd - dan), std::abs(dan)));

    if (prob.eq_dim() > 0) {
      const Vector hfd = (prob.h(xp) - prob.h(xm)) / (2 * step);
      const Vector han = prob.jac_h(x, v);
      r.jac_h = std::max(r.jac_h, rel((hfd - han).norm(), han.norm()));
      const Vector w = randv(prob.eq_dim());
      const double l = han.dot(w), rr = v.dot(prob.jac_h_adj(x, w));
      r.adjoint_h = std::max(r.adjoint_h, rel(std::abs(l - rr), std::abs(l)));
    }

    const BlockSymMatrix gfd = (1.0 / (2 * step)) * (prob.g(xp) - prob.g(xm));
    const BlockSymMatrix gan = prob.jac_g(x, v);
    r.jac_g = std::max(r.jac_g, rel((gfd - gan).norm(), gan.norm()));
    const BlockSymMatrix w = smat_blocks(randv(prob.gamma_dim()), orders);
    const double lg = inner(gan, w), rg = v.dot(prob.jac_g_adj(x, w));
    r.adjoint_g = std::max(r.adjoint_g, rel(std::abs(lg - rg), std::abs(lg)));

    const Vector hfd = (gradL(xp) - gradL(xm)) / (2 * step);
    const Vector han = prob.hess_lagrangian(x, xi, gamma, v);
    r.hess_lagrangian = std::max(r.hess_lagrangian, rel((hfd - han).norm(), han.norm()));
    const Vector u = randv(prob.x_dim());
    const double a = u.dot(han), b = v.dot(prob.hess_lagrangian(x, xi, gamma, u));
    r.hess_symmetry = std::max(r.hess_symmetry, rel(std::abs(a - b), std::abs(a)));
  }
  return r;
}

// z_bar + magnitude * (dx/|dx|, dxi/|dxi|, dGamma/|dGamma|) with standard
// normal draws. Drawing iid normals per svec coordinate is the same law as
// symmetrising a Gaussian matrix, (R + R')/2, and reading its svec.
inline KktPoint perturbed_start(const KktPoint& z_bar, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0) || !std::isfinite(magnitude))
    throw PreconditionError("perturbed_start: magnitude must be finite and nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto draw = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = nd(rng);
    if (n > 0) v /= v.norm();
    return v;
  };
  const auto orders = z_bar.gamma.orders();
  const Vector dx = draw(z_bar.x.size());
  const Vector dxi = draw(z_bar.xi.size());
  const Vector dg = draw(svec_size(orders));
  return {z_bar.x + magnitude * dx, z_bar.xi + magnitude * dxi,
          z_bar.gamma + smat_blocks(magnitude * dg, orders)};
}

// ---------------------------------------------------------------------------

struct ConditionFlags {
  std::optional<bool> w_soc, s_sosc, w_srcq, cn;
  std::optional<bool> u0_nonsingular, ui_nonsingular;
};

struct KnownSolution {
  KktPoint z_bar;
  double delta_max = 0;  // min |lambda| over alpha and gamma eigenvalues (inf if none)
  ConditionFlags expected;
};

}  // namespace ssnsdp
