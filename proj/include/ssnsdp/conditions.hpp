#pragma once
// Regularity conditions at a KKT point: W-SOC, S-SOSC, W-SRCQ and
// constraint nondegeneracy, plus sigma_min of U0 / UI there.
//
// Everything is expressed through the rotated constraint map
//   B(dx) = P' (g'(x) dx) P   (per block, P from g(x) + Gamma),
// restricted to the index regions alpha/beta/gamma of the eigenvalues.

#include "detail/components.hpp"
#include "kkt.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ssnsdp {

enum class Region : unsigned char { aa, ab, ag, bb, bg, gg };

inline Region region_of(EigClass a, EigClass b) {
  if (static_cast<int>(a) > static_cast<int>(b)) std::swap(a, b);
  if (a == EigClass::alpha) return b == EigClass::alpha ? Region::aa : b == EigClass::beta ? Region::ab : Region::ag;
  if (a == EigClass::beta) return b == EigClass::beta ? Region::bb : Region::bg;
  return Region::gg;
}

struct RotatedConstraintOperator {
  SparseMatrix B;                    // stacked svec of rotated blocks x x-coordinates
  std::vector<Region> region;        // one per row of B
  std::vector<double> sigma_weight;  // lambda_j / lambda_i on alpha-gamma rows, else 0
  BlockSpectral spectral;
};

namespace detail {

inline void push_column(std::vector<Triplet>& t, Index col, const Vector& v, double rel_drop = 1e-14) {
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  const double cut = rel_drop * scale;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0 && std::abs(v[i]) > cut) t.emplace_back(i, col, v[i]);
}

inline SparseMatrix from_triplets(Index r, Index c, const std::vector<Triplet>& t) {
  SparseMatrix m(r, c);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace detail

inline RotatedConstraintOperator rotated_constraint_operator(const NlsdpProblem& p, const KktPoint& z,
                                                             double class_tol = -1.0) {
  RotatedConstraintOperator r;
  r.spectral = eig_blocks(cone_argument(p, z), class_tol);
  const auto orders = p.cone_blocks();
  const Index nx = p.x_dim(), ng = p.gamma_dim();
  for (std::size_t b = 0; b < orders.size(); ++b) {
    const auto& d = r.spectral[b];
    for (Index j = 0; j < orders[b]; ++j)
      for (Index i = 0; i <= j; ++i) {
        const Region reg = region_of(d.cls(i), d.cls(j));
        r.region.push_back(reg);
        double w = 0;
        if (reg == Region::ag) {
          // sorted order puts alpha first: i is the alpha index
          w = d.lambda()[j] / d.lambda()[i];
        }
        r.sigma_weight.push_back(w);
      }
  }
  std::vector<Triplet> t;
  Vector e = Vector::Zero(nx);
  Vector col(ng);
  for (Index k = 0; k < nx; ++k) {
    e[k] = 1.0;
    const BlockSymMatrix gk = p.jac_g(z.x, e);
    e[k] = 0.0;
    Index off = 0;
    for (std::size_t b = 0; b < orders.size(); ++b) {
      const Index n = orders[b];
      if (gk.block(b).matrix().isZero(0.0)) {
        col.segment(off, svec_dim(n)).setZero();
      } else {
        col.segment(off, svec_dim(n)) = svec(SymMatrix(r.spectral[b].rotate_in(gk.block(b).matrix())));
      }
      off += svec_dim(n);
    }
    detail::push_column(t, k, col);
  }
  r.B = detail::from_triplets(ng, nx, t);
  return r;
}

struct CheckResult {
  bool holds = false;
  double margin = 0;  // +inf when the condition holds vacuously
};

struct ConditionReport {
  CheckResult w_soc, s_sosc, w_srcq, cn;
  double u0_sigma_min = 0;
  double ui_sigma_min = 0;
  double clarke_mid_sigma_min = 0;  // 1/2 (U0 + UI)
  Index appl_dim = 0, app_dim = 0;
  std::vector<std::string> warnings;
};

struct ConditionOptions {
  double class_tol = -1.0;
  double check_tol = 1e-8;
  double kkt_tol = 1e-10;
  double null_cut = 1e-10;  // relative singular value cut for null spaces
  SigmaOptions sigma{};
};

// All sparse pieces needed by the checkers, built once per point.
class LocalModel {
 public:
  LocalModel(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& opt = {}) : prob_(&p), z_(z), opt_(opt) {
    check_point(p, z);
    const double res = kkt_residual(p, z).norm();
    if (!(res <= opt.kkt_tol))
      throw PreconditionError("not a KKT point: residual " + std::to_string(res) + " exceeds " +
                              std::to_string(opt.kkt_tol));
    rot_ = rotated_constraint_operator(p, z, opt.class_tol);
    const Index nx = p.x_dim(), nm = p.eq_dim();
    std::vector<Triplet> th, tj;
    Vector e = Vector::Zero(nx);
    for (Index k = 0; k < nx; ++k) {
      e[k] = 1.0;
      detail::push_column(th, k, p.hess_lagrangian(z.x, z.xi, z.gamma, e));
      if (nm > 0) detail::push_column(tj, k, p.jac_h(z.x, e));
      e[k] = 0.0;
    }
    hess_ = detail::from_triplets(nx, nx, th);
    jh_ = detail::from_triplets(nm, nx, tj);
    // Q = ∇²L - B' diag(w) B, w <= 0 on alpha-gamma rows
    std::vector<Triplet> tw;
    for (Index r = 0; r < rot_.B.rows(); ++r)
      if (rot_.sigma_weight[r] != 0.0) tw.emplace_back(r, r, -rot_.sigma_weight[r]);
    const SparseMatrix w = detail::from_triplets(rot_.B.rows(), rot_.B.rows(), tw);
    SparseMatrix bw = w * rot_.B;
    q_ = hess_ + SparseMatrix(rot_.B.transpose() * bw);
    q_.prune(0.0);
  }

  const RotatedConstraintOperator& rotated() const { return rot_; }
  const SparseMatrix& hessian() const { return hess_; }
  const SparseMatrix& jac_h() const { return jh_; }
  const SparseMatrix& quadratic_form() const { return q_; }
  const NlsdpProblem& problem() const { return *prob_; }
  const KktPoint& point() const { return z_; }
  const ConditionOptions& options() const { return opt_; }

  // [h'; rows of B in the given regions]
  SparseMatrix stacked_constraints(std::initializer_list<Region> regs) const {
    const auto sel = select_rows(regs);
    std::vector<Triplet> t;
    for (Index k = 0; k < jh_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(jh_, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    const Index off = jh_.rows();
    std::vector<Index> pos(static_cast<std::size_t>(rot_.B.rows()), -1);
    for (std::size_t i = 0; i < sel.size(); ++i) pos[sel[i]] = static_cast<Index>(i);
    for (Index k = 0; k < rot_.B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(rot_.B, k); it; ++it)
        if (pos[it.row()] >= 0) t.emplace_back(off + pos[it.row()], it.col(), it.value());
    return detail::from_triplets(off + static_cast<Index>(sel.size()), prob_->x_dim(), t);
  }

  // [h'^*  B^* restricted to multiplier coordinates in the given regions]
  SparseMatrix multiplier_map(std::initializer_list<Region> regs) const {
    const auto sel = select_rows(regs);
    std::vector<Triplet> t;
    const Index nm = jh_.rows();
    for (Index k = 0; k < jh_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(jh_, k); it; ++it) t.emplace_back(it.col(), it.row(), it.value());
    std::vector<Index> pos(static_cast<std::size_t>(rot_.B.rows()), -1);
    for (std::size_t i = 0; i < sel.size(); ++i) pos[sel[i]] = static_cast<Index>(i);
    for (Index k = 0; k < rot_.B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(rot_.B, k); it; ++it)
        if (pos[it.row()] >= 0) t.emplace_back(it.col(), nm + pos[it.row()], it.value());
    return detail::from_triplets(prob_->x_dim(), nm + static_cast<Index>(sel.size()), t);
  }

 private:
  std::vector<Index> select_rows(std::initializer_list<Region> regs) const {
    std::vector<Index> sel;
    for (Index r = 0; r < static_cast<Index>(rot_.region.size()); ++r)
      for (Region g : regs)
        if (rot_.region[r] == g) {
          sel.push_back(r);
          break;
        }
    return sel;
  }

  const NlsdpProblem* prob_;
  KktPoint z_;
  ConditionOptions opt_;
  RotatedConstraintOperator rot_;
  SparseMatrix hess_, jh_, q_;
};

namespace detail {

inline detail::RestrictedEigResult appl_part(const LocalModel& m, bool basis) {
  return restricted_min_eig(m.stacked_constraints({Region::bb, Region::bg, Region::gg}), m.quadratic_form(),
                            m.options().null_cut, basis);
}
inline detail::RestrictedEigResult app_part(const LocalModel& m, bool basis) {
  return restricted_min_eig(m.stacked_constraints({Region::bg, Region::gg}), m.quadratic_form(),
                            m.options().null_cut, basis);
}
inline CheckResult judged(double margin, double tol) { return {margin > tol, margin}; }

}  // namespace detail

// Orthonormal bases (sparse storage) of appl and app.
inline SparseMatrix appl_basis(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& opt = {}) {
  return detail::appl_part(LocalModel(p, z, opt), true).basis;
}
inline SparseMatrix app_basis(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& opt = {}) {
  return detail::app_part(LocalModel(p, z, opt), true).basis;
}

inline CheckResult check_w_soc(const LocalModel& m) {
  return detail::judged(detail::appl_part(m, false).lambda_min, m.options().check_tol);
}
inline CheckResult check_s_sosc(const LocalModel& m) {
  return detail::judged(detail::app_part(m, false).lambda_min, m.options().check_tol);
}
// multiplier subspace: dGamma zero on alpha-alpha, alpha-beta, alpha-gamma
inline CheckResult check_cn(const LocalModel& m) {
  const double s = detail::injectivity_margin(m.multiplier_map({Region::bb, Region::bg, Region::gg}));
  return detail::judged(s, m.options().check_tol);
}
// ... and additionally zero on beta-beta
inline CheckResult check_w_srcq(const LocalModel& m) {
  const double s = detail::injectivity_margin(m.multiplier_map({Region::bg, Region::gg}));
  return detail::judged(s, m.options().check_tol);
}

inline CheckResult check_w_soc(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& o = {}) {
  return check_w_soc(LocalModel(p, z, o));
}
inline CheckResult check_s_sosc(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& o = {}) {
  return check_s_sosc(LocalModel(p, z, o));
}
inline CheckResult check_cn(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& o = {}) {
  return check_cn(LocalModel(p, z, o));
}
inline CheckResult check_w_srcq(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& o = {}) {
  return check_w_srcq(LocalModel(p, z, o));
}

inline ConditionReport regularity_report(const NlsdpProblem& p, const KktPoint& z, const ConditionOptions& opt = {}) {
  const LocalModel m(p, z, opt);
  ConditionReport r;
  const auto appl = detail::appl_part(m, false);
  const auto app = detail::app_part(m, false);
  r.w_soc = detail::judged(appl.lambda_min, opt.check_tol);
  r.s_sosc = detail::judged(app.lambda_min, opt.check_tol);
  r.appl_dim = appl.dim;
  r.app_dim = app.dim;
  r.cn = check_cn(m);
  r.w_srcq = check_w_srcq(m);

  const BlockSpectral& dec = m.rotated().spectral;
  r.u0_sigma_min = min_singular_value(make_jacobian(p, z, dec, 1.0), opt.sigma);
  r.ui_sigma_min = min_singular_value(make_jacobian(p, z, dec, 0.0), opt.sigma);
  r.clarke_mid_sigma_min = min_singular_value(make_jacobian(p, z, dec, 0.5), opt.sigma);

  const double tol = opt.check_tol;
  if (r.w_soc.holds && r.cn.holds && !(r.u0_sigma_min > tol))
    r.warnings.push_back("W-SOC and CN hold but U0 looks singular (sigma_min " + std::to_string(r.u0_sigma_min) + ")");
  if (r.s_sosc.holds && r.w_srcq.holds && !(r.ui_sigma_min > tol))
    r.warnings.push_back("S-SOSC and W-SRCQ hold but UI looks singular (sigma_min " + std::to_string(r.ui_sigma_min) + ")");
  if (r.cn.holds && !r.w_srcq.holds) r.warnings.push_back("CN holds but W-SRCQ does not");
  if (r.s_sosc.holds && !r.w_soc.holds) r.warnings.push_back("S-SOSC holds but W-SOC does not");
  for (const auto& w : r.warnings) log_msg(LogLevel::warn, "regularity_report: " + w);
  return r;
}

}  // namespace ssnsdp
