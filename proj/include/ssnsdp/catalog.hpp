#pragma once
// Built-in test problems with known KKT points. All of them are quadratic
// SDPs, so each is a QsdpProblem over svec coordinates; inequalities are
// scalar slack blocks in S^1_+.

#include "problem.hpp"

#include <limits>
#include <map>

namespace ssnsdp {

struct CatalogParams {
  Index l1 = 60;
  Index l2 = 40;
  double eps = 0.0;  // perturbation in ex4
};

struct CatalogEntry {
  ProblemPtr problem;
  std::optional<KnownSolution> solution;  // absent for ex4 with eps != 0
  QsdpData data;
  bool convex = true;
};

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"ex1", "ex2", "ex3", "ex4_primal", "ex4_dual", "ex5", "ex6", "ex7"};
  return names;
}

// min |lambda| over alpha and gamma eigenvalues of g(x) + Gamma
inline double compute_delta_max(const NlsdpProblem& p, const KktPoint& z) {
  const BlockSymMatrix a = p.g(z.x) + z.gamma;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& d : eig_blocks(a)) {
    for (Index i : d.alpha()) m = std::min(m, std::abs(d.lambda()[i]));
    for (Index i : d.gamma()) m = std::min(m, std::abs(d.lambda()[i]));
  }
  return m;
}

namespace detail {

inline SparseMatrix sparse_from_triplets(Index r, Index c, const std::vector<Triplet>& t) {
  SparseMatrix m(r, c);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline SparseMatrix sparse_identity(Index n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

inline SparseMatrix sparse_dense(const Matrix& a) { return a.sparseView(); }

inline BlockSymMatrix blocks_of(std::initializer_list<Matrix> ms) {
  std::vector<SymMatrix> b;
  for (const auto& m : ms) b.emplace_back(m);
  return BlockSymMatrix(std::move(b));
}

// x in S^2 plus slack block 1 - <E, X> >= 0
inline void psd2_with_sum_cut(QsdpData& d) {
  d.cone_blocks = {2, 1};
  Matrix g = Matrix::Zero(4, 3);
  g.topRows(3).setIdentity();
  g.row(3) << -1.0, -kSqrt2, -1.0;
  d.G = sparse_dense(g);
  d.q = Vector::Zero(4);
  d.q[3] = -1.0;
}

inline QsdpData ex1(Index l1, Index l2) {
  const Index n = l1 + l2, dim = svec_dim(n);
  QsdpData d;
  d.x_dim = dim;
  d.cone_blocks = {n};
  std::vector<Triplet> qt, ht;
  Index row = 0;
  // X12 = 0 (column by column), then X22 = 0 (upper triangle, column-major)
  for (Index j = l1; j < n; ++j)
    for (Index i = 0; i < l1; ++i) ht.emplace_back(row++, svec_index(i, j), 1.0 / kSqrt2);
  for (Index j = l1; j < n; ++j)
    for (Index i = l1; i <= j; ++i) ht.emplace_back(row++, svec_index(i, j), i == j ? 1.0 : 1.0 / kSqrt2);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      if (j < l1) qt.emplace_back(svec_index(i, j), svec_index(i, j), 1.0);
      else if (i >= l1) qt.emplace_back(svec_index(i, j), svec_index(i, j), -1.0);
    }
  d.eq_dim = row;
  d.Q = sparse_from_triplets(dim, dim, qt);
  d.c = Vector::Zero(dim);
  d.H = sparse_from_triplets(row, dim, ht);
  d.p = Vector::Zero(row);
  d.G = sparse_identity(dim);
  d.q = Vector::Zero(dim);
  return d;
}

inline QsdpData ex2() {
  QsdpData d;
  d.x_dim = 3;
  d.eq_dim = 1;
  d.cone_blocks = {2};
  d.Q = SparseMatrix(3, 3);
  d.c = Vector::Zero(3);
  d.H = sparse_from_triplets(1, 3, {Triplet(0, 1, 1.0 / kSqrt2)});
  d.p = Vector::Zero(1);
  d.G = sparse_identity(3);
  d.q = Vector::Zero(3);
  return d;
}

inline QsdpData ex3() {
  // 1/2 (x11 - 1)^2 + 1/2 (x22 - x12 - x21)^2, with x12 = y2 / sqrt2
  QsdpData d;
  d.x_dim = 3;
  Matrix q(3, 3);
  q << 1, 0, 0,
       0, 2, -kSqrt2,
       0, -kSqrt2, 1;
  d.Q = sparse_dense(q);
  d.c = Vector::Zero(3);
  d.c[0] = -1.0;
  d.f0 = 0.5;
  d.H = SparseMatrix(0, 3);
  d.p = Vector(0);
  psd2_with_sum_cut(d);
  return d;
}

inline Matrix ex4_B() {
  Matrix b(2, 2);
  b << 1.5, -2.0, -2.0, 3.0;
  return b;
}

inline Matrix ex4_sqrtB() {
  Eigen::SelfAdjointEigenSolver<Matrix> es(ex4_B());
  return es.operatorSqrt();
}

// B^{1/2} b = (5/2, -1); 1/2 |b|^2 = 1/2 (5/2,-1) B^{-1} (5/2,-1)' = 41/4
inline Vector ex4_Bhalf_b() { return Eigen::Vector2d(2.5, -1.0); }
inline constexpr double kEx4HalfBNormSq = 10.25;

inline Vector ex4_b() { return ex4_sqrtB().ldlt().solve(ex4_Bhalf_b()); }

// min 1/2 |A Y - b|^2 + <I + Delta, Y>  s.t.  <E, Y> <= 1, Y psd
inline QsdpData ex4_dual(double eps) {
  const Matrix b = ex4_B();
  QsdpData d;
  d.x_dim = 3;
  Matrix q = Matrix::Zero(3, 3);
  q(0, 0) = b(0, 0);
  q(0, 2) = q(2, 0) = b(0, 1);
  q(2, 2) = b(1, 1);
  d.Q = sparse_dense(q);
  const Vector bb = ex4_Bhalf_b();
  d.c = Vector::Zero(3);
  d.c[0] = -bb[0] + (1.0 - eps);
  d.c[2] = -bb[1] + (1.0 + eps);
  d.f0 = kEx4HalfBNormSq;
  d.H = SparseMatrix(0, 3);
  d.p = Vector(0);
  psd2_with_sum_cut(d);
  return d;
}

// min 1/2 |x + b|^2 + t  s.t.  A^* x + tE + I + Delta psd, t >= 0;  x = (x1, x2, t)
inline QsdpData ex4_primal(double eps) {
  const Matrix s = ex4_sqrtB();
  const Vector b = ex4_b();
  QsdpData d;
  d.x_dim = 3;
  d.Q = sparse_dense(Vector(Eigen::Vector3d(1, 1, 0)).asDiagonal().toDenseMatrix());
  d.c = Eigen::Vector3d(b[0], b[1], 1.0);
  d.f0 = kEx4HalfBNormSq;
  d.H = SparseMatrix(0, 3);
  d.p = Vector(0);
  d.cone_blocks = {2, 1};
  Matrix g = Matrix::Zero(4, 3);
  g.row(0) << s(0, 0), s(0, 1), 1.0;
  g.row(1) << 0.0, 0.0, kSqrt2;
  g.row(2) << s(1, 0), s(1, 1), 1.0;
  g.row(3) << 0.0, 0.0, 1.0;
  d.G = sparse_dense(g);
  d.q = Vector::Zero(4);
  d.q[0] = -(1.0 - eps);
  d.q[2] = -(1.0 + eps);
  return d;
}

inline QsdpData ex5(Index l1, Index l2) {
  const Index n = l1 + l2, dim = svec_dim(n);
  QsdpData d;
  d.x_dim = dim;
  d.cone_blocks = {n};
  std::vector<Triplet> qt;
  d.c = Vector::Zero(dim);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      if (i < l1) qt.emplace_back(svec_index(i, j), svec_index(i, j), 1.0);  // X11 and X12
      if (i == j && j < l1) d.c[svec_index(i, j)] = -1.0;
    }
  d.f0 = 0.5 * double(l1);
  d.Q = sparse_from_triplets(dim, dim, qt);
  d.H = SparseMatrix(0, dim);
  d.p = Vector(0);
  d.G = sparse_identity(dim);
  d.q = Vector::Zero(dim);
  return d;
}

inline QsdpData ex7() {
  QsdpData d;
  d.x_dim = 3;
  d.eq_dim = 2;
  d.cone_blocks = {1, 1, 1};
  d.Q = sparse_identity(3);
  d.c = Eigen::Vector3d(0, -1, 0);
  d.f0 = 0.5;
  Matrix h(2, 3);
  h << 1, 1, 0, 1, 0, 1;
  d.H = sparse_dense(h);
  d.p = Eigen::Vector2d(1, 0);
  d.G = sparse_identity(3);
  d.q = Vector::Zero(3);
  return d;
}

inline Matrix blkdiag_identity(Index l1, Index l2) {
  Matrix x = Matrix::Zero(l1 + l2, l1 + l2);
  x.topLeftCorner(l1, l1).setIdentity();
  return x;
}

}  // namespace detail

inline CatalogEntry catalog(const std::string& name_in, const CatalogParams& prm = {}) {
  const std::string name = name_in == "ex6" ? "ex1" : name_in;
  const bool sized = name == "ex1" || name == "ex5";
  if (sized && (prm.l1 < 1 || prm.l2 < 1))
    throw PreconditionError("catalog: l1 and l2 must be positive (got " + std::to_string(prm.l1) + ", " +
                            std::to_string(prm.l2) + ")");
  if (!(prm.eps >= 0) || !std::isfinite(prm.eps)) throw PreconditionError("catalog: eps must be >= 0");

  CatalogEntry e;
  KktPoint z;
  ConditionFlags fl;
  const Matrix zero22 = Matrix::Zero(2, 2), zero11 = Matrix::Zero(1, 1);
  Matrix e11 = zero22;
  e11(0, 0) = 1.0;

  if (name == "ex1") {
    e.data = detail::ex1(prm.l1, prm.l2);
    e.convex = false;
    const Index n = prm.l1 + prm.l2;
    z = {Vector::Zero(e.data.x_dim), Vector::Zero(e.data.eq_dim), BlockSymMatrix::zeros({n})};
    fl.s_sosc = true;
    fl.w_srcq = true;
    fl.w_soc = true;   // implied by S-SOSC
    fl.cn = false;     // RCQ fails
    fl.ui_nonsingular = true;
  } else if (name == "ex2") {
    e.data = detail::ex2();
    z = {Vector::Zero(3), Vector::Zero(1), BlockSymMatrix::zeros({2})};
    fl.w_soc = true;
    fl.w_srcq = true;
    fl.cn = false;
    fl.s_sosc = false;
    fl.u0_nonsingular = false;
    fl.ui_nonsingular = false;
  } else if (name == "ex3") {
    e.data = detail::ex3();
    z = {svec(SymMatrix(e11)), Vector(0), detail::blocks_of({zero22, zero11})};
    fl.w_soc = true;
    fl.cn = true;
    fl.w_srcq = true;
    fl.s_sosc = false;
    fl.u0_nonsingular = true;
    fl.ui_nonsingular = false;
  } else if (name == "ex4_dual") {
    e.data = detail::ex4_dual(prm.eps);
    z = {svec(SymMatrix(e11)), Vector(0), detail::blocks_of({zero22, zero11})};
    fl.w_soc = true;
    fl.cn = true;
    fl.w_srcq = true;
    fl.s_sosc = false;
    fl.u0_nonsingular = true;
    fl.ui_nonsingular = false;
  } else if (name == "ex4_primal") {
    e.data = detail::ex4_primal(prm.eps);
    const Vector x12 = -detail::ex4_sqrtB().ldlt().solve(Vector(Eigen::Vector2d(1.0, 1.0)));
    z = {Eigen::Vector3d(x12[0], x12[1], 0.0), Vector(0), detail::blocks_of({Matrix(-e11), zero11})};
    fl.w_soc = true;  // matches the dual's W-SRCQ
  } else if (name == "ex5") {
    e.data = detail::ex5(prm.l1, prm.l2);
    const Index n = prm.l1 + prm.l2;
    z = {svec(SymMatrix(detail::blkdiag_identity(prm.l1, prm.l2))), Vector(0), BlockSymMatrix::zeros({n})};
    fl.w_soc = true;
    fl.cn = true;
    fl.w_srcq = true;
    fl.s_sosc = false;
    fl.u0_nonsingular = true;
    fl.ui_nonsingular = false;
  } else if (name == "ex7") {
    e.data = detail::ex7();
    z = {Eigen::Vector3d(0, 1, 0), Vector::Zero(2), BlockSymMatrix::zeros({1, 1, 1})};
    fl.w_srcq = true;
    fl.s_sosc = true;
    fl.w_soc = true;
    fl.cn = false;  // multipliers are not unique
    fl.ui_nonsingular = true;
    fl.u0_nonsingular = false;
  } else {
    throw PreconditionError("catalog: unknown example '" + name_in + "'");
  }

  e.problem = std::make_shared<QsdpProblem>(e.data, name_in);
  const bool has_solution = !(name == "ex4_dual" || name == "ex4_primal") || prm.eps == 0.0;
  if (has_solution) {
    KnownSolution s;
    s.z_bar = std::move(z);
    s.delta_max = compute_delta_max(*e.problem, s.z_bar);
    s.expected = fl;
    e.solution = std::move(s);
  }
  return e;
}

// Start used for the correction demonstration on ex7:
// ((-eps, 1+eps, 0), (0, eps), (0, 0, -eps))
inline KktPoint ex7_start(double eps) {
  std::vector<SymMatrix> g;
  g.push_back(SymMatrix(Matrix::Zero(1, 1)));
  g.push_back(SymMatrix(Matrix::Zero(1, 1)));
  g.push_back(SymMatrix(Matrix::Constant(1, 1, -eps)));
  return {Eigen::Vector3d(-eps, 1.0 + eps, 0.0), Eigen::Vector2d(0.0, eps), BlockSymMatrix(std::move(g))};
}

// Objective of the Wolfe-type dual of a QSDP written as a minimisation,
//   1/2 <w, Qw> + <p, xi> + <q, Gamma>,
// over Qw + c + H'xi + G'Gamma = 0, Gamma nsd. At a primal-dual pair the
// primal optimum equals f0 minus this value.
inline double qsdp_dual_objective(const QsdpData& d, const Vector& w, const Vector& xi, const BlockSymMatrix& gamma) {
  return 0.5 * w.dot(d.Q * w) + d.p.dot(xi) + d.q.dot(svec(gamma));
}

}  // namespace ssnsdp
