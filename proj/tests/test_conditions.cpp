#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace ssnsdp;

namespace {

void expect_flag(const std::optional<bool>& want, bool got, const std::string& what) {
  if (want) EXPECT_EQ(*want, got) << what;
}

QsdpData scaled(QsdpData d, double s) {
  d.Q *= s;
  d.c *= s;
  d.f0 *= s;
  return d;
}

}  // namespace

class CatalogFlags : public ::testing::TestWithParam<std::string> {};

TEST_P(CatalogFlags, ReportMatchesKnownFlags) {
  CatalogParams prm;
  prm.l1 = 3;
  prm.l2 = 2;
  const auto e = catalog(GetParam(), prm);
  const auto& s = *e.solution;
  const ConditionReport r = regularity_report(*e.problem, s.z_bar);
  const std::string n = GetParam();
  expect_flag(s.expected.w_soc, r.w_soc.holds, n + " W-SOC");
  expect_flag(s.expected.s_sosc, r.s_sosc.holds, n + " S-SOSC");
  expect_flag(s.expected.w_srcq, r.w_srcq.holds, n + " W-SRCQ");
  expect_flag(s.expected.cn, r.cn.holds, n + " CN");
  expect_flag(s.expected.u0_nonsingular, r.u0_sigma_min > 1e-8, n + " U0");
  expect_flag(s.expected.ui_nonsingular, r.ui_sigma_min > 1e-8, n + " UI");
  EXPECT_TRUE(r.warnings.empty()) << n << ": " << (r.warnings.empty() ? "" : r.warnings.front());
  // the individual checkers agree with the report
  EXPECT_EQ(check_w_soc(*e.problem, s.z_bar).holds, r.w_soc.holds);
  EXPECT_EQ(check_s_sosc(*e.problem, s.z_bar).holds, r.s_sosc.holds);
}

INSTANTIATE_TEST_SUITE_P(All, CatalogFlags,
                         ::testing::Values("ex1", "ex2", "ex3", "ex4_dual", "ex4_primal", "ex5", "ex7"));

TEST(Conditions, StrongImpliesWeak) {
  for (const std::string name : {"ex1", "ex3", "ex4_primal", "ex7"}) {
    const auto e = catalog(name);
    const auto r = regularity_report(*e.problem, e.solution->z_bar);
    if (r.s_sosc.holds) EXPECT_TRUE(r.w_soc.holds) << name;
    if (r.cn.holds) EXPECT_TRUE(r.w_srcq.holds) << name;
    EXPECT_LE(r.appl_dim, r.app_dim) << name;
  }
}

TEST(Conditions, InvariantUnderObjectiveScaling) {
  for (const std::string name : {"ex3", "ex4_dual", "ex7"}) {
    const auto e = catalog(name);
    const KktPoint& z = e.solution->z_bar;
    for (double s : {0.1, 7.0}) {
      const QsdpProblem p(scaled(e.data, s), name);
      const KktPoint zs{z.x, s * z.xi, s * z.gamma};
      ASSERT_LE(kkt_residual(p, zs).norm(), 1e-12);
      const auto a = regularity_report(*e.problem, z);
      const auto b = regularity_report(p, zs);
      EXPECT_EQ(a.w_soc.holds, b.w_soc.holds) << name;
      EXPECT_EQ(a.s_sosc.holds, b.s_sosc.holds) << name;
      EXPECT_EQ(a.w_srcq.holds, b.w_srcq.holds) << name;
      EXPECT_EQ(a.cn.holds, b.cn.holds) << name;
    }
  }
}

TEST(Conditions, PrimalWeakSocMatchesDualWeakSrcq) {
  const auto primal = catalog("ex4_primal");
  const auto dual = catalog("ex4_dual");
  const CheckResult a = check_w_soc(*primal.problem, primal.solution->z_bar);
  const CheckResult b = check_w_srcq(*dual.problem, dual.solution->z_bar);
  EXPECT_TRUE(a.holds);
  EXPECT_EQ(a.holds, b.holds);
}

TEST(Conditions, RejectsNonKktPoint) {
  const auto e = catalog("ex3");
  const KktPoint z = perturbed_start(e.solution->z_bar, 0.1, 1);
  EXPECT_THROW(regularity_report(*e.problem, z), PreconditionError);
  EXPECT_THROW(check_cn(*e.problem, z), PreconditionError);
}

TEST(Conditions, SubspaceBasesAreOrthonormal) {
  CatalogParams prm;
  prm.l1 = 3;
  prm.l2 = 2;
  const auto e = catalog("ex5", prm);
  const SparseMatrix b = app_basis(*e.problem, e.solution->z_bar);
  const Matrix g = Matrix(b).transpose() * Matrix(b);
  EXPECT_LE((g - Matrix::Identity(g.rows(), g.cols())).norm(), 1e-12);
  const SparseMatrix bl = appl_basis(*e.problem, e.solution->z_bar);
  EXPECT_LE(bl.cols(), b.cols());
}

TEST(Conditions, NonlinearKktPointFromSolver) {
  // find a KKT point of the toy problem with the solver, then check that the
  // report runs and agrees with its own implications
  const ssnsdp::testing::NonlinearToy toy;
  KktPoint z0{Eigen::Vector3d(0.5, 1.0, 0.8), Vector::Constant(1, 0.1),
              BlockSymMatrix({SymMatrix(Matrix::Zero(2, 2)), SymMatrix(Matrix::Zero(1, 1))})};
  SolverParams prm;
  prm.delta = 1e-3;
  prm.max_iter = 60;
  const SolveResult r = ssn_solve(toy, z0, prm);
  if (r.status != SolveStatus::converged) GTEST_SKIP() << "no KKT point found from this start";
  const auto rep = regularity_report(toy, r.z);
  if (rep.s_sosc.holds) EXPECT_TRUE(rep.w_soc.holds);
  if (rep.cn.holds) EXPECT_TRUE(rep.w_srcq.holds);
}
