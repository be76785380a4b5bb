#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace ssnsdp;

TEST(Params, Validation) {
  SolverParams p;
  EXPECT_NO_THROW(validate(p));
  p.delta = 0;
  EXPECT_THROW(validate(p), PreconditionError);
  p = {};
  p.eta = 1.0;
  EXPECT_THROW(validate(p), PreconditionError);
  p = {};
  p.tau = 0;
  EXPECT_THROW(validate(p), PreconditionError);
  p = {};
  p.tol = -1;
  EXPECT_THROW(validate(p), PreconditionError);
}

TEST(Correction, PinsSmallEigenvaluesToZero) {
  const auto e = catalog("ex3");
  const auto& p = *e.problem;
  const KktPoint z = perturbed_start(e.solution->z_bar, 0.3, 9);
  const double delta = 0.5;
  const CorrectionResult c = correct_with_spectrum(p, z, delta);
  EXPECT_EQ(c.z.x, z.x);
  const auto before = eig_blocks(cone_argument(p, z));
  const auto after = eig_blocks(cone_argument(p, c.z));
  double shift2 = 0;
  for (std::size_t b = 0; b < before.size(); ++b)
    for (Index i = 0; i < before[b].order(); ++i) {
      const double l = before[b].lambda()[i];
      if (std::abs(l) <= delta) shift2 += l * l;
    }
  EXPECT_NEAR(c.shift, std::sqrt(shift2), 1e-12);
  EXPECT_NEAR(distance(c.z, z), c.shift, 1e-12);
  for (const auto& d : after)
    for (Index i = 0; i < d.order(); ++i) {
      const double l = d.lambda()[i];
      EXPECT_TRUE(std::abs(l) < 1e-12 || std::abs(l) > delta) << l;
    }
  // a point with every eigenvalue beyond delta is left alone
  const CorrectionResult c2 = correct_with_spectrum(p, z, 1e-9);
  EXPECT_EQ(c2.shift, 0.0);
  EXPECT_THROW(correct(z, p, 0.0), PreconditionError);
}

TEST(Solve, Ex3ConvergesFastFromFarStart) {
  const auto e = catalog("ex3");
  SolverParams prm;
  prm.delta = 0.5;
  const KktPoint& zb = e.solution->z_bar;
  const SolveResult r = ssn_solve(*e.problem, perturbed_start(zb, 10, 2), prm, zb);
  ASSERT_EQ(r.status, SolveStatus::converged) << r.message;
  EXPECT_LE(r.iterations(), 8);
  EXPECT_LT(r.trace.back().f_norm, 1e-10);
  EXPECT_LT(distance(r.z, zb), 1e-9);
  for (const auto& t : r.trace) ASSERT_TRUE(t.dist.has_value());
  EXPECT_GT(r.trace.back().sigma_min, 0.1);
}

TEST(Solve, TraceIsDeterministic) {
  const auto e = catalog("ex4_dual");
  SolverParams prm;
  const KktPoint z0 = perturbed_start(e.solution->z_bar, 10, 3);
  const SolveResult a = ssn_solve(*e.problem, z0, prm, e.solution->z_bar);
  const SolveResult b = ssn_solve(*e.problem, z0, prm, e.solution->z_bar);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].f_norm, b.trace[k].f_norm);
    EXPECT_EQ(a.trace[k].sigma_min, b.trace[k].sigma_min);
  }
}

TEST(Solve, CorrectionRescuesEx7) {
  const auto e = catalog("ex7");
  SolverParams prm;
  prm.variant = Variant::identity;
  prm.delta = 0.2;
  for (double eps : {0.01, 0.05, 0.09}) {
    const KktPoint z0 = ex7_start(eps);
    const SolveResult plain = classical_ssn_solve(*e.problem, z0, prm);
    EXPECT_EQ(plain.status, SolveStatus::singular_system) << eps;
    EXPECT_EQ(plain.trace.back().k, 0);
    const SolveResult fixed = ssn_solve(*e.problem, z0, prm, e.solution->z_bar);
    EXPECT_EQ(fixed.status, SolveStatus::converged) << eps;
    EXPECT_EQ(fixed.iterations(), 1) << eps;
    EXPECT_GT(fixed.trace.front().correction_shift, 0);
  }
}

TEST(Solve, MaxIterIsReported) {
  const auto e = catalog("ex3");
  SolverParams prm;
  prm.max_iter = 1;
  const SolveResult r = ssn_solve(*e.problem, perturbed_start(e.solution->z_bar, 10, 2), prm);
  EXPECT_EQ(r.status, SolveStatus::max_iter);
  EXPECT_EQ(r.trace.size(), 2u);
}

TEST(Solve, StartAtSolutionTakesNoStep) {
  const auto e = catalog("ex7");
  const SolveResult r = ssn_solve(*e.problem, e.solution->z_bar, {}, e.solution->z_bar);
  EXPECT_EQ(r.status, SolveStatus::converged);
  EXPECT_EQ(r.iterations(), 0);
  EXPECT_EQ(r.trace.front().newton_residual, 0.0);
}

TEST(Solve, InexactNewtonStillConverges) {
  const auto e = catalog("ex4_dual");
  SolverParams prm;
  prm.exact_solve = false;
  prm.eta = 0.1;
  prm.tau = 1.0;
  const SolveResult r = ssn_solve(*e.problem, perturbed_start(e.solution->z_bar, 1, 1), prm, e.solution->z_bar);
  EXPECT_EQ(r.status, SolveStatus::converged);
}

TEST(Solve, SingularDenseSystemThrows) {
  DenseOperator u{Matrix::Zero(3, 3)};
  KktResidual f;
  f.stationarity = Vector::Ones(3);
  f.feasibility_eq = Vector(0);
  f.cone_residual = BlockSymMatrix(std::vector<SymMatrix>{});
  EXPECT_THROW(newton_step(u, f, SolverParams{}), SingularSystemError);
}

TEST(Duality, Ex4ObjectivesMatch) {
  // primal optimum = 1/2|b|^2_B - dual optimum
  const auto pr = catalog("ex4_primal");
  const auto du = catalog("ex4_dual");
  const double fp = pr.problem->f(pr.solution->z_bar.x);
  const double fd = du.problem->f(du.solution->z_bar.x);
  EXPECT_NEAR(fd, 9.5, 1e-12);
  EXPECT_NEAR(fp, pr.data.f0 - fd, 1e-12);
  EXPECT_NEAR(fp, 0.75, 1e-12);
  // the Wolfe dual written from the primal data reproduces the same value
  const auto& zp = pr.solution->z_bar;
  EXPECT_NEAR(pr.data.f0 - qsdp_dual_objective(pr.data, zp.x, zp.xi, zp.gamma), fp, 1e-12);
}

TEST(Diagnostics, ConvergenceOrder) {
  std::vector<IterationTrace> tr;
  double f = 1e-1;
  for (int k = 0; k < 5; ++k) {
    IterationTrace t;
    t.k = k;
    t.f_norm = f;
    tr.push_back(t);
    f = f * f;
  }
  const OrderEstimate q = convergence_order(tr);
  ASSERT_TRUE(q.order.has_value());
  EXPECT_NEAR(*q.order, 2.0, 1e-9);

  std::vector<IterationTrace> lin;
  f = 1e-1;
  for (int k = 0; k < 6; ++k) {
    IterationTrace t;
    t.f_norm = f;
    lin.push_back(t);
    f *= 0.1;
  }
  EXPECT_LT(*convergence_order(lin).order, 1.5);
  EXPECT_FALSE(convergence_order({}).order.has_value());
}

TEST(Diagnostics, ErrorBoundBand) {
  std::vector<IterationTrace> tr(3);
  tr[0].f_norm = 2;
  tr[0].dist = 1;
  tr[1].f_norm = 1;
  tr[1].dist = 1;
  tr[2].f_norm = 1e-14;
  tr[2].dist = 1e-15;
  EXPECT_NEAR(*error_bound_band(tr), 2.0, 1e-15);
  std::vector<IterationTrace> none(1);
  EXPECT_FALSE(error_bound_band(none).has_value());
}
