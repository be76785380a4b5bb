#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace ssnsdp;
using ssnsdp::testing::NonlinearToy;
using ssnsdp::testing::random_vec;

namespace {

// a point whose cone argument has all eigenvalues at least `gap` away from 0
KktPoint complementary_point(const NlsdpProblem& p, std::mt19937_64& rng, double gap = 0.3) {
  for (;;) {
    KktPoint z{random_vec(p.x_dim(), rng), random_vec(p.eq_dim(), rng),
               smat_blocks(random_vec(p.gamma_dim(), rng), p.cone_blocks())};
    if (differentiability_margin(p, z) > gap) return z;
  }
}

}  // namespace

TEST(Residual, VanishesAtCatalogSolutions) {
  for (const std::string name : {"ex2", "ex3", "ex7"}) {
    const auto e = catalog(name);
    const KktResidual r = kkt_residual(*e.problem, e.solution->z_bar);
    EXPECT_EQ(r.to_vector().size(), kkt_dim(*e.problem));
    EXPECT_LE(r.norm(), 1e-14);
  }
}

TEST(Jacobian, MatchesFiniteDifferencesAtSmoothPoints) {
  std::mt19937_64 rng(21);
  const NonlinearToy toy;
  for (int k = 0; k < 5; ++k) {
    const KktPoint z = complementary_point(toy, rng);
    const Matrix u = assemble_U(toy, z, Variant::zero).matrix;
    const Matrix fd = fd_jacobian(toy, z).matrix;
    EXPECT_LE((u - fd).cwiseAbs().maxCoeff(), 1e-6 * (1 + u.cwiseAbs().maxCoeff()));
    // away from beta both variants coincide
    EXPECT_LE((u - assemble_U(toy, z, Variant::identity).matrix).norm(), 1e-14);
  }
}

TEST(Jacobian, TransposeIsConsistent) {
  std::mt19937_64 rng(22);
  CatalogParams prm;
  prm.l1 = 3;
  prm.l2 = 2;
  const auto e = catalog("ex5", prm);
  const KktPoint z = perturbed_start(e.solution->z_bar, 1.0, 3);
  const KktJacobian u = make_jacobian(*e.problem, z, Variant::zero);
  const Matrix d = u.to_dense();
  const Vector a = random_vec(u.dim(), rng), b = random_vec(u.dim(), rng);
  EXPECT_LE((u.apply(a) - d * a).norm(), 1e-12 * (1 + a.norm()));
  EXPECT_LE((u.apply_transpose(b) - d.transpose() * b).norm(), 1e-12 * (1 + b.norm()));
}

TEST(Jacobian, U0AndUIDifferOnlyThroughBetaBlock) {
  const auto e = catalog("ex2");
  const auto& z = e.solution->z_bar;
  const Matrix u0 = assemble_U(*e.problem, z, Variant::zero).matrix;
  const Matrix ui = assemble_U(*e.problem, z, Variant::identity).matrix;
  EXPECT_GT((u0 - ui).norm(), 0.5);
  const Matrix mid = clarke_combination({u0}, {ui}, 0.5).matrix;
  EXPECT_LE((mid - 0.5 * (u0 + ui)).norm(), 1e-15);
  EXPECT_THROW(clarke_combination({u0}, {ui}, 1.5), PreconditionError);
}

TEST(Example2, FamilyIsSingularButMidpointIsNot) {
  const auto e = catalog("ex2");
  const auto& p = *e.problem;
  std::vector<Matrix> omegas{Matrix::Zero(2, 2), Matrix::Ones(2, 2)};
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Matrix a(2, 2), b(2, 2);
    a << 0, t, t, 1;
    b << 1, t, t, 0;
    omegas.push_back(a);
    omegas.push_back(b);
  }
  for (const auto& w : omegas) EXPECT_LE(min_singular_value(example2_family(p, w)), 1e-10) << w;
  const auto& z = e.solution->z_bar;
  const double mid =
      min_singular_value(clarke_combination(assemble_U(p, z, Variant::zero), assemble_U(p, z, Variant::identity), 0.5));
  EXPECT_GT(mid, 1e-8);
}

TEST(Example2, RejectsInadmissibleOmega) {
  const auto e = catalog("ex2");
  Matrix w(2, 2);
  w << 0.5, 0, 0, 0.5;
  EXPECT_FALSE(in_example2_family(w));
  EXPECT_THROW(example2_family(*e.problem, w), PreconditionError);
  EXPECT_THROW(example2_family(*catalog("ex3").problem, Matrix::Zero(2, 2)), PreconditionError);
}

TEST(SigmaMin, LanczosAgreesWithDenseSvd) {
  CatalogParams prm;
  prm.l1 = 4;
  prm.l2 = 3;
  const auto e = catalog("ex5", prm);
  const KktPoint z = perturbed_start(e.solution->z_bar, 0.5, 1);
  const KktJacobian u = make_jacobian(*e.problem, z, Variant::zero);
  const double dense = min_singular_value(u.to_dense());
  SigmaOptions so;
  so.dense_limit = 0;
  EXPECT_NEAR(min_singular_value(u, so), dense, 1e-6 * (1 + dense));
}

TEST(Krylov, GmresSolvesNonsymmetricSystem) {
  std::mt19937_64 rng(23);
  Matrix a = Matrix::Identity(40, 40) * 3 + ssnsdp::testing::random_sym(40, rng) * 0.2;
  a(0, 5) += 1.0;
  const Vector b = random_vec(40, rng);
  const GmresResult r = gmres([&](const Vector& v) { return Vector(a * v); }, b);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((a * r.x - b).norm(), 1e-12 * b.norm());
}
