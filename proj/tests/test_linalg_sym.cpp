#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace ssnsdp;
using ssnsdp::testing::random_sym;
using ssnsdp::testing::random_orthogonal;
using ssnsdp::testing::with_spectrum;

TEST(Svec, LayoutIsColumnMajorUpperTriangle) {
  EXPECT_EQ(svec_dim(3), 6);
  EXPECT_EQ(svec_index(0, 0), 0);
  EXPECT_EQ(svec_index(0, 1), 1);
  EXPECT_EQ(svec_index(1, 1), 2);
  EXPECT_EQ(svec_index(0, 2), 3);
  EXPECT_EQ(svec_index(2, 2), 5);
  EXPECT_EQ(svec_index(2, 0), svec_index(0, 2));

  Matrix a(2, 2);
  a << 1, 2, 2, 3;
  const Vector v = svec(SymMatrix(a));
  ASSERT_EQ(v.size(), 3);
  EXPECT_DOUBLE_EQ(v[0], 1);
  EXPECT_DOUBLE_EQ(v[1], 2 * kSqrt2);
  EXPECT_DOUBLE_EQ(v[2], 3);
}

TEST(Svec, RoundTripAndIsometry) {
  std::mt19937_64 rng(1);
  for (Index n : {1, 2, 5, 9}) {
    const SymMatrix a(random_sym(n, rng)), b(random_sym(n, rng));
    EXPECT_LE((smat(svec(a)).matrix() - a.matrix()).norm(), 1e-14);
    EXPECT_NEAR(svec(a).dot(svec(b)), inner(a, b), 1e-12);
    EXPECT_NEAR(svec(a).norm(), a.norm(), 1e-12);
  }
}

TEST(Svec, BadLengthsThrow) {
  EXPECT_THROW(order_from_svec_dim(4), DimensionError);
  EXPECT_THROW(smat(Vector::Zero(3), 3), DimensionError);
  EXPECT_THROW(smat_blocks(Vector::Zero(5), {2, 1}), DimensionError);
  EXPECT_EQ(smat_blocks(Vector::Zero(4), {2, 1}).num_blocks(), 2u);
}

TEST(SymMatrix, UpperTriangleWinsAndShapesAreChecked) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_EQ(SymMatrix(a)(1, 0), 2.0);
  EXPECT_THROW(SymMatrix{Matrix(Matrix::Zero(2, 3))}, DimensionError);
  EXPECT_THROW(SymMatrix::identity(2) + SymMatrix::identity(3), DimensionError);
}

TEST(EigSym, ReconstructsSortedAndClassifies) {
  std::mt19937_64 rng(2);
  for (Index n : {1, 3, 8, 30}) {
    const SymMatrix a(random_sym(n, rng));
    const auto d = eig_sym(a);
    EXPECT_LE((d.reconstruct().matrix() - a.matrix()).norm(), 1e-12 * (1 + a.norm()));
    EXPECT_LE((d.P().transpose() * d.P() - Matrix::Identity(n, n)).norm(), 1e-12);
    for (Index i = 1; i < n; ++i) EXPECT_GE(d.lambda()[i - 1], d.lambda()[i]);
    EXPECT_EQ(static_cast<Index>(d.alpha().size() + d.beta().size() + d.gamma().size()), n);
  }
  Vector l(4);
  l << 2, 1e-15, 0, -1;
  const auto d = eig_sym(with_spectrum(l, rng));
  EXPECT_EQ(d.alpha().size(), 1u);
  EXPECT_EQ(d.beta().size(), 2u);
  EXPECT_EQ(d.gamma().size(), 1u);
  EXPECT_EQ(d.lambda_classified()[1], 0.0);
}

TEST(EigSym, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eig_sym(SymMatrix(a)), NumericalError);
}

TEST(ProjectPsd, MoreauDecomposition) {
  std::mt19937_64 rng(3);
  for (Index n : {1, 2, 6, 25}) {
    const SymMatrix a(random_sym(n, rng, 3.0));
    const SymMatrix p = project_psd(a), m = project_psd(-a);
    const double tol = 1e-12 * (1 + a.norm());
    EXPECT_LE((p - m - a).norm(), tol);
    EXPECT_NEAR(inner(p, m), 0.0, tol);
    EXPECT_GE(eig_sym(p).lambda().minCoeff(), -tol);
    // idempotent and nearest: no random psd matrix is closer
    EXPECT_LE((project_psd(p) - p).norm(), tol);
    const SymMatrix c = project_psd(SymMatrix(random_sym(n, rng)));
    EXPECT_LE((a - p).norm(), (a - c).norm() + tol);
  }
}

TEST(Xi, DividedDifferences) {
  Vector l(3);
  l << 2, 0, -1;
  const auto d = SpectralDecomposition::from_factors(Matrix::Identity(3, 3), l, 1e-12);
  const Matrix xi = xi_matrix(d).entries;
  EXPECT_DOUBLE_EQ(xi(0, 0), 1);
  EXPECT_DOUBLE_EQ(xi(0, 1), 1);
  EXPECT_DOUBLE_EQ(xi(1, 1), 1);
  EXPECT_DOUBLE_EQ(xi(0, 2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(xi(2, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(xi(1, 2), 0);
  EXPECT_DOUBLE_EQ(xi(2, 2), 0);
}

TEST(DprojPsd, MatchesCentralDifferencesAwayFromZero) {
  std::mt19937_64 rng(4);
  for (Index n : {2, 4, 10}) {
    Vector l(n);
    for (Index i = 0; i < n; ++i) l[i] = (i % 2 ? -1.0 : 1.0) * (0.5 + i);
    const SymMatrix a = with_spectrum(l, rng);
    const SymMatrix h(random_sym(n, rng));
    const double t = 1e-6;
    const SymMatrix fd = (0.5 / t) * (project_psd(a + t * h) - project_psd(a - t * h));
    EXPECT_LE((fd - dproj_psd(eig_sym(a), h)).norm(), 1e-7 * (1 + h.norm()));
  }
}

TEST(DprojPsd, OneSidedDerivativeAtZeroEigenvalues) {
  std::mt19937_64 rng(5);
  Vector l(5);
  l << 3, 1, 0, 0, -2;
  const SymMatrix a = with_spectrum(l, rng);
  const auto d = eig_sym(a);
  for (int k = 0; k < 5; ++k) {
    const SymMatrix h(random_sym(5, rng));
    const double t = 1e-7;
    const SymMatrix fd = (1.0 / t) * (project_psd(a + t * h) - project_psd(a));
    EXPECT_LE((fd - dproj_psd(d, h)).norm(), 1e-5 * (1 + h.norm()));
  }
}

TEST(ApplyV, AgreesWithDerivativeOnItsSide) {
  // V0 is the derivative along directions whose beta-beta block is nsd,
  // VI along directions whose beta-beta block is psd
  std::mt19937_64 rng(6);
  Vector l(4);
  l << 2, 0, 0, -1;
  const Matrix p = random_orthogonal(4, rng);
  const auto d = SpectralDecomposition::from_factors(p, l, 1e-12);
  Matrix ht = random_sym(4, rng);
  Matrix bb = random_sym(2, rng);
  bb = bb * bb.transpose();
  ht.block(1, 1, 2, 2) = bb;
  const SymMatrix hpos(Matrix(p * ht * p.transpose()));
  ht.block(1, 1, 2, 2) = -bb;
  const SymMatrix hneg(Matrix(p * ht * p.transpose()));
  EXPECT_LE((apply_V(d, Variant::identity, hpos) - dproj_psd(d, hpos)).norm(), 1e-12);
  EXPECT_LE((apply_V(d, Variant::zero, hneg) - dproj_psd(d, hneg)).norm(), 1e-12);
}

TEST(ApplyV, OperatorIsSymmetricWithSpectrumInUnitInterval) {
  std::mt19937_64 rng(7);
  for (Index n : {1, 3, 6}) {
    Vector l(n);
    for (Index i = 0; i < n; ++i) l[i] = i % 3 == 0 ? 0.0 : (i % 3 == 1 ? 1.0 + i : -1.0 - i);
    const auto d = eig_sym(with_spectrum(l, rng));
    for (Variant v : {Variant::zero, Variant::identity}) {
      const Index m = svec_dim(n);
      Matrix op(m, m);
      for (Index c = 0; c < m; ++c) op.col(c) = svec(apply_V(d, v, smat(Vector::Unit(m, c), n)));
      EXPECT_LE((op - op.transpose()).norm(), 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(op);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
      EXPECT_LE(es.eigenvalues().maxCoeff(), 1 + 1e-12);
    }
  }
}

TEST(ApplyV, InvariantUnderEigenbasisChoice) {
  // rotating the eigenvectors inside each repeated eigenvalue group must not change V
  std::mt19937_64 rng(8);
  Vector l(6);
  l << 2, 2, 0, 0, 0, -1;
  const Matrix p = random_orthogonal(6, rng);
  Matrix r = Matrix::Identity(6, 6);
  r.block(0, 0, 2, 2) = random_orthogonal(2, rng);
  r.block(2, 2, 3, 3) = random_orthogonal(3, rng);
  const auto d1 = SpectralDecomposition::from_factors(p, l, 1e-12);
  const auto d2 = SpectralDecomposition::from_factors(p * r, l, 1e-12);
  const SymMatrix h(random_sym(6, rng));
  for (Variant v : {Variant::zero, Variant::identity})
    EXPECT_LE((apply_V(d1, v, h) - apply_V(d2, v, h)).norm(), 1e-12);
  EXPECT_LE((dproj_psd(d1, h) - dproj_psd(d2, h)).norm(), 1e-12);
}

TEST(BlockOps, ActBlockwise) {
  std::mt19937_64 rng(9);
  const BlockSymMatrix a({SymMatrix(random_sym(3, rng)), SymMatrix(random_sym(1, rng))});
  const BlockSymMatrix p = project_psd(a);
  EXPECT_LE((p.block(0) - project_psd(a.block(0))).norm(), 1e-14);
  EXPECT_LE((p.block(1) - project_psd(a.block(1))).norm(), 1e-14);
  EXPECT_EQ(svec(a).size(), 7);
  EXPECT_NEAR(inner(a, a), a.norm() * a.norm(), 1e-12);
}
