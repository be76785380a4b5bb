#pragma once
// Shared helpers for the test programs: random symmetric data and a small
// genuinely nonlinear problem with hand-written derivatives.

#include <ssnsdp/ssnsdp.hpp>

#include <cmath>
#include <random>

namespace ssnsdp::testing {

inline Matrix random_sym(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = nd(rng);
  return scale * 0.5 * (a + a.transpose());
}

inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

// P diag(lambda) P' with P random orthogonal
inline SymMatrix with_spectrum(const Vector& lambda, std::mt19937_64& rng) {
  const Matrix p = random_orthogonal(lambda.size(), rng);
  return SymMatrix(Matrix(p * lambda.asDiagonal() * p.transpose()));
}

inline Vector random_vec(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

// min  exp(x0) + x1^2 x2 + sin(x2)
// s.t. x0^2 + x1 x2 - 1 = 0
//      [[x0, x1^2], [x1^2, 1 + x0 x2]] psd,  x2 - x0^2 >= 0
class NonlinearToy : public NlsdpProblem {
 public:
  std::string name() const override { return "toy"; }
  Index x_dim() const override { return 3; }
  Index eq_dim() const override { return 1; }
  const std::vector<Index>& cone_blocks() const override { return blocks_; }

  double f(const Vector& x) const override { return std::exp(x[0]) + x[1] * x[1] * x[2] + std::sin(x[2]); }
  Vector grad_f(const Vector& x) const override {
    return Eigen::Vector3d(std::exp(x[0]), 2 * x[1] * x[2], x[1] * x[1] + std::cos(x[2]));
  }
  Vector h(const Vector& x) const override { return Vector::Constant(1, x[0] * x[0] + x[1] * x[2] - 1); }
  Vector jac_h(const Vector& x, const Vector& v) const override {
    return Vector::Constant(1, 2 * x[0] * v[0] + x[2] * v[1] + x[1] * v[2]);
  }
  Vector jac_h_adj(const Vector& x, const Vector& xi) const override {
    return xi[0] * Eigen::Vector3d(2 * x[0], x[2], x[1]);
  }
  BlockSymMatrix g(const Vector& x) const override {
    Matrix a(2, 2);
    a << x[0], x[1] * x[1], x[1] * x[1], 1 + x[0] * x[2];
    return BlockSymMatrix({SymMatrix(a), SymMatrix(Matrix::Constant(1, 1, x[2] - x[0] * x[0]))});
  }
  BlockSymMatrix jac_g(const Vector& x, const Vector& v) const override {
    Matrix a(2, 2);
    a << v[0], 2 * x[1] * v[1], 2 * x[1] * v[1], x[2] * v[0] + x[0] * v[2];
    return BlockSymMatrix({SymMatrix(a), SymMatrix(Matrix::Constant(1, 1, v[2] - 2 * x[0] * v[0]))});
  }
  Vector jac_g_adj(const Vector& x, const BlockSymMatrix& gm) const override {
    const Matrix& a = gm.block(0).matrix();
    const double c = gm.block(1)(0, 0);
    return Eigen::Vector3d(a(0, 0) + x[2] * a(1, 1) - 2 * x[0] * c, 4 * x[1] * a(0, 1), x[0] * a(1, 1) + c);
  }
  Vector hess_lagrangian(const Vector& x, const Vector& xi, const BlockSymMatrix& gm,
                         const Vector& v) const override {
    const Matrix& a = gm.block(0).matrix();
    const double c = gm.block(1)(0, 0);
    Matrix hs(3, 3);
    hs << std::exp(x[0]), 0, 0, 0, 2 * x[2], 2 * x[1], 0, 2 * x[1], -std::sin(x[2]);
    Matrix hh(3, 3);
    hh << 2, 0, 0, 0, 0, 1, 0, 1, 0;
    Matrix hg = Matrix::Zero(3, 3);
    hg(1, 1) = 4 * a(0, 1);
    hg(0, 2) = hg(2, 0) = a(1, 1);
    hg(0, 0) = -2 * c;
    return (hs + xi[0] * hh + hg) * v;
  }

 private:
  std::vector<Index> blocks_{2, 1};
};

}  // namespace ssnsdp::testing
