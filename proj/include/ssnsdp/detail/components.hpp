#pragma once
// Exact small-block reductions for sparse restricted spectral problems.
// If the coupling graph of the data splits into connected components, the
// restricted eigen/singular value problems decouple and each piece can be
// handled with dense algebra.

#include "../common.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace ssnsdp::detail {

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index find(Index a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<Index> parent_;
};

using RowMajorSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// groups[c] lists members of component c in increasing order
inline std::vector<std::vector<Index>> collect_groups(UnionFind& uf, Index n) {
  std::vector<Index> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> groups;
  for (Index i = 0; i < n; ++i) {
    const Index r = uf.find(i);
    if (label[r] < 0) {
      label[r] = static_cast<Index>(groups.size());
      groups.emplace_back();
    }
    groups[label[r]].push_back(i);
  }
  return groups;
}

struct RestrictedEigResult {
  double lambda_min = std::numeric_limits<double>::infinity();  // inf when the subspace is {0}
  Index dim = 0;
  SparseMatrix basis;  // orthonormal columns spanning null(C)
};

// lambda_min of Q restricted to null(C); rank cut at rel_cut * sigma_max(C).
inline RestrictedEigResult restricted_min_eig(const SparseMatrix& c, const SparseMatrix& q, double rel_cut,
                                              bool want_basis) {
  const Index d = c.cols();
  if (q.rows() != d || q.cols() != d) throw DimensionError("restricted_min_eig: Q/C mismatch");
  UnionFind uf(d);
  const RowMajorSparse cr = c;
  for (Index r = 0; r < cr.outerSize(); ++r) {
    Index first = -1;
    for (RowMajorSparse::InnerIterator it(cr, r); it; ++it) {
      if (first < 0) first = it.col();
      else uf.unite(first, it.col());
    }
  }
  for (Index k = 0; k < q.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(q, k); it; ++it)
      if (it.row() != it.col()) uf.unite(it.row(), it.col());
  const auto groups = collect_groups(uf, d);

  std::vector<Index> comp_of(static_cast<std::size_t>(d)), local(static_cast<std::size_t>(d));
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t t = 0; t < groups[g].size(); ++t) {
      comp_of[groups[g][t]] = static_cast<Index>(g);
      local[groups[g][t]] = static_cast<Index>(t);
    }
  std::vector<std::vector<Index>> rows_of(groups.size());
  for (Index r = 0; r < cr.outerSize(); ++r) {
    RowMajorSparse::InnerIterator it(cr, r);
    if (it) rows_of[comp_of[it.col()]].push_back(r);
  }

  // pass 1: SVD of each component's constraint block
  struct Piece {
    Matrix v;
    Vector s;
  };
  std::vector<Piece> pieces(groups.size());
  double smax = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Index s = static_cast<Index>(groups[g].size());
    const Index nr = static_cast<Index>(rows_of[g].size());
    if (nr == 0) continue;
    Matrix cc = Matrix::Zero(nr, s);
    for (Index i = 0; i < nr; ++i)
      for (RowMajorSparse::InnerIterator it(cr, rows_of[g][i]); it; ++it) cc(i, local[it.col()]) = it.value();
    Eigen::BDCSVD<Matrix> svd(cc, Eigen::ComputeFullV);
    pieces[g].v = svd.matrixV();
    pieces[g].s = svd.singularValues();
    if (pieces[g].s.size()) smax = std::max(smax, pieces[g].s.maxCoeff());
  }
  const double cut = rel_cut * smax;

  RestrictedEigResult res;
  std::vector<Triplet> bt;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Index s = static_cast<Index>(groups[g].size());
    Matrix n;
    if (rows_of[g].empty()) {
      n = Matrix::Identity(s, s);
    } else {
      Index rank = 0;
      for (Index i = 0; i < pieces[g].s.size(); ++i)
        if (pieces[g].s[i] > cut) ++rank;
      n = pieces[g].v.rightCols(s - rank);
    }
    if (n.cols() == 0) continue;
    Matrix qc = Matrix::Zero(s, s);
    for (Index t = 0; t < s; ++t) {
      const Index col = groups[g][t];
      for (SparseMatrix::InnerIterator it(q, col); it; ++it)
        if (comp_of[it.row()] == static_cast<Index>(g)) qc(local[it.row()], t) = it.value();
    }
    const Matrix red = n.transpose() * qc * n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (red + red.transpose())), Eigen::EigenvaluesOnly);
    res.lambda_min = std::min(res.lambda_min, es.eigenvalues()[0]);
    if (want_basis)
      for (Index j = 0; j < n.cols(); ++j)
        for (Index t = 0; t < s; ++t)
          if (n(t, j) != 0.0) bt.emplace_back(groups[g][t], res.dim + j, n(t, j));
    res.dim += n.cols();
  }
  if (want_basis) {
    res.basis.resize(d, res.dim);
    res.basis.setFromTriplets(bt.begin(), bt.end());
  }
  return res;
}

// min over unit u of |M u|; zero when M has more columns than rank allows.
// inf when M has no columns.
inline double injectivity_margin(const SparseMatrix& m) {
  const Index k = m.cols();
  if (k == 0) return std::numeric_limits<double>::infinity();
  UnionFind uf(k);
  const RowMajorSparse mr = m;
  for (Index r = 0; r < mr.outerSize(); ++r) {
    Index first = -1;
    for (RowMajorSparse::InnerIterator it(mr, r); it; ++it) {
      if (first < 0) first = it.col();
      else uf.unite(first, it.col());
    }
  }
  const auto groups = collect_groups(uf, k);
  std::vector<Index> comp_of(static_cast<std::size_t>(k)), local(static_cast<std::size_t>(k));
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t t = 0; t < groups[g].size(); ++t) {
      comp_of[groups[g][t]] = static_cast<Index>(g);
      local[groups[g][t]] = static_cast<Index>(t);
    }
  std::vector<std::vector<Index>> rows_of(groups.size());
  for (Index r = 0; r < mr.outerSize(); ++r) {
    RowMajorSparse::InnerIterator it(mr, r);
    if (it) rows_of[comp_of[it.col()]].push_back(r);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Index nc = static_cast<Index>(groups[g].size());
    const Index nr = static_cast<Index>(rows_of[g].size());
    if (nc > nr) return 0.0;
    Matrix mc = Matrix::Zero(nr, nc);
    for (Index i = 0; i < nr; ++i)
      for (RowMajorSparse::InnerIterator it(mr, rows_of[g][i]); it; ++it) mc(i, local[it.col()]) = it.value();
    Eigen::BDCSVD<Matrix> svd(mc);
    best = std::min(best, svd.singularValues().minCoeff());
  }
  return best;
}

}  // namespace ssnsdp::detail
