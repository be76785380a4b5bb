#pragma once
// Semismooth Newton with the delta-correction of the multiplier, and the
// uncorrected baseline. Small systems are factored densely; large ones go
// through GMRES on the matrix-free Jacobian.

#include "kkt.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ssnsdp {

struct SolverParams {
  double delta = 0.5;
  double eta = 0.0;
  double tau = 1.0;
  Variant variant = Variant::zero;
  double tol = 1e-10;
  int max_iter = 50;
  bool exact_solve = true;

  // implementation knobs
  double class_tol = -1.0;       // < 0: default relative tolerance
  double singular_cond = 1e14;   // reciprocal-condition cutoff for dense solves
  double divergence_factor = 1e6;
  Index dense_limit = 1500;      // above this the Jacobian is never formed
  bool record_sigma_min = true;
};

inline void validate(const SolverParams& p) {
  if (!(p.delta > 0) || !std::isfinite(p.delta)) throw PreconditionError("solver: delta must be positive");
  if (!(p.eta >= 0 && p.eta < 1)) throw PreconditionError("solver: eta must lie in [0, 1)");
  if (!(p.tau > 0 && p.tau <= 1)) throw PreconditionError("solver: tau must lie in (0, 1]");
  if (!(p.tol > 0)) throw PreconditionError("solver: tol must be positive");
  if (p.max_iter < 0) throw PreconditionError("solver: max_iter must be nonnegative");
}

enum class SolveStatus { converged, max_iter, singular_system, diverged };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::singular_system: return "singular_system";
    case SolveStatus::diverged: return "diverged";
  }
  return "?";
}

struct IterationTrace {
  int k = 0;
  double f_norm = 0;
  std::optional<double> dist;          // only when a reference solution is known
  double sigma_min = std::numeric_limits<double>::quiet_NaN();
  double correction_shift = 0;         // |P_delta(Z^) - Z^| that produced Z^k
  double newton_residual = 0;          // |U d + F| for the step taken at k (0 if none)
};

struct SolveResult {
  SolveStatus status = SolveStatus::max_iter;
  KktPoint z;
  std::vector<IterationTrace> trace;
  std::string message;

  int iterations() const { return trace.empty() ? 0 : trace.back().k; }
};

struct CorrectionResult {
  KktPoint z;
  BlockSpectral spectral;  // of g(x) + Gamma at the corrected point
  double shift = 0;
};

// Gamma <- Gamma - sum_{|lambda_i| <= delta} lambda_i p_i p_i'  for A = g(x) + Gamma.
// The corrected cone argument has those eigenvalues pinned to zero.
inline CorrectionResult correct_with_spectrum(const NlsdpProblem& p, const KktPoint& z, double delta,
                                              double class_tol = -1.0) {
  if (!(delta > 0)) throw PreconditionError("correct: delta must be positive");
  check_point(p, z);
  const BlockSymMatrix gx = p.g(z.x);
  const BlockSymMatrix a = gx + z.gamma;
  std::vector<SymMatrix> shift_blocks, gam;
  BlockSpectral spec;
  double shift2 = 0;
  for (std::size_t b = 0; b < a.num_blocks(); ++b) {
    const SpectralDecomposition d = eig_sym(a.block(b));
    Vector drop = Vector::Zero(d.order());
    Vector lnew = d.lambda();
    for (Index i = 0; i < d.order(); ++i)
      if (std::abs(d.lambda()[i]) <= delta) {
        drop[i] = d.lambda()[i];
        lnew[i] = 0.0;
      }
    shift2 += drop.squaredNorm();
    const SymMatrix s(Matrix(d.P() * drop.asDiagonal() * d.P().transpose()));
    gam.push_back(z.gamma.block(b) - s);
    // reuse the eigenbasis; classification re-run with the corrected values
    double tol = class_tol;
    if (tol < 0) tol = default_class_tol(lnew.size() ? lnew.cwiseAbs().maxCoeff() : 0.0);
    spec.push_back(SpectralDecomposition::from_factors(d.P(), lnew, tol));
  }
  CorrectionResult r;
  r.z = {z.x, z.xi, BlockSymMatrix(std::move(gam))};
  r.spectral = std::move(spec);
  r.shift = std::sqrt(shift2);
  return r;
}

inline KktPoint correct(const KktPoint& z, const NlsdpProblem& p, double delta) {
  return correct_with_spectrum(p, z, delta).z;
}

// Dense Newton direction. Exact: partial-pivot LU with a condition check.
// Inexact (eta > 0, exact_solve off): GMRES to min(eta, |F|^tau) |F|.
inline Vector newton_step(const DenseOperator& u, const KktResidual& f, const SolverParams& prm) {
  const Vector rhs = -f.to_vector();
  if (u.dim() != rhs.size()) throw DimensionError("newton_step: U and F disagree");
  const double fn = rhs.norm();
  if (!prm.exact_solve && prm.eta > 0) {
    GmresOptions go;
    go.rel_tol = std::min(prm.eta, std::pow(fn, prm.tau));
    const Matrix& m = u.matrix;
    const GmresResult r = gmres([&m](const Vector& v) { return Vector(m * v); }, rhs, go);
    if (!r.converged) throw SingularSystemError("inexact Newton solve stagnated");
    return r.x;
  }
  Eigen::PartialPivLU<Matrix> lu(u.matrix);
  const double rc = lu.rcond();
  if (!(rc * prm.singular_cond >= 1.0))
    throw SingularSystemError("Newton matrix is numerically singular (rcond " + std::to_string(rc) + ")");
  Vector d = lu.solve(rhs);
  if (!d.allFinite()) throw SingularSystemError("Newton solve produced non-finite values");
  return d;
}

// Matrix-free variant for large systems; stagnation of GMRES is reported as
// a singular system since no cheap condition estimate exists here.
inline Vector newton_step(const KktJacobian& u, const KktResidual& f, const SolverParams& prm) {
  if (u.dim() <= prm.dense_limit) return newton_step(DenseOperator{u.to_dense()}, f, prm);
  const Vector rhs = -f.to_vector();
  GmresOptions go;
  go.rel_tol = (!prm.exact_solve && prm.eta > 0) ? std::min(prm.eta, std::pow(rhs.norm(), prm.tau)) : 1e-13;
  const GmresResult r = gmres([&u](const Vector& v) { return u.apply(v); }, rhs, go);
  log_msg(LogLevel::debug, "gmres: " + std::to_string(r.iterations) + " iterations, residual " +
                               std::to_string(r.residual));
  if (!r.converged && r.residual > 1e-8 * rhs.norm())
    throw SingularSystemError("Krylov solve stagnated at relative residual " +
                              std::to_string(r.residual / rhs.norm()));
  return r.x;
}

namespace detail {

inline SolveResult newton_loop(const NlsdpProblem& p, const KktPoint& z0_hat, const SolverParams& prm,
                               const std::optional<KktPoint>& reference, bool with_correction) {
  validate(prm);
  check_point(p, z0_hat);
  if (reference) check_point(p, *reference);
  SolveResult res;

  KktPoint z;
  BlockSpectral spec;
  double shift = 0;
  auto advance = [&](const KktPoint& zh) {
    if (with_correction) {
      CorrectionResult c = correct_with_spectrum(p, zh, prm.delta, prm.class_tol);
      z = std::move(c.z);
      spec = std::move(c.spectral);
      shift = c.shift;
    } else {
      z = zh;
      spec = eig_blocks(cone_argument(p, z), prm.class_tol);
      shift = 0;
    }
  };
  advance(z0_hat);

  double f_init = -1;
  SigmaOptions so;
  so.dense_limit = prm.dense_limit;
  for (int k = 0;; ++k) {
    // residual from a fresh decomposition; the Jacobian uses the corrected one
    const KktResidual f = kkt_residual(p, z);
    const double fn = f.norm();
    if (!std::isfinite(fn)) {
      res.status = SolveStatus::diverged;
      res.message = "residual is not finite";
      break;
    }
    if (f_init < 0) f_init = fn;
    IterationTrace t;
    t.k = k;
    t.f_norm = fn;
    if (reference) t.dist = distance(z, *reference);
    t.correction_shift = shift;

    const KktJacobian u = make_jacobian(p, z, spec, prm.variant);
    if (prm.record_sigma_min) t.sigma_min = min_singular_value(u, so);
    log_msg(LogLevel::info, "k=" + std::to_string(k) + " |F|=" + std::to_string(fn));

    if (fn < prm.tol) {
      res.trace.push_back(t);
      res.status = SolveStatus::converged;
      break;
    }
    if (fn > prm.divergence_factor * std::max(f_init, prm.tol)) {
      res.trace.push_back(t);
      res.status = SolveStatus::diverged;
      res.message = "residual grew past " + std::to_string(prm.divergence_factor) + " times its start";
      break;
    }
    if (k >= prm.max_iter) {
      res.trace.push_back(t);
      res.status = SolveStatus::max_iter;
      break;
    }
    Vector d;
    try {
      d = newton_step(u, f, prm);
    } catch (const SingularSystemError& e) {
      res.trace.push_back(t);
      res.status = SolveStatus::singular_system;
      res.message = e.what();
      break;
    }
    t.newton_residual = (u.apply(d) + f.to_vector()).norm();
    res.trace.push_back(t);
    const Vector zn = to_vector(z) + d;
    advance(kkt_point_from_vector(p, zn));
  }
  res.z = z;
  return res;
}

}  // namespace detail

inline SolveResult ssn_solve(const NlsdpProblem& p, const KktPoint& z0_hat, const SolverParams& prm,
                             const std::optional<KktPoint>& reference = std::nullopt) {
  return detail::newton_loop(p, z0_hat, prm, reference, true);
}

inline SolveResult classical_ssn_solve(const NlsdpProblem& p, const KktPoint& z0, const SolverParams& prm,
                                       const std::optional<KktPoint>& reference = std::nullopt) {
  return detail::newton_loop(p, z0, prm, reference, false);
}

// ---------------------------------------------------------------------------
// trace diagnostics

struct OrderEstimate {
  std::optional<double> order;  // empty when no residual pair lies in the window
  int pairs = 0;
};

// Slope of log f_{k+1} against log f_k over consecutive residuals that both
// lie in (lo, hi); with a single pair it is log f_{k+1} / log f_k. Steps
// that land on the rounding floor say nothing about the rate and are left out.
inline OrderEstimate convergence_order(const std::vector<IterationTrace>& tr, double lo = 1e-12, double hi = 1e-2) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double a = tr[i].f_norm, b = tr[i + 1].f_norm;
    if (a > lo && a < hi && b > lo && b < hi) {
      xs.push_back(std::log(a));
      ys.push_back(std::log(std::max(b, 1e-300)));
    }
  }
  OrderEstimate e;
  e.pairs = static_cast<int>(xs.size());
  if (xs.empty()) return e;
  if (xs.size() == 1) {
    e.order = ys[0] / xs[0];
    return e;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(xs.size());
  my /= double(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  e.order = sxx > 0 ? sxy / sxx : ys.back() / xs.back();
  return e;
}

// max/min over k of |F(Z^k)| / |Z^k - Zbar|, skipping iterates already at
// the reference to within `floor`
inline std::optional<double> error_bound_band(const std::vector<IterationTrace>& tr, double floor = 1e-12) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& t : tr) {
    if (!t.dist || *t.dist <= floor) continue;
    const double r = t.f_norm / *t.dist;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (hi == 0 || !std::isfinite(lo)) return std::nullopt;
  return hi / lo;
}

}  // namespace ssnsdp
