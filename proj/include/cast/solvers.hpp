#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cast/core.hpp"

namespace cast {

/// Outcome of an inexact-ALM run. Non-convergence is a reported state, not
/// an error; callers decide what to do with it.
struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  double objective = 0.0;
};

// ---------------------------------------------------------------------------
// Diag / diag helpers. Diag(vector) builds a diagonal matrix, Diag(matrix)
// keeps only the main diagonal of a matrix, diag(matrix) extracts the main
// diagonal as a vector.
// ---------------------------------------------------------------------------

inline Matrix diagonal_matrix(const Vector& z) {
  return Matrix(z.asDiagonal());
}

inline Matrix diagonal_part(const Matrix& M) {
  detail::require_square(M, "diagonal_part");
  return Matrix(M.diagonal().asDiagonal());
}

inline Vector main_diagonal(const Matrix& M) {
  detail::require_square(M, "main_diagonal");
  return M.diagonal();
}

// ---------------------------------------------------------------------------
// Proximal primitives
// ---------------------------------------------------------------------------

/// Shrinkage-thresholding T_eta(v) = (|v| - eta)_+ sgn(v).
inline double shrink(double v, double eta) {
  if (!(eta >= 0.0)) throw ParameterError("shrink: eta must be >= 0");
  const double mag = std::abs(v) - eta;
  if (mag <= 0.0) return 0.0;
  return v > 0.0 ? mag : -mag;
}

/// Entrywise shrinkage of a matrix.
inline Matrix shrink(const Matrix& M, double eta) {
  if (!(eta >= 0.0)) throw ParameterError("shrink: eta must be >= 0");
  return M.unaryExpr([eta](double v) {
    const double mag = std::abs(v) - eta;
    return mag <= 0.0 ? 0.0 : (v > 0.0 ? mag : -mag);
  });
}

/// Singular value thresholding: J = U (Sigma - tau)_+ V^T, the proximal map
/// of tau * nuclear norm at M.
inline Matrix svt(const Matrix& M, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("svt: tau must be >= 0");
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("svt: SVD failed");
  Vector s = svd.singularValues();
  for (Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

namespace detail {

/// SVT computed through the small-side Gram matrix. Exact for the thresholds
/// used inside the ALM loop (tau >> sqrt(machine eps) * ||M||) and much
/// cheaper than a full SVD when one side is tiny.
inline void svt_gram(const Matrix& M, double tau, Matrix& out) {
  const bool wide = M.rows() <= M.cols();
  const Matrix gram = wide ? Matrix(M * M.transpose()) : Matrix(M.transpose() * M);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericError("svt: eigendecomposition failed");
  Vector f = eig.eigenvalues();
  for (Index i = 0; i < f.size(); ++i) {
    const double sigma = std::sqrt(std::max(f(i), 0.0));
    f(i) = sigma > 1e-300 ? std::max(sigma - tau, 0.0) / sigma : 0.0;
  }
  const Matrix& u = eig.eigenvectors();
  if (wide)
    out.noalias() = u * f.asDiagonal() * (u.transpose() * M);
  else
    out.noalias() = (M * u) * f.asDiagonal() * u.transpose();
}

/// Sum of singular values.
inline double nuclear_norm(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues().sum();
}

}  // namespace detail

/// Trace Lasso of a coefficient vector z for feature matrix X:
/// Omega(z) = ||X Diag(z)||_*. Equals ||z||_1 when the columns of X are
/// orthonormal and ||z||_2 when they are all identical; in between it
/// interpolates the two norms.
inline double trace_lasso(const FeatureMatrix& X, const Vector& z) {
  if (z.size() != X.n())
    throw DimensionError("trace_lasso: z length does not match column count");
  return detail::nuclear_norm(X.values() * z.asDiagonal());
}

// ---------------------------------------------------------------------------
// ROSC closed form
// ---------------------------------------------------------------------------

/// Minimizer of ||X - XZ||_F^2 + alpha1 ||Z||_F^2 + alpha2 ||Z - W||_F^2:
/// Z* = (X^T X + (alpha1 + alpha2) I)^-1 (X^T X + alpha2 W).
inline Matrix rosc_closed_form(const FeatureMatrix& X, const ReachabilityMatrix& W,
                               double alpha1, double alpha2) {
  if (!(alpha1 > 0.0)) throw ParameterError("rosc_closed_form: alpha1 must be > 0");
  if (!(alpha2 >= 0.0)) throw ParameterError("rosc_closed_form: alpha2 must be >= 0");
  if (W.size() != X.n())
    throw DimensionError("rosc_closed_form: W size does not match object count");
  const Index n = X.n();
  const Matrix gram = X.values().transpose() * X.values();
  Matrix lhs = gram;
  lhs.diagonal().array() += alpha1 + alpha2;
  const Matrix rhs = gram + alpha2 * W.values();
  Eigen::LDLT<Matrix> ldlt(lhs);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("rosc_closed_form: factorization failed");
  Matrix z = ldlt.solve(rhs);
  if (!z.allFinite()) throw NumericError("rosc_closed_form: non-finite solution");
  return z;
}

// ---------------------------------------------------------------------------
// ROSC-S: l1-regularized coefficient matrix by inexact ALM
// ---------------------------------------------------------------------------

/// Solves min_Z 1/2 ||X - XZ||_F^2 + alpha1 ||Z||_1 + alpha2/2 ||Z - W||_F^2
/// s.t. diag(Z) = 0, via the splitting J = Z - Diag(Z). Iterates
///   J  <- (X^T X + (alpha2 + mu) I)^-1 (X^T X + alpha2 W - Y + mu (Z - Diag(Z)))
///   Z  <- A - Diag(A),  A = T_{alpha1/mu}(Y/mu + J)
///   Y  <- Y + mu (J - Z + Diag(Z)),  mu <- min(rho mu, mu_max)
/// until ||J - Z + Diag(Z)||_inf <= epsilon. The returned Z has zero
/// diagonal; the report carries the convergence state.
inline std::pair<Matrix, SolveReport> solve_sparse_alm(const FeatureMatrix& X,
                                                       const ReachabilityMatrix& W,
                                                       const SolverConfig& cfg) {
  cfg.validate();
  if (W.size() != X.n())
    throw DimensionError("solve_sparse_alm: W size does not match object count");
  const Index n = X.n();
  const Matrix gram = X.values().transpose() * X.values();

  // The J-step system matrix only changes through the scalar shift
  // alpha2 + mu, so one eigendecomposition of X^T X serves all iterations.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success)
    throw NumericError("solve_sparse_alm: eigendecomposition failed");
  const Matrix& q = eig.eigenvectors();
  const Vector& lambda = eig.eigenvalues();

  const Matrix base = gram + cfg.alpha2 * W.values();
  Matrix j = Matrix::Zero(n, n);
  Matrix z = Matrix::Zero(n, n);
  Matrix y = Matrix::Zero(n, n);
  double mu = cfg.mu0;

  SolveReport report;
  Matrix rhs(n, n), a(n, n), residual(n, n);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    rhs = base - y + mu * z;
    rhs.diagonal() -= mu * z.diagonal();
    const Vector inv_shift = (lambda.array() + (cfg.alpha2 + mu)).inverse();
    j.noalias() = q * (inv_shift.asDiagonal() * (q.transpose() * rhs));

    a = shrink(y / mu + j, cfg.alpha1 / mu);
    z = a;
    z.diagonal().setZero();

    residual = j - z;  // diag(Z) = 0, so J - Z + Diag(Z) = J - Z
    report.residual = residual.cwiseAbs().maxCoeff();
    report.iterations = iter;

    y += mu * residual;
    mu = std::min(cfg.rho * mu, cfg.mu_max);

    if (report.residual <= cfg.epsilon) {
      report.converged = true;
      break;
    }
  }

  report.objective = 0.5 * (X.values() - X.values() * z).squaredNorm() +
                     cfg.alpha1 * z.cwiseAbs().sum() +
                     0.5 * cfg.alpha2 * (z - W.values()).squaredNorm();
  if (!z.allFinite()) throw NumericError("solve_sparse_alm: non-finite iterate");
  return {std::move(z), report};
}

// ---------------------------------------------------------------------------
// CAST: trace-Lasso-regularized coefficient vector by inexact ALM
// ---------------------------------------------------------------------------

/// Solves, for one object with feature vector x, reduced feature matrix Xr
/// (the object's own column removed) and reachability vector w:
///   min_z 1/2 ||x - Xr z||_2^2 + alpha1 ||Xr Diag(z)||_* + alpha2/2 ||z - w||_2^2
/// via the splitting e = x - Xr z, J = Xr Diag(z), h = z - w. On
/// convergence all three constraint residuals are <= epsilon in max norm.
inline std::pair<Vector, SolveReport> solve_cast_column(const Vector& x,
                                                        const FeatureMatrix& Xr,
                                                        const Vector& w,
                                                        const SolverConfig& cfg) {
  cfg.validate();
  const Index p = Xr.p();
  const Index m = Xr.n();
  if (x.size() != p) throw DimensionError("solve_cast_column: x length != feature dim");
  if (w.size() != m) throw DimensionError("solve_cast_column: w length != column count");
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw ParameterError("solve_cast_column: x must have unit norm");
  for (Index i = 0; i < m; ++i)
    if (w(i) != 0.0 && w(i) != 1.0)
      throw ParameterError("solve_cast_column: w entries must be 0 or 1");

  const Matrix& xm = Xr.values();

  // The z-step solves (X^T X + I + Diag(X^T X)) z = r. The matrix is
  // iteration-independent; with T = I + Diag(X^T X) diagonal, Woodbury gives
  //   (T + X^T X)^-1 = T^-1 - T^-1 X^T (I_p + X T^-1 X^T)^-1 X T^-1
  // so each apply costs two thin mat-vecs instead of an m x m solve.
  const Vector t_inv = (1.0 + xm.colwise().squaredNorm().array()).inverse();
  const Matrix b = xm * t_inv.asDiagonal();                              // p x m
  Matrix cap = b * xm.transpose();                                       // p x p
  cap.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> cap_llt(cap);
  if (cap_llt.info() != Eigen::Success)
    throw NumericError("solve_cast_column: capacitance factorization failed");
  const auto apply_inverse = [&](const Vector& v) -> Vector {
    const Vector u = t_inv.cwiseProduct(v);
    const Vector s = cap_llt.solve(xm * u);
    return u - b.transpose() * s;
  };

  Vector z = Vector::Zero(m), h = Vector::Zero(m), e = Vector::Zero(p);
  Vector lambda1 = Vector::Zero(p), lambda2 = Vector::Zero(m);
  Matrix j = Matrix::Zero(p, m), y = Matrix::Zero(p, m);
  double mu = cfg.mu0;

  SolveReport report;
  Vector xz(p), rhs(m), r1(p), r2(m);
  Matrix a(p, m), r3(p, m);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    a = y / mu + j;
    rhs.noalias() = xm.transpose() * (x - e - lambda1 / mu);
    rhs += lambda2 / mu + h + w + (a.cwiseProduct(xm)).colwise().sum().transpose();
    z = apply_inverse(rhs);

    xz.noalias() = xm * z;
    e = (mu / (mu + 1.0)) * (x - xz - lambda1 / mu);
    h = (mu / (cfg.alpha2 + mu)) * (z - w - lambda2 / mu);

    a.noalias() = xm * z.asDiagonal();
    a -= y / mu;
    detail::svt_gram(a, cfg.alpha1 / mu, j);

    r1 = e - x + xz;
    r2 = h - z + w;
    r3 = j - xm * z.asDiagonal();
    report.residual = std::max({r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff(),
                                r3.cwiseAbs().maxCoeff()});
    report.iterations = iter;

    lambda1 += mu * r1;
    lambda2 += mu * r2;
    y += mu * r3;
    mu = std::min(cfg.rho * mu, cfg.mu_max);

    if (report.residual <= cfg.epsilon) {
      report.converged = true;
      break;
    }
  }

  if (!z.allFinite()) throw NumericError("solve_cast_column: non-finite iterate");
  report.objective = 0.5 * (x - xm * z).squaredNorm() +
                     cfg.alpha1 * detail::nuclear_norm(xm * z.asDiagonal()) +
                     0.5 * cfg.alpha2 * (z - w).squaredNorm();
  return {std::move(z), report};
}

/// Full CAST coefficient matrix: one trace-Lasso column solve per object,
/// with the object's own column removed from X (so the diagonal of the
/// result is identically zero). Column solves are independent and run in
/// parallel; assembly is by index, identical to sequential execution.
inline Matrix build_cast_matrix(const FeatureMatrix& X, const ReachabilityMatrix& W,
                                const SolverConfig& cfg,
                                std::vector<SolveReport>* reports = nullptr) {
  cfg.validate();
  if (W.size() != X.n())
    throw DimensionError("build_cast_matrix: W size does not match object count");
  const Index n = X.n();
  const Index p = X.p();
  Matrix z = Matrix::Zero(n, n);
  std::vector<SolveReport> local(static_cast<std::size_t>(n));

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
    const Index i = static_cast<Index>(idx);
    Matrix xr(p, n - 1);
    xr.leftCols(i) = X.values().leftCols(i);
    xr.rightCols(n - 1 - i) = X.values().rightCols(n - 1 - i);
    Vector w(n - 1);
    w.head(i) = W.values().col(i).head(i);
    w.tail(n - 1 - i) = W.values().col(i).tail(n - 1 - i);
    try {
      auto [zi, rep] = solve_cast_column(X.values().col(i), FeatureMatrix(std::move(xr)), w, cfg);
      z.col(i).head(i) = zi.head(i);
      z.col(i).tail(n - 1 - i) = zi.tail(n - 1 - i);
      local[idx] = rep;
    } catch (const NumericError& err) {
      throw NumericError("object " + std::to_string(i) + ": " + err.what());
    } catch (const ParameterError& err) {
      throw ParameterError("object " + std::to_string(i) + ": " + err.what());
    }
  });

  if (reports) *reports = std::move(local);
  return z;
}

}  // namespace cast
