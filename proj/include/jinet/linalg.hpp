#pragma once

// Dense linear-algebra primitives shared by the estimators: ordered
// eigen/singular decompositions with a deterministic sign convention,
// projections onto (and away from) column spaces, and subspace distances.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "jinet/error.hpp"

namespace jinet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double residual = 1e-8;       // decomposition residuals
inline constexpr double orthogonality = 1e-10; // ‖BᵀB − I‖_F
inline constexpr double symmetry = 1e-8;       // max |S − Sᵀ|
}  // namespace tol

/// n×r matrix with orthonormal columns.
///
/// The checked constructor enforces ‖BᵀB − I‖_F ≤ 1e-10 and 1 ≤ r ≤ n.
/// `unchecked` exists for validators and readers that must be able to hold
/// (and then report on) a matrix that violates the invariant.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(Matrix columns) : cols_(std::move(columns)) {
    if (r() < 1 || r() > n()) {
      throw Error(Errc::RankOutOfBounds, "basis needs 1 <= r <= n, got r=" + std::to_string(r()) +
                                             " n=" + std::to_string(n()));
    }
    const double err = orthonormality_error();
    if (!(err <= tol::orthogonality)) {
      throw Error(Errc::NotOrthonormal, "columns not orthonormal, ‖BᵀB − I‖_F = " + std::to_string(err));
    }
  }

  static OrthonormalBasis unchecked(Matrix columns) {
    OrthonormalBasis b;
    b.cols_ = std::move(columns);
    return b;
  }

  const Matrix& columns() const noexcept { return cols_; }
  Index n() const noexcept { return cols_.rows(); }
  Index r() const noexcept { return cols_.cols(); }

  double orthonormality_error() const {
    return (cols_.transpose() * cols_ - Matrix::Identity(r(), r())).norm();
  }

 private:
  OrthonormalBasis() = default;
  Matrix cols_;
};

/// Leading vectors with their eigen- or singular values, in decreasing
/// magnitude.
struct SpectralPair {
  OrthonormalBasis basis;
  Vector values;
};

namespace detail {

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

inline std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Flip each column so its largest-magnitude entry is positive. Entries
// within a relative 1e-10 of the maximum count as tied; the lowest index wins.
inline void fix_signs(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    const double peak = v.col(j).cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    for (Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) >= peak * (1.0 - 1e-10)) {
        if (v(i, j) < 0.0) v.col(j) = -v.col(j);
        break;
      }
    }
  }
}

inline double max_asymmetry(const Matrix& s) { return (s - s.transpose()).cwiseAbs().maxCoeff(); }

inline void require_symmetric(const Matrix& s) {
  require(s.rows() == s.cols(), Errc::DimensionMismatch, "expected a square matrix, got " + dims(s));
  if (s.size() == 0) return;
  const double asym = max_asymmetry(s);
  require(asym <= tol::symmetry, Errc::NotSymmetric, "max |S - S^T| = " + std::to_string(asym));
}

}  // namespace detail

/// k leading eigenpairs of a symmetric matrix, ordered by |λ| descending.
/// Eigenvalues keep their sign. Input is symmetrized as (S+Sᵀ)/2 after the
/// symmetry check.
inline SpectralPair eig_ordered(const Matrix& s, Index k) {
  detail::require_symmetric(s);
  const Index n = s.rows();
  detail::require(k >= 1 && k <= n, Errc::RankOutOfBounds,
                  "eig_ordered needs 1 <= k <= n, got k=" + std::to_string(k) + " n=" + std::to_string(n));

  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  detail::require(solver.info() == Eigen::Success, Errc::DegenerateInput, "eigensolver did not converge");

  const Vector& lambda = solver.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(lambda(a)) > std::abs(lambda(b)); });

  Matrix vectors(n, k);
  Vector values(k);
  for (Index j = 0; j < k; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    vectors.col(j) = solver.eigenvectors().col(src);
    values(j) = lambda(src);
  }
  detail::fix_signs(vectors);
  return {OrthonormalBasis::unchecked(std::move(vectors)), std::move(values)};
}

/// All singular values of X, descending.
inline Vector singular_values(const Matrix& x) {
  if (x.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues();
}

/// k leading left singular vectors of X with σ₁ ≥ … ≥ σ_k ≥ 0.
inline SpectralPair sv_left(const Matrix& x, Index k) {
  const Index cap = std::min(x.rows(), x.cols());
  detail::require(k >= 1 && k <= cap, Errc::RankOutOfBounds,
                  "sv_left needs 1 <= k <= min(n,p), got k=" + std::to_string(k) + " for " + detail::dims(x));
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU);
  Matrix vectors = svd.matrixU().leftCols(k);
  Vector values = svd.singularValues().head(k);
  detail::fix_signs(vectors);
  return {OrthonormalBasis::unchecked(std::move(vectors)), std::move(values)};
}

/// Largest singular value, via the eigenvalues of the smaller Gram matrix.
inline double top_singular_value(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  const Matrix gram = x.rows() <= x.cols() ? Matrix(x * x.transpose()) : Matrix(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

/// B(BᵀY): projection of the columns of Y onto 𝒞(B).
inline Matrix projector_apply(const OrthonormalBasis& b, const Matrix& y) {
  detail::require(b.n() == y.rows(), Errc::DimensionMismatch,
                  "basis has " + std::to_string(b.n()) + " rows, data is " + detail::dims(y));
  return b.columns() * (b.columns().transpose() * y);
}

/// Y − B(BᵀY): projection onto 𝒞(B)⊥.
inline Matrix residual_apply(const OrthonormalBasis& b, const Matrix& y) {
  return y - projector_apply(b, y);
}

/// Orthonormal basis of the numerical column space of X (singular values
/// above rel_tol·σ₁). Throws RankDeficient when X is numerically zero.
inline OrthonormalBasis orthonormal_span(const Matrix& x, double rel_tol = 1e-10) {
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
  }
  detail::require(rank >= 1, Errc::RankDeficient, "matrix has empty numerical column space");
  Matrix u = svd.matrixU().leftCols(rank);
  detail::fix_signs(u);
  return OrthonormalBasis::unchecked(std::move(u));
}

/// Horizontal concatenation (A B).
inline Matrix hcat(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == b.rows(), Errc::DimensionMismatch,
                  "cannot concatenate " + detail::dims(a) + " and " + detail::dims(b));
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

/// inf over orthogonal Q of ‖U − VQ‖_F, i.e. √(2r − 2Σσᵢ(VᵀU)).
///
/// Evaluated by plugging in the optimal rotation Q = WZᵀ (from VᵀU = WΣZᵀ)
/// rather than through the closed form, which loses half the digits to
/// cancellation when U and V nearly coincide.
inline double procrustes_distance(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  detail::require(u.n() == v.n() && u.r() == v.r(), Errc::DimensionMismatch,
                  "procrustes_distance needs equal shapes, got " + detail::dims(u.columns()) + " and " +
                      detail::dims(v.columns()));
  const Matrix cross = v.columns().transpose() * u.columns();
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix q = svd.matrixU() * svd.matrixV().transpose();
  return (u.columns() - v.columns() * q).norm();
}

/// 1 − cos θ₁, θ₁ the first principal angle between 𝒞(R1) and 𝒞(R2).
inline double delta_separation(const OrthonormalBasis& r1, const OrthonormalBasis& r2) {
  detail::require(r1.n() == r2.n(), Errc::DimensionMismatch,
                  "delta_separation needs equal n, got " + std::to_string(r1.n()) + " and " +
                      std::to_string(r2.n()));
  Eigen::JacobiSVD<Matrix> svd(r1.columns().transpose() * r2.columns());
  const double cos_first = svd.singularValues()(0);
  return std::clamp(1.0 - cos_first, 0.0, 1.0);
}

}  // namespace jinet
