#pragma once

// Domain types for the network-plus-covariates signal model and the
// joint / individual decomposition of its column spaces.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jinet/linalg.hpp"

namespace jinet {

/// Symmetric n×n network matrix (weighted or binary).
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(Matrix entries) : entries_(std::move(entries)) {
    detail::require_symmetric(entries_);
  }

  const Matrix& entries() const noexcept { return entries_; }
  Index n() const noexcept { return entries_.rows(); }

  bool is_binary() const {
    return entries_.unaryExpr([](double v) { return (v == 0.0 || v == 1.0) ? 0.0 : 1.0; }).sum() == 0.0;
  }
  bool has_self_loops() const { return entries_.diagonal().cwiseAbs().maxCoeff() != 0.0; }

 private:
  Matrix entries_;
};

/// n×p node-covariate matrix with column labels.
class CovariateMatrix {
 public:
  explicit CovariateMatrix(Matrix entries, std::vector<std::string> column_names = {})
      : entries_(std::move(entries)), names_(std::move(column_names)) {
    detail::require(entries_.cols() >= 1, Errc::DimensionMismatch, "covariate matrix needs p >= 1");
    detail::require(entries_.allFinite(), Errc::InvalidArgument, "covariate matrix has non-finite entries");
    if (names_.empty()) {
      for (Index j = 0; j < entries_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
    }
    detail::require(static_cast<Index>(names_.size()) == entries_.cols(), Errc::LengthMismatch,
                    "got " + std::to_string(names_.size()) + " column names for " +
                        std::to_string(entries_.cols()) + " columns");
  }

  const Matrix& entries() const noexcept { return entries_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }
  Index n() const noexcept { return entries_.rows(); }
  Index p() const noexcept { return entries_.cols(); }

 private:
  Matrix entries_;
  std::vector<std::string> names_;
};

/// Joint / network-individual / covariate-individual dimensions.
struct Ranks {
  Index joint = 1;
  Index network = 1;
  Index covariate = 1;

  Index network_total() const noexcept { return joint + network; }
  Index covariate_total() const noexcept { return joint + covariate; }

  /// Throws RankOutOfBounds unless all ranks are ≥ 1, r_M + r₁ ≤ n and
  /// r_M + r₂ ≤ min(n, p).
  void validate(Index n, Index p) const {
    detail::require(joint >= 1 && network >= 1 && covariate >= 1, Errc::RankOutOfBounds,
                    "all ranks must be >= 1");
    detail::require(network_total() <= n, Errc::RankOutOfBounds,
                    "r_M + r_1 = " + std::to_string(network_total()) + " exceeds n = " + std::to_string(n));
    detail::require(covariate_total() <= std::min(n, p), Errc::RankOutOfBounds,
                    "r_M + r_2 = " + std::to_string(covariate_total()) +
                        " exceeds min(n,p) = " + std::to_string(std::min(n, p)));
  }

  friend bool operator==(const Ranks&, const Ranks&) = default;
};

/// Joint components M and individual components R1 (network), R2
/// (covariates). Only the column spaces are identified.
struct Decomposition {
  OrthonormalBasis joint;
  OrthonormalBasis network;
  OrthonormalBasis covariate;

  Ranks ranks() const { return {joint.r(), network.r(), covariate.r()}; }
};

struct Violation {
  std::string what;
  double magnitude;
};

/// Every broken Decomposition invariant with its measured size. Never throws.
inline std::vector<Violation> validate_decomposition(const Decomposition& d) {
  std::vector<Violation> out;
  const std::pair<const char*, const OrthonormalBasis*> blocks[] = {
      {"M", &d.joint}, {"R1", &d.network}, {"R2", &d.covariate}};
  for (const auto& [name, b] : blocks) {
    if (b->r() < 1 || b->r() > b->n()) {
      out.push_back({std::string(name) + " has invalid shape " + detail::dims(b->columns()),
                     static_cast<double>(b->r())});
      continue;
    }
    const double err = b->orthonormality_error();
    if (!(err <= tol::orthogonality)) out.push_back({std::string(name) + " columns are not orthonormal", err});
  }
  if (d.joint.n() != d.network.n() || d.joint.n() != d.covariate.n()) {
    out.push_back({"blocks have different row counts", 0.0});
    return out;
  }
  const double cross1 = (d.joint.columns().transpose() * d.network.columns()).norm();
  if (!(cross1 <= tol::residual)) out.push_back({"M^T R1 != 0", cross1});
  const double cross2 = (d.joint.columns().transpose() * d.covariate.columns()).norm();
  if (!(cross2 <= tol::residual)) out.push_back({"M^T R2 != 0", cross2});
  return out;
}

/// Numerical rank: singular values above rel_tol·σ₁.
inline Index numerical_rank(const Matrix& x, double rel_tol = 1e-8) {
  const Vector s = singular_values(x);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return r;
}

/// Signals, true components and (optional) group labels of a synthetic
/// instance. gamma1 / gamma2 are the coordinates with P = (M R1)·gamma1 and
/// W = (M R2)·gamma2.
struct GroundTruth {
  Matrix P;
  Matrix W;
  Decomposition components;
  std::optional<std::vector<int>> network_labels;
  std::optional<std::vector<int>> covariate_labels;
  Matrix gamma1;
  Matrix gamma2;
};

/// Exact joint / individual components of noiseless signals.
///
/// The joint subspace 𝒞(P) ∩ 𝒞(W) is taken as the span of principal
/// vectors whose cosine is at least 1 − tol. Individual components are the
/// leading left singular vectors of the signals after projecting out the
/// joint subspace.
inline std::pair<Decomposition, Ranks> true_components_from_signals(const Matrix& P, const Matrix& W,
                                                                    double tol = 1e-8) {
  detail::require_symmetric(P);
  detail::require(P.rows() == W.rows(), Errc::DimensionMismatch,
                  "P is " + detail::dims(P) + " but W is " + detail::dims(W));
  detail::require(tol > 0.0, Errc::InvalidArgument, "tol must be positive");

  const Index rank_p = numerical_rank(P);
  const Index rank_w = numerical_rank(W);
  detail::require(rank_p >= 1 && rank_w >= 1, Errc::DegenerateModel, "a signal matrix is zero");

  const Matrix v1 = sv_left(P, rank_p).basis.columns();
  const Matrix v2 = sv_left(W, rank_w).basis.columns();

  Eigen::JacobiSVD<Matrix> angles(v1.transpose() * v2, Eigen::ComputeFullU);
  Index r_joint = 0;
  while (r_joint < angles.singularValues().size() && angles.singularValues()(r_joint) >= 1.0 - tol) ++r_joint;

  const Index r1 = rank_p - r_joint;
  const Index r2 = rank_w - r_joint;
  if (r_joint == 0 || r1 == 0 || r2 == 0) {
    throw Error(Errc::DegenerateModel, "joint/individual dimensions (" + std::to_string(r_joint) + "," +
                                           std::to_string(r1) + "," + std::to_string(r2) +
                                           ") include an empty subspace");
  }

  Matrix m = v1 * angles.matrixU().leftCols(r_joint);
  // Re-orthonormalize: the product is orthonormal only up to rounding.
  OrthonormalBasis joint = orthonormal_span(m);
  OrthonormalBasis net = sv_left(residual_apply(joint, P), r1).basis;
  OrthonormalBasis cov = sv_left(residual_apply(joint, W), r2).basis;
  return {Decomposition{std::move(joint), std::move(net), std::move(cov)}, Ranks{r_joint, r1, r2}};
}

}  // namespace jinet
