#pragma once

// Spectral estimator of the joint and individual components, the adjacency
// spectral embedding, and the single-view baselines.

#include "jinet/model.hpp"

namespace jinet {

namespace detail {

// Leading r left singular vectors of `residual`, refusing when the r-th
// singular value is below 1e-10 of the reference scale.
inline OrthonormalBasis leading_residual_directions(const Matrix& residual, Index r, double reference,
                                                    const char* what) {
  const SpectralPair sp = sv_left(residual, r);
  const double floor = 1e-10 * reference;
  if (!(sp.values(r - 1) > floor)) {
    throw Error(Errc::DegenerateInput, std::string(what) + ": singular value " + std::to_string(r) + " is " +
                                           std::to_string(sp.values(r - 1)) + ", below " + std::to_string(floor));
  }
  return sp.basis;
}

}  // namespace detail

/// Spectral estimate together with the singular values of the stacked basis
/// (V̂₁ V̂₂), whose gap after index r_M indicates how well the joint rank is
/// supported.
struct SpectralResult {
  Decomposition components;
  Vector stacked_singular_values;
};

/// Spectral estimator:
///   V̂₁ = eig(A, r_M+r₁), V̂₂ = sv(X, r_M+r₂), M̂ = sv((V̂₁ V̂₂), r_M),
///   R̂ₖ = sv(P_{M̂⊥} V̂ₖ, r_k).
inline SpectralResult spectral_decompose_with_diagnostics(const AdjacencyMatrix& a, const CovariateMatrix& x,
                                                          const Ranks& ranks) {
  detail::require(a.n() == x.n(), Errc::DimensionMismatch,
                  "network has " + std::to_string(a.n()) + " nodes, covariates have " + std::to_string(x.n()) +
                      " rows");
  ranks.validate(x.n(), x.p());

  const Matrix v1 = eig_ordered(a.entries(), ranks.network_total()).basis.columns();
  const Matrix v2 = sv_left(x.entries(), ranks.covariate_total()).basis.columns();
  const Matrix stacked = hcat(v1, v2);

  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  Matrix m = svd.matrixU().leftCols(ranks.joint);
  detail::fix_signs(m);
  OrthonormalBasis joint = OrthonormalBasis::unchecked(std::move(m));

  // V̂ₖ has orthonormal columns, so σ₁(V̂ₖ) = 1 is the reference scale.
  OrthonormalBasis net =
      detail::leading_residual_directions(residual_apply(joint, v1), ranks.network, 1.0, "network residual");
  OrthonormalBasis cov =
      detail::leading_residual_directions(residual_apply(joint, v2), ranks.covariate, 1.0, "covariate residual");

  return {Decomposition{std::move(joint), std::move(net), std::move(cov)}, svd.singularValues()};
}

inline Decomposition spectral_decompose(const AdjacencyMatrix& a, const CovariateMatrix& x, const Ranks& ranks) {
  return spectral_decompose_with_diagnostics(a, x, ranks).components;
}

/// Adjacency spectral embedding V̂|Λ̂|^{1/2} into d dimensions.
inline Matrix ase(const Matrix& a, Index d) {
  const SpectralPair sp = eig_ordered(a, d);
  return sp.basis.columns() * sp.values.cwiseAbs().cwiseSqrt().asDiagonal();
}

inline Matrix ase(const AdjacencyMatrix& a, Index d) { return ase(a.entries(), d); }

/// Top r eigenvectors of A by |λ| (Top_SV_Net baseline).
inline OrthonormalBasis baseline_top_net(const AdjacencyMatrix& a, Index r) {
  return eig_ordered(a.entries(), r).basis;
}

/// Top r left singular vectors of X (Top_SV_Cov baseline).
inline OrthonormalBasis baseline_top_cov(const CovariateMatrix& x, Index r) { return sv_left(x.entries(), r).basis; }

}  // namespace jinet
