#pragma once

// Block-coordinate refinement of a decomposition. Minimizes
//
//   ‖A′ − P_M A′ − P_{R1} A′‖²_F + ‖X − P_M X − P_{R2} X‖²_F
//
// over M ⟂ R1, M ⟂ R2 by alternating the closed-form block minimizers for
// (R1, R2) given M and for M given (R1, R2).

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jinet/spectral.hpp"

namespace jinet {

/// How A′ and X are normalized before the loss is formed.
enum class ScaleRule {
  /// Divide by the Frobenius norm of the best rank-r approximation,
  /// √(σ₁² + … + σ_r²). Gives both loss terms unit signal mass.
  best_rank_approximation,
  /// Divide by ‖sv(·, r)‖_F = √r, the norm of the orthonormal factor itself.
  orthonormal_factor,
};

struct RefineConfig {
  int t_max = 200;
  double epsilon = 1e-8;
  bool scale_inputs = true;
  ScaleRule scale_rule = ScaleRule::best_rank_approximation;

  void validate() const {
    detail::require(t_max >= 1, Errc::InvalidArgument, "t_max must be >= 1");
    detail::require(epsilon > 0.0, Errc::InvalidArgument, "epsilon must be positive");
  }
};

/// Loss after initialization (losses[0]) and after every update cycle.
struct RefineTrace {
  std::vector<double> losses;
  int iterations = 0;
  bool converged = false;
};

struct RefineResult {
  Decomposition components;
  RefineTrace trace;
  double network_scale = 1.0;    // A′ was divided by this
  double covariate_scale = 1.0;  // X was divided by this
};

namespace detail {

// A′ together with its singular values |λ_j|^{1/2}, which come out sorted.
inline std::pair<Matrix, Vector> sqrt_eig_with_weights(const Matrix& a) {
  const Index n = a.rows();
  detail::require(n >= 1, Errc::DimensionMismatch, "empty matrix");
  const SpectralPair sp = eig_ordered(a, n);
  const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::abs(sp.values(0));
  Vector weights(n);
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(sp.values(j));
    weights(j) = mag > cutoff ? std::sqrt(mag) : 0.0;
  }
  return {sp.basis.columns() * weights.asDiagonal(), weights};
}

}  // namespace detail

/// A′ with column j = |λ_j|^{1/2} u_j over the full eigendecomposition of A,
/// ordered by |λ|. Eigenvalues below n·ε·|λ₁| are treated as exact zeros so
/// that a numerically low-rank A gives an exactly low-rank A′.
inline Matrix build_sqrt_eig_matrix(const Matrix& a) { return detail::sqrt_eig_with_weights(a).first; }

inline Matrix build_sqrt_eig_matrix(const AdjacencyMatrix& a) { return build_sqrt_eig_matrix(a.entries()); }

/// Divides m by √(σ₁² + … + σ_r²) (or by √r under the orthonormal-factor
/// rule). Returns the scaled matrix and the divisor.
inline std::pair<Matrix, double> scale_for_loss(const Matrix& m, Index r,
                                                ScaleRule rule = ScaleRule::best_rank_approximation) {
  detail::require(r >= 1 && r <= std::min(m.rows(), m.cols()), Errc::RankOutOfBounds,
                  "scale rank " + std::to_string(r) + " out of range for " + detail::dims(m));
  double factor = 0.0;
  if (rule == ScaleRule::best_rank_approximation) {
    factor = singular_values(m).head(r).norm();
  } else {
    factor = std::sqrt(static_cast<double>(r));
  }
  detail::require(factor >= 1e-12, Errc::DegenerateInput, "scale factor " + std::to_string(factor) + " is ~0");
  return {m / factor, factor};
}

/// The refinement objective, evaluated term by term as written.
inline double loss(const Matrix& a_prime, const Matrix& x, const Decomposition& d) {
  detail::require(a_prime.rows() == d.joint.n() && x.rows() == d.joint.n(), Errc::DimensionMismatch,
                  "data rows do not match the decomposition");
  const Matrix net = a_prime - projector_apply(d.joint, a_prime) - projector_apply(d.network, a_prime);
  const Matrix cov = x - projector_apply(d.joint, x) - projector_apply(d.covariate, x);
  return net.squaredNorm() + cov.squaredNorm();
}

namespace detail {

inline std::pair<OrthonormalBasis, OrthonormalBasis> update_individual_scaled(const Matrix& a_prime,
                                                                              const Matrix& x,
                                                                              const OrthonormalBasis& m,
                                                                              Index r1, Index r2,
                                                                              double a_ref, double x_ref) {
  OrthonormalBasis net = leading_residual_directions(residual_apply(m, a_prime), r1, a_ref, "R1 update");
  OrthonormalBasis cov = leading_residual_directions(residual_apply(m, x), r2, x_ref, "R2 update");
  return {std::move(net), std::move(cov)};
}

// Y = (P_{R1⊥}A′  P_{R2⊥}X) and R = (R1 R2). Since 𝒞(Rₖ) ⊆ 𝒞(R),
// P_{R⊥} Y = P_{R⊥} (A′ X); Y's scale is bounded by √(σ₁(A′)² + σ₁(X)²).
inline OrthonormalBasis update_joint_scaled(const Matrix& a_prime, const Matrix& x, const OrthonormalBasis& r1,
                                            const OrthonormalBasis& r2, Index r_joint, double y_ref) {
  const Matrix y = hcat(residual_apply(r1, a_prime), residual_apply(r2, x));
  const OrthonormalBasis span = orthonormal_span(hcat(r1.columns(), r2.columns()));
  const Matrix z = residual_apply(span, y);
  detail::require(r_joint >= 1 && r_joint <= std::min(z.rows(), z.cols()), Errc::RankOutOfBounds,
                  "joint rank " + std::to_string(r_joint) + " out of range");
  const SpectralPair sp = sv_left(z, r_joint);
  const double floor = 1e-10 * y_ref;
  if (!(sp.values(r_joint - 1) > floor)) {
    throw Error(Errc::RankDeficient, "rank of P_{R⊥}Y is below r_M = " + std::to_string(r_joint) +
                                         " (sigma_r = " + std::to_string(sp.values(r_joint - 1)) + ")");
  }
  return sp.basis;
}

}  // namespace detail

/// Closed-form block minimizers R̂₁ = sv(P_{M⊥}A′, r₁), R̂₂ = sv(P_{M⊥}X, r₂).
inline std::pair<OrthonormalBasis, OrthonormalBasis> update_individual(const Matrix& a_prime, const Matrix& x,
                                                                       const OrthonormalBasis& m, Index r1,
                                                                       Index r2) {
  detail::require(m.orthonormality_error() <= tol::orthogonality, Errc::NotOrthonormal, "M is not orthonormal");
  return detail::update_individual_scaled(a_prime, x, m, r1, r2, top_singular_value(a_prime),
                                          top_singular_value(x));
}

/// Closed-form block minimizer M̂ = sv(P_{R⊥}Y, r_M) with
/// Y = (P_{R1⊥}A′  P_{R2⊥}X) and R = (R1 R2).
inline OrthonormalBasis update_joint(const Matrix& a_prime, const Matrix& x, const OrthonormalBasis& r1,
                                     const OrthonormalBasis& r2, Index r_joint) {
  const double a1 = top_singular_value(a_prime);
  const double x1 = top_singular_value(x);
  return detail::update_joint_scaled(a_prime, x, r1, r2, r_joint, std::hypot(a1, x1));
}

namespace detail {

inline Error at_iteration(const Error& e, int t) {
  std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  return Error(e.code(), msg + " (at iteration " + std::to_string(t) + ")");
}

}  // namespace detail

/// Runs the alternating refinement from `init` on already-prepared A′ and X
/// (no eigendecomposition or scaling is applied here). `a_prime_top` is
/// σ₁(A′) when the caller already knows it.
inline RefineResult refine_prepared(const Matrix& a_prime, const Matrix& x, const OrthonormalBasis& init_joint,
                                    const Ranks& ranks, const RefineConfig& cfg,
                                    std::optional<double> a_prime_top = std::nullopt) {
  cfg.validate();
  const double a_ref = a_prime_top ? *a_prime_top : top_singular_value(a_prime);
  const double x_ref = top_singular_value(x);
  const double y_ref = std::hypot(a_ref, x_ref);

  RefineResult out{Decomposition{init_joint, init_joint, init_joint}, {}, 1.0, 1.0};
  Decomposition& d = out.components;
  RefineTrace& trace = out.trace;

  int t = 0;
  try {
    auto [r1, r2] =
        detail::update_individual_scaled(a_prime, x, init_joint, ranks.network, ranks.covariate, a_ref, x_ref);
    d.network = std::move(r1);
    d.covariate = std::move(r2);
    trace.losses.push_back(loss(a_prime, x, d));

    // At least one full cycle runs before the stopping rule is consulted.
    for (t = 1; t <= cfg.t_max; ++t) {
      d.joint = detail::update_joint_scaled(a_prime, x, d.network, d.covariate, ranks.joint, y_ref);
      auto [n1, n2] =
          detail::update_individual_scaled(a_prime, x, d.joint, ranks.network, ranks.covariate, a_ref, x_ref);
      d.network = std::move(n1);
      d.covariate = std::move(n2);
      trace.losses.push_back(loss(a_prime, x, d));
      trace.iterations = t;
      const double change = std::abs(trace.losses[static_cast<std::size_t>(t)] -
                                     trace.losses[static_cast<std::size_t>(t - 1)]);
      if (change <= cfg.epsilon) {
        trace.converged = true;
        break;
      }
    }
  } catch (const Error& e) {
    throw detail::at_iteration(e, t);
  }
  return out;
}

/// Full refinement: builds A′ from A, scales A′ and X (ranks r_M+r₁ and
/// r_M+r₂) when cfg.scale_inputs, then alternates the block updates starting
/// from init.joint. Losses are reported on the scaled matrices.
inline RefineResult refine_decompose(const AdjacencyMatrix& a, const CovariateMatrix& x, const Decomposition& init,
                                     const Ranks& ranks, const RefineConfig& cfg = {}) {
  cfg.validate();
  detail::require(a.n() == x.n(), Errc::DimensionMismatch, "network and covariates disagree on n");
  ranks.validate(x.n(), x.p());
  const auto violations = validate_decomposition(init);
  if (!violations.empty()) {
    throw Error(Errc::InvalidArgument, "initial decomposition is invalid: " + violations.front().what);
  }
  detail::require(init.ranks() == ranks, Errc::RankOutOfBounds, "initial decomposition does not match ranks");
  detail::require(init.joint.n() == a.n(), Errc::DimensionMismatch, "initial decomposition has wrong n");

  auto [a_prime, weights] = detail::sqrt_eig_with_weights(a.entries());
  Matrix xs = x.entries();
  double a_scale = 1.0;
  double x_scale = 1.0;
  if (cfg.scale_inputs) {
    // The singular values of A′ are its column weights, so the rank-r norm
    // needs no further decomposition.
    a_scale = cfg.scale_rule == ScaleRule::best_rank_approximation
                  ? weights.head(ranks.network_total()).norm()
                  : std::sqrt(static_cast<double>(ranks.network_total()));
    detail::require(a_scale >= 1e-12, Errc::DegenerateInput, "scale factor " + std::to_string(a_scale) + " is ~0");
    a_prime /= a_scale;
    std::tie(xs, x_scale) = scale_for_loss(xs, ranks.covariate_total(), cfg.scale_rule);
  }
  RefineResult out = refine_prepared(a_prime, xs, init.joint, ranks, cfg, weights(0) / a_scale);
  out.network_scale = a_scale;
  out.covariate_scale = x_scale;
  return out;
}

}  // namespace jinet
