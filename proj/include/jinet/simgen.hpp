#pragma once

// Seeded generators for the synthetic designs: the four-group SBM with
// clustered covariates, the rank-(1,1,1) RDPG designs with controlled
// individual-subspace overlap, and the generic Bernoulli / Gaussian samplers.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jinet/model.hpp"

namespace jinet {

enum class Setting { strong_joint, weak_joint };

inline std::string to_string(Setting s) { return s == Setting::strong_joint ? "strong_joint" : "weak_joint"; }

inline Setting parse_setting(const std::string& text) {
  if (text == "strong_joint") return Setting::strong_joint;
  if (text == "weak_joint") return Setting::weak_joint;
  throw Error(Errc::ParseError, "unknown setting '" + text + "' (expected strong_joint or weak_joint)");
}

/// Parameters of the RDPG-with-covariates design.
///
/// `delta` is the coefficient in R2 = δ·R1 + √(1−δ²)·T, i.e. the inner
/// product ⟨R1, R2⟩. The separation 1 − σ₁(R1ᵀR2) equals 1 − δ.
struct SimConfig {
  Index n = 200;
  Index p = 10;
  Setting setting = Setting::strong_joint;
  double delta = 0.0;
  double q1 = 0.5;
  double q2 = 0.3;
  double s1 = 0.6;
  double s2 = 0.2;
  double tau = 0.1;
  double target_degree = 20.0;
  std::uint64_t seed = 0;

  /// Signal strengths used for the δ-sweep of each setting.
  static SimConfig defaults(Setting setting) {
    SimConfig c;
    c.setting = setting;
    if (setting == Setting::weak_joint) {
      c.q1 = 0.2;
      c.q2 = 0.6;
      c.s1 = 0.2;
      c.s2 = 0.7;
    }
    return c;
  }

  void validate() const {
    detail::require(n >= 4 && n % 4 == 0, Errc::NotDivisibleBy4, "n must be a positive multiple of 4, got " +
                                                                     std::to_string(n));
    detail::require(p >= 2, Errc::InvalidDesign, "p must be >= 2");
    detail::require(tau >= 0.0, Errc::InvalidDesign, "tau must be >= 0");
    detail::require(delta >= 0.0 && delta <= 1.0, Errc::InvalidDesign, "delta must lie in [0,1]");
    detail::require(q1 >= 0 && q2 >= 0 && s1 >= 0 && s2 >= 0, Errc::InvalidDesign,
                    "signal strengths must be nonnegative");
    detail::require(target_degree > 0.0, Errc::InvalidDesign, "target_degree must be positive");
  }
};

struct SimMetadata {
  double inner_product_coefficient = 0.0;  // ⟨R1, R2⟩ as constructed
  double separation = 0.0;                 // 1 − σ₁(R1ᵀR2)
  double alpha = 1.0;                      // density multiplier on YYᵀ
  double clipped_fraction = 0.0;           // share of P entries clipped into [0,1]
  bool degenerate = false;                 // R2 coincides with R1 (δ = 1)
};

struct SimInstance {
  AdjacencyMatrix A;
  CovariateMatrix X;
  GroundTruth truth;
  std::optional<SimConfig> config;
  SimMetadata metadata;
  std::vector<int> group_labels;  // planted groups, when the design has them
};

namespace detail {

// Independent sub-stream seeds derived from one user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x6a696e65u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline Matrix standard_gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

}  // namespace detail

/// P_ij = B[z_i, z_j] with 1-based labels z.
inline Matrix sbm_probability_matrix(const Matrix& b, const std::vector<int>& z) {
  detail::require_symmetric(b);
  detail::require(b.size() > 0 && b.minCoeff() >= 0.0 && b.maxCoeff() <= 1.0, Errc::ProbabilityOutOfRange,
                  "block matrix entries must lie in [0,1]");
  const Index k = b.rows();
  for (std::size_t i = 0; i < z.size(); ++i) {
    detail::require(z[i] >= 1 && z[i] <= k, Errc::LabelOutOfRange,
                    "label " + std::to_string(z[i]) + " at node " + std::to_string(i + 1) + " outside 1.." +
                        std::to_string(k));
  }
  const Index n = static_cast<Index>(z.size());
  Matrix p(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) p(i, j) = b(z[static_cast<std::size_t>(i)] - 1, z[static_cast<std::size_t>(j)] - 1);
  return p;
}

/// Symmetric binary A with independent upper-triangle entries A_ij ~ Ber(P_ij).
inline AdjacencyMatrix sample_bernoulli_graph(const Matrix& p, bool zero_diagonal, std::uint64_t seed) {
  detail::require(p.rows() == p.cols(), Errc::DimensionMismatch, "P must be square");
  detail::require(p.size() == 0 || (p.minCoeff() >= 0.0 && p.maxCoeff() <= 1.0), Errc::ProbabilityOutOfRange,
                  "edge probabilities must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index n = p.rows();
  Matrix a = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double u = unif(rng);
      if (i == j && zero_diagonal) continue;
      if (u < p(i, j)) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return AdjacencyMatrix(std::move(a));
}

/// X_ij ~ N(W_ij, τ²) independently; τ = 0 returns W.
inline CovariateMatrix gaussian_covariates(const Matrix& w, double tau, std::uint64_t seed) {
  detail::require(tau >= 0.0, Errc::InvalidArgument, "tau must be >= 0");
  if (tau == 0.0) return CovariateMatrix(w);
  return CovariateMatrix(w + tau * detail::standard_gaussian(w.rows(), w.cols(), seed));
}

/// Four groups of ten nodes. The network (3-block SBM) merges groups 3 and 4;
/// the covariates (3-cluster Gaussian mixture in ℝ³, identity covariance)
/// merge groups 1 and 2. Truth has ranks (2, 1, 1).
inline SimInstance group_structure_example(std::uint64_t seed) {
  constexpr Index n = 40;
  Matrix b(3, 3);
  b << 0.6, 0.05, 0.05,  //
      0.05, 0.6, 0.05,   //
      0.05, 0.05, 0.6;
  std::vector<int> groups(n), z_net(n), z_cov(n);
  for (Index i = 0; i < n; ++i) {
    const int g = static_cast<int>(i / 10) + 1;
    groups[static_cast<std::size_t>(i)] = g;
    z_net[static_cast<std::size_t>(i)] = g <= 2 ? g : 3;
    z_cov[static_cast<std::size_t>(i)] = g <= 2 ? 1 : g - 1;
  }
  Matrix means(3, 3);  // row l = cluster mean μ_l
  means << -30, -60, 30,  //
      16, 8, 16,          //
      -20, 40, 20;

  Matrix p = sbm_probability_matrix(b, z_net);
  Matrix w(n, 3);
  for (Index i = 0; i < n; ++i) w.row(i) = means.row(z_cov[static_cast<std::size_t>(i)] - 1);

  auto [components, ranks] = true_components_from_signals(p, w, 1e-8);
  const Matrix v1 = hcat(components.joint.columns(), components.network.columns());
  const Matrix v2 = hcat(components.joint.columns(), components.covariate.columns());

  GroundTruth truth{p, w, components, z_net, z_cov, v1.transpose() * p, v2.transpose() * w};
  AdjacencyMatrix a = sample_bernoulli_graph(p, true, detail::derive_seed(seed, 1));
  CovariateMatrix x = gaussian_covariates(w, 1.0, detail::derive_seed(seed, 2));
  SimMetadata meta;
  meta.separation = delta_separation(components.network, components.covariate);
  meta.inner_product_coefficient = 1.0 - meta.separation;
  return SimInstance{std::move(a), std::move(x), std::move(truth), std::nullopt, meta, std::move(groups)};
}

/// The orthonormal vectors T⁰ = 1/√n, T¹ = (+,−,+,−,…)/√n and
/// T² = (+,+,−,−,…)/√n.
struct DesignVectors {
  Vector t0, t1, t2;
};

inline DesignVectors orthonormal_design_vectors(Index n) {
  detail::require(n >= 4 && n % 4 == 0, Errc::NotDivisibleBy4,
                  "n must be a positive multiple of 4, got " + std::to_string(n));
  const double h = 1.0 / std::sqrt(static_cast<double>(n));
  DesignVectors t{Vector::Constant(n, h), Vector(n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    t.t1(i) = (i % 2 == 0) ? h : -h;
    t.t2(i) = (i % 4 < 2) ? h : -h;
  }
  return t;
}

/// Rank-(1,1,1) RDPG network with Gaussian covariates.
///
/// strong: M = T⁰, R1 = T¹, R2 = δT¹ + √(1−δ²)T²;
/// weak:   M = T¹, R1 = T⁰, R2 = δT⁰ + √(1−δ²)T².
/// Y = (M R1)·diag(√(n q₁), √(n q₂)), P = α·YYᵀ with α set so the average
/// expected degree is target_degree (then clipped into [0,1]),
/// W = (M R2)·diag(√(n s₁), √(n s₂))·Qᵀ with Q the top-2 right singular
/// vectors of a seeded p×p Gaussian matrix.
inline SimInstance simulation_design(const SimConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n;
  const DesignVectors t = orthonormal_design_vectors(n);
  const Vector& m = cfg.setting == Setting::strong_joint ? t.t0 : t.t1;
  const Vector& r1 = cfg.setting == Setting::strong_joint ? t.t1 : t.t0;
  const Vector r2 = cfg.delta * r1 + std::sqrt(std::max(0.0, 1.0 - cfg.delta * cfg.delta)) * t.t2;

  const double nd = static_cast<double>(n);
  Matrix v1 = hcat(m, r1);
  Matrix v2 = hcat(m, r2);
  const Matrix y = v1 * Eigen::Vector2d(std::sqrt(nd * cfg.q1), std::sqrt(nd * cfg.q2)).asDiagonal();
  const Matrix yyt = y * y.transpose();
  const double mass = yyt.sum();
  detail::require(mass > 0.0, Errc::InvalidDesign, "latent positions give zero expected degree");
  const double alpha = cfg.target_degree * nd / mass;

  Matrix p = alpha * yyt;
  const Index clipped = (p.array() < 0.0 || p.array() > 1.0).count();
  p = p.cwiseMax(0.0).cwiseMin(1.0);

  Eigen::JacobiSVD<Matrix> qsvd(detail::standard_gaussian(cfg.p, cfg.p, detail::derive_seed(cfg.seed, 0)),
                                Eigen::ComputeFullV);
  const Matrix q = qsvd.matrixV().leftCols(2);
  const Matrix gamma2 = Eigen::Vector2d(std::sqrt(nd * cfg.s1), std::sqrt(nd * cfg.s2)).asDiagonal() * q.transpose();
  const Matrix w = v2 * gamma2;

  SimMetadata meta;
  meta.inner_product_coefficient = cfg.delta;
  meta.alpha = alpha;
  meta.clipped_fraction = static_cast<double>(clipped) / static_cast<double>(p.size());
  meta.degenerate = cfg.delta >= 1.0;

  Decomposition components{OrthonormalBasis::unchecked(m), OrthonormalBasis::unchecked(r1),
                           OrthonormalBasis::unchecked(r2)};
  meta.separation = delta_separation(components.network, components.covariate);
  GroundTruth truth{p, w, std::move(components), std::nullopt, std::nullopt, v1.transpose() * p, gamma2};

  AdjacencyMatrix a = sample_bernoulli_graph(p, true, detail::derive_seed(cfg.seed, 1));
  CovariateMatrix x = gaussian_covariates(w, cfg.tau, detail::derive_seed(cfg.seed, 2));
  return SimInstance{std::move(a), std::move(x), std::move(truth), cfg, meta, {}};
}

/// Random noiseless signals with prescribed ranks and individual-subspace
/// overlap: R2 = (c·R1[:, :k]  +  √(1−c²)·T[:, :k] | T[:, k:]) with
/// k = min(r₁, r₂) and T orthogonal to M and R1, so the separation is 1 − c.
/// P = (M R1)·Λ·(M R1)ᵀ with random signed eigenvalues of magnitude in
/// [1, 5]; W = (M R2)·Σ·Gᵀ with Σ in [1, 5] and G a random orthonormal p×·.
inline GroundTruth random_ground_truth(Index n, Index p, const Ranks& ranks, double coefficient,
                                       std::uint64_t seed) {
  ranks.validate(n, p);
  detail::require(ranks.joint + ranks.network + ranks.covariate <= n, Errc::RankOutOfBounds,
                  "r_M + r_1 + r_2 must not exceed n");
  detail::require(coefficient >= 0.0 && coefficient < 1.0, Errc::InvalidDesign, "coefficient must lie in [0,1)");

  const Index total = ranks.joint + ranks.network + ranks.covariate;
  Eigen::HouseholderQR<Matrix> qr(detail::standard_gaussian(n, total, detail::derive_seed(seed, 10)));
  const Matrix basis = qr.householderQ() * Matrix::Identity(n, total);
  const Matrix m = basis.leftCols(ranks.joint);
  const Matrix r1 = basis.middleCols(ranks.joint, ranks.network);
  const Matrix t = basis.rightCols(ranks.covariate);

  const Index k = std::min(ranks.network, ranks.covariate);
  Matrix r2 = t;
  r2.leftCols(k) = coefficient * r1.leftCols(k) + std::sqrt(1.0 - coefficient * coefficient) * t.leftCols(k);

  std::mt19937_64 rng(detail::derive_seed(seed, 11));
  std::uniform_real_distribution<double> magnitude(1.0, 5.0);
  std::bernoulli_distribution negative(0.3);

  const Matrix v1 = hcat(m, r1);
  const Matrix v2 = hcat(m, r2);
  Vector lambda(v1.cols());
  for (Index i = 0; i < lambda.size(); ++i) lambda(i) = (negative(rng) ? -1.0 : 1.0) * magnitude(rng);
  Vector sigma(v2.cols());
  for (Index i = 0; i < sigma.size(); ++i) sigma(i) = magnitude(rng);

  Eigen::HouseholderQR<Matrix> gqr(detail::standard_gaussian(p, v2.cols(), detail::derive_seed(seed, 12)));
  const Matrix g = gqr.householderQ() * Matrix::Identity(p, v2.cols());

  Matrix P = v1 * lambda.asDiagonal() * v1.transpose();
  P = 0.5 * (P + P.transpose()).eval();
  const Matrix W = v2 * sigma.asDiagonal() * g.transpose();
  Decomposition components{OrthonormalBasis::unchecked(m), OrthonormalBasis::unchecked(r1),
                           OrthonormalBasis::unchecked(r2)};
  return GroundTruth{P, W, std::move(components), std::nullopt, std::nullopt, v1.transpose() * P,
                     v2.transpose() * W};
}

}  // namespace jinet
