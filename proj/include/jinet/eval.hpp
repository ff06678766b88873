#pragma once

// Evaluation: component-wise Procrustes errors, variance-explained
// accounting, scree-elbow rank selection and the small clustering utilities
// used to check planted group structure.

#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "jinet/spectral.hpp"

namespace jinet {

struct ComponentErrors {
  double joint;
  double network;
  double covariate;
};

inline ComponentErrors component_errors(const Decomposition& est, const Decomposition& truth) {
  return {procrustes_distance(est.joint, truth.joint), procrustes_distance(est.network, truth.network),
          procrustes_distance(est.covariate, truth.covariate)};
}

/// Shares of ‖·‖²_F attributed to joint, individual and residual parts.
struct VarianceReport {
  double joint = 0.0;
  double individual = 0.0;
  double residual = 0.0;
  bool adjusted = false;  // a slightly negative share was clamped and the rest renormalized
};

namespace detail {

inline VarianceReport finish_report(double joint, double individual) {
  VarianceReport r{joint, individual, 1.0 - joint - individual, false};
  double* parts[] = {&r.joint, &r.individual, &r.residual};
  for (double* v : parts) {
    if (*v < 0.0) {
      if (*v < -1e-12) r.adjusted = true;
      *v = 0.0;
    }
  }
  if (r.adjusted) {
    const double total = r.joint + r.individual + r.residual;
    for (double* v : parts) *v /= total;
  }
  return r;
}

}  // namespace detail

/// joint = ‖P_M X‖²/‖X‖², individual = ‖P_{R2} X‖²/‖X‖², residual = rest.
inline VarianceReport variance_explained_covariates(const CovariateMatrix& x, const OrthonormalBasis& m,
                                                    const OrthonormalBasis& r2) {
  const double total = x.entries().squaredNorm();
  detail::require(std::sqrt(total) >= 1e-12, Errc::ZeroMatrix, "covariate matrix is zero");
  detail::require((m.columns().transpose() * r2.columns()).norm() <= tol::residual, Errc::InvalidArgument,
                  "M and R2 are not orthogonal");
  const double joint = projector_apply(m, x.entries()).squaredNorm() / total;
  const double indiv = projector_apply(r2, x.entries()).squaredNorm() / total;
  return detail::finish_report(joint, indiv);
}

/// Network shares through the fitted signal P̂ = P_V A P_V, V = (M R1):
/// Var_P̂ = ‖P̂‖²/‖A‖²; with Ŷ = ASE(P̂, latent_dim), the joint share is
/// (‖P_M Ŷ‖²/‖Ŷ‖²)·Var_P̂, the individual share uses R1, and the residual is
/// 1 − Var_P̂. latent_dim ≤ 0 means r_M + r₁.
inline VarianceReport variance_explained_network(const AdjacencyMatrix& a, const Decomposition& d,
                                                 Index latent_dim = 0) {
  const double total = a.entries().squaredNorm();
  detail::require(std::sqrt(total) >= 1e-12, Errc::ZeroMatrix, "adjacency matrix is zero");
  if (latent_dim <= 0) latent_dim = d.joint.r() + d.network.r();
  const OrthonormalBasis v = OrthonormalBasis::unchecked(hcat(d.joint.columns(), d.network.columns()));
  const Matrix& vc = v.columns();
  Matrix p_hat = vc * (vc.transpose() * a.entries() * vc) * vc.transpose();
  p_hat = 0.5 * (p_hat + p_hat.transpose()).eval();
  const double var_signal = p_hat.squaredNorm() / total;

  const Matrix y_hat = ase(p_hat, latent_dim);
  const double y_mass = y_hat.squaredNorm();
  if (y_mass == 0.0) return detail::finish_report(0.0, 0.0);
  const double joint = projector_apply(d.joint, y_hat).squaredNorm() / y_mass * var_signal;
  const double indiv = projector_apply(d.network, y_hat).squaredNorm() / y_mass * var_signal;
  // 𝒞(Ŷ) ⊆ 𝒞(M R1), so joint + individual = Var_P̂ and the residual is 1 − Var_P̂.
  return detail::finish_report(joint, indiv);
}

/// Elbow of a descending scree sequence by two-segment Gaussian profile
/// likelihood: for each split q the first q values and the rest get their
/// own mean and a pooled variance; the q with the largest log-likelihood
/// wins, earliest on ties. Only q ≤ max_rank is considered.
inline Index rank_select(const std::vector<double>& values, Index max_rank) {
  const Index m = static_cast<Index>(values.size());
  detail::require(m >= 2, Errc::TooFewValues, "need at least two values, got " + std::to_string(m));
  detail::require(max_rank >= 1, Errc::InvalidArgument, "max_rank must be >= 1");
  const Index last = std::min(m - 1, max_rank);

  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  // Floor keeps identical sequences finite; relative to the data so the
  // selection stays scale-invariant.
  const double var_floor = std::max(1e-300, 1e-24 * scale * scale);
  const double dof = m > 2 ? static_cast<double>(m - 2) : static_cast<double>(m);

  Index best = 1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (Index q = 1; q <= last; ++q) {
    double mean1 = 0.0, mean2 = 0.0;
    for (Index i = 0; i < q; ++i) mean1 += values[static_cast<std::size_t>(i)];
    for (Index i = q; i < m; ++i) mean2 += values[static_cast<std::size_t>(i)];
    mean1 /= static_cast<double>(q);
    mean2 /= static_cast<double>(m - q);
    double ss = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double mu = i < q ? mean1 : mean2;
      const double dev = values[static_cast<std::size_t>(i)] - mu;
      ss += dev * dev;
    }
    const double var = std::max(ss / dof, var_floor);
    const double ll = -0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi * var) - ss / (2.0 * var);
    if (ll > best_ll) {
      best_ll = ll;
      best = q;
    }
  }
  return best;
}

inline std::vector<double> to_std_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

/// Scree values of a network: |λ| of the eigenvalues, descending, at most
/// `length` of them.
inline Vector network_scree(const AdjacencyMatrix& a, Index length) {
  return eig_ordered(a.entries(), std::min(length, a.n())).values.cwiseAbs();
}

/// Scree values of covariates: singular values, descending, at most `length`.
inline Vector covariate_scree(const CovariateMatrix& x, Index length) {
  const Vector s = singular_values(x.entries());
  return s.head(std::min(length, s.size()));
}

struct RankSelection {
  Ranks ranks;
  Vector network_scree;
  Vector covariate_scree;
  Vector joint_scree;  // singular values of (V̂₁ V̂₂)
};

/// Elbow-based ranks: rank(P) and rank(W) from the network and covariate
/// screes, then r_M from the scree of the stacked bases (V̂₁ V̂₂), capped so
/// that both individual ranks stay ≥ 1.
inline RankSelection select_ranks(const AdjacencyMatrix& a, const CovariateMatrix& x, Index max_rank = 10,
                                  Index scree_length = 30) {
  detail::require(a.n() == x.n(), Errc::DimensionMismatch, "network and covariates disagree on n");
  RankSelection out;
  out.network_scree = network_scree(a, scree_length);
  out.covariate_scree = covariate_scree(x, scree_length);
  const Index d1 = rank_select(to_std_vector(out.network_scree), max_rank);
  const Index d2 = rank_select(to_std_vector(out.covariate_scree), max_rank);
  detail::require(std::min(d1, d2) >= 2, Errc::DegenerateInput,
                  "selected rank(P) = " + std::to_string(d1) + ", rank(W) = " + std::to_string(d2) +
                      " leave no room for both joint and individual components");
  const Matrix v1 = eig_ordered(a.entries(), d1).basis.columns();
  const Matrix v2 = sv_left(x.entries(), d2).basis.columns();
  out.joint_scree = singular_values(hcat(v1, v2));
  const Index rm = rank_select(to_std_vector(out.joint_scree), std::min(d1, d2) - 1);
  out.ranks = Ranks{rm, d1 - rm, d2 - rm};
  return out;
}

/// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
/// within-cluster sum of squares. Labels are 0..k-1.
inline std::vector<int> kmeans(const Matrix& rows, int k, std::uint64_t seed, int restarts = 50,
                               int max_iter = 100) {
  const Index n = rows.rows();
  detail::require(k >= 1, Errc::InvalidArgument, "k must be >= 1");
  detail::require(k <= n, Errc::KTooLarge, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  std::mt19937_64 rng(seed);
  std::vector<int> best_labels(static_cast<std::size_t>(n), 0);
  double best_wss = std::numeric_limits<double>::infinity();

  for (int run = 0; run < restarts; ++run) {
    Matrix centers(k, rows.cols());
    std::uniform_int_distribution<Index> first(0, n - 1);
    centers.row(0) = rows.row(first(rng));
    Vector d2(n);
    for (int c = 1; c < k; ++c) {
      for (Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < c; ++j) best = std::min(best, (rows.row(i) - centers.row(j)).squaredNorm());
        d2(i) = best;
      }
      Index pick = 0;
      if (d2.sum() > 0.0) {
        std::discrete_distribution<Index> weighted(d2.data(), d2.data() + n);
        pick = weighted(rng);
      } else {
        pick = first(rng);
      }
      centers.row(c) = rows.row(pick);
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double wss = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      wss = 0.0;
      for (Index i = 0; i < n; ++i) {
        int arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          const double dist = (rows.row(i) - centers.row(j)).squaredNorm();
          if (dist < best) {
            best = dist;
            arg = j;
          }
        }
        wss += best;
        if (labels[static_cast<std::size_t>(i)] != arg) {
          labels[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      Matrix sums = Matrix::Zero(k, rows.cols());
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
      for (int j = 0; j < k; ++j) {
        // An emptied cluster keeps its previous center.
        if (counts[static_cast<std::size_t>(j)] > 0) centers.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
      }
    }
    if (wss < best_wss) {
      best_wss = wss;
      best_labels = labels;
    }
  }
  return best_labels;
}

/// Adjusted Rand index between two labelings of the same items.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  detail::require(a.size() == b.size(), Errc::LengthMismatch,
                  "label vectors have lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  const auto n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, c] : joint) sum_joint += choose2(c);
  for (const auto& [key, c] : rows) sum_rows += choose2(c);
  for (const auto& [key, c] : cols) sum_cols += choose2(c);
  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both labelings trivial (single cluster or all singletons)
  return (sum_joint - expected) / (max_index - expected);
}

/// PCA of the projection of X onto 𝒞(B): scores U·Σ (n×k) and loadings V
/// (p×k), for the joint / individual covariate biplots.
struct ProjectionPca {
  Matrix scores;
  Matrix loadings;
  Vector singular_values;
};

inline ProjectionPca projection_pca(const CovariateMatrix& x, const OrthonormalBasis& b, Index k) {
  const Matrix proj = projector_apply(b, x.entries());
  k = std::min({k, proj.rows(), proj.cols()});
  detail::require(k >= 1, Errc::RankOutOfBounds, "projection PCA needs k >= 1");
  Eigen::JacobiSVD<Matrix> svd(proj, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix u = svd.matrixU().leftCols(k);
  Matrix v = svd.matrixV().leftCols(k);
  // Sign convention follows the loadings: largest-magnitude entry positive.
  for (Index j = 0; j < k; ++j) {
    Index arg = 0;
    v.col(j).cwiseAbs().maxCoeff(&arg);
    if (v(arg, j) < 0.0) {
      v.col(j) = -v.col(j);
      u.col(j) = -u.col(j);
    }
  }
  const Vector s = svd.singularValues().head(k);
  return {u * s.asDiagonal(), v, s};
}

}  // namespace jinet
