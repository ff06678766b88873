#pragma once

// Monte-Carlo replication harness for the RDPG-with-covariates designs:
// runs the estimators and single-view baselines over a parameter grid and
// collects per-replication component errors.

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "jinet/eval.hpp"
#include "jinet/io.hpp"
#include "jinet/refine.hpp"
#include "jinet/simgen.hpp"

namespace jinet {

enum class SweepKind { delta, s2, none };

inline std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::delta: return "delta";
    case SweepKind::s2: return "s2";
    case SweepKind::none: return "none";
  }
  return "none";
}

inline SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "delta") return SweepKind::delta;
  if (s == "s2") return SweepKind::s2;
  if (s == "none") return SweepKind::none;
  throw Error(Errc::ParseError, "unknown sweep '" + s + "' (expected delta, s2 or none)");
}

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"spectral", "spectral_opt", "top_net", "top_cov"};
  return names;
}

/// Ten equally spaced values 0.1, 0.2, …, 1.0.
inline std::vector<double> sweep_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 10; ++i) g.push_back(static_cast<double>(i) / 10.0);
  return g;
}

struct SweepRow {
  Setting setting;
  double value;  // separation for the δ-sweep, s₂ for the s₂-sweep
  std::string method;
  double d_joint;
  double d_network;
  double d_covariate;
  int rep;
};

struct SweepOptions {
  SweepKind kind = SweepKind::delta;
  int reps = 50;
  int threads = 1;
  RefineConfig refine;
};

namespace detail {

inline double baseline_distance(const OrthonormalBasis& est, const OrthonormalBasis& truth) {
  if (est.r() != truth.r()) return std::numeric_limits<double>::quiet_NaN();
  return procrustes_distance(est, truth);
}

inline SimConfig grid_config(const SimConfig& base, SweepKind kind, double value) {
  SimConfig c = base;
  if (kind == SweepKind::delta) {
    c.delta = 1.0 - value;
  } else if (kind == SweepKind::s2) {
    c.delta = 0.0;
    c.s2 = value;
  }
  return c;
}

}  // namespace detail

/// One replication: the four methods on one simulated instance. A method
/// whose estimator fails reports NaN distances.
inline std::vector<SweepRow> run_replication(const SimConfig& cfg, double value, int rep,
                                             const RefineConfig& refine_cfg = {}) {
  const SimInstance inst = simulation_design(cfg);
  const Decomposition& truth = inst.truth.components;
  const Ranks ranks = truth.ranks();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows;
  auto push = [&](const std::string& method, double dm, double d1, double d2) {
    rows.push_back({cfg.setting, value, method, dm, d1, d2, rep});
  };

  std::optional<Decomposition> spectral;
  try {
    spectral = spectral_decompose(inst.A, inst.X, ranks);
    const auto e = component_errors(*spectral, truth);
    push("spectral", e.joint, e.network, e.covariate);
  } catch (const Error&) {
    push("spectral", nan, nan, nan);
  }
  try {
    if (!spectral) throw Error(Errc::DegenerateInput, "no spectral initialization");
    const RefineResult refined = refine_decompose(inst.A, inst.X, *spectral, ranks, refine_cfg);
    const auto e = component_errors(refined.components, truth);
    push("spectral_opt", e.joint, e.network, e.covariate);
  } catch (const Error&) {
    push("spectral_opt", nan, nan, nan);
  }
  const OrthonormalBasis net = baseline_top_net(inst.A, ranks.joint);
  push("top_net", detail::baseline_distance(net, truth.joint), detail::baseline_distance(net, truth.network),
       detail::baseline_distance(net, truth.covariate));
  const OrthonormalBasis cov = baseline_top_cov(inst.X, ranks.joint);
  push("top_cov", detail::baseline_distance(cov, truth.joint), detail::baseline_distance(cov, truth.network),
       detail::baseline_distance(cov, truth.covariate));
  return rows;
}

/// Runs the sweep. Replication r of every grid point uses seed base.seed + r.
/// Rows come out in (grid value, rep, method) order regardless of threads.
inline std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepOptions& opt) {
  base.validate();
  opt.refine.validate();
  detail::require(opt.reps >= 1, Errc::InvalidArgument, "reps must be >= 1");
  detail::require(opt.threads >= 1, Errc::InvalidArgument, "threads must be >= 1");

  std::vector<double> values;
  if (opt.kind == SweepKind::none) {
    values.push_back(1.0 - base.delta);
  } else {
    values = sweep_grid();
  }

  struct Job {
    SimConfig cfg;
    double value;
    int rep;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    for (int r = 0; r < opt.reps; ++r) {
      SimConfig c = detail::grid_config(base, opt.kind, v);
      c.seed = base.seed + static_cast<std::uint64_t>(r);
      jobs.push_back({c, v, r});
    }
  }

  std::vector<std::vector<SweepRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = run_replication(jobs[i].cfg, jobs[i].value, jobs[i].rep, opt.refine);
    }
  };
  const int nthreads = std::min<int>(opt.threads, static_cast<int>(jobs.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<SweepRow> rows;
  for (auto& block : results) rows.insert(rows.end(), block.begin(), block.end());
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, SweepKind kind, std::ostream& out) {
  out << "setting," << (kind == SweepKind::s2 ? "s2" : "delta") << ",method,dM,dR1,dR2,rep\n";
  for (const auto& r : rows) {
    out << to_string(r.setting) << ',' << format_double(r.value) << ',' << r.method << ','
        << format_double(r.d_joint) << ',' << format_double(r.d_network) << ',' << format_double(r.d_covariate)
        << ',' << r.rep << '\n';
  }
}

/// Mean and standard error of the mean over replications, NaNs skipped.
struct SweepSummary {
  double mean = 0.0;
  double std_error = 0.0;
  int count = 0;
};

/// Summaries keyed by (grid value, method) for one of the three distances
/// (0 = joint, 1 = network individual, 2 = covariate individual).
inline std::map<std::pair<double, std::string>, SweepSummary> summarize(const std::vector<SweepRow>& rows,
                                                                        int component) {
  std::map<std::pair<double, std::string>, std::vector<double>> groups;
  for (const auto& r : rows) {
    const double v = component == 0 ? r.d_joint : component == 1 ? r.d_network : r.d_covariate;
    if (std::isfinite(v)) groups[{r.value, r.method}].push_back(v);
  }
  std::map<std::pair<double, std::string>, SweepSummary> out;
  for (const auto& [key, xs] : groups) {
    SweepSummary s;
    s.count = static_cast<int>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= s.count;
    if (s.count > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - s.mean) * (x - s.mean);
      s.std_error = std::sqrt(ss / (s.count - 1) / s.count);
    }
    out[key] = s;
  }
  return out;
}

}  // namespace jinet
