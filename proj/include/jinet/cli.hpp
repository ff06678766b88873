#pragma once

// Command-line front end: decompose, simulate, evaluate, ranks, variance.
// Exit codes: 0 success, 2 invalid input or usage, 1 numerical/runtime failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "jinet/eval.hpp"
#include "jinet/io.hpp"
#include "jinet/refine.hpp"
#include "jinet/simgen.hpp"
#include "jinet/spectral.hpp"
#include "jinet/sweep.hpp"

namespace jinet {

namespace cli {

inline Ranks parse_ranks(const std::string& text) {
  std::vector<Index> parts;
  for (const auto& field : detail::split(text, ',')) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      throw Error(Errc::ParseError, "--ranks expects three integers r_M,r_1,r_2, got '" + text + "'");
    }
    parts.push_back(static_cast<Index>(v));
  }
  detail::require(parts.size() == 3, Errc::ParseError, "--ranks expects three integers r_M,r_1,r_2, got '" + text + "'");
  return Ranks{parts[0], parts[1], parts[2]};
}

inline NetworkFormat parse_network_format(const std::string& s) {
  if (s == "edgelist") return NetworkFormat::edge_list;
  if (s == "dense") return NetworkFormat::dense;
  throw Error(Errc::ParseError, "unknown network format '" + s + "' (expected edgelist or dense)");
}

/// Pipeline flags shared by decompose, ranks and variance.
struct PipelineFlags {
  std::string network_format = "edgelist";
  std::string symmetrize = "add_transpose";
  bool no_log_network = false;
  bool no_log_covariates = false;
  bool no_standardize = false;
  bool no_standardize_dummies = false;
  std::vector<std::string> categorical;

  void attach(CLI::App* app) {
    app->add_option("--network-format", network_format, "edgelist (TSV with header) or dense (square CSV)")
        ->check(CLI::IsMember({"edgelist", "dense"}));
    app->add_option("--symmetrize", symmetrize, "add_transpose, average or none")
        ->check(CLI::IsMember({"add_transpose", "average", "none"}));
    app->add_flag("--no-log-network", no_log_network, "skip log(1+x) of network weights");
    app->add_flag("--no-log-covariates", no_log_covariates, "skip log(1+x) of numeric covariates");
    app->add_flag("--no-standardize", no_standardize, "skip column standardization");
    app->add_flag("--no-standardize-dummies", no_standardize_dummies, "leave indicator columns unscaled");
    app->add_option("--categorical", categorical, "categorical covariate columns (dummy-coded)")
        ->delimiter(',');
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.log_transform_network = !no_log_network;
    c.log_transform_numeric_covariates = !no_log_covariates;
    c.symmetrize = parse_symmetrize_mode(symmetrize);
    c.standardize_columns = !no_standardize;
    c.standardize_dummies = !no_standardize_dummies;
    c.categorical_columns = categorical;
    return c;
  }
};

/// --seed if given, else JINET_SEED, else `fallback`.
inline std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_flag, std::uint64_t fallback = 0) {
  if (seed_opt->count() > 0) return seed_flag;
  if (const char* env = std::getenv("JINET_SEED"); env != nullptr && *env != '\0') {
    return detail::parse_uint_field("JINET_SEED", env);
  }
  return fallback;
}

inline void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) {
    throw Error(Errc::IoError, "cannot create directory '" + dir + "'");
  }
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  for (const auto& l : lines) out << l << '\n';
}

inline std::string report_row(const std::string& view, const VarianceReport& r) {
  return view + "," + format_double(r.joint) + "," + format_double(r.individual) + "," + format_double(r.residual) +
         "," + (r.adjusted ? "1" : "0");
}

}  // namespace cli

/// Entry point shared by the executable and the tests.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  CLI::App app{"Joint and individual components of a network with node covariates", "jinet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // decompose
  CLI::App* dec = app.add_subcommand("decompose", "estimate joint and individual components");
  std::string dec_network, dec_covariates, dec_out, dec_ranks;
  bool dec_auto = false;
  bool dec_refine = true;
  int dec_tmax = 200;
  double dec_eps = 1e-8;
  bool dec_literal = false;
  Index dec_max_rank = 10;
  std::uint64_t dec_seed = 0;
  cli::PipelineFlags dec_flags;
  dec->add_option("--network", dec_network, "network file")->required();
  dec->add_option("--covariates", dec_covariates, "covariate CSV (header, first column node id)")->required();
  dec->add_option("--out", dec_out, "output directory")->required();
  auto* ranks_opt = dec->add_option("--ranks", dec_ranks, "r_M,r_1,r_2");
  auto* auto_opt = dec->add_flag("--auto-ranks", dec_auto, "select ranks from scree elbows (default)");
  ranks_opt->excludes(auto_opt);
  dec->add_flag("--refine,!--no-refine", dec_refine, "run the refinement after the spectral estimate");
  dec->add_option("--t-max", dec_tmax, "maximum refinement cycles")->check(CLI::PositiveNumber);
  dec->add_option("--epsilon", dec_eps, "refinement stopping tolerance")->check(CLI::PositiveNumber);
  dec->add_flag("--literal-scaling", dec_literal, "scale A' and X by sqrt(rank) instead of their top-rank norm");
  dec->add_option("--max-rank", dec_max_rank, "largest rank considered by --auto-ranks")->check(CLI::PositiveNumber);
  auto* dec_seed_opt = dec->add_option("--seed", dec_seed, "random seed (recorded; default 0 or JINET_SEED)");
  dec_flags.attach(dec);

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo sweep over the synthetic designs");
  std::string sim_config, sim_setting, sim_sweep = "delta", sim_out;
  int sim_reps = 50;
  int sim_threads = 1;
  bool sim_emit = false;
  std::uint64_t sim_seed = 0;
  sim->add_option("--config", sim_config, "flat key = value SimConfig file");
  sim->add_option("--setting", sim_setting, "strong_joint or weak_joint")
      ->check(CLI::IsMember({"strong_joint", "weak_joint"}));
  sim->add_option("--sweep", sim_sweep, "delta, s2 or none")->check(CLI::IsMember({"delta", "s2", "none"}));
  sim->add_option("--reps", sim_reps, "replications per grid point")->check(CLI::PositiveNumber);
  sim->add_option("--threads", sim_threads, "worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_flag("--emit-instance", sim_emit, "write one instance (A.csv, X.csv, truth/) instead of sweeping");
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "base seed; replication r uses seed + r");

  // evaluate
  CLI::App* ev = app.add_subcommand("evaluate", "Procrustes errors of an estimate against a truth");
  std::string ev_est, ev_truth;
  ev->add_option("--est", ev_est, "estimate directory (M.csv, R1.csv, R2.csv)")->required();
  ev->add_option("--truth", ev_truth, "truth directory (M.csv, R1.csv, R2.csv)")->required();

  // ranks
  CLI::App* rk = app.add_subcommand("ranks", "scree values and the selected elbow");
  std::string rk_network, rk_covariates;
  Index rk_max_rank = 10;
  Index rk_length = 30;
  cli::PipelineFlags rk_flags;
  auto* rk_net_opt = rk->add_option("--network", rk_network, "network file");
  auto* rk_cov_opt = rk->add_option("--covariates", rk_covariates, "covariate CSV");
  rk_net_opt->excludes(rk_cov_opt);
  rk->add_option("--max-rank", rk_max_rank, "largest rank considered")->check(CLI::PositiveNumber);
  rk->add_option("--scree-length", rk_length, "number of scree values used")->check(CLI::Range(2, 100000));
  rk_flags.attach(rk);

  // variance
  CLI::App* var = app.add_subcommand("variance", "variance explained by joint and individual components");
  std::string var_network, var_covariates, var_est, var_pca;
  Index var_latent = 0;
  cli::PipelineFlags var_flags;
  var->add_option("--network", var_network, "network file")->required();
  var->add_option("--covariates", var_covariates, "covariate CSV")->required();
  var->add_option("--est", var_est, "estimate directory")->required();
  var->add_option("--latent-dim", var_latent, "embedding dimension for the fitted network (default r_M + r_1)");
  var->add_option("--pca-out", var_pca, "directory for joint / individual covariate PCA scores and loadings");
  var_flags.attach(var);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (dec->parsed()) {
      PipelineConfig cfg = dec_flags.config();
      if (ranks_opt->count() > 0) {
        cfg.ranks = cli::parse_ranks(dec_ranks);
        cfg.rank_policy = RankPolicy::manual;
      }
      const std::uint64_t seed = cli::resolve_seed(dec_seed_opt, dec_seed);
      const AlignedData data =
          load_inputs(dec_network, cli::parse_network_format(dec_flags.network_format), dec_covariates, cfg);
      if (data.dropped_from_network > 0 || data.dropped_from_covariates > 0) {
        err << "dropped " << data.dropped_from_network << " network nodes and " << data.dropped_from_covariates
            << " covariate rows without a match; " << data.ids.size() << " nodes remain\n";
      }
      const CovariateMatrix& x = data.covariates.values;
      Ranks ranks;
      if (cfg.rank_policy == RankPolicy::manual) {
        ranks = *cfg.ranks;
      } else {
        ranks = select_ranks(data.A, x, dec_max_rank).ranks;
        err << "selected ranks r_M=" << ranks.joint << " r_1=" << ranks.network << " r_2=" << ranks.covariate << '\n';
      }

      Decomposition d = spectral_decompose(data.A, x, ranks);
      KeyValues manifest{{"seed", std::to_string(seed)},
                         {"network_sha256", sha256_file(dec_network)},
                         {"covariates_sha256", sha256_file(dec_covariates)},
                         {"p", std::to_string(x.p())},
                         {"rank_policy", cfg.rank_policy == RankPolicy::manual ? "manual" : "auto_elbow"},
                         {"symmetrize", to_string(cfg.symmetrize)},
                         {"log_transform_network", cfg.log_transform_network ? "true" : "false"},
                         {"log_transform_numeric_covariates", cfg.log_transform_numeric_covariates ? "true" : "false"},
                         {"standardize_columns", cfg.standardize_columns ? "true" : "false"},
                         {"standardize_dummies", cfg.standardize_dummies ? "true" : "false"},
                         {"dropped_from_network", std::to_string(data.dropped_from_network)},
                         {"dropped_from_covariates", std::to_string(data.dropped_from_covariates)},
                         {"refine", dec_refine ? "true" : "false"}};
      cli::ensure_directory(dec_out);
      if (dec_refine) {
        RefineConfig rc;
        rc.t_max = dec_tmax;
        rc.epsilon = dec_eps;
        rc.scale_rule = dec_literal ? ScaleRule::orthonormal_factor : ScaleRule::best_rank_approximation;
        RefineResult res = refine_decompose(data.A, x, d, ranks, rc);
        d = res.components;
        manifest.emplace_back("scale_rule", dec_literal ? "orthonormal_factor" : "best_rank_approximation");
        manifest.emplace_back("iterations", std::to_string(res.trace.iterations));
        manifest.emplace_back("converged", res.trace.converged ? "true" : "false");
        manifest.emplace_back("final_loss", format_double(res.trace.losses.back()));
        std::vector<std::string> trace{"iteration,loss"};
        for (std::size_t t = 0; t < res.trace.losses.size(); ++t) {
          trace.push_back(std::to_string(t) + "," + format_double(res.trace.losses[t]));
        }
        cli::write_lines((fs::path(dec_out) / "trace.csv").string(), trace);
      }
      write_decomposition(d, dec_out, manifest);
      cli::write_lines((fs::path(dec_out) / "nodes.txt").string(), data.ids);
      out << "wrote " << dec_out << " (n=" << d.joint.n() << ", ranks " << ranks.joint << "," << ranks.network << ","
          << ranks.covariate << ")\n";
      return 0;
    }

    if (sim->parsed()) {
      KeyValues kv;
      if (!sim_config.empty()) kv = read_key_values(sim_config);
      if (!sim_setting.empty()) {
        std::erase_if(kv, [](const auto& e) { return e.first == "setting"; });
        kv.insert(kv.begin(), {"setting", sim_setting});
      }
      SimConfig cfg = sim_config_from_key_values(kv);
      cfg.seed = cli::resolve_seed(sim_seed_opt, sim_seed, cfg.seed);
      cli::ensure_directory(sim_out);
      const fs::path base(sim_out);
      write_key_values(to_key_values(cfg), (base / "config.txt").string());

      if (sim_emit) {
        const SimInstance inst = simulation_design(cfg);
        write_matrix_csv(inst.A.entries(), (base / "A.csv").string());
        CovariateTable table{{}, inst.X, std::vector<bool>(static_cast<std::size_t>(inst.X.p()), false)};
        for (Index i = 0; i < inst.X.n(); ++i) table.ids.push_back(std::to_string(i + 1));
        write_covariates(table, (base / "X.csv").string());
        const fs::path truth_dir = base / "truth";
        cli::ensure_directory(truth_dir.string());
        write_decomposition(inst.truth.components, truth_dir.string(),
                            {{"seed", std::to_string(cfg.seed)},
                             {"separation", format_double(inst.metadata.separation)},
                             {"inner_product_coefficient", format_double(inst.metadata.inner_product_coefficient)},
                             {"alpha", format_double(inst.metadata.alpha)},
                             {"clipped_fraction", format_double(inst.metadata.clipped_fraction)},
                             {"degenerate", inst.metadata.degenerate ? "true" : "false"}});
        out << "wrote instance to " << sim_out << '\n';
        return 0;
      }

      SweepOptions opt;
      opt.kind = parse_sweep_kind(sim_sweep);
      opt.reps = sim_reps;
      opt.threads = sim_threads;
      const auto rows = run_sweep(cfg, opt);
      const std::string csv_path = (base / "errors.csv").string();
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) throw Error(Errc::IoError, "cannot write '" + csv_path + "'");
      write_sweep_csv(rows, opt.kind, csv);
      if (!csv) throw Error(Errc::IoError, "write to '" + csv_path + "' failed");
      out << "wrote " << rows.size() << " rows to " << csv_path << '\n';
      return 0;
    }

    if (ev->parsed()) {
      const Decomposition est = read_decomposition(ev_est);
      const Decomposition truth = read_decomposition(ev_truth);
      const ComponentErrors e = component_errors(est, truth);
      out << "dM,dR1,dR2\n"
          << format_double(e.joint) << ',' << format_double(e.network) << ',' << format_double(e.covariate) << '\n';
      return 0;
    }

    if (rk->parsed()) {
      if (rk_net_opt->count() == 0 && rk_cov_opt->count() == 0) {
        err << "ranks: one of --network or --covariates is required\n";
        return 2;
      }
      const PipelineConfig cfg = rk_flags.config();
      Vector scree;
      if (rk_net_opt->count() > 0) {
        const RawNetwork raw = read_network(rk_network, cli::parse_network_format(rk_flags.network_format));
        scree = network_scree(prepare_network(raw, cfg), rk_length);
      } else {
        CovariateTable t = read_covariates(rk_covariates, cfg.categorical_columns);
        prepare_covariates(t, cfg);
        scree = covariate_scree(t.values, rk_length);
      }
      const Index elbow = rank_select(to_std_vector(scree), rk_max_rank);
      out << "index,value,selected\n";
      for (Index i = 0; i < scree.size(); ++i) {
        out << (i + 1) << ',' << format_double(scree(i)) << ',' << (i < elbow ? 1 : 0) << '\n';
      }
      err << "elbow at " << elbow << '\n';
      return 0;
    }

    if (var->parsed()) {
      const PipelineConfig cfg = var_flags.config();
      const AlignedData data =
          load_inputs(var_network, cli::parse_network_format(var_flags.network_format), var_covariates, cfg);
      const Decomposition d = read_decomposition(var_est);
      detail::require(d.joint.n() == data.A.n(), Errc::DimensionMismatch,
                      "estimate has " + std::to_string(d.joint.n()) + " rows but the aligned data has " +
                          std::to_string(data.A.n()) + " nodes");
      const VarianceReport net = variance_explained_network(data.A, d, var_latent);
      const VarianceReport cov = variance_explained_covariates(data.covariates.values, d.joint, d.covariate);
      out << "view,joint,individual,residual,adjusted\n"
          << cli::report_row("network", net) << '\n'
          << cli::report_row("covariates", cov) << '\n';
      if (!var_pca.empty()) {
        cli::ensure_directory(var_pca);
        const fs::path base(var_pca);
        const Index k = 2;
        const ProjectionPca joint = projection_pca(data.covariates.values, d.joint, k);
        const ProjectionPca indiv = projection_pca(data.covariates.values, d.covariate, k);
        write_matrix_csv(joint.scores, (base / "joint_scores.csv").string());
        write_matrix_csv(joint.loadings, (base / "joint_loadings.csv").string());
        write_matrix_csv(indiv.scores, (base / "individual_scores.csv").string());
        write_matrix_csv(indiv.loadings, (base / "individual_loadings.csv").string());
        cli::write_lines((base / "columns.txt").string(), data.covariates.values.column_names());
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace jinet
