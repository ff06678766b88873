#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace jinet;
using namespace jinet::testing;

TEST(EdgeList, ReadsDirectedWeights) {
  TempDir dir;
  write_text(dir.file("e.tsv"), "source\ttarget\tweight\na\tb\t2\nb\tc\t1.5\na\tb\t1\n\nc\tc\t4\n");
  const RawNetwork net = read_edge_list(dir.file("e.tsv"));
  EXPECT_EQ(net.ids, (std::vector<std::string>{"a", "b", "c"}));
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 1) = 3.0;
  expected(1, 2) = 1.5;
  expected(2, 2) = 4.0;
  EXPECT_EQ(net.weights, expected);
  const RawNetwork undirected = read_edge_list(dir.file("e.tsv"), false);
  EXPECT_EQ(undirected.weights(1, 0), 3.0);
  EXPECT_EQ(undirected.weights(2, 2), 4.0);
}

TEST(EdgeList, Errors) {
  TempDir dir;
  write_text(dir.file("bad.tsv"), "s\tt\tw\na\tb\t1\na\tb\n");
  try {
    read_edge_list(dir.file("bad.tsv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(std::string(e.what()).find("bad.tsv:3"), std::string::npos) << e.what();
  }
  write_text(dir.file("neg.tsv"), "s\tt\tw\na\tb\t-1\n");
  EXPECT_EQ(error_code([&] { read_edge_list(dir.file("neg.tsv")); }), Errc::NegativeWeight);
  write_text(dir.file("nan.tsv"), "s\tt\tw\na\tb\tx\n");
  EXPECT_EQ(error_code([&] { read_edge_list(dir.file("nan.tsv")); }), Errc::ParseError);
  write_text(dir.file("empty.tsv"), "s\tt\tw\n");
  EXPECT_EQ(error_code([&] { read_edge_list(dir.file("empty.tsv")); }), Errc::EmptyGraph);
  EXPECT_EQ(error_code([&] { read_edge_list(dir.file("missing.tsv")); }), Errc::IoError);
}

TEST(MatrixCsv, RoundTripIsBitExact) {
  TempDir dir;
  Matrix m = gaussian(7, 4, 1);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.0;
  m(2, 2) = 123456789.123456789;
  write_matrix_csv(m, dir.file("m.csv"));
  const Matrix back = read_matrix_csv(dir.file("m.csv"));
  ASSERT_EQ(back.rows(), 7);
  ASSERT_EQ(back.cols(), 4);
  for (Index i = 0; i < m.size(); ++i) EXPECT_EQ(back.data()[i], m.data()[i]);
  EXPECT_TRUE(std::signbit(back(1, 1)));
}

TEST(MatrixCsv, RaggedRowsRejected) {
  TempDir dir;
  write_text(dir.file("r.csv"), "1,2\n3\n");
  EXPECT_EQ(error_code([&] { read_matrix_csv(dir.file("r.csv")); }), Errc::ParseError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(DenseNetwork, IdsAndShape) {
  TempDir dir;
  write_text(dir.file("a.csv"), "0,1\n1,0\n");
  const RawNetwork net = read_dense_network(dir.file("a.csv"));
  EXPECT_EQ(net.ids, (std::vector<std::string>{"1", "2"}));
  write_text(dir.file("b.csv"), "0,1,2\n1,0,3\n");
  EXPECT_EQ(error_code([&] { read_dense_network(dir.file("b.csv")); }), Errc::DimensionMismatch);
}

TEST(Symmetrize, Modes) {
  Matrix a(2, 2);
  a << 0, 2, 4, 1;
  Matrix sum(2, 2), avg(2, 2);
  sum << 0, 6, 6, 2;
  avg << 0, 3, 3, 1;
  EXPECT_EQ(symmetrize(a, SymmetrizeMode::add_transpose).entries(), sum);
  EXPECT_EQ(symmetrize(a, SymmetrizeMode::average).entries(), avg);
  EXPECT_EQ(error_code([&] { symmetrize(a, SymmetrizeMode::none); }), Errc::NotSymmetric);
  EXPECT_EQ(parse_symmetrize_mode("average"), SymmetrizeMode::average);
  EXPECT_EQ(to_string(SymmetrizeMode::add_transpose), "add_transpose");
  EXPECT_EQ(error_code([] { parse_symmetrize_mode("max"); }), Errc::ParseError);
}

TEST(Log1p, ValuesAndNegatives) {
  Matrix a(1, 3);
  a << 0.0, 1.0, std::exp(2.0) - 1.0;
  const Matrix l = log1p_matrix(a);
  EXPECT_EQ(l(0, 0), 0.0);
  EXPECT_NEAR(l(0, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(l(0, 2), 2.0, 1e-14);
  EXPECT_EQ(error_code([] { log1p_matrix(Matrix::Constant(1, 1, -1.0)); }), Errc::NegativeEntry);
}

TEST(Covariates, NumericAndDummyColumns) {
  TempDir dir;
  write_text(dir.file("c.csv"), "id,age,club,income\nu1,30,red,10\nu2,40,blue,20\nu3,50,red,30\n");
  const CovariateTable t = read_covariates(dir.file("c.csv"), {"club"});
  EXPECT_EQ(t.ids, (std::vector<std::string>{"u1", "u2", "u3"}));
  EXPECT_EQ(t.values.column_names(), (std::vector<std::string>{"age", "income", "club=red", "club=blue"}));
  EXPECT_EQ(t.is_dummy, (std::vector<bool>{false, false, true, true}));
  Matrix expected(3, 4);
  expected << 30, 10, 1, 0, 40, 20, 0, 1, 50, 30, 1, 0;
  EXPECT_EQ(t.values.entries(), expected);

  write_covariates(t, dir.file("out.csv"));
  const CovariateTable back = read_covariates(dir.file("out.csv"));
  EXPECT_EQ(back.values.entries(), expected);
  EXPECT_EQ(back.ids, t.ids);
}

TEST(Covariates, Errors) {
  TempDir dir;
  write_text(dir.file("dup.csv"), "id,x\na,1\na,2\n");
  EXPECT_EQ(error_code([&] { read_covariates(dir.file("dup.csv")); }), Errc::ParseError);
  write_text(dir.file("txt.csv"), "id,x\na,hello\n");
  EXPECT_EQ(error_code([&] { read_covariates(dir.file("txt.csv")); }), Errc::ParseError);
  write_text(dir.file("ok.csv"), "id,x\na,1\n");
  EXPECT_EQ(error_code([&] { read_covariates(dir.file("ok.csv"), {"y"}); }), Errc::ParseError);
  write_text(dir.file("short.csv"), "id,x,y\na,1\n");
  EXPECT_EQ(error_code([&] { read_covariates(dir.file("short.csv")); }), Errc::ParseError);
}

TEST(Standardize, ZeroMeanUnitSampleDeviation) {
  const Matrix x = gaussian(25, 3, 2) * 4.0 + Matrix::Constant(25, 3, 7.0);
  const CovariateMatrix s = standardize_columns(CovariateMatrix(x));
  for (Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(s.entries().col(j).mean(), 0.0, 1e-13);
    EXPECT_NEAR(s.entries().col(j).squaredNorm() / 24.0, 1.0, 1e-12);
  }
  const CovariateMatrix partial = standardize_columns(CovariateMatrix(x), {false, true, false});
  EXPECT_EQ(partial.entries().col(1), x.col(1));

  Matrix constant = x;
  constant.col(2).setConstant(3.0);
  try {
    standardize_columns(CovariateMatrix(constant, {"a", "b", "flat"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConstantColumn);
    EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
  }
}

TEST(Align, IntersectionInNetworkOrder) {
  Matrix a(3, 3);
  a << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  Matrix x(3, 1);
  x << 30, 10, 40;
  const CovariateTable cov{{"c", "a", "z"}, CovariateMatrix(x), {false}};
  const AlignedData d = align_nodes({"a", "b", "c"}, AdjacencyMatrix(a), cov);
  EXPECT_EQ(d.ids, (std::vector<std::string>{"a", "c"}));
  Matrix sub(2, 2);
  sub << 0, 2, 2, 0;
  EXPECT_EQ(d.A.entries(), sub);
  EXPECT_EQ(d.covariates.values.entries()(0, 0), 10.0);
  EXPECT_EQ(d.covariates.values.entries()(1, 0), 30.0);
  EXPECT_EQ(d.dropped_from_network, 1);
  EXPECT_EQ(d.dropped_from_covariates, 1);
  const CovariateTable other{{"q"}, CovariateMatrix(Matrix::Ones(1, 1)), {false}};
  EXPECT_EQ(error_code([&] { align_nodes({"a", "b", "c"}, AdjacencyMatrix(a), other); }), Errc::NoOverlap);
}

TEST(Pipeline, LoadInputs) {
  TempDir dir;
  write_text(dir.file("e.tsv"), "s\tt\tw\na\tb\t3\nb\tc\t1\nc\td\t7\n");
  write_text(dir.file("c.csv"), "id,x,g\na,1,u\nb,3,v\nc,0,u\nd,8,v\ne,2,u\n");
  PipelineConfig cfg;
  cfg.categorical_columns = {"g"};
  const AlignedData d = load_inputs(dir.file("e.tsv"), NetworkFormat::edge_list, dir.file("c.csv"), cfg);
  EXPECT_EQ(d.ids.size(), 4u);
  EXPECT_NEAR(d.A.entries()(0, 1), std::log1p(3.0), 1e-15);
  EXPECT_NEAR(d.A.entries()(1, 0), std::log1p(3.0), 1e-15);
  EXPECT_EQ(d.dropped_from_covariates, 1);
  const Matrix& x = d.covariates.values.entries();
  for (Index j = 0; j < x.cols(); ++j) EXPECT_NEAR(x.col(j).mean(), 0.0, 1e-13);

  cfg.standardize_dummies = false;
  const AlignedData raw = load_inputs(dir.file("e.tsv"), NetworkFormat::edge_list, dir.file("c.csv"), cfg);
  EXPECT_EQ(raw.covariates.values.entries()(0, 1), 1.0);

  cfg.rank_policy = RankPolicy::manual;
  EXPECT_EQ(error_code([&] { load_inputs(dir.file("e.tsv"), NetworkFormat::edge_list, dir.file("c.csv"), cfg); }),
            Errc::InvalidArgument);
}

TEST(KeyValuesFile, RoundTripAndComments) {
  TempDir dir;
  write_key_values({{"a", "1"}, {"b", "x y"}}, dir.file("kv.txt"));
  EXPECT_EQ(read_text(dir.file("kv.txt")), "a = 1\nb = x y\n");
  write_text(dir.file("c.txt"), "# comment\n\nk=v\n  spaced  =  out  \n");
  const KeyValues kv = read_key_values(dir.file("c.txt"));
  EXPECT_EQ(lookup(kv, "k"), "v");
  EXPECT_EQ(lookup(kv, "spaced"), "out");
  EXPECT_FALSE(lookup(kv, "none").has_value());
  write_text(dir.file("bad.txt"), "novalue\n");
  EXPECT_EQ(error_code([&] { read_key_values(dir.file("bad.txt")); }), Errc::ParseError);
}

TEST(SimConfigRecord, RoundTrip) {
  SimConfig c = SimConfig::defaults(Setting::weak_joint);
  c.delta = 0.25;
  c.seed = 99;
  c.n = 120;
  const SimConfig back = sim_config_from_key_values(to_key_values(c));
  EXPECT_EQ(back.setting, c.setting);
  EXPECT_EQ(back.delta, c.delta);
  EXPECT_EQ(back.q2, c.q2);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.n, c.n);

  const SimConfig weak = sim_config_from_key_values({{"setting", "weak_joint"}});
  EXPECT_EQ(weak.s2, SimConfig::defaults(Setting::weak_joint).s2);
  EXPECT_EQ(error_code([] { sim_config_from_key_values({{"color", "red"}}); }), Errc::ParseError);
  EXPECT_EQ(error_code([] { sim_config_from_key_values({{"n", "-4"}}); }), Errc::ParseError);
  EXPECT_EQ(error_code([] { sim_config_from_key_values({{"n", "10"}}); }), Errc::NotDivisibleBy4);
}

TEST(Sha256, KnownDigests) {
  TempDir dir;
  write_text(dir.file("empty"), "");
  write_text(dir.file("abc"), "abc");
  EXPECT_EQ(sha256_file(dir.file("empty")), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_file(dir.file("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(error_code([&] { sha256_file(dir.file("missing")); }), Errc::IoError);
}

TEST(DecompositionDir, RoundTripAndManifest) {
  TempDir dir;
  const GroundTruth t = random_ground_truth(20, 5, {2, 1, 1}, 0.3, 4);
  write_decomposition(t.components, dir.str(), {{"seed", "7"}});
  const Decomposition back = read_decomposition(dir.str());
  EXPECT_EQ(back.joint.columns(), t.components.joint.columns());
  EXPECT_EQ(back.covariate.columns(), t.components.covariate.columns());
  const KeyValues kv = read_key_values(dir.file("manifest.txt"));
  EXPECT_EQ(lookup(kv, "r_M"), "2");
  EXPECT_EQ(lookup(kv, "n"), "20");
  EXPECT_EQ(lookup(kv, "seed"), "7");
  EXPECT_EQ(lookup(kv, "version"), kToolVersion);
  EXPECT_EQ(error_code([&] { write_decomposition(t.components, dir.file("nope")); }), Errc::IoError);
  std::filesystem::remove(dir.file("R2.csv"));
  EXPECT_EQ(error_code([&] { read_decomposition(dir.str()); }), Errc::IoError);
}

TEST(Sweep, GridAndSeedsAreDeterministic) {
  EXPECT_EQ(sweep_grid().size(), 10u);
  EXPECT_DOUBLE_EQ(sweep_grid().front(), 0.1);
  EXPECT_DOUBLE_EQ(sweep_grid().back(), 1.0);
  SimConfig base;
  base.n = 40;
  base.target_degree = 8.0;
  SweepOptions opt;
  opt.kind = SweepKind::delta;
  opt.reps = 2;
  const auto rows = run_sweep(base, opt);
  ASSERT_EQ(rows.size(), 10u * 2u * 4u);
  EXPECT_EQ(rows[0].method, "spectral");
  EXPECT_EQ(rows[1].method, "spectral_opt");
  EXPECT_EQ(rows[4].rep, 1);
  opt.threads = 3;
  const auto threaded = run_sweep(base, opt);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(threaded[i].method, rows[i].method);
    EXPECT_TRUE(threaded[i].d_joint == rows[i].d_joint ||
                (std::isnan(threaded[i].d_joint) && std::isnan(rows[i].d_joint)));
  }
  std::ostringstream csv;
  write_sweep_csv(rows, SweepKind::delta, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "setting,delta,method,dM,dR1,dR2,rep");

  const auto summary = summarize(rows, 0);
  EXPECT_EQ(summary.size(), 40u);
  EXPECT_EQ(summary.at({0.1, "spectral"}).count, 2);
}

TEST(Sweep, BaselineDistancesAgainstMatchingBlocks) {
  SimConfig cfg;
  cfg.n = 40;
  cfg.target_degree = 8.0;
  const auto rows = run_replication(cfg, 1.0, 0);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.d_joint)) << r.method;
    EXPECT_GE(r.d_joint, 0.0);
    EXPECT_LE(r.d_joint, std::sqrt(2.0) + 1e-12);
  }
  EXPECT_EQ(parse_sweep_kind("s2"), SweepKind::s2);
  EXPECT_EQ(error_code([] { parse_sweep_kind("tau"); }), Errc::ParseError);
  SweepOptions bad;
  bad.reps = 0;
  EXPECT_EQ(error_code([&] { run_sweep(cfg, bad); }), Errc::InvalidArgument);
}
