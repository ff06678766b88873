#pragma once

// Data ingestion (edge lists, dense matrices, covariate tables), the
// preprocessing pipeline, and plain-text serialization of results.
//
// Pipeline order: read network → symmetrize → log1p → read covariates →
// dummy-encode → intersect nodes → log1p numeric covariates → standardize.

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jinet/model.hpp"
#include "jinet/simgen.hpp"

namespace jinet {

inline constexpr const char* kToolVersion = "0.1.0";

enum class SymmetrizeMode { add_transpose, average, none };
enum class RankPolicy { auto_elbow, manual };

inline std::string to_string(SymmetrizeMode m) {
  switch (m) {
    case SymmetrizeMode::add_transpose: return "add_transpose";
    case SymmetrizeMode::average: return "average";
    case SymmetrizeMode::none: return "none";
  }
  return "none";
}

inline SymmetrizeMode parse_symmetrize_mode(const std::string& s) {
  if (s == "add_transpose") return SymmetrizeMode::add_transpose;
  if (s == "average") return SymmetrizeMode::average;
  if (s == "none") return SymmetrizeMode::none;
  throw Error(Errc::ParseError, "unknown symmetrize mode '" + s + "'");
}

struct PipelineConfig {
  bool log_transform_network = true;
  bool log_transform_numeric_covariates = true;
  SymmetrizeMode symmetrize = SymmetrizeMode::add_transpose;
  bool standardize_columns = true;
  bool standardize_dummies = true;
  std::vector<std::string> categorical_columns;
  std::optional<Ranks> ranks;
  RankPolicy rank_policy = RankPolicy::auto_elbow;

  void validate() const {
    detail::require(rank_policy != RankPolicy::manual || ranks.has_value(), Errc::InvalidArgument,
                    "manual rank policy requires ranks");
  }
};

/// A network as read from disk: node ids and the (possibly directed) weights.
struct RawNetwork {
  std::vector<std::string> ids;
  Matrix weights;
};

/// Covariates with node ids; `is_dummy[j]` marks indicator columns.
struct CovariateTable {
  std::vector<std::string> ids;
  CovariateMatrix values;
  std::vector<bool> is_dummy;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == sep && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return in;
}

inline bool getline_clean(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline std::string location(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

}  // namespace detail

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Reads `source<TAB>target<TAB>weight` lines after a one-line header.
/// Node ids get indices in order of first appearance; repeated pairs add
/// up. With directed_input = false each line also contributes to (j, i).
inline RawNetwork read_edge_list(const std::string& path, bool directed_input = true) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!detail::getline_clean(in, line)) throw Error(Errc::EmptyGraph, path + " is empty");

  std::unordered_map<std::string, Index> index;
  RawNetwork net;
  struct Entry {
    Index i, j;
    double w;
  };
  std::vector<Entry> entries;
  auto node = [&](const std::string& id) {
    auto [it, inserted] = index.emplace(id, static_cast<Index>(net.ids.size()));
    if (inserted) net.ids.push_back(id);
    return it->second;
  };

  std::size_t line_no = 1;
  while (detail::getline_clean(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) {
      throw Error(Errc::ParseError, detail::location(path, line_no) + ": expected 3 tab-separated fields, got " +
                                        std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw Error(Errc::ParseError, detail::location(path, line_no) + ": empty node id");
    }
    const auto w = detail::parse_double(fields[2]);
    if (!w || !std::isfinite(*w)) {
      throw Error(Errc::ParseError, detail::location(path, line_no) + ": bad weight '" + fields[2] + "'");
    }
    if (*w < 0.0) {
      throw Error(Errc::NegativeWeight, detail::location(path, line_no) + ": weight " + fields[2] + " is negative");
    }
    const Index i = node(fields[0]);
    const Index j = node(fields[1]);
    entries.push_back({i, j, *w});
  }
  if (net.ids.empty()) throw Error(Errc::EmptyGraph, path + " has no edges");

  const auto n = static_cast<Index>(net.ids.size());
  net.weights = Matrix::Zero(n, n);
  for (const Entry& e : entries) {
    net.weights(e.i, e.j) += e.w;
    if (!directed_input && e.i != e.j) net.weights(e.j, e.i) += e.w;
  }
  return net;
}

/// Reads a comma-separated numeric matrix without header.
inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (detail::getline_clean(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& f : detail::split(line, ',')) {
      const auto v = detail::parse_double(f);
      if (!v) throw Error(Errc::ParseError, detail::location(path, line_no) + ": bad number '" + f + "'");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(Errc::ParseError, detail::location(path, line_no) + ": expected " +
                                        std::to_string(rows.front().size()) + " values, got " +
                                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

/// Writes a matrix as comma-separated rows in shortest round-trip form.
inline void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line.push_back(',');
      line += format_double(m(i, j));
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

/// Dense square network file; node ids are "1".."n".
inline RawNetwork read_dense_network(const std::string& path) {
  Matrix m = read_matrix_csv(path);
  detail::require(m.size() > 0, Errc::EmptyGraph, path + " has no entries");
  detail::require(m.rows() == m.cols(), Errc::DimensionMismatch, path + " is not square: " + detail::dims(m));
  detail::require(m.allFinite(), Errc::ParseError, path + " has non-finite entries");
  RawNetwork net{{}, std::move(m)};
  for (Index i = 0; i < net.weights.rows(); ++i) net.ids.push_back(std::to_string(i + 1));
  return net;
}

inline AdjacencyMatrix symmetrize(const Matrix& a, SymmetrizeMode mode) {
  detail::require(a.rows() == a.cols(), Errc::DimensionMismatch, "expected a square matrix, got " + detail::dims(a));
  switch (mode) {
    case SymmetrizeMode::add_transpose: return AdjacencyMatrix(Matrix(a + a.transpose()));
    case SymmetrizeMode::average: return AdjacencyMatrix(Matrix(0.5 * (a + a.transpose())));
    case SymmetrizeMode::none: break;
  }
  return AdjacencyMatrix(a);
}

inline Matrix log1p_matrix(const Matrix& a) {
  const Index negatives = (a.array() < 0.0).count();
  detail::require(negatives == 0, Errc::NegativeEntry,
                  std::to_string(negatives) + " entries are negative; log(1+x) needs x >= 0");
  return a.unaryExpr([](double v) { return std::log1p(v); });
}

/// Comma-separated table with a header row; the first column is the node id.
/// Listed categorical columns become one indicator column per level (levels
/// in order of first appearance, all kept), appended after the numeric ones.
inline CovariateTable read_covariates(const std::string& path, const std::vector<std::string>& categorical_columns = {}) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!detail::getline_clean(in, line)) throw Error(Errc::ParseError, path + " is empty");
  const auto header = detail::split(line, ',');
  detail::require(header.size() >= 2, Errc::ParseError, path + ": header needs an id column and at least one covariate");

  std::vector<bool> categorical(header.size(), false);
  for (const auto& name : categorical_columns) {
    const auto it = std::find(header.begin() + 1, header.end(), name);
    detail::require(it != header.end(), Errc::ParseError, path + ": categorical column '" + name + "' not in header");
    categorical[static_cast<std::size_t>(it - header.begin())] = true;
  }

  std::vector<std::string> ids;
  std::vector<std::vector<double>> numeric;
  std::vector<std::vector<std::string>> labels;
  std::size_t line_no = 1;
  while (detail::getline_clean(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != header.size()) {
      throw Error(Errc::ParseError, detail::location(path, line_no) + ": expected " + std::to_string(header.size()) +
                                        " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw Error(Errc::ParseError, detail::location(path, line_no) + ": empty node id");
    ids.push_back(fields[0]);
    std::vector<double> num;
    std::vector<std::string> cat;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      if (categorical[c]) {
        if (fields[c].empty()) {
          throw Error(Errc::ParseError, detail::location(path, line_no) + ": empty level in '" + header[c] + "'");
        }
        cat.push_back(fields[c]);
      } else {
        const auto v = detail::parse_double(fields[c]);
        if (!v || !std::isfinite(*v)) {
          throw Error(Errc::ParseError, detail::location(path, line_no) + ": column '" + header[c] +
                                            "' has non-numeric value '" + fields[c] + "'");
        }
        num.push_back(*v);
      }
    }
    numeric.push_back(std::move(num));
    labels.push_back(std::move(cat));
  }
  detail::require(!ids.empty(), Errc::ParseError, path + " has no data rows");
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& id : ids) {
      detail::require(++seen[id] == 1, Errc::ParseError, path + ": duplicate node id '" + id + "'");
    }
  }

  std::vector<std::string> names;
  std::vector<bool> is_dummy;
  std::vector<std::size_t> cat_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (categorical[c]) {
      cat_cols.push_back(c);
    } else {
      names.push_back(header[c]);
      is_dummy.push_back(false);
    }
  }
  const std::size_t n_numeric = names.size();
  std::vector<std::vector<std::string>> levels(cat_cols.size());
  for (std::size_t k = 0; k < cat_cols.size(); ++k) {
    for (const auto& row : labels) {
      if (std::find(levels[k].begin(), levels[k].end(), row[k]) == levels[k].end()) levels[k].push_back(row[k]);
    }
    for (const auto& level : levels[k]) {
      names.push_back(header[cat_cols[k]] + "=" + level);
      is_dummy.push_back(true);
    }
  }

  const auto n = static_cast<Index>(ids.size());
  Matrix x = Matrix::Zero(n, static_cast<Index>(names.size()));
  for (Index i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < n_numeric; ++j) x(i, static_cast<Index>(j)) = numeric[si][j];
    std::size_t offset = n_numeric;
    for (std::size_t k = 0; k < cat_cols.size(); ++k) {
      const auto pos = std::find(levels[k].begin(), levels[k].end(), labels[si][k]) - levels[k].begin();
      x(i, static_cast<Index>(offset + static_cast<std::size_t>(pos))) = 1.0;
      offset += levels[k].size();
    }
  }
  return CovariateTable{std::move(ids), CovariateMatrix(std::move(x), std::move(names)), std::move(is_dummy)};
}

/// Writes covariates with a header and an id column.
inline void write_covariates(const CovariateTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  out << "id";
  for (const auto& name : t.values.column_names()) out << ',' << name;
  out << '\n';
  const Matrix& x = t.values.entries();
  for (Index i = 0; i < x.rows(); ++i) {
    out << t.ids[static_cast<std::size_t>(i)];
    for (Index j = 0; j < x.cols(); ++j) out << ',' << format_double(x(i, j));
    out << '\n';
  }
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

/// Centers each column and scales it to unit sample standard deviation.
/// Columns with skip[j] = true are left untouched.
inline CovariateMatrix standardize_columns(const CovariateMatrix& x, const std::vector<bool>& skip = {}) {
  const Matrix& v = x.entries();
  const Index n = v.rows();
  detail::require(n >= 2, Errc::ConstantColumn, "standardization needs at least two rows");
  Matrix out = v;
  for (Index j = 0; j < v.cols(); ++j) {
    if (!skip.empty() && skip[static_cast<std::size_t>(j)]) continue;
    const double mean = v.col(j).mean();
    const double sd = std::sqrt((v.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
    detail::require(sd > 1e-12 * std::max(1.0, std::abs(mean)), Errc::ConstantColumn,
                    "column '" + x.column_names()[static_cast<std::size_t>(j)] + "' is constant");
    out.col(j) = (v.col(j).array() - mean) / sd;
  }
  return CovariateMatrix(std::move(out), x.column_names());
}

/// Network and covariates restricted to the nodes present in both, in the
/// network's node order.
struct AlignedData {
  std::vector<std::string> ids;
  AdjacencyMatrix A;
  CovariateTable covariates;
  Index dropped_from_network = 0;
  Index dropped_from_covariates = 0;
};

inline AlignedData align_nodes(const std::vector<std::string>& network_ids, const AdjacencyMatrix& a,
                               const CovariateTable& cov) {
  detail::require(static_cast<Index>(network_ids.size()) == a.n(), Errc::LengthMismatch,
                  "network id list does not match the matrix");
  std::unordered_map<std::string, Index> cov_index;
  for (std::size_t i = 0; i < cov.ids.size(); ++i) cov_index.emplace(cov.ids[i], static_cast<Index>(i));

  std::vector<Index> keep_net, keep_cov;
  for (std::size_t i = 0; i < network_ids.size(); ++i) {
    const auto it = cov_index.find(network_ids[i]);
    if (it == cov_index.end()) continue;
    keep_net.push_back(static_cast<Index>(i));
    keep_cov.push_back(it->second);
  }
  detail::require(!keep_net.empty(), Errc::NoOverlap, "network and covariates share no node ids");

  const auto m = static_cast<Index>(keep_net.size());
  Matrix sub(m, m);
  Matrix xs(m, cov.values.p());
  std::vector<std::string> ids;
  for (Index i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    ids.push_back(network_ids[static_cast<std::size_t>(keep_net[si])]);
    xs.row(i) = cov.values.entries().row(keep_cov[si]);
    for (Index j = 0; j < m; ++j) sub(i, j) = a.entries()(keep_net[si], keep_net[static_cast<std::size_t>(j)]);
  }
  CovariateTable table{ids, CovariateMatrix(std::move(xs), cov.values.column_names()), cov.is_dummy};
  return AlignedData{ids, AdjacencyMatrix(std::move(sub)), std::move(table),
                     static_cast<Index>(network_ids.size()) - m, static_cast<Index>(cov.ids.size()) - m};
}

enum class NetworkFormat { edge_list, dense };

inline RawNetwork read_network(const std::string& path, NetworkFormat format) {
  return format == NetworkFormat::edge_list ? read_edge_list(path, true) : read_dense_network(path);
}

/// Symmetrization and optional log(1 + x) of the raw weights.
inline AdjacencyMatrix prepare_network(const RawNetwork& raw, const PipelineConfig& cfg) {
  AdjacencyMatrix a = symmetrize(raw.weights, cfg.symmetrize);
  if (cfg.log_transform_network) a = AdjacencyMatrix(log1p_matrix(a.entries()));
  return a;
}

/// log(1 + x) of the numeric columns and column standardization, in place.
inline void prepare_covariates(CovariateTable& t, const PipelineConfig& cfg) {
  if (cfg.log_transform_numeric_covariates) {
    Matrix x = t.values.entries();
    for (Index j = 0; j < x.cols(); ++j) {
      if (t.is_dummy[static_cast<std::size_t>(j)]) continue;
      const Index negatives = (x.col(j).array() < 0.0).count();
      detail::require(negatives == 0, Errc::NegativeEntry,
                      "column '" + t.values.column_names()[static_cast<std::size_t>(j)] +
                          "' has negative values; disable the covariate log transform");
      x.col(j) = x.col(j).unaryExpr([](double v) { return std::log1p(v); });
    }
    t.values = CovariateMatrix(std::move(x), t.values.column_names());
  }
  if (cfg.standardize_columns) {
    std::vector<bool> skip(t.is_dummy.size(), false);
    if (!cfg.standardize_dummies) skip = t.is_dummy;
    t.values = standardize_columns(t.values, skip);
  }
}

/// Runs the full preprocessing pipeline on files.
inline AlignedData load_inputs(const std::string& network_path, NetworkFormat format,
                               const std::string& covariates_path, const PipelineConfig& cfg) {
  cfg.validate();
  const RawNetwork raw = read_network(network_path, format);
  const AdjacencyMatrix a = prepare_network(raw, cfg);
  const CovariateTable cov = read_covariates(covariates_path, cfg.categorical_columns);
  AlignedData data = align_nodes(raw.ids, a, cov);
  prepare_covariates(data.covariates, cfg);
  return data;
}

// ---- flat key = value records ----

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline void write_key_values(const KeyValues& kv, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

/// Parses `key = value` lines; blank lines and lines starting with '#' are
/// ignored.
inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (detail::getline_clean(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ParseError, detail::location(path, line_no) + ": expected key = value");
    }
    kv.emplace_back(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
  return kv;
}

inline std::optional<std::string> lookup(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  return std::nullopt;
}

inline KeyValues to_key_values(const SimConfig& c) {
  return {{"n", std::to_string(c.n)},
          {"p", std::to_string(c.p)},
          {"setting", to_string(c.setting)},
          {"delta", format_double(c.delta)},
          {"q1", format_double(c.q1)},
          {"q2", format_double(c.q2)},
          {"s1", format_double(c.s1)},
          {"s2", format_double(c.s2)},
          {"tau", format_double(c.tau)},
          {"target_degree", format_double(c.target_degree)},
          {"seed", std::to_string(c.seed)}};
}

namespace detail {

inline double parse_real_field(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v) throw Error(Errc::ParseError, "key '" + key + "': '" + value + "' is not a number");
  return *v;
}

inline std::uint64_t parse_uint_field(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(Errc::ParseError, "key '" + key + "': '" + value + "' is not a nonnegative integer");
  }
  return v;
}

}  // namespace detail

/// Builds a SimConfig from key = value pairs. The setting (when present) is
/// applied first so its signal strengths act as defaults for the rest.
inline SimConfig sim_config_from_key_values(const KeyValues& kv) {
  SimConfig c;
  if (const auto s = lookup(kv, "setting")) c = SimConfig::defaults(parse_setting(*s));
  for (const auto& [k, v] : kv) {
    if (k == "setting") continue;
    if (k == "n") c.n = static_cast<Index>(detail::parse_uint_field(k, v));
    else if (k == "p") c.p = static_cast<Index>(detail::parse_uint_field(k, v));
    else if (k == "delta") c.delta = detail::parse_real_field(k, v);
    else if (k == "q1") c.q1 = detail::parse_real_field(k, v);
    else if (k == "q2") c.q2 = detail::parse_real_field(k, v);
    else if (k == "s1") c.s1 = detail::parse_real_field(k, v);
    else if (k == "s2") c.s2 = detail::parse_real_field(k, v);
    else if (k == "tau") c.tau = detail::parse_real_field(k, v);
    else if (k == "target_degree") c.target_degree = detail::parse_real_field(k, v);
    else if (k == "seed") c.seed = detail::parse_uint_field(k, v);
    else throw Error(Errc::ParseError, "unknown config key '" + k + "'");
  }
  c.validate();
  return c;
}

// ---- digests ----

/// Lower-case hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(Errc::IoError, "sha256 init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

// ---- decomposition directories ----

/// Writes M.csv, R1.csv, R2.csv and manifest.txt into an existing directory.
/// The manifest gets the ranks and tool version followed by `extra`.
inline void write_decomposition(const Decomposition& d, const std::string& dir, const KeyValues& extra = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Errc::IoError, "output directory '" + dir + "' does not exist");
  const fs::path base(dir);
  write_matrix_csv(d.joint.columns(), (base / "M.csv").string());
  write_matrix_csv(d.network.columns(), (base / "R1.csv").string());
  write_matrix_csv(d.covariate.columns(), (base / "R2.csv").string());
  KeyValues kv{{"tool", "jinet"},
               {"version", kToolVersion},
               {"n", std::to_string(d.joint.n())},
               {"r_M", std::to_string(d.joint.r())},
               {"r_1", std::to_string(d.network.r())},
               {"r_2", std::to_string(d.covariate.r())}};
  kv.insert(kv.end(), extra.begin(), extra.end());
  write_key_values(kv, (base / "manifest.txt").string());
}

/// Reads M.csv, R1.csv and R2.csv back. Orthonormality is checked.
inline Decomposition read_decomposition(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Errc::IoError, "directory '" + dir + "' does not exist");
  const fs::path base(dir);
  auto load = [&](const char* name) {
    const fs::path p = base / name;
    if (!fs::exists(p)) throw Error(Errc::IoError, "missing " + p.string());
    return OrthonormalBasis(read_matrix_csv(p.string()));
  };
  return Decomposition{load("M.csv"), load("R1.csv"), load("R2.csv")};
}

}  // namespace jinet
