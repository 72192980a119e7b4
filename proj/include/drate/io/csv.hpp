#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "drate/core.hpp"

namespace drate::io {

// shortest round-trip decimal representation
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw core::DataError("cannot open for writing: " + path);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw core::DataError("write failure on close");
  }

 private:
  std::ofstream out_;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline bool parse_double(std::string_view s, double& v) {
  // trim ASCII whitespace
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  if (s.empty()) return false;
  if (s == "NA" || s == "na" || s == "nan" || s == "NaN" || s == "NAN")
    return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size() &&
         std::isfinite(v);
}

struct LoadedDataset {
  core::CausalDataset data;
  int rows_dropped = 0;
};

// Reads a headered CSV and assembles a dataset from named columns.  Rows
// with unparseable or missing entries in any used column are dropped.
inline LoadedDataset load_csv_dataset(const std::string& path,
                                      const std::string& outcome_col,
                                      const std::string& treatment_col,
                                      std::vector<std::string> covariate_cols) {
  std::ifstream in(path);
  if (!in) throw core::DataError("cannot open for reading: " + path);

  std::string line;
  if (!std::getline(in, line)) throw core::DataError("empty file: " + path);
  const auto header = split_csv_line(line);

  auto col_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw core::DataError("column not found: " + name);
  };

  const int yi = col_index(outcome_col);
  const int ai = col_index(treatment_col);
  if (covariate_cols.empty())
    for (const auto& h : header)
      if (h != outcome_col && h != treatment_col) covariate_cols.push_back(h);
  if (covariate_cols.empty())
    throw core::DataError("no covariate columns available");
  std::vector<int> xi;
  for (const auto& name : covariate_cols) xi.push_back(col_index(name));

  std::vector<double> ys, as;
  std::vector<std::vector<double>> xs;
  int dropped = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const auto need = static_cast<std::size_t>(
        std::max({yi, ai, *std::max_element(xi.begin(), xi.end())}) + 1);
    bool ok = fields.size() >= need;
    double y = 0, a = 0;
    std::vector<double> xrow(xi.size());
    if (ok) ok = parse_double(fields[static_cast<std::size_t>(yi)], y);
    if (ok) ok = parse_double(fields[static_cast<std::size_t>(ai)], a);
    for (std::size_t j = 0; ok && j < xi.size(); ++j)
      ok = parse_double(fields[static_cast<std::size_t>(xi[j])], xrow[j]);
    if (!ok) {
      ++dropped;
      continue;
    }
    ys.push_back(y);
    as.push_back(a);
    xs.push_back(std::move(xrow));
  }

  const auto n = static_cast<Eigen::Index>(ys.size());
  const auto p = static_cast<Eigen::Index>(covariate_cols.size());
  if (n == 0) throw core::DataError("no usable rows in " + path);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n), a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = ys[static_cast<std::size_t>(i)];
    a[i] = as[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < p; ++j)
      x(i, j) = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return LoadedDataset{core::validate_dataset(x, a, y, covariate_cols),
                       dropped};
}

}  // namespace drate::io
