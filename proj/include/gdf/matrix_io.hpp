#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

namespace gdf::io {

/// Self-describing text matrix format. Layout:
///   gdfqkd-matrix 1
///   key: value            (free-form metadata, e.g. kind/n/K/eta)
///   rows: R
///   cols: C
///   complex: 0|1
///   data:
///   <row-major entries, full precision; complex entries as "re im">
/// Rows follow BasisSet order when the matrix lives over a monomial basis.
struct MatrixFile {
  std::map<std::string, std::string> meta;
  Eigen::MatrixXcd values;
  bool complex = false;
};

void write_matrix(const std::string& path, const Eigen::MatrixXcd& m,
                  const std::map<std::string, std::string>& meta, bool complex = true);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m,
                  const std::map<std::string, std::string>& meta);

MatrixFile read_matrix(const std::string& path);

}  // namespace gdf::io
