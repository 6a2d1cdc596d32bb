#include "gdf/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "gdf/errors.hpp"

namespace gdf::io {

namespace {

void write_header(std::ofstream& out, const std::map<std::string, std::string>& meta,
                  Eigen::Index rows, Eigen::Index cols, bool complex) {
  out << "gdfqkd-matrix 1\n";
  for (const auto& [k, v] : meta) out << k << ": " << v << "\n";
  out << "rows: " << rows << "\n";
  out << "cols: " << cols << "\n";
  out << "complex: " << (complex ? 1 : 0) << "\n";
  out << "data:\n";
  out << std::setprecision(17);
}

}  // namespace

void write_matrix(const std::string& path, const Eigen::MatrixXcd& m,
                  const std::map<std::string, std::string>& meta, bool complex) {
  std::ofstream out(path);
  require(out.good(), "io", "cannot open " + path + " for writing");
  write_header(out, meta, m.rows(), m.cols(), complex);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      if (complex)
        out << m(r, c).real() << ' ' << m(r, c).imag();
      else
        out << m(r, c).real();
    }
    out << '\n';
  }
  require(out.good(), "io", "write to " + path + " failed");
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m,
                  const std::map<std::string, std::string>& meta) {
  write_matrix(path, m.cast<std::complex<double>>(), meta, false);
}

MatrixFile read_matrix(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io", "cannot open " + path);
  std::string line;
  std::getline(in, line);
  require(line == "gdfqkd-matrix 1", "io", "unrecognized matrix header in " + path);
  MatrixFile out;
  Eigen::Index rows = -1, cols = -1;
  while (std::getline(in, line)) {
    if (line == "data:") break;
    const auto colon = line.find(": ");
    require(colon != std::string::npos, "io", "malformed header line: " + line);
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "rows")
      rows = std::stoll(value);
    else if (key == "cols")
      cols = std::stoll(value);
    else if (key == "complex")
      out.complex = value == "1";
    else
      out.meta[key] = value;
  }
  require(rows >= 0 && cols >= 0, "io", "matrix dimensions missing in " + path);
  out.values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double re = 0.0, im = 0.0;
      in >> re;
      if (out.complex) in >> im;
      out.values(r, c) = {re, im};
    }
  require(!in.fail(), "io", "matrix data truncated in " + path);
  return out;
}

}  // namespace gdf::io
