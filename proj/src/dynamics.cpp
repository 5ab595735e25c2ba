#include "swta/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "swta/error.hpp"

namespace swta {

namespace fs = std::filesystem;

Resolvent truncated_resolvent(const Matrix& w) {
  if (w.rows() != w.cols()) fail(ErrorKind::Shape, "weight matrix must be square");
  const Matrix id = Matrix::Identity(w.rows(), w.cols());
  const Matrix w2 = w * w;
  return Resolvent{id + w + w2 + w2 * w};
}

Response equilibrium_response(const Resolvent& d, const Pattern& s) {
  if (static_cast<std::size_t>(d.d.cols()) != s.size())
    fail(ErrorKind::Shape, "resolvent is " + std::to_string(d.d.cols()) + " wide, source has " +
                               std::to_string(s.size()) + " entries");
  const Vector src = Eigen::Map<const Vector>(s.values().data(), static_cast<Eigen::Index>(s.size()));
  Response r;
  r.raw = d.d * src;
  std::vector<double> act(s.size());
  for (std::size_t i = 0; i < act.size(); ++i) act[i] = std::max(0.0, r.raw(static_cast<Eigen::Index>(i)));
  r.activity = Pattern(std::move(act), s.shape());
  return r;
}

CorrelationTensor correlation_tensor(const Resolvent& d, const ActiveSet& sources) {
  const auto n = d.d.rows();
  CorrelationTensor out{Matrix::Zero(n, n), sources};
  if (sources.empty()) return out;
  Matrix cols(n, static_cast<Eigen::Index>(sources.size()));
  Eigen::Index c = 0;
  for (std::size_t k : sources.indices) {
    if (k >= static_cast<std::size_t>(d.d.cols()))
      fail(ErrorKind::Parameter, "source index " + std::to_string(k) + " out of range");
    cols.col(c++) = d.d.col(static_cast<Eigen::Index>(k));
  }
  out.t.noalias() = cols * cols.transpose();
  // exact symmetry; the product is symmetric only up to rounding
  out.t = 0.5 * (out.t + out.t.transpose()).eval();
  return out;
}

void write_matrix_csv(const Matrix& m, const fs::path& path) {
  if (m.rows() != m.cols()) fail(ErrorKind::Shape, "matrix CSV holds square matrices only");
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << m.rows() << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Unreadable, "cannot open '" + path.string() + "'");
  std::string line;
  long n = 0;
  if (!std::getline(in, line) || (std::istringstream(line) >> n, n <= 0))
    fail(ErrorKind::MalformedHeader, "'" + path.string() + "': expected matrix size on first line");
  Matrix m(n, n);
  for (long i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      fail(ErrorKind::DimensionMismatch, "'" + path.string() + "': missing row " + std::to_string(i));
    std::istringstream row(line);
    std::string tok;
    long j = 0;
    while (std::getline(row, tok, ',')) {
      if (j >= n) break;
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || !std::isfinite(v))
        fail(ErrorKind::MalformedData, "'" + path.string() + "': bad value '" + tok + "'");
      m(i, j++) = v;
    }
    if (j != n || std::getline(row, tok, ','))
      fail(ErrorKind::DimensionMismatch, "'" + path.string() + "': row " + std::to_string(i) +
                                             " does not hold " + std::to_string(n) + " values");
  }
  return m;
}

void write_matrix_pgm(const Matrix& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  const double lo = m.size() ? m.minCoeff() : 0.0;
  const double hi = m.size() ? m.maxCoeff() : 0.0;
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double u = hi > lo ? (m(i, j) - lo) / (hi - lo) : 0.5;
      out.put(static_cast<char>(std::lround(u * 255.0)));
    }
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace swta
