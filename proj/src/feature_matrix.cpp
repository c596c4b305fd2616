#include "cibp/feature_matrix.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "cibp/rng.hpp"

namespace cibp {

std::size_t FeatureMatrix::column_ones(std::size_t col) const {
  std::size_t n = 0;
  for (const std::uint64_t w : columns_[col]) n += std::popcount(w);
  return n;
}

bool FeatureMatrix::column_is_zero(std::size_t col) const {
  for (const std::uint64_t w : columns_[col])
    if (w != 0) return false;
  return true;
}

std::vector<std::size_t> FeatureMatrix::column_counts() const {
  std::vector<std::size_t> counts(cols());
  for (std::size_t k = 0; k < cols(); ++k) counts[k] = column_ones(k);
  return counts;
}

std::size_t FeatureMatrix::nonzero_column_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < cols(); ++k)
    if (!column_is_zero(k)) ++n;
  return n;
}

std::uint64_t LofClass::fingerprint() const {
  std::uint64_t h = mix64(matrix.rows());
  for (std::size_t k = 0; k < matrix.cols(); ++k) {
    h = mix64(h ^ 0x636f6c756d6e736bULL);
    for (const std::uint64_t w : matrix.column(k)) h = mix64(h ^ w);
  }
  return h;
}

LofClass left_order(const FeatureMatrix& matrix) {
  std::vector<std::size_t> order;
  order.reserve(matrix.cols());
  for (std::size_t k = 0; k < matrix.cols(); ++k)
    if (!matrix.column_is_zero(k)) order.push_back(k);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return matrix.column_greater(a, b); });

  LofClass cls;
  cls.matrix = FeatureMatrix(matrix.rows());
  for (const std::size_t k : order) {
    const std::size_t dst = cls.matrix.append_column();
    for (std::size_t j = 0; j < matrix.rows(); ++j)
      if (matrix.get(j, k)) cls.matrix.set(j, dst, true);
    if (!cls.multiplicities.empty() &&
        cls.matrix.column(dst) == cls.matrix.column(dst - 1))
      ++cls.multiplicities.back();
    else
      cls.multiplicities.push_back(1);
  }
  return cls;
}

FeatureMatrix permute_rows(const FeatureMatrix& matrix, std::span<const std::size_t> perm) {
  if (perm.size() != matrix.rows())
    throw std::invalid_argument("permute_rows: permutation size mismatch");
  FeatureMatrix out(matrix.rows());
  for (std::size_t k = 0; k < matrix.cols(); ++k) {
    const std::size_t dst = out.append_column();
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      if (matrix.get(perm[i], k)) out.set(i, dst, true);
  }
  return out;
}

void write_matrix(std::ostream& out, const FeatureMatrix& matrix) {
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (std::size_t j = 0; j < matrix.rows(); ++j) {
    for (std::size_t k = 0; k < matrix.cols(); ++k)
      out << (matrix.get(j, k) ? '1' : '0');
    out << '\n';
  }
}

MatrixParseError::MatrixParseError(const std::string& message, std::size_t line_number)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
      line(line_number) {}

FeatureMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixParseError("missing header line", 1);
  std::istringstream header(line);
  long long p = -1;
  long long k = -1;
  if (!(header >> p >> k) || p < 0 || k < 0)
    throw MatrixParseError("header must be two nonnegative integers \"p K\"", 1);
  std::string trailing;
  if (header >> trailing) throw MatrixParseError("trailing content after header", 1);

  FeatureMatrix matrix(static_cast<std::size_t>(p));
  for (long long c = 0; c < k; ++c) matrix.append_column();
  for (long long j = 0; j < p; ++j) {
    const std::size_t line_number = static_cast<std::size_t>(j) + 2;
    if (!std::getline(in, line)) throw MatrixParseError("missing matrix row", line_number);
    if (static_cast<long long>(line.size()) != k)
      throw MatrixParseError("expected " + std::to_string(k) + " characters", line_number);
    for (long long c = 0; c < k; ++c) {
      const char ch = line[static_cast<std::size_t>(c)];
      if (ch != '0' && ch != '1')
        throw MatrixParseError("entries must be 0 or 1", line_number);
      if (ch == '1')
        matrix.set(static_cast<std::size_t>(j), static_cast<std::size_t>(c), true);
    }
  }
  return matrix;
}

}  // namespace cibp
