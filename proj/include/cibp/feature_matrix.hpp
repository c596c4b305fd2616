#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cibp {

/// Binary feature-allocation matrix: a fixed number of rows (objects) and a
/// dynamic, ordered list of columns (features). Columns are stored as packed
/// 64-bit words, row 0 in the most significant bit of word 0, so comparing
/// word vectors lexicographically compares the column scores
/// sum_j xi_jk 2^(p-1-j).
class FeatureMatrix {
 public:
  using Column = std::vector<std::uint64_t>;

  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t rows) : rows_(rows) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  std::size_t words_per_column() const { return (rows_ + 63) / 64; }

  bool get(std::size_t row, std::size_t col) const {
    return (columns_[col][row >> 6] >> bit_shift(row)) & 1u;
  }

  void set(std::size_t row, std::size_t col, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << bit_shift(row);
    if (value)
      columns_[col][row >> 6] |= mask;
    else
      columns_[col][row >> 6] &= ~mask;
  }

  /// Appends an all-zero column; returns its index.
  std::size_t append_column() {
    columns_.emplace_back(words_per_column(), 0);
    return columns_.size() - 1;
  }

  /// Number of ones in column k (the column count m_k).
  std::size_t column_ones(std::size_t col) const;

  bool column_is_zero(std::size_t col) const;

  /// Per-column counts of ones.
  std::vector<std::size_t> column_counts() const;

  /// Number of nonzero columns.
  std::size_t nonzero_column_count() const;

  const Column& column(std::size_t col) const { return columns_[col]; }

  /// Column score order: returns true when column a has a strictly higher
  /// score than column b (row 0 read as the most significant bit).
  bool column_greater(std::size_t a, std::size_t b) const {
    return columns_[a] > columns_[b];
  }

  bool operator==(const FeatureMatrix& other) const = default;

 private:
  static std::size_t bit_shift(std::size_t row) { return 63 - (row & 63); }

  std::size_t rows_ = 0;
  std::vector<Column> columns_;
};

/// Left-ordered representative of a column-permutation equivalence class:
/// all-zero columns dropped, remaining columns sorted by descending score,
/// plus the multiplicity of each distinct column pattern.
struct LofClass {
  FeatureMatrix matrix;
  /// Multiplicities of the distinct column patterns, in matrix column order
  /// (one entry per run of equal columns). Their sum is the nonzero column
  /// count.
  std::vector<std::size_t> multiplicities;

  std::size_t k_plus() const { return matrix.cols(); }

  /// Stable 64-bit fingerprint of the left-ordered bit pattern. Collisions
  /// are checked against exhaustive enumeration at desk scales.
  std::uint64_t fingerprint() const;

  bool operator==(const LofClass& other) const = default;
};

/// Drops all-zero columns, sorts the rest by descending score and computes
/// pattern multiplicities. Idempotent; invariant under any column
/// permutation of the input.
LofClass left_order(const FeatureMatrix& matrix);

/// Matrix with rows rearranged so row i of the result is row perm[i] of the
/// input. perm must be a permutation of 0..rows-1.
FeatureMatrix permute_rows(const FeatureMatrix& matrix, std::span<const std::size_t> perm);

/// Text format: first line "p K", then p lines of K 0/1 characters.
void write_matrix(std::ostream& out, const FeatureMatrix& matrix);

/// Parses the text format; throws MatrixParseError with a 1-based line
/// number on malformed input.
FeatureMatrix read_matrix(std::istream& in);

struct MatrixParseError : std::runtime_error {
  MatrixParseError(const std::string& message, std::size_t line_number);
  std::size_t line;
};

}  // namespace cibp
