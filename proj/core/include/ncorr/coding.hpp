#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ncorr/gf.hpp"

namespace ncorr::coding {

/// Raised when a coded batch contradicts itself (an inconsistent linear
/// system), which cannot happen for genuinely encoded data.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense L x N matrix of coding coefficients over a Galois field.
/// The referenced Field must outlive the matrix.
class CodingMatrix {
 public:
  CodingMatrix(std::size_t rows, std::size_t cols, const gf::Field& field);

  /// I.i.d. uniform entries; a seeded engine makes the draw reproducible.
  static CodingMatrix random(std::size_t rows, std::size_t cols, const gf::Field& field,
                             std::mt19937_64& g);
  static CodingMatrix identity(std::size_t n, const gf::Field& field);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const gf::Field& field() const { return *field_; }

  std::uint8_t at(std::size_t l, std::size_t n) const { return a_[l * cols_ + n]; }
  void set(std::size_t l, std::size_t n, std::uint8_t v);
  std::span<const std::uint8_t> row(std::size_t l) const {
    return std::span<const std::uint8_t>(a_.data() + l * cols_, cols_);
  }
  std::size_t row_weight(std::size_t l) const;

 private:
  std::size_t rows_, cols_;
  const gf::Field* field_;
  std::vector<std::uint8_t> a_;
  friend class Preprocessor;
};

/// y = A x over the field.
std::vector<std::uint8_t> encode(const CodingMatrix& a, std::span<const std::uint8_t> x);

std::size_t rank(const CodingMatrix& a);

/// Unique solution of A x = y when rank(A) = N, std::nullopt when the system
/// is rank deficient. Throws IntegrityError if the system is inconsistent.
std::optional<std::vector<std::uint8_t>> exact_solve(const CodingMatrix& a,
                                                     std::span<const std::uint8_t> y);

/// Row reduction of a coding matrix with the row-operation log kept around,
/// so the same reduction can be replayed onto any right-hand side. Reduction
/// runs Gaussian elimination to row echelon form (unit pivots, zero rows
/// dropped as non-innovative), then sweeps the trailing columns bottom-up to
/// thin out entries above the diagonal while zeros below it are preserved.
class Preprocessor {
 public:
  explicit Preprocessor(const CodingMatrix& a);

  const CodingMatrix& reduced() const { return reduced_; }  // L' x N
  std::size_t rank() const { return rank_; }
  std::size_t dropped_rows() const { return original_rows_ - rank_; }

  /// Applies the recorded row operations to a right-hand side and returns its
  /// first L' entries. Throws IntegrityError when a dropped (dependent) row
  /// maps to a nonzero value.
  std::vector<std::uint8_t> apply(std::span<const std::uint8_t> y) const;

 private:
  struct RowOp {
    enum Kind : std::uint8_t { kSwap, kScale, kAddMul } kind;
    std::uint32_t i, j;
    std::uint8_t c;
  };
  CodingMatrix reduced_;
  std::vector<RowOp> ops_;
  std::size_t original_rows_;
  std::size_t rank_ = 0;
};

/// Coding matrix plus the coded symbols it produced, with optional
/// preprocessed forms that define the same solution set.
struct CodedBatch {
  CodingMatrix a;
  std::vector<std::uint8_t> y;
  std::optional<CodingMatrix> a_prime;
  std::vector<std::uint8_t> y_prime;
  std::size_t non_innovative = 0;

  CodedBatch(CodingMatrix a_, std::vector<std::uint8_t> y_);
  bool preprocessed() const { return a_prime.has_value(); }
};

/// New batch with A', y' filled in.
CodedBatch preprocess(const CodedBatch& batch);

/// Debug trace: plain integer CSV of the batch (dimensions, matrix rows,
/// coded symbols, and the preprocessed forms when present).
void write_trace(const CodedBatch& batch, std::ostream& out);

}  // namespace ncorr::coding
