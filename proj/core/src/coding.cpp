#include "ncorr/coding.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "ncorr/rng.hpp"

namespace ncorr::coding {

CodingMatrix::CodingMatrix(std::size_t rows, std::size_t cols, const gf::Field& field)
    : rows_(rows), cols_(cols), field_(&field), a_(rows * cols, 0) {
  // rows may be zero: an empty batch carries no constraints.
  if (cols == 0) throw std::invalid_argument("matrix must have at least one column");
}

CodingMatrix CodingMatrix::random(std::size_t rows, std::size_t cols, const gf::Field& field,
                                  std::mt19937_64& g) {
  CodingMatrix m(rows, cols, field);
  for (auto& v : m.a_) v = static_cast<std::uint8_t>(rng::uniform_below(g, field.size()));
  return m;
}

CodingMatrix CodingMatrix::identity(std::size_t n, const gf::Field& field) {
  CodingMatrix m(n, n, field);
  for (std::size_t i = 0; i < n; ++i) m.a_[i * n + i] = 1;
  return m;
}

void CodingMatrix::set(std::size_t l, std::size_t n, std::uint8_t v) {
  if (v >= field_->size()) throw std::invalid_argument("entry outside the field");
  a_[l * cols_ + n] = v;
}

std::size_t CodingMatrix::row_weight(std::size_t l) const {
  std::size_t w = 0;
  for (std::size_t n = 0; n < cols_; ++n) {
    if (at(l, n) != 0) ++w;
  }
  return w;
}

std::vector<std::uint8_t> encode(const CodingMatrix& a, std::span<const std::uint8_t> x) {
  if (x.size() != a.cols()) {
    throw std::invalid_argument("symbol vector length " + std::to_string(x.size()) +
                                " does not match " + std::to_string(a.cols()) + " columns");
  }
  const gf::Field& f = a.field();
  std::vector<std::uint8_t> y(a.rows(), 0);
  for (std::size_t l = 0; l < a.rows(); ++l) {
    std::uint8_t acc = 0;
    for (std::size_t n = 0; n < a.cols(); ++n) {
      acc ^= f.mul(a.at(l, n), x[n]);
    }
    y[l] = acc;
  }
  return y;
}

Preprocessor::Preprocessor(const CodingMatrix& a) : reduced_(a), original_rows_(a.rows()) {
  const gf::Field& f = a.field();
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  auto& m = reduced_.a_;
  auto entry = [&](std::size_t i, std::size_t j) -> std::uint8_t& { return m[i * cols + j]; };

  auto swap_rows = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < cols; ++k) std::swap(entry(i, k), entry(j, k));
    ops_.push_back({RowOp::kSwap, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0});
  };
  auto scale_row = [&](std::size_t i, std::uint8_t c) {
    for (std::size_t k = 0; k < cols; ++k) entry(i, k) = f.mul(entry(i, k), c);
    ops_.push_back({RowOp::kScale, static_cast<std::uint32_t>(i), 0, c});
  };
  // row i -= c * row j (characteristic 2: minus is xor)
  auto add_mul_row = [&](std::size_t i, std::size_t j, std::uint8_t c) {
    for (std::size_t k = 0; k < cols; ++k) entry(i, k) ^= f.mul(c, entry(j, k));
    ops_.push_back({RowOp::kAddMul, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), c});
  };

  // Row echelon form with unit pivots; picks the first nonzero entry top-down.
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t piv = r;
    while (piv < rows && entry(piv, col) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) swap_rows(r, piv);
    if (entry(r, col) != 1) scale_row(r, f.inv(entry(r, col)));
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (entry(i, col) != 0) add_mul_row(i, r, entry(i, col));
    }
    ++r;
  }
  rank_ = r;

  // Thin the trailing columns: column N-1-j keeps the entry of row L'-1-j,
  // rows above it are cleared. Rows below the target are never touched, so
  // zeros under the diagonal survive.
  if (rank_ >= 2) {
    for (std::size_t j = 0; j + 1 < rank_; ++j) {
      const std::size_t col = cols - 1 - j;
      if (col >= cols) break;
      const std::size_t target = rank_ - 1 - j;
      const std::uint8_t pivot = entry(target, col);
      if (pivot == 0) continue;  // nothing to eliminate with
      for (std::size_t i = 0; i < target; ++i) {
        if (entry(i, col) != 0) add_mul_row(i, target, f.div(entry(i, col), pivot));
      }
    }
  }

  // Drop the all-zero rows.
  CodingMatrix out(rank_, cols, f);
  for (std::size_t i = 0; i < rank_; ++i) {
    for (std::size_t k = 0; k < cols; ++k) out.a_[i * cols + k] = entry(i, k);
  }
  reduced_ = std::move(out);
}

std::vector<std::uint8_t> Preprocessor::apply(std::span<const std::uint8_t> y) const {
  if (y.size() != original_rows_) throw std::invalid_argument("rhs length mismatch");
  const gf::Field& f = reduced_.field();
  std::vector<std::uint8_t> v(y.begin(), y.end());
  for (const RowOp& op : ops_) {
    switch (op.kind) {
      case RowOp::kSwap:
        std::swap(v[op.i], v[op.j]);
        break;
      case RowOp::kScale:
        v[op.i] = f.mul(v[op.i], op.c);
        break;
      case RowOp::kAddMul:
        v[op.i] ^= f.mul(op.c, v[op.j]);
        break;
    }
  }
  for (std::size_t i = rank_; i < original_rows_; ++i) {
    if (v[i] != 0) {
      throw IntegrityError("inconsistent system: dependent row " + std::to_string(i) +
                           " reduces to a nonzero value");
    }
  }
  v.resize(rank_);
  return v;
}

std::size_t rank(const CodingMatrix& a) {
  return Preprocessor(a).rank();
}

std::optional<std::vector<std::uint8_t>> exact_solve(const CodingMatrix& a,
                                                     std::span<const std::uint8_t> y) {
  if (y.size() != a.rows()) throw std::invalid_argument("rhs length mismatch");
  Preprocessor pre(a);
  std::vector<std::uint8_t> yp = pre.apply(y);  // throws on inconsistency
  if (pre.rank() < a.cols()) return std::nullopt;
  // Full column rank: the reduction drives A to the identity, so y' is x.
  return yp;
}

CodedBatch::CodedBatch(CodingMatrix a_, std::vector<std::uint8_t> y_)
    : a(std::move(a_)), y(std::move(y_)) {
  if (y.size() != a.rows()) throw std::invalid_argument("coded vector length mismatch");
}

CodedBatch preprocess(const CodedBatch& batch) {
  CodedBatch out(batch.a, batch.y);
  Preprocessor pre(batch.a);
  out.y_prime = pre.apply(batch.y);
  out.a_prime = pre.reduced();
  out.non_innovative = pre.dropped_rows();
  return out;
}

namespace {
void write_matrix_rows(const CodingMatrix& m, const char* tag, std::ostream& out) {
  for (std::size_t l = 0; l < m.rows(); ++l) {
    out << tag << ',' << l;
    for (std::size_t n = 0; n < m.cols(); ++n) out << ',' << static_cast<int>(m.at(l, n));
    out << '\n';
  }
}
}  // namespace

void write_trace(const CodedBatch& batch, std::ostream& out) {
  out << "dims," << batch.a.rows() << ',' << batch.a.cols() << ',' << batch.a.field().size()
      << '\n';
  write_matrix_rows(batch.a, "A", out);
  out << "y";
  for (std::uint8_t v : batch.y) out << ',' << static_cast<int>(v);
  out << '\n';
  if (batch.preprocessed()) {
    write_matrix_rows(*batch.a_prime, "Ap", out);
    out << "yp";
    for (std::uint8_t v : batch.y_prime) out << ',' << static_cast<int>(v);
    out << '\n';
    out << "non_innovative," << batch.non_innovative << '\n';
  }
}

}  // namespace ncorr::coding
