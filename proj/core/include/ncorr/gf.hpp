#pragma once

#include <cstdint>
#include <vector>

namespace ncorr::gf {

/// Arithmetic context for a Galois field GF(2^p), 1 <= p <= 8.
///
/// Elements are plain integers in [0, q-1] interpreted as polynomials over
/// GF(2). Addition is XOR; multiplication reduces modulo the field's
/// irreducible reduction polynomial. For p >= 4 multiplication goes through
/// log/antilog tables, smaller fields use direct shift-and-reduce.
///
/// A Field is immutable after construction and safe to share across threads.
class Field {
 public:
  /// Field with the default reduction polynomial for this degree
  /// (the lexicographically smallest irreducible polynomial).
  explicit Field(unsigned p);

  /// Field with a custom reduction polynomial, encoded as a bit mask with
  /// bit p set (e.g. x^4 + x + 1 -> 0b10011). Throws std::invalid_argument
  /// if the polynomial does not have degree p or is reducible.
  Field(unsigned p, unsigned reduction_poly);

  unsigned p() const { return p_; }
  unsigned size() const { return q_; }  // q = 2^p
  unsigned reduction_poly() const { return poly_; }
  bool has_tables() const { return !log_.empty(); }

  std::uint8_t add(std::uint8_t a, std::uint8_t b) const;
  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const;
  std::uint8_t div(std::uint8_t a, std::uint8_t b) const;
  /// Multiplicative inverse; throws std::domain_error for 0.
  std::uint8_t inv(std::uint8_t a) const;

  /// Fields compare equal when they define the same arithmetic.
  bool operator==(const Field& o) const { return p_ == o.p_ && poly_ == o.poly_; }
  bool operator!=(const Field& o) const { return !(*this == o); }

  /// Exhaustive trial-division irreducibility test over GF(2).
  static bool is_irreducible(unsigned poly, unsigned degree);
  /// Lexicographically smallest irreducible polynomial of the given degree.
  static unsigned default_reduction_poly(unsigned p);

  // Exposed so tests can verify the tables are mutually inverse.
  const std::vector<std::uint8_t>& log_table() const { return log_; }
  const std::vector<std::uint8_t>& antilog_table() const { return exp_; }

 private:
  void check(std::uint8_t v) const;
  std::uint8_t mul_shift_reduce(std::uint8_t a, std::uint8_t b) const;
  void build_tables();

  unsigned p_;
  unsigned q_;
  unsigned poly_;
  std::vector<std::uint8_t> log_;  // log_[a], a in [1, q-1]
  std::vector<std::uint8_t> exp_;  // exp_[k] = g^k, k in [0, 2(q-1))
};

/// A field element bound to its Field, with checked operators. Heavy inner
/// loops use Field's raw methods instead; this type is the safe front door.
class Element {
 public:
  Element(const Field& field, std::uint8_t value);

  std::uint8_t value() const { return v_; }
  const Field& field() const { return *field_; }

  friend Element operator+(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);
  Element inverse() const;

  bool operator==(const Element& o) const {
    return *field_ == *o.field_ && v_ == o.v_;
  }

 private:
  const Field* field_;
  std::uint8_t v_;
};

}  // namespace ncorr::gf
