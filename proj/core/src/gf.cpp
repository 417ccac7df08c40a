#include "ncorr/gf.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace ncorr::gf {

namespace {

int poly_degree(unsigned poly) {
  return poly == 0 ? -1 : std::bit_width(poly) - 1;
}

// Remainder of polynomial division over GF(2).
unsigned poly_mod(unsigned a, unsigned b) {
  const int db = poly_degree(b);
  for (int da = poly_degree(a); da >= db; da = poly_degree(a)) {
    a ^= b << (da - db);
  }
  return a;
}

}  // namespace

bool Field::is_irreducible(unsigned poly, unsigned degree) {
  if (poly_degree(poly) != static_cast<int>(degree)) return false;
  if (degree == 0) return false;
  // A reducible polynomial has a factor of degree <= degree/2.
  for (unsigned d = 1; 2 * d <= degree; ++d) {
    for (unsigned f = (1u << d); f < (2u << d); ++f) {
      if (poly_mod(poly, f) == 0) return false;
    }
  }
  return true;
}

unsigned Field::default_reduction_poly(unsigned p) {
  for (unsigned mask = (1u << p); mask < (2u << p); ++mask) {
    if (is_irreducible(mask, p)) return mask;
  }
  throw std::logic_error("no irreducible polynomial of degree " + std::to_string(p));
}

Field::Field(unsigned p) : Field(p, default_reduction_poly(p)) {}

Field::Field(unsigned p, unsigned reduction_poly) : p_(p), q_(1u << p), poly_(reduction_poly) {
  if (p < 1 || p > 8) {
    throw std::invalid_argument("field exponent must be in [1, 8], got " + std::to_string(p));
  }
  if (!is_irreducible(poly_, p_)) {
    throw std::invalid_argument("reduction polynomial 0x" + std::to_string(poly_) +
                                " is not an irreducible polynomial of degree " + std::to_string(p_));
  }
  if (p_ >= 4) build_tables();  // mul dominates decoder inner loops
}

void Field::check(std::uint8_t v) const {
  if (v >= q_) {
    throw std::invalid_argument("value " + std::to_string(v) + " outside GF(" + std::to_string(q_) + ")");
  }
}

std::uint8_t Field::add(std::uint8_t a, std::uint8_t b) const {
  check(a);
  check(b);
  return a ^ b;
}

std::uint8_t Field::mul_shift_reduce(std::uint8_t a, std::uint8_t b) const {
  unsigned acc = 0;
  unsigned aa = a;
  for (unsigned bb = b; bb != 0; bb >>= 1) {
    if (bb & 1u) acc ^= aa;
    aa <<= 1;
    if (aa & q_) aa ^= poly_;
  }
  return static_cast<std::uint8_t>(acc);
}

std::uint8_t Field::mul(std::uint8_t a, std::uint8_t b) const {
  check(a);
  check(b);
  if (a == 0 || b == 0) return 0;
  if (!log_.empty()) return exp_[log_[a] + log_[b]];
  return mul_shift_reduce(a, b);
}

std::uint8_t Field::inv(std::uint8_t a) const {
  check(a);
  if (a == 0) throw std::domain_error("inverse of 0 in GF(" + std::to_string(q_) + ")");
  if (!log_.empty()) return exp_[(q_ - 1) - log_[a]];
  for (unsigned b = 1; b < q_; ++b) {
    if (mul_shift_reduce(a, static_cast<std::uint8_t>(b)) == 1) return static_cast<std::uint8_t>(b);
  }
  throw std::logic_error("no inverse found");  // unreachable in a field
}

std::uint8_t Field::div(std::uint8_t a, std::uint8_t b) const {
  return mul(a, inv(b));
}

void Field::build_tables() {
  // Any multiplicative generator works, independent of the polynomial
  // being primitive.
  for (unsigned g = 2; g < q_; ++g) {
    std::vector<std::uint8_t> exp(2 * (q_ - 1));
    std::vector<std::uint8_t> log(q_, 0);
    std::uint8_t x = 1;
    bool ok = true;
    for (unsigned k = 0; k < q_ - 1; ++k) {
      if (x == 1 && k > 0) {  // order of g smaller than q-1
        ok = false;
        break;
      }
      exp[k] = x;
      log[x] = static_cast<std::uint8_t>(k);
      x = mul_shift_reduce(x, static_cast<std::uint8_t>(g));
    }
    if (!ok || x != 1) continue;
    for (unsigned k = 0; k < q_ - 1; ++k) exp[k + (q_ - 1)] = exp[k];
    exp_ = std::move(exp);
    log_ = std::move(log);
    return;
  }
  throw std::logic_error("no multiplicative generator found");  // unreachable
}

Element::Element(const Field& field, std::uint8_t value) : field_(&field), v_(value) {
  if (value >= field.size()) {
    throw std::invalid_argument("element value outside field");
  }
}

namespace {
void require_same_field(const Element& a, const Element& b) {
  if (a.field() != b.field()) {
    throw std::invalid_argument("operands belong to different fields");
  }
}
}  // namespace

Element operator+(const Element& a, const Element& b) {
  require_same_field(a, b);
  return Element(a.field(), a.field().add(a.value(), b.value()));
}

Element operator*(const Element& a, const Element& b) {
  require_same_field(a, b);
  return Element(a.field(), a.field().mul(a.value(), b.value()));
}

Element Element::inverse() const {
  return Element(*field_, field_->inv(v_));
}

}  // namespace ncorr::gf
