#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ncorr/model.hpp"

namespace ncorr::model {

/// Uniform quantizer: 2^bits bins over [-range, range], clamping outside.
struct Quantizer {
  unsigned bits = 3;
  double range = 4.0;  // in standard deviations of the unit-variance sources

  std::size_t bins() const { return std::size_t{1} << bits; }
  double bin_width() const { return 2.0 * range / static_cast<double>(bins()); }
  /// Lower edge of bin k (k in [0, bins]); edge(0) = -range, edge(bins) = range.
  double edge(std::size_t k) const { return -range + static_cast<double>(k) * bin_width(); }
  double center(std::size_t k) const { return edge(k) + 0.5 * bin_width(); }
  int index_for(double s) const;
};

/// Convenience wrapper matching the quantizer contract directly.
int quantize(double s, unsigned bits, double range);

/// Spatially correlated unit-variance Gaussian sources: sensors dropped
/// uniformly in the unit square, correlation decaying exponentially with
/// distance. Immutable after construction; sampling takes a caller-owned
/// engine.
class GaussianSensorModel {
 public:
  GaussianSensorModel(std::size_t n, double beta, std::uint64_t seed, Quantizer quantizer = {});

  std::size_t size() const { return n_; }
  double beta() const { return beta_; }
  const Quantizer& quantizer() const { return quantizer_; }
  const std::vector<std::array<double, 2>>& positions() const { return positions_; }
  double correlation(std::size_t i, std::size_t j) const { return cov_[i * n_ + j]; }
  /// True when the Cholesky factorization needed a diagonal jitter of 1e-10.
  bool jitter_applied() const { return jitter_applied_; }

  std::vector<double> sample_reals(std::mt19937_64& g) const;
  /// Quantized symbol vector (bin indices in [0, 2^bits)).
  std::vector<int> sample_sources(std::mt19937_64& g) const;

  /// Exact marginal pmf of a quantized source (standard normal cell masses,
  /// boundary bins absorb the clamped tails).
  std::vector<double> marginal_pmf(std::size_t i) const;

  /// Pmf of the integer difference X_i - X_j of the quantized pair, from
  /// adaptive quadrature of the bivariate normal density over every pair of
  /// quantization cells. Throws std::runtime_error when the quadrature fails
  /// to converge or the cell masses do not reach total 1 within 1e-6.
  EdgeNoisePmf pairwise_noise(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_;
  double beta_;
  Quantizer quantizer_;
  std::vector<std::array<double, 2>> positions_;
  std::vector<double> cov_;   // row-major n x n
  std::vector<double> chol_;  // lower-triangular factor, row-major
  bool jitter_applied_ = false;
};

/// Joint pmf of two standard normal variables with correlation `rho` after
/// quantization, as a bins x bins row-major table. Exposed for validation.
std::vector<double> bivariate_cell_pmf(double rho, const Quantizer& quantizer);

}  // namespace ncorr::model
