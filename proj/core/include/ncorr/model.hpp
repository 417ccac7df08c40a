#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ncorr/gf.hpp"

namespace ncorr::model {

/// Bijection between a finite integer source alphabet and a subset of a
/// Galois field. Holds its own copy of the field context, so it stays valid
/// on its own. Immutable after construction.
class AlphabetMap {
 public:
  /// alphabet[i] is mapped to field value forward[i].
  AlphabetMap(std::vector<int> alphabet, const gf::Field& field, std::vector<std::uint8_t> forward);

  /// Alphabet {0..q-1} mapped to itself.
  static AlphabetMap identity(const gf::Field& field);
  /// Alphabet {lo..hi} mapped to x - lo.
  static AlphabetMap offset_range(const gf::Field& field, int lo, int hi);

  std::size_t alphabet_size() const { return alphabet_.size(); }
  const std::vector<int>& alphabet() const { return alphabet_; }
  const gf::Field& field() const { return field_; }

  std::uint8_t to_field(int x) const;   // throws std::domain_error if x not in the alphabet
  int from_field(std::uint8_t v) const; // throws std::domain_error if v not in the image
  bool in_image(std::uint8_t v) const { return inverse_index_[v] >= 0; }
  /// Alphabet index of a field value, or -1 when outside the image.
  int index_of_field(std::uint8_t v) const { return inverse_index_[v]; }
  std::uint8_t field_value_of_index(std::size_t i) const { return forward_[i]; }

 private:
  std::vector<int> alphabet_;
  gf::Field field_;
  std::vector<std::uint8_t> forward_;
  std::vector<int> inverse_index_;  // field value -> alphabet index, -1 outside
};

/// Joint pmf of N sources over alphabet indices {0..m-1}. Either an explicit
/// table over all m^N configurations (small N oracle regime) or a
/// chain factorization: initial pmf of the first source plus one conditional
/// kernel shared by every consecutive pair.
class JointPmf {
 public:
  static JointPmf explicit_table(std::size_t n_sources, std::size_t alphabet_size,
                                 std::vector<double> table);
  /// kernel is row-major m x m; kernel[prev*m + next] = f(next | prev).
  static JointPmf chain(std::size_t n_sources, std::vector<double> initial,
                        std::vector<double> kernel);

  bool is_chain() const { return chain_; }
  std::size_t n_sources() const { return n_; }
  std::size_t alphabet_size() const { return m_; }

  double prob(std::span<const int> config) const;
  std::vector<double> marginal(std::size_t i) const;
  std::vector<int> sample(std::mt19937_64& g) const;
  double entropy_bits() const;

  const std::vector<double>& table() const;    // explicit form only
  const std::vector<double>& initial() const;  // chain form only
  const std::vector<double>& kernel() const;   // chain form only

  /// Expands a chain pmf into its explicit table (bounded state size).
  JointPmf to_explicit() const;

 private:
  JointPmf() = default;
  bool chain_ = false;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> table_;
  std::vector<double> initial_;
  std::vector<double> kernel_;
};

/// Pmf of an integer difference X_i - X_j, stored as offset + masses.
struct EdgeNoisePmf {
  int min_diff = 0;
  std::vector<double> mass;

  double at(int w) const {
    const long idx = static_cast<long>(w) - min_diff;
    if (idx < 0 || idx >= static_cast<long>(mass.size())) return 0.0;
    return mass[static_cast<std::size_t>(idx)];
  }
  int max_diff() const { return min_diff + static_cast<int>(mass.size()) - 1; }
  double total() const;
  EdgeNoisePmf reversed() const;  // pmf of the negated difference
};

/// Undirected correlation structure over N sources; each edge carries the
/// pmf of the pairwise difference.
class CorrelationGraph {
 public:
  explicit CorrelationGraph(std::size_t n) : n_(n), slot_(n * n, -1) {}

  /// Adds edge {i, j} with g = pmf of X_i - X_j. Duplicate edges and
  /// unnormalized pmfs (tolerance 1e-9) are rejected.
  void add_edge(std::size_t i, std::size_t j, EdgeNoisePmf g);

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_ / 2; }
  bool correlated(std::size_t i, std::size_t j) const;
  /// Pmf of X_i - X_j, or nullptr when the pair is uncorrelated.
  const EdgeNoisePmf* noise(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_;
  std::size_t edges_ = 0;
  std::vector<int> slot_;             // (i*n + j) -> index into pmfs_
  std::vector<EdgeNoisePmf> pmfs_;    // both directions materialized
};

/// Zero-mean discrete Laplacian pmf g(w) proportional to p^|w|, truncated to
/// |w| <= support_radius and renormalized.
EdgeNoisePmf laplacian_noise_pmf(double p, int support_radius);

/// Chain-factored pmf over {0..q-1}^N: the first source uniform, each later
/// source a shifted truncated discrete Laplacian around its predecessor.
JointPmf chain_laplacian_model(std::size_t n_sources, double p, std::size_t q);

/// Marginal pmf of source i pushed through the alphabet map onto the full
/// field domain (zero mass outside the image).
std::vector<double> lift_marginal(const JointPmf& f, const AlphabetMap& map, std::size_t i);

/// Explicit joint pmf over the full field domain; requires
/// N * log2(q) <= 24 bits of state.
std::vector<double> lift_joint(const JointPmf& f, const AlphabetMap& map);

double entropy_bits(std::span<const double> pmf);

}  // namespace ncorr::model
