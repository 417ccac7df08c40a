#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ncorr/coding.hpp"
#include "ncorr/model.hpp"

namespace ncorr::decode {

/// In-place Walsh-Hadamard transform (unnormalized); applying it twice
/// multiplies by the length. Length must be a power of two.
void walsh_hadamard(std::span<double> v);

/// Convolution over the XOR group: (u * v)(a) = sum_b u(b) v(a ^ b),
/// computed in the transform domain in O(q log q).
std::vector<double> xor_convolution(std::span<const double> u, std::span<const double> v);

/// Bipartite constraint graph: one variable node per source symbol, one check
/// node per preprocessed coded symbol, plus the correlation structure and the
/// per-source priors the messages start from. Self-contained: copies of the
/// map and the correlation graph live inside, so cloning a graph for another
/// worker is safe.
struct FactorGraph {
  struct Check {
    std::vector<std::uint32_t> vars;
    std::vector<std::uint8_t> coeffs;
    std::uint8_t target = 0;
  };

  model::AlphabetMap map;
  model::CorrelationGraph corr;
  std::size_t n_vars = 0;
  std::vector<Check> checks;
  // var -> (check index, slot within that check)
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> var_edges;
  std::vector<std::vector<double>> priors;  // field-domain pmfs, length q

  const gf::Field& field() const { return map.field(); }
  void set_targets(std::span<const std::uint8_t> y_prime);
};

/// Graph from the nonzeros of A'; requires a preprocessed batch. Priors are
/// field-domain pmfs of length q, one per source; an empty vector means
/// unknown priors and defaults to uniform over the mapped alphabet.
FactorGraph build_factor_graph(const coding::CodedBatch& batch,
                               const model::CorrelationGraph& corr,
                               std::vector<std::vector<double>> priors,
                               const model::AlphabetMap& map);

/// Messages live on the edges: q_to_check are variable beliefs, r_to_var are
/// check beliefs, both indexed [check][slot][field value].
struct MessageSet {
  std::vector<std::vector<std::vector<double>>> q_to_check;
  std::vector<std::vector<std::vector<double>>> r_to_var;
};

enum class CheckMode {
  kAuto,    // transform-domain fast path where the weights allow it
  kDirect,  // always the value-domain partial-sum recursion
};

struct DecodeOptions {
  std::size_t k_max = 100;
  /// Keep the prior attached to each variable as a virtual degree-1 factor.
  /// When false the prior only enters through message initialization.
  bool prior_as_factor = true;
  CheckMode check_mode = CheckMode::kAuto;
  /// Abandon iterating once the message state exactly repeats (period 1 or
  /// 2); the remaining iterations could not change the outcome.
  bool stop_on_fixed_point = true;
};

struct UpdateDiagnostics {
  std::size_t zero_q_resets = 0;
  std::size_t zero_r_resets = 0;
};

/// q messages initialized with the priors, r messages with ones.
MessageSet init_messages(const FactorGraph& g);

void var_update(const FactorGraph& g, MessageSet& ms, const DecodeOptions& opt,
                UpdateDiagnostics& diag);
void check_update(const FactorGraph& g, MessageSet& ms, const DecodeOptions& opt,
                  UpdateDiagnostics& diag);

/// Per-variable beliefs (product of incoming r messages, times the prior when
/// it is kept as a factor), normalized.
std::vector<std::vector<double>> beliefs(const FactorGraph& g, const MessageSet& ms,
                                         const DecodeOptions& opt);

/// Componentwise argmax of the beliefs; ties go to the smallest field value.
std::vector<std::uint8_t> tentative_decision(const FactorGraph& g, const MessageSet& ms,
                                             const DecodeOptions& opt);

struct DecodeResult {
  std::vector<std::uint8_t> symbols;
  bool converged = false;
  std::size_t iterations = 0;
  bool fallback_used = false;
  UpdateDiagnostics diagnostics;
};

/// Runs the message-passing schedule on an already-built graph. Useful when
/// many right-hand sides share one preprocessed matrix: build once, swap
/// targets with set_targets, decode again.
DecodeResult decode_graph(const FactorGraph& g, const DecodeOptions& opt = {});

/// Iterative message-passing decoder with a parallel schedule: every
/// iteration updates all variable messages from the previous round's check
/// messages, then all check messages, then tests the tentative decision
/// against the coding constraints. After k_max failed rounds each symbol
/// falls back to the rounded prior mean taken in the integer domain.
DecodeResult decode_bp(const coding::CodedBatch& batch, const model::CorrelationGraph& corr,
                       std::vector<std::vector<double>> priors, const model::AlphabetMap& map,
                       const DecodeOptions& opt = {});

/// Brute-force MAP decoder: enumerates every source configuration that
/// satisfies A x = y and returns the most probable one (lexicographically
/// smallest on ties). Enumeration regime only: N * log2 q <= 24.
std::vector<std::uint8_t> decode_map_exact(const coding::CodedBatch& batch,
                                           const model::JointPmf& f,
                                           const model::AlphabetMap& map);

}  // namespace ncorr::decode
