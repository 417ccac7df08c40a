#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ncorr/model.hpp"

namespace ncorr::bounds {

/// Statistics of the tilted distribution f_rho proportional to f^(1/(1+rho)).
struct TiltedStats {
  double rho = 0.0;
  double log2_z = 0.0;      // log2 sum_x f(x)^(1/(1+rho))
  double h_rho_bits = 0.0;  // entropy of the tilted pmf
  double d_kl_bits = 0.0;   // KL divergence of f from the tilted pmf
};

enum class BoundRegime { kTrivial, kRhoOne, kInterior };

std::string to_string(BoundRegime r);

/// Upper bound on the MAP decoding error probability together with the
/// minimizing tilt parameter.
struct BoundReport {
  std::size_t l = 0;
  std::size_t q = 0;
  std::size_t n_sources = 0;
  BoundRegime regime = BoundRegime::kTrivial;
  double rho_star = 0.0;
  double log2_bound = 0.0;
  double bound = 1.0;  // clamped into (0, 1]
};

/// log2 sum_x f(x)^(1/(1+rho)). Explicit pmfs sum directly; chain pmfs run a
/// transfer-matrix pass over length-m vectors with per-step log rescaling, so
/// the full m^N sum is never materialized.
double log_partition(const model::JointPmf& f, double rho);

/// Tilted entropy and divergence. Chain pmfs stay chains under tilting, so
/// both quantities come from forward-backward pairwise marginals.
TiltedStats tilted_stats(const model::JointPmf& f, double rho);

/// Error exponent E(rho) = -rho L log2 q + (1+rho) log_partition(f, rho).
double exponent(const model::JointPmf& f, std::size_t q, std::size_t l, double rho);

/// Minimized upper bound with the regime case analysis: below-entropy rates
/// give the trivial bound 1, rates above the rho=1 tilted entropy pin rho at
/// 1, and the interior regime solves L log2 q = H_rho by bisection. A
/// 101-point grid scan of E(rho) backstops the analytic candidate.
BoundReport upper_bound(const model::JointPmf& f, std::size_t q, std::size_t l);

struct MinSymbolsReport {
  double best_ratio = 0.0;  // tightest sufficient L/N
  double rho_at_best = 0.0;
  std::vector<std::pair<double, double>> curve;  // (rho, required L/N)
};

/// Sufficient L/N to push the error bound below delta, minimized over a
/// rho grid in (0, 1].
MinSymbolsReport min_symbols(const model::JointPmf& f, std::size_t q, double delta);

}  // namespace ncorr::bounds
