#include "ncorr/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ncorr::decode {

namespace {

constexpr double kMessageFloor = 1e-30;

// Scale to unit peak, floor tiny remnants so later products cannot collapse
// to zero mass, then normalize to a pmf. Exact zeros are kept: they encode
// hard constraints (values outside the mapped alphabet stay impossible).
// Returns false when the vector had no positive entry at all.
bool normalize_message(std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, x);
  if (peak <= 0.0) return false;
  double sum = 0.0;
  for (double& x : v) {
    x /= peak;
    if (x > 0.0 && x < kMessageFloor) x = kMessageFloor;
    sum += x;
  }
  for (double& x : v) x /= sum;
  return true;
}

// out(s) = sum_k D(s ^ u_k) w_k for a sparse factor given as (u, w) pairs.
void fold_sparse(const std::vector<double>& d, const std::vector<std::pair<std::uint8_t, double>>& factor,
                 std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& [u, w] : factor) {
    if (w == 0.0) continue;
    for (std::size_t s = 0; s < d.size(); ++s) {
      out[s ^ u] += d[s] * w;
    }
  }
}

}  // namespace

void walsh_hadamard(std::span<double> v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("transform length must be a power of two");
  }
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = v[j];
        const double y = v[j + h];
        v[j] = x + y;
        v[j + h] = x - y;
      }
    }
  }
}

std::vector<double> xor_convolution(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("operand lengths differ");
  std::vector<double> a(u.begin(), u.end());
  std::vector<double> b(v.begin(), v.end());
  walsh_hadamard(a);
  walsh_hadamard(b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  walsh_hadamard(a);
  const double inv_n = 1.0 / static_cast<double>(a.size());
  for (double& x : a) x *= inv_n;
  return a;
}

void FactorGraph::set_targets(std::span<const std::uint8_t> y_prime) {
  if (y_prime.size() != checks.size()) throw std::invalid_argument("target count mismatch");
  for (std::size_t l = 0; l < checks.size(); ++l) checks[l].target = y_prime[l];
}

FactorGraph build_factor_graph(const coding::CodedBatch& batch,
                               const model::CorrelationGraph& corr,
                               std::vector<std::vector<double>> priors,
                               const model::AlphabetMap& map) {
  if (!batch.preprocessed()) throw std::invalid_argument("batch must be preprocessed first");
  const coding::CodingMatrix& ap = *batch.a_prime;
  const gf::Field& field = ap.field();
  const std::size_t n = ap.cols();
  const std::size_t q = field.size();
  if (map.field() != field) throw std::invalid_argument("alphabet map uses a different field");
  if (corr.size() != n) throw std::invalid_argument("correlation graph size mismatch");
  if (priors.empty()) {
    // Unknown priors: uniform over the mapped alphabet, zero elsewhere.
    std::vector<double> u(q, 0.0);
    for (std::size_t i = 0; i < map.alphabet_size(); ++i) {
      u[map.field_value_of_index(i)] = 1.0 / static_cast<double>(map.alphabet_size());
    }
    priors.assign(n, u);
  }
  if (priors.size() != n) throw std::invalid_argument("need one prior per source");
  for (auto& p : priors) {
    if (p.size() != q) throw std::invalid_argument("prior length must equal the field size");
    double s = 0.0;
    for (double v : p) {
      if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("negative prior mass");
      s += v;
    }
    if (s <= 0.0) throw std::invalid_argument("prior has no mass");
    for (double& v : p) v /= s;
  }

  // Correlation pmfs must live inside the feasible difference range of the
  // alphabet, otherwise the edge was built against a different source model.
  {
    int lo = map.alphabet()[0], hi = map.alphabet()[0];
    for (int x : map.alphabet()) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const model::EdgeNoisePmf* g_ij = corr.noise(i, j);
        if (g_ij && (g_ij->min_diff < lo - hi || g_ij->max_diff() > hi - lo)) {
          throw std::invalid_argument("correlation noise support exceeds the alphabet range");
        }
      }
    }
  }

  FactorGraph g{map, corr, 0, {}, {}, {}};
  g.n_vars = n;
  g.priors = std::move(priors);
  g.var_edges.resize(n);
  g.checks.reserve(ap.rows());
  for (std::size_t l = 0; l < ap.rows(); ++l) {
    FactorGraph::Check ck;
    for (std::size_t c = 0; c < n; ++c) {
      if (ap.at(l, c) != 0) {
        ck.vars.push_back(static_cast<std::uint32_t>(c));
        ck.coeffs.push_back(ap.at(l, c));
      }
    }
    ck.target = batch.y_prime[l];
    const std::uint32_t check_idx = static_cast<std::uint32_t>(g.checks.size());
    for (std::size_t slot = 0; slot < ck.vars.size(); ++slot) {
      g.var_edges[ck.vars[slot]].emplace_back(check_idx, static_cast<std::uint32_t>(slot));
    }
    g.checks.push_back(std::move(ck));
  }
  return g;
}

MessageSet init_messages(const FactorGraph& g) {
  const std::size_t q = g.field().size();
  MessageSet ms;
  ms.q_to_check.resize(g.checks.size());
  ms.r_to_var.resize(g.checks.size());
  for (std::size_t l = 0; l < g.checks.size(); ++l) {
    const auto& ck = g.checks[l];
    ms.q_to_check[l].resize(ck.vars.size());
    ms.r_to_var[l].resize(ck.vars.size());
    for (std::size_t s = 0; s < ck.vars.size(); ++s) {
      ms.q_to_check[l][s] = g.priors[ck.vars[s]];
      ms.r_to_var[l][s].assign(q, 1.0);
    }
  }
  return ms;
}

void var_update(const FactorGraph& g, MessageSet& ms, const DecodeOptions& opt,
                UpdateDiagnostics& diag) {
  const std::size_t q = g.field().size();
  std::vector<double> acc(q);
  for (std::size_t n = 0; n < g.n_vars; ++n) {
    const auto& edges = g.var_edges[n];
    for (const auto& [l, slot] : edges) {
      if (opt.prior_as_factor || edges.size() == 1) {
        // Degree-1 variables fall back on the prior either way: the empty
        // product carries no information of its own.
        acc = g.priors[n];
      } else {
        acc.assign(q, 1.0);
      }
      for (const auto& [l2, slot2] : edges) {
        if (l2 == l && slot2 == slot) continue;
        const auto& r = ms.r_to_var[l2][slot2];
        for (std::size_t a = 0; a < q; ++a) acc[a] *= r[a];
      }
      if (!normalize_message(acc)) {
        acc = g.priors[n];
        ++diag.zero_q_resets;
      }
      ms.q_to_check[l][slot] = acc;
    }
  }
}

namespace {

// Incoming message permuted by its coding coefficient: mass of the partial
// sum contribution u = coeff * v.
std::vector<double> permuted_message(const gf::Field& f, const std::vector<double>& q_msg,
                                     std::uint8_t coeff) {
  const std::size_t q = f.size();
  std::vector<double> m(q);
  const std::uint8_t ic = f.inv(coeff);
  for (std::size_t u = 0; u < q; ++u) m[u] = q_msg[f.mul(ic, static_cast<std::uint8_t>(u))];
  return m;
}

}  // namespace

void check_update(const FactorGraph& g, MessageSet& ms, const DecodeOptions& opt,
                  UpdateDiagnostics& diag) {
  const gf::Field& field = g.field();
  const std::size_t q = field.size();
  const model::AlphabetMap& map = g.map;

  // Source integer value per field value (only defined on the map image).
  std::vector<int> int_value(q, 0);
  std::vector<bool> in_image(q, false);
  for (std::size_t v = 0; v < q; ++v) {
    const auto u = static_cast<std::uint8_t>(v);
    if (map.in_image(u)) {
      in_image[v] = true;
      int_value[v] = map.from_field(u);
    }
  }

  std::vector<double> out(q);
  std::vector<double> work(q);
  std::vector<double> dp(q);
  std::vector<std::pair<std::uint8_t, double>> factor;

  for (std::size_t l = 0; l < g.checks.size(); ++l) {
    const auto& ck = g.checks[l];
    const std::size_t d = ck.vars.size();

    std::vector<std::vector<double>> perm(d);
    for (std::size_t s = 0; s < d; ++s) {
      perm[s] = permuted_message(field, ms.q_to_check[l][s], ck.coeffs[s]);
    }

    // Which incoming slots are correlated with each outgoing slot.
    std::vector<std::vector<std::uint32_t>> corr_in(d);
    bool any_fast = false;
    for (std::size_t out_s = 0; out_s < d; ++out_s) {
      for (std::size_t s = 0; s < d; ++s) {
        if (s == out_s) continue;
        if (g.corr.correlated(ck.vars[s], ck.vars[out_s])) {
          corr_in[out_s].push_back(static_cast<std::uint32_t>(s));
        }
      }
      if (corr_in[out_s].empty()) any_fast = true;
    }
    const bool use_transform = opt.check_mode == CheckMode::kAuto;

    // Prefix/suffix products in the transform domain serve every outgoing
    // slot whose weights do not depend on the outgoing value.
    std::vector<std::vector<double>> pre, suf;
    if (any_fast && use_transform) {
      std::vector<std::vector<double>> tr(d);
      for (std::size_t s = 0; s < d; ++s) {
        tr[s] = perm[s];
        walsh_hadamard(tr[s]);
      }
      pre.assign(d + 1, std::vector<double>(q, 1.0));
      suf.assign(d + 1, std::vector<double>(q, 1.0));
      for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t u = 0; u < q; ++u) pre[s + 1][u] = pre[s][u] * tr[s][u];
      }
      for (std::size_t s = d; s-- > 0;) {
        for (std::size_t u = 0; u < q; ++u) suf[s][u] = suf[s + 1][u] * tr[s][u];
      }
    }

    for (std::size_t out_s = 0; out_s < d; ++out_s) {
      const std::uint8_t c_out = ck.coeffs[out_s];
      const std::uint32_t var_out = ck.vars[out_s];
      const auto& corr_slots = corr_in[out_s];

      if (corr_slots.empty() && use_transform) {
        for (std::size_t u = 0; u < q; ++u) work[u] = pre[out_s][u] * suf[out_s + 1][u];
        walsh_hadamard(work);
        const double inv_q = 1.0 / static_cast<double>(q);
        for (std::size_t u = 0; u < q; ++u) {
          work[u] *= inv_q;
          if (work[u] < 0.0) work[u] = 0.0;  // transform rounding
        }
        for (std::size_t a = 0; a < q; ++a) {
          out[a] = work[ck.target ^ field.mul(c_out, static_cast<std::uint8_t>(a))];
        }
      } else {
        // Partial-sum recursion in the value domain. The factors that do not
        // depend on the outgoing value fold once; correlated factors get
        // reweighted for every outgoing value.
        std::vector<double> base(q, 0.0);
        base[0] = 1.0;
        for (std::size_t s = 0; s < d; ++s) {
          if (s == out_s) continue;
          if (std::find(corr_slots.begin(), corr_slots.end(), static_cast<std::uint32_t>(s)) !=
              corr_slots.end()) {
            continue;
          }
          factor.clear();
          for (std::size_t u = 0; u < q; ++u) {
            if (perm[s][u] != 0.0) factor.emplace_back(static_cast<std::uint8_t>(u), perm[s][u]);
          }
          fold_sparse(base, factor, dp);
          base = dp;
        }

        for (std::size_t a = 0; a < q; ++a) {
          if (!corr_slots.empty() && !in_image[a]) {
            out[a] = 0.0;  // correlation weights are only defined on the alphabet
            continue;
          }
          std::vector<double>& cur = work;
          cur = base;
          for (std::uint32_t s : corr_slots) {
            const model::EdgeNoisePmf* noise = g.corr.noise(ck.vars[s], var_out);
            const auto& qmsg = ms.q_to_check[l][s];
            factor.clear();
            for (std::size_t v = 0; v < q; ++v) {
              if (!in_image[v] || qmsg[v] == 0.0) continue;
              const double w = noise->at(int_value[v] - int_value[a]) * qmsg[v];
              if (w == 0.0) continue;
              factor.emplace_back(field.mul(ck.coeffs[s], static_cast<std::uint8_t>(v)), w);
            }
            fold_sparse(cur, factor, dp);
            cur = dp;
          }
          out[a] = cur[ck.target ^ field.mul(c_out, static_cast<std::uint8_t>(a))];
        }
      }

      if (!normalize_message(out)) {
        out = g.priors[var_out];
        ++diag.zero_r_resets;
      }
      ms.r_to_var[l][out_s] = out;
    }
  }
}

std::vector<std::vector<double>> beliefs(const FactorGraph& g, const MessageSet& ms,
                                         const DecodeOptions& opt) {
  const std::size_t q = g.field().size();
  std::vector<std::vector<double>> out(g.n_vars);
  for (std::size_t n = 0; n < g.n_vars; ++n) {
    std::vector<double> b = opt.prior_as_factor ? g.priors[n] : std::vector<double>(q, 1.0);
    for (const auto& [l, slot] : g.var_edges[n]) {
      const auto& r = ms.r_to_var[l][slot];
      for (std::size_t a = 0; a < q; ++a) b[a] *= r[a];
    }
    if (!normalize_message(b)) b = g.priors[n];
    out[n] = std::move(b);
  }
  return out;
}

std::vector<std::uint8_t> tentative_decision(const FactorGraph& g, const MessageSet& ms,
                                             const DecodeOptions& opt) {
  const auto bel = beliefs(g, ms, opt);
  std::vector<std::uint8_t> x(g.n_vars, 0);
  for (std::size_t n = 0; n < g.n_vars; ++n) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < bel[n].size(); ++a) {
      if (bel[n][a] > bel[n][best]) best = a;  // ties keep the smallest value
    }
    x[n] = static_cast<std::uint8_t>(best);
  }
  return x;
}

namespace {

bool satisfies_checks(const FactorGraph& g, std::span<const std::uint8_t> x) {
  const gf::Field& f = g.field();
  for (const auto& ck : g.checks) {
    std::uint8_t acc = 0;
    for (std::size_t s = 0; s < ck.vars.size(); ++s) {
      acc ^= f.mul(ck.coeffs[s], x[ck.vars[s]]);
    }
    if (acc != ck.target) return false;
  }
  return true;
}

// Rounded prior mean in the integer domain, clamped to the nearest alphabet
// value and mapped back into the field.
std::uint8_t expected_value_symbol(const FactorGraph& g, std::size_t n) {
  const model::AlphabetMap& map = g.map;
  const auto& prior = g.priors[n];
  double mean = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < map.alphabet_size(); ++i) {
    const double p = prior[map.field_value_of_index(i)];
    mean += static_cast<double>(map.alphabet()[i]) * p;
    mass += p;
  }
  if (mass > 0.0) mean /= mass;
  const double rounded = std::floor(mean + 0.5);  // half-up
  int best = map.alphabet()[0];
  double best_dist = std::abs(static_cast<double>(best) - rounded);
  for (int x : map.alphabet()) {
    const double dist = std::abs(static_cast<double>(x) - rounded);
    if (dist < best_dist || (dist == best_dist && x < best)) {
      best = x;
      best_dist = dist;
    }
  }
  return map.to_field(best);
}

bool same_messages(const MessageSet& a, const MessageSet& b) {
  return a.q_to_check == b.q_to_check && a.r_to_var == b.r_to_var;
}

}  // namespace

DecodeResult decode_graph(const FactorGraph& g, const DecodeOptions& opt) {
  if (opt.k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  DecodeResult res;
  if (g.checks.empty()) {
    // Nothing constrains the sources: report the prior means right away.
    res.symbols.resize(g.n_vars);
    for (std::size_t n = 0; n < g.n_vars; ++n) res.symbols[n] = expected_value_symbol(g, n);
    res.fallback_used = true;
    return res;
  }

  MessageSet ms = init_messages(g);
  MessageSet prev1, prev2;
  for (std::size_t k = 1; k <= opt.k_max; ++k) {
    if (k > 1) var_update(g, ms, opt, res.diagnostics);
    check_update(g, ms, opt, res.diagnostics);
    res.iterations = k;

    std::vector<std::uint8_t> x = tentative_decision(g, ms, opt);
    if (satisfies_checks(g, x)) {
      res.symbols = std::move(x);
      res.converged = true;
      return res;
    }
    if (opt.stop_on_fixed_point) {
      if ((k >= 2 && same_messages(ms, prev1)) || (k >= 3 && same_messages(ms, prev2))) {
        break;  // the schedule repeats; no further round can change anything
      }
      prev2 = std::move(prev1);
      prev1 = ms;
    }
  }

  res.symbols.resize(g.n_vars);
  for (std::size_t n = 0; n < g.n_vars; ++n) res.symbols[n] = expected_value_symbol(g, n);
  res.fallback_used = true;
  return res;
}

DecodeResult decode_bp(const coding::CodedBatch& batch, const model::CorrelationGraph& corr,
                       std::vector<std::vector<double>> priors, const model::AlphabetMap& map,
                       const DecodeOptions& opt) {
  const FactorGraph g = build_factor_graph(batch, corr, std::move(priors), map);
  return decode_graph(g, opt);
}

std::vector<std::uint8_t> decode_map_exact(const coding::CodedBatch& batch,
                                           const model::JointPmf& f,
                                           const model::AlphabetMap& map) {
  const coding::CodingMatrix& a = batch.a;
  const std::size_t n = a.cols();
  const std::size_t q = a.field().size();
  if (f.n_sources() != n) throw std::invalid_argument("pmf source count mismatch");
  if (f.alphabet_size() != map.alphabet_size()) {
    throw std::invalid_argument("pmf and alphabet map disagree");
  }
  if (static_cast<double>(n) * std::log2(static_cast<double>(q)) > 24.0 + 1e-9) {
    throw std::invalid_argument("enumeration regime requires N log2 q <= 24");
  }

  // Field-lexicographic enumeration order makes ties resolve to the smallest
  // configuration without an extra comparison.
  std::vector<std::pair<std::uint8_t, int>> image;  // (field value, alphabet index)
  for (std::size_t v = 0; v < q; ++v) {
    const auto u = static_cast<std::uint8_t>(v);
    if (map.in_image(u)) image.emplace_back(u, map.index_of_field(u));
  }
  const std::size_t m = image.size();

  std::vector<std::size_t> odo(n, 0);
  std::vector<std::uint8_t> xf(n);
  std::vector<int> xi(n);
  std::vector<std::uint8_t> best;
  double best_p = -1.0;
  const gf::Field& field = a.field();

  while (true) {
    for (std::size_t k = 0; k < n; ++k) {
      xf[k] = image[odo[k]].first;
      xi[k] = image[odo[k]].second;
    }
    bool feasible = true;
    for (std::size_t l = 0; l < a.rows() && feasible; ++l) {
      std::uint8_t acc = 0;
      for (std::size_t c = 0; c < n; ++c) acc ^= field.mul(a.at(l, c), xf[c]);
      feasible = acc == batch.y[l];
    }
    if (feasible) {
      const double p = f.prob(xi);
      if (p > best_p) {
        best_p = p;
        best = xf;
      }
    }
    std::size_t k = n;
    while (k-- > 0) {
      if (++odo[k] < m) break;
      odo[k] = 0;
      if (k == 0) {
        if (best.empty()) {
          throw coding::IntegrityError("no source configuration satisfies the coded symbols");
        }
        return best;
      }
    }
  }
}

}  // namespace ncorr::decode
