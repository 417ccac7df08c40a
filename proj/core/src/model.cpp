#include "ncorr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ncorr/rng.hpp"

namespace ncorr::model {

namespace {
constexpr double kTableTol = 1e-12;
constexpr std::size_t kMaxExplicitBits = 24;

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t limit_bits) {
  double bits = static_cast<double>(exp) * std::log2(static_cast<double>(base));
  if (bits > static_cast<double>(limit_bits) + 1e-9) {
    throw std::invalid_argument("explicit joint table too large: " + std::to_string(exp) +
                                " sources over alphabet " + std::to_string(base));
  }
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}
}  // namespace

AlphabetMap::AlphabetMap(std::vector<int> alphabet, const gf::Field& field,
                         std::vector<std::uint8_t> forward)
    : alphabet_(std::move(alphabet)), field_(field), forward_(std::move(forward)),
      inverse_index_(field.size(), -1) {
  if (alphabet_.empty()) throw std::invalid_argument("empty alphabet");
  if (alphabet_.size() != forward_.size()) {
    throw std::invalid_argument("alphabet and forward map sizes differ");
  }
  if (alphabet_.size() > field_.size()) {
    throw std::invalid_argument("alphabet larger than the field");
  }
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    const std::uint8_t v = forward_[i];
    if (v >= field_.size()) throw std::invalid_argument("mapped value outside the field");
    if (inverse_index_[v] >= 0) throw std::invalid_argument("forward map is not injective");
    inverse_index_[v] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i + 1 < alphabet_.size(); ++i) {
    for (std::size_t j = i + 1; j < alphabet_.size(); ++j) {
      if (alphabet_[i] == alphabet_[j]) throw std::invalid_argument("alphabet has duplicates");
    }
  }
}

AlphabetMap AlphabetMap::identity(const gf::Field& field) {
  std::vector<int> alpha(field.size());
  std::vector<std::uint8_t> fwd(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    alpha[i] = static_cast<int>(i);
    fwd[i] = static_cast<std::uint8_t>(i);
  }
  return AlphabetMap(std::move(alpha), field, std::move(fwd));
}

AlphabetMap AlphabetMap::offset_range(const gf::Field& field, int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("empty range");
  std::vector<int> alpha;
  std::vector<std::uint8_t> fwd;
  for (int x = lo; x <= hi; ++x) {
    alpha.push_back(x);
    fwd.push_back(static_cast<std::uint8_t>(x - lo));
  }
  return AlphabetMap(std::move(alpha), field, std::move(fwd));
}

std::uint8_t AlphabetMap::to_field(int x) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i] == x) return forward_[i];
  }
  throw std::domain_error("symbol " + std::to_string(x) + " outside the source alphabet");
}

int AlphabetMap::from_field(std::uint8_t v) const {
  if (v >= field_.size() || inverse_index_[v] < 0) {
    throw std::domain_error("field value " + std::to_string(v) + " has no source symbol");
  }
  return alphabet_[static_cast<std::size_t>(inverse_index_[v])];
}

JointPmf JointPmf::explicit_table(std::size_t n_sources, std::size_t alphabet_size,
                                  std::vector<double> table) {
  if (n_sources == 0 || alphabet_size == 0) throw std::invalid_argument("empty pmf domain");
  const std::size_t expect = checked_pow(alphabet_size, n_sources, kMaxExplicitBits);
  if (table.size() != expect) {
    throw std::invalid_argument("table size " + std::to_string(table.size()) +
                                " does not match m^N = " + std::to_string(expect));
  }
  double sum = 0.0;
  for (double v : table) {
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("negative or non-finite mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kTableTol) {
    throw std::invalid_argument("table mass " + std::to_string(sum) + " not 1 within 1e-12");
  }
  JointPmf f;
  f.chain_ = false;
  f.n_ = n_sources;
  f.m_ = alphabet_size;
  f.table_ = std::move(table);
  return f;
}

JointPmf JointPmf::chain(std::size_t n_sources, std::vector<double> initial,
                         std::vector<double> kernel) {
  const std::size_t m = initial.size();
  if (n_sources < 1) throw std::invalid_argument("need at least one source");
  if (m == 0) throw std::invalid_argument("empty initial pmf");
  if (kernel.size() % m != 0 || kernel.size() / m != m) {
    throw std::invalid_argument("kernel is not m x m");
  }
  double s0 = std::accumulate(initial.begin(), initial.end(), 0.0);
  if (std::abs(s0 - 1.0) > kTableTol) throw std::invalid_argument("initial pmf not normalized");
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const double v = kernel[r * m + c];
      if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("negative kernel entry");
      s += v;
    }
    if (std::abs(s - 1.0) > kTableTol) {
      throw std::invalid_argument("kernel row " + std::to_string(r) + " not normalized");
    }
  }
  JointPmf f;
  f.chain_ = true;
  f.n_ = n_sources;
  f.m_ = m;
  f.initial_ = std::move(initial);
  f.kernel_ = std::move(kernel);
  return f;
}

double JointPmf::prob(std::span<const int> config) const {
  if (config.size() != n_) throw std::invalid_argument("config length mismatch");
  for (int x : config) {
    if (x < 0 || static_cast<std::size_t>(x) >= m_) throw std::invalid_argument("config value outside alphabet");
  }
  if (!chain_) {
    std::size_t idx = 0;
    for (int x : config) idx = idx * m_ + static_cast<std::size_t>(x);
    return table_[idx];
  }
  double p = initial_[static_cast<std::size_t>(config[0])];
  for (std::size_t i = 1; i < n_; ++i) {
    p *= kernel_[static_cast<std::size_t>(config[i - 1]) * m_ + static_cast<std::size_t>(config[i])];
  }
  return p;
}

std::vector<double> JointPmf::marginal(std::size_t i) const {
  if (i >= n_) throw std::invalid_argument("source index out of range");
  if (chain_) {
    std::vector<double> v = initial_;
    std::vector<double> next(m_);
    for (std::size_t step = 0; step < i; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t a = 0; a < m_; ++a) {
        if (v[a] == 0.0) continue;
        for (std::size_t b = 0; b < m_; ++b) next[b] += v[a] * kernel_[a * m_ + b];
      }
      v.swap(next);
    }
    return v;
  }
  std::vector<double> out(m_, 0.0);
  std::vector<int> cfg(n_, 0);
  for (std::size_t idx = 0; idx < table_.size(); ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = n_; k-- > 0;) {
      cfg[k] = static_cast<int>(rem % m_);
      rem /= m_;
    }
    out[static_cast<std::size_t>(cfg[i])] += table_[idx];
  }
  return out;
}

namespace {
std::size_t sample_categorical(std::span<const double> pmf, std::mt19937_64& g) {
  const double u = rng::uniform_unit(g);
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    if (u < acc) return k;
  }
  return pmf.size() - 1;  // guard against rounding at the top end
}
}  // namespace

std::vector<int> JointPmf::sample(std::mt19937_64& g) const {
  std::vector<int> out(n_);
  if (chain_) {
    std::size_t prev = sample_categorical(initial_, g);
    out[0] = static_cast<int>(prev);
    for (std::size_t i = 1; i < n_; ++i) {
      std::span<const double> row(kernel_.data() + prev * m_, m_);
      prev = sample_categorical(row, g);
      out[i] = static_cast<int>(prev);
    }
    return out;
  }
  const std::size_t idx = sample_categorical(table_, g);
  std::size_t rem = idx;
  for (std::size_t k = n_; k-- > 0;) {
    out[k] = static_cast<int>(rem % m_);
    rem /= m_;
  }
  return out;
}

double JointPmf::entropy_bits() const {
  if (!chain_) return model::entropy_bits(table_);
  // H(X1) + sum_i H(X_i | X_{i-1}) via the running marginal.
  double h = model::entropy_bits(initial_);
  std::vector<double> v = initial_;
  std::vector<double> next(m_);
  for (std::size_t i = 1; i < n_; ++i) {
    for (std::size_t a = 0; a < m_; ++a) {
      if (v[a] == 0.0) continue;
      std::span<const double> row(kernel_.data() + a * m_, m_);
      h += v[a] * model::entropy_bits(row);
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t a = 0; a < m_; ++a) {
      if (v[a] == 0.0) continue;
      for (std::size_t b = 0; b < m_; ++b) next[b] += v[a] * kernel_[a * m_ + b];
    }
    v.swap(next);
  }
  return h;
}

const std::vector<double>& JointPmf::table() const {
  if (chain_) throw std::logic_error("chain pmf has no explicit table");
  return table_;
}

const std::vector<double>& JointPmf::initial() const {
  if (!chain_) throw std::logic_error("explicit pmf has no chain form");
  return initial_;
}

const std::vector<double>& JointPmf::kernel() const {
  if (!chain_) throw std::logic_error("explicit pmf has no chain form");
  return kernel_;
}

JointPmf JointPmf::to_explicit() const {
  if (!chain_) return *this;
  const std::size_t total = checked_pow(m_, n_, kMaxExplicitBits);
  std::vector<double> table(total);
  std::vector<int> cfg(n_, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = n_; k-- > 0;) {
      cfg[k] = static_cast<int>(rem % m_);
      rem /= m_;
    }
    table[idx] = prob(cfg);
  }
  // Renormalize rounding residue so the explicit constructor accepts it.
  double sum = std::accumulate(table.begin(), table.end(), 0.0);
  for (double& v : table) v /= sum;
  return explicit_table(n_, m_, std::move(table));
}

double EdgeNoisePmf::total() const {
  return std::accumulate(mass.begin(), mass.end(), 0.0);
}

EdgeNoisePmf EdgeNoisePmf::reversed() const {
  EdgeNoisePmf r;
  r.min_diff = -max_diff();
  r.mass.assign(mass.rbegin(), mass.rend());
  return r;
}

void CorrelationGraph::add_edge(std::size_t i, std::size_t j, EdgeNoisePmf g) {
  if (i >= n_ || j >= n_ || i == j) throw std::invalid_argument("bad edge endpoints");
  if (slot_[i * n_ + j] >= 0) throw std::invalid_argument("duplicate correlation edge");
  if (std::abs(g.total() - 1.0) > 1e-9) {
    throw std::invalid_argument("edge noise pmf not normalized within 1e-9");
  }
  for (double v : g.mass) {
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("negative noise mass");
  }
  EdgeNoisePmf rev = g.reversed();
  slot_[i * n_ + j] = static_cast<int>(pmfs_.size());
  pmfs_.push_back(std::move(g));
  slot_[j * n_ + i] = static_cast<int>(pmfs_.size());
  pmfs_.push_back(std::move(rev));
  edges_ += 2;
}

bool CorrelationGraph::correlated(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || i == j) return false;
  return slot_[i * n_ + j] >= 0;
}

const EdgeNoisePmf* CorrelationGraph::noise(std::size_t i, std::size_t j) const {
  if (!correlated(i, j)) return nullptr;
  return &pmfs_[static_cast<std::size_t>(slot_[i * n_ + j])];
}

EdgeNoisePmf laplacian_noise_pmf(double p, int support_radius) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("laplacian parameter must be in (0,1)");
  if (support_radius < 0) throw std::invalid_argument("negative support radius");
  EdgeNoisePmf g;
  g.min_diff = -support_radius;
  g.mass.resize(2 * static_cast<std::size_t>(support_radius) + 1);
  const double c = (1.0 - p) / (1.0 + p);
  double sum = 0.0;
  for (int w = -support_radius; w <= support_radius; ++w) {
    const double v = c * std::pow(p, std::abs(w));
    g.mass[static_cast<std::size_t>(w + support_radius)] = v;
    sum += v;
  }
  for (double& v : g.mass) v /= sum;
  return g;
}

JointPmf chain_laplacian_model(std::size_t n_sources, double p, std::size_t q) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("laplacian parameter must be in (0,1)");
  if (q < 2) throw std::invalid_argument("alphabet size must be at least 2");
  if (n_sources < 1) throw std::invalid_argument("need at least one source");
  std::vector<double> initial(q, 1.0 / static_cast<double>(q));
  std::vector<double> kernel(q * q);
  const double c = (1.0 - p) / (1.0 + p);
  for (std::size_t prev = 0; prev < q; ++prev) {
    double sum = 0.0;
    for (std::size_t next = 0; next < q; ++next) {
      const double v = c * std::pow(p, std::abs(static_cast<int>(next) - static_cast<int>(prev)));
      kernel[prev * q + next] = v;
      sum += v;
    }
    for (std::size_t next = 0; next < q; ++next) kernel[prev * q + next] /= sum;
  }
  return JointPmf::chain(n_sources, std::move(initial), std::move(kernel));
}

std::vector<double> lift_marginal(const JointPmf& f, const AlphabetMap& map, std::size_t i) {
  if (f.alphabet_size() != map.alphabet_size()) {
    throw std::invalid_argument("pmf and alphabet map disagree on alphabet size");
  }
  std::vector<double> marg = f.marginal(i);
  std::vector<double> out(map.field().size(), 0.0);
  for (std::size_t k = 0; k < marg.size(); ++k) {
    out[map.field_value_of_index(k)] = marg[k];
  }
  return out;
}

std::vector<double> lift_joint(const JointPmf& f, const AlphabetMap& map) {
  if (f.alphabet_size() != map.alphabet_size()) {
    throw std::invalid_argument("pmf and alphabet map disagree on alphabet size");
  }
  const std::size_t q = map.field().size();
  const std::size_t n = f.n_sources();
  const std::size_t total = checked_pow(q, n, kMaxExplicitBits);
  std::vector<double> out(total, 0.0);
  const std::size_t m = f.alphabet_size();
  std::size_t configs = 1;
  for (std::size_t k = 0; k < n; ++k) configs *= m;
  std::vector<int> cfg(n, 0);
  for (std::size_t idx = 0; idx < configs; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = n; k-- > 0;) {
      cfg[k] = static_cast<int>(rem % m);
      rem /= m;
    }
    std::size_t lifted = 0;
    for (std::size_t k = 0; k < n; ++k) {
      lifted = lifted * q + map.field_value_of_index(static_cast<std::size_t>(cfg[k]));
    }
    out[lifted] = f.prob(cfg);
  }
  return out;
}

double entropy_bits(std::span<const double> pmf) {
  double h = 0.0;
  for (double v : pmf) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace ncorr::model
