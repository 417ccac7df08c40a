#include "ncorr/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ncorr/rng.hpp"

namespace ncorr::model {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNode = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeight = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Cell probability of a correlated standard normal pair, with the inner
// dimension integrated exactly: the remaining 1-D integrand is
// phi(s) * [Phi((y1 - rho s)/sigma) - Phi((y0 - rho s)/sigma)]. Near-singular
// correlations turn the bracket into a sharp step in s, which the adaptive
// bisection resolves cheaply in one dimension.
struct CellIntegrand {
  double rho;
  double inv_sigma;  // 1 / sqrt(1 - rho^2)
  double y0, y1;

  double operator()(double s) const {
    const double hi = (y1 - rho * s) * inv_sigma;
    const double lo = (y0 - rho * s) * inv_sigma;
    return std_normal_pdf(s) * (std_normal_cdf(hi) - std_normal_cdf(lo));
  }
};

double gl_segment(const CellIntegrand& f, double a, double b) {
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGlNode.size(); ++i) {
    acc += kGlWeight[i] * f(c + h * kGlNode[i]);
  }
  return acc * h;
}

struct AdaptiveState {
  const CellIntegrand* f;
  int max_depth;
  bool converged = true;
};

double adapt_segment(AdaptiveState& st, double a, double b, double coarse, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl_segment(*st.f, a, m);
  const double right = gl_segment(*st.f, m, b);
  const double fine = left + right;
  if (std::abs(fine - coarse) <= tol) return fine;
  if (depth >= st.max_depth) {
    st.converged = false;
    return fine;
  }
  return adapt_segment(st, a, m, left, tol * 0.5, depth + 1) +
         adapt_segment(st, m, b, right, tol * 0.5, depth + 1);
}

double integrate_cell(double rho, double x0, double x1, double y0, double y1, double tol,
                      bool* converged) {
  const CellIntegrand f{rho, 1.0 / std::sqrt((1.0 - rho) * (1.0 + rho)), y0, y1};
  AdaptiveState st{&f, 48};
  const double v = adapt_segment(st, x0, x1, gl_segment(f, x0, x1), tol, 0);
  if (!st.converged) *converged = false;
  return v;
}

}  // namespace

int Quantizer::index_for(double s) const {
  if (s <= -range) return 0;
  if (s >= range) return static_cast<int>(bins()) - 1;
  const int k = static_cast<int>(std::floor((s + range) / bin_width()));
  return std::clamp(k, 0, static_cast<int>(bins()) - 1);
}

int quantize(double s, unsigned bits, double range) {
  if (!(range > 0.0) || !std::isfinite(range)) throw std::invalid_argument("range must be finite and positive");
  return Quantizer{bits, range}.index_for(s);
}

GaussianSensorModel::GaussianSensorModel(std::size_t n, double beta, std::uint64_t seed,
                                         Quantizer quantizer)
    : n_(n), beta_(beta), quantizer_(quantizer) {
  if (n < 2) throw std::invalid_argument("need at least two sensors");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");

  std::mt19937_64 g = rng::make_stream(seed, 0x706f73);
  positions_.resize(n);
  for (auto& p : positions_) {
    p[0] = rng::uniform_unit(g);
    p[1] = rng::uniform_unit(g);
  }

  cov_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cov_[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = positions_[i][0] - positions_[j][0];
      const double dy = positions_[i][1] - positions_[j][1];
      const double rho = std::exp(-beta * std::hypot(dx, dy));
      cov_[i * n + j] = rho;
      cov_[j * n + i] = rho;
    }
  }

  // Lower-triangular Cholesky with a single jitter retry.
  auto factor = [&](double jitter) -> bool {
    chol_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = cov_[i * n + j] + (i == j ? jitter : 0.0);
        for (std::size_t k = 0; k < j; ++k) s -= chol_[i * n + k] * chol_[j * n + k];
        if (i == j) {
          if (s <= 0.0) return false;
          chol_[i * n + i] = std::sqrt(s);
        } else {
          chol_[i * n + j] = s / chol_[j * n + j];
        }
      }
    }
    return true;
  };
  if (!factor(0.0)) {
    jitter_applied_ = true;
    if (!factor(1e-10)) {
      throw std::runtime_error("covariance is not positive definite even with jitter");
    }
  }
}

std::vector<double> GaussianSensorModel::sample_reals(std::mt19937_64& g) const {
  std::vector<double> z(n_);
  for (double& v : z) v = rng::standard_normal(g);
  std::vector<double> s(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= i; ++k) acc += chol_[i * n_ + k] * z[k];
    s[i] = acc;
  }
  return s;
}

std::vector<int> GaussianSensorModel::sample_sources(std::mt19937_64& g) const {
  const std::vector<double> s = sample_reals(g);
  std::vector<int> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = quantizer_.index_for(s[i]);
  return x;
}

std::vector<double> GaussianSensorModel::marginal_pmf(std::size_t i) const {
  if (i >= n_) throw std::invalid_argument("sensor index out of range");
  const std::size_t b = quantizer_.bins();
  std::vector<double> pmf(b);
  for (std::size_t k = 0; k < b; ++k) {
    const double lo = k == 0 ? -std::numeric_limits<double>::infinity() : quantizer_.edge(k);
    const double hi =
        k == b - 1 ? std::numeric_limits<double>::infinity() : quantizer_.edge(k + 1);
    const double plo = std::isinf(lo) ? 0.0 : std_normal_cdf(lo);
    const double phi = std::isinf(hi) ? 1.0 : std_normal_cdf(hi);
    pmf[k] = phi - plo;
  }
  return pmf;
}

std::vector<double> bivariate_cell_pmf(double rho, const Quantizer& quantizer) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::invalid_argument("correlation must be in (-1, 1) for quadrature");
  }
  const std::size_t b = quantizer.bins();
  // Boundary bins absorb the clamped tails; 8.5 sigma leaves ~1e-17 outside.
  const double far = std::max(8.5, quantizer.range + 1.0);
  std::vector<double> joint(b * b);
  bool converged = true;
  const double cell_tol = 1e-10;
  for (std::size_t ki = 0; ki < b; ++ki) {
    const double x0 = ki == 0 ? -far : quantizer.edge(ki);
    const double x1 = ki == b - 1 ? far : quantizer.edge(ki + 1);
    for (std::size_t kj = 0; kj < b; ++kj) {
      const double y0 = kj == 0 ? -far : quantizer.edge(kj);
      const double y1 = kj == b - 1 ? far : quantizer.edge(kj + 1);
      joint[ki * b + kj] = integrate_cell(rho, x0, x1, y0, y1, cell_tol, &converged);
    }
  }
  if (!converged) {
    throw std::runtime_error("bivariate quadrature did not converge (rho = " +
                             std::to_string(rho) + ", bins = " + std::to_string(b) + ")");
  }
  return joint;
}

EdgeNoisePmf GaussianSensorModel::pairwise_noise(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || i == j) throw std::invalid_argument("bad sensor pair");
  const std::size_t b = quantizer_.bins();
  const std::vector<double> joint = bivariate_cell_pmf(correlation(i, j), quantizer_);

  double total = 0.0;
  for (double v : joint) total += v;
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::runtime_error("cell masses sum to " + std::to_string(total) +
                             ", expected 1 within 1e-6");
  }

  EdgeNoisePmf g;
  g.min_diff = -(static_cast<int>(b) - 1);
  g.mass.assign(2 * b - 1, 0.0);
  for (std::size_t ki = 0; ki < b; ++ki) {
    for (std::size_t kj = 0; kj < b; ++kj) {
      const int w = static_cast<int>(ki) - static_cast<int>(kj);
      g.mass[static_cast<std::size_t>(w - g.min_diff)] += joint[ki * b + kj];
    }
  }
  for (double& v : g.mass) v /= total;
  return g;
}

}  // namespace ncorr::model
