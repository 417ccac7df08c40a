#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ncorr/bounds.hpp"
#include "ncorr/coding.hpp"
#include "ncorr/decode.hpp"
#include "ncorr/model.hpp"
#include "ncorr/rng.hpp"
#include "ncorr/sensor.hpp"

using namespace ncorr;

namespace {

void BM_gf_mul(benchmark::State& state) {
  gf::Field f(static_cast<unsigned>(state.range(0)));
  std::mt19937_64 g = rng::make_stream(1);
  std::vector<std::uint8_t> a(4096), b(4096);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<std::uint8_t>(rng::uniform_below(g, f.size()));
    b[i] = static_cast<std::uint8_t>(rng::uniform_below(g, f.size()));
  }
  for (auto _ : state) {
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= f.mul(a[i], b[i]);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_gf_mul)->Arg(3)->Arg(8);

void BM_xor_convolution(benchmark::State& state) {
  const std::size_t q = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 g = rng::make_stream(2);
  std::vector<double> u(q), v(q);
  for (std::size_t i = 0; i < q; ++i) {
    u[i] = rng::uniform_unit(g);
    v[i] = rng::uniform_unit(g);
  }
  for (auto _ : state) {
    auto w = decode::xor_convolution(u, v);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(BM_xor_convolution)->Arg(16)->Arg(64)->Arg(256);

void BM_preprocess(benchmark::State& state) {
  gf::Field f(8);
  std::mt19937_64 g = rng::make_stream(3);
  const std::size_t n = 30, l = 24;
  const auto a = coding::CodingMatrix::random(l, n, f, g);
  std::vector<std::uint8_t> x(n);
  for (auto& s : x) s = static_cast<std::uint8_t>(rng::uniform_below(g, 256));
  const coding::CodedBatch batch(a, coding::encode(a, x));
  for (auto _ : state) {
    auto pre = coding::preprocess(batch);
    benchmark::DoNotOptimize(pre.y_prime.data());
  }
}
BENCHMARK(BM_preprocess);

void BM_bound_report(benchmark::State& state) {
  const auto f = model::chain_laplacian_model(30, 0.05, 32);
  for (auto _ : state) {
    auto rep = bounds::upper_bound(f, 32, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(rep.bound);
  }
}
BENCHMARK(BM_bound_report)->Arg(10)->Arg(25);

void BM_decode_deficient(benchmark::State& state) {
  // One rank-deficient decode at sensor-experiment scale.
  const std::size_t n = 20, l = static_cast<std::size_t>(state.range(0));
  const model::GaussianSensorModel sensor(n, 0.05, 7, model::Quantizer{3, 4.0});
  gf::Field field(3);
  const auto map = model::AlphabetMap::identity(field);
  model::CorrelationGraph corr(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) corr.add_edge(i, j, sensor.pairwise_noise(i, j));
  }
  std::vector<std::vector<double>> priors(n);
  for (std::size_t i = 0; i < n; ++i) priors[i] = sensor.marginal_pmf(i);

  std::mt19937_64 g = rng::make_stream(4);
  const auto xi = sensor.sample_sources(g);
  std::vector<std::uint8_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = map.to_field(xi[i]);
  const auto a = coding::CodingMatrix::random(l, n, field, g);
  const auto pre = coding::preprocess(coding::CodedBatch(a, coding::encode(a, x)));
  decode::DecodeOptions opt;
  opt.k_max = 30;
  for (auto _ : state) {
    auto res = decode::decode_bp(pre, corr, priors, map, opt);
    benchmark::DoNotOptimize(res.symbols.data());
  }
}
BENCHMARK(BM_decode_deficient)->Arg(15)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_pairwise_noise(benchmark::State& state) {
  const model::GaussianSensorModel sensor(4, 0.01, 11,
                                          model::Quantizer{static_cast<unsigned>(state.range(0)), 4.0});
  for (auto _ : state) {
    auto g = sensor.pairwise_noise(0, 1);
    benchmark::DoNotOptimize(g.mass.data());
  }
  state.SetLabel("rho=" + std::to_string(sensor.correlation(0, 1)));
}
BENCHMARK(BM_pairwise_noise)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
