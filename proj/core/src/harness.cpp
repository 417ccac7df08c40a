#include "ncorr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ncorr/bounds.hpp"
#include "ncorr/coding.hpp"
#include "ncorr/decode.hpp"
#include "ncorr/rng.hpp"
#include "ncorr/sensor.hpp"

namespace ncorr::harness {

namespace {

unsigned field_exponent(std::size_t q) {
  if (q < 2 || (q & (q - 1)) != 0 || q > 256) {
    throw std::invalid_argument("field size must be a power of two in [2, 256], got " +
                                std::to_string(q));
  }
  return static_cast<unsigned>(std::bit_width(q) - 1);
}

std::string format_param(double v) {
  return format_number(v);
}

}  // namespace

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double fit_laplacian_p(std::uint64_t n_samples, std::uint64_t sum_abs_diffs) {
  if (n_samples == 0) throw std::invalid_argument("no samples to fit");
  const double n = static_cast<double>(n_samples);
  const double s = static_cast<double>(sum_abs_diffs);
  if (s == 0.0) return 1e-6;  // everything identical: maximal correlation
  const double p = (std::sqrt(n * n + s * s) - n) / s;
  return std::clamp(p, 1e-6, 1.0 - 1e-9);
}

// ---------------------------------------------------------------------------
// bound sweep

BoundSweepSpec BoundSweepSpec::from_config(Config& cfg) {
  BoundSweepSpec s;
  s.n_sources = cfg.get_size("n_sources", s.n_sources);
  s.alphabet = cfg.get_size("alphabet", s.alphabet);
  s.p_list = cfg.get_double_list("p", s.p_list);
  s.fields = cfg.get_size_list("field", s.fields);
  s.l_min = cfg.get_size("l_min", s.l_min);
  s.l_max = cfg.get_size("l_max", s.l_max);
  s.deltas = cfg.get_double_list("delta", s.deltas.empty() ? std::vector<double>{} : s.deltas);
  return s;
}

std::vector<ResultRow> run_bound_sweep(const BoundSweepSpec& spec) {
  if (spec.l_max < spec.l_min) throw std::invalid_argument("l_max below l_min");
  std::vector<ResultRow> rows;
  for (double p : spec.p_list) {
    const model::JointPmf f = model::chain_laplacian_model(spec.n_sources, p, spec.alphabet);
    for (std::size_t q : spec.fields) {
      if (q < spec.alphabet) {
        throw std::invalid_argument("field size " + std::to_string(q) +
                                    " smaller than the alphabet");
      }
      for (std::size_t l = spec.l_min; l <= spec.l_max; ++l) {
        const bounds::BoundReport rep = bounds::upper_bound(f, q, l);
        rows.push_back({"bound", spec.n_sources, q, format_param(p),
                        static_cast<double>(l), "bound", rep.bound, 0});
        rows.push_back({"bound", spec.n_sources, q, format_param(p),
                        static_cast<double>(l), "rho_star", rep.rho_star, 0});
        rows.push_back({"bound", spec.n_sources, q, format_param(p),
                        static_cast<double>(l), "regime",
                        static_cast<double>(static_cast<int>(rep.regime)), 0});
      }
      for (double delta : spec.deltas) {
        const bounds::MinSymbolsReport rep = bounds::min_symbols(f, q, delta);
        rows.push_back({"bound", spec.n_sources, q, format_param(p), delta, "min_l_over_n",
                        rep.best_ratio, 0});
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// sensor experiment

SensorSpec SensorSpec::from_config(Config& cfg) {
  SensorSpec s;
  s.n_sensors = cfg.get_size("n_sensors", s.n_sensors);
  s.betas = cfg.get_double_list("beta", s.betas);
  s.bits = static_cast<unsigned>(cfg.get_size("bits", s.bits));
  s.quant_range = cfg.get_double("quant_range", s.quant_range);
  s.fields = cfg.get_size_list("field", {std::size_t{1} << s.bits});
  s.l_min = cfg.get_size("l_min", s.l_min);
  s.l_max = cfg.get_size("l_max", s.l_max);
  s.samples = cfg.get_size("samples", s.samples);
  s.k_max = cfg.get_size("k_max", s.k_max);
  s.seed = cfg.get_u64("seed", s.seed);
  s.workers = cfg.get_size("workers", s.workers);
  return s;
}

std::vector<ResultRow> run_sensor_experiment(const SensorSpec& spec) {
  if (spec.l_max < spec.l_min) throw std::invalid_argument("l_max below l_min");
  if (spec.samples < 1) throw std::invalid_argument("need at least one sample");
  const std::size_t n = spec.n_sensors;
  const std::size_t bins = std::size_t{1} << spec.bits;

  std::vector<ResultRow> rows;
  for (std::size_t bi = 0; bi < spec.betas.size(); ++bi) {
    const double beta = spec.betas[bi];
    // Positions depend only on the seed, so every beta and field size sees
    // the same sensor layout.
    const model::GaussianSensorModel sensor(n, beta, spec.seed,
                                            model::Quantizer{spec.bits, spec.quant_range});

    model::CorrelationGraph corr(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        corr.add_edge(i, j, sensor.pairwise_noise(i, j));
      }
    }
    std::vector<std::vector<double>> bin_marginals(n);
    for (std::size_t i = 0; i < n; ++i) bin_marginals[i] = sensor.marginal_pmf(i);

    for (std::size_t qi = 0; qi < spec.fields.size(); ++qi) {
      const std::size_t q = spec.fields[qi];
      if (q < bins) throw std::invalid_argument("field smaller than the quantizer alphabet");
      const gf::Field field(field_exponent(q));
      const model::AlphabetMap map =
          model::AlphabetMap::offset_range(field, 0, static_cast<int>(bins) - 1);
      std::vector<std::vector<double>> priors(n);
      for (std::size_t i = 0; i < n; ++i) {
        priors[i].assign(q, 0.0);
        for (std::size_t k = 0; k < bins; ++k) priors[i][k] = bin_marginals[i][k];
      }

      for (std::size_t l = spec.l_min; l <= spec.l_max; ++l) {
        const std::uint64_t point_id =
            (static_cast<std::uint64_t>(bi) << 40) | (static_cast<std::uint64_t>(qi) << 28) | l;
        std::vector<char> failed(spec.samples, 0);
        parallel_for(spec.samples, spec.workers, [&](std::size_t trial) {
          std::mt19937_64 g = rng::make_stream(spec.seed, point_id, trial + 1);
          const std::vector<int> x = sensor.sample_sources(g);
          std::vector<std::uint8_t> x_hat(n);
          for (std::size_t i = 0; i < n; ++i) x_hat[i] = map.to_field(x[i]);
          coding::CodingMatrix a = coding::CodingMatrix::random(l, n, field, g);
          std::vector<std::uint8_t> y = coding::encode(a, x_hat);
          const coding::CodedBatch pre =
              coding::preprocess(coding::CodedBatch(std::move(a), std::move(y)));
          decode::DecodeOptions opt;
          opt.k_max = spec.k_max;
          const decode::DecodeResult res = decode::decode_bp(pre, corr, priors, map, opt);
          failed[trial] = res.symbols != x_hat ? 1 : 0;
        });
        const std::size_t errors =
            static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
        rows.push_back({"sensor", n, q, format_param(beta), static_cast<double>(l), "error_rate",
                        static_cast<double>(errors) / static_cast<double>(spec.samples),
                        spec.samples});
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// image experiment

ImageSpec ImageSpec::from_config(Config& cfg) {
  ImageSpec s;
  s.frames_dir = cfg.require_string("frames_dir");
  s.frames = cfg.get_size("frames", s.frames);
  s.bits = static_cast<unsigned>(cfg.get_size("bits", s.bits));
  s.field = cfg.get_size("field", s.field);
  s.l_min = cfg.get_size("l_min", s.l_min);
  s.l_max = cfg.get_size("l_max", s.l_max);
  s.batches = cfg.get_size("batches", s.batches);
  s.fixed_matrix = cfg.get_bool("fixed_matrix", s.fixed_matrix);
  s.k_max = cfg.get_size("k_max", s.k_max);
  s.p_override = cfg.get_double("p", s.p_override);
  s.window = cfg.get_size("window", s.window);
  s.uniform_priors = cfg.get_bool("uniform_priors", s.uniform_priors);
  s.seed = cfg.get_u64("seed", s.seed);
  s.workers = cfg.get_size("workers", s.workers);
  const std::string dump = cfg.get_string("dump_decoded", "");
  if (!dump.empty()) s.dump_decoded = dump;
  return s;
}

namespace {

std::vector<GrayImage> load_quantized_frames(const ImageSpec& spec) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(spec.frames_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.size() < spec.frames) {
    throw std::runtime_error("found " + std::to_string(files.size()) + " .pgm frames in " +
                             spec.frames_dir.string() + ", need " + std::to_string(spec.frames));
  }
  files.resize(spec.frames);

  std::vector<GrayImage> frames;
  const unsigned shift = 8 - spec.bits;
  for (const auto& f : files) {
    GrayImage img = read_pgm(f);
    if (!frames.empty() &&
        (img.width != frames[0].width || img.height != frames[0].height)) {
      throw std::runtime_error("frame size mismatch: " + f.string());
    }
    for (auto& px : img.pixels) px = static_cast<std::uint8_t>(px >> shift);
    frames.push_back(std::move(img));
  }
  return frames;
}

}  // namespace

ImageRunResult run_image_experiment(const ImageSpec& spec) {
  if (spec.bits < 1 || spec.bits > 8) throw std::invalid_argument("bits must be in [1, 8]");
  if (spec.batches < 1) throw std::invalid_argument("need at least one batch");
  const std::vector<GrayImage> frames = load_quantized_frames(spec);
  const std::size_t n = frames.size();
  const std::size_t pixels = frames[0].size();
  const std::size_t bins = std::size_t{1} << spec.bits;
  const std::size_t q = spec.field == 0 ? bins : spec.field;
  if (q < bins) throw std::invalid_argument("field smaller than the pixel alphabet");
  const gf::Field field(field_exponent(q));
  const model::AlphabetMap map =
      model::AlphabetMap::offset_range(field, 0, static_cast<int>(bins) - 1);

  // Pairwise Laplacian correlation, parameters fitted per frame pair unless
  // overridden. The window limits how far apart correlated frames may be.
  const std::size_t window = spec.window == 0 ? n : spec.window;
  model::CorrelationGraph corr(n);
  std::vector<ResultRow> param_rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && j - i <= window; ++j) {
      double p = spec.p_override;
      if (p == 0.0) {
        std::uint64_t sum = 0;
        for (std::size_t k = 0; k < pixels; ++k) {
          sum += static_cast<std::uint64_t>(
              std::abs(static_cast<int>(frames[i].pixels[k]) - static_cast<int>(frames[j].pixels[k])));
        }
        p = fit_laplacian_p(pixels, sum);
      }
      corr.add_edge(i, j, model::laplacian_noise_pmf(p, static_cast<int>(bins) - 1));
    }
  }

  std::vector<std::vector<double>> priors(n);
  for (std::size_t i = 0; i < n; ++i) {
    priors[i].assign(q, 0.0);
    if (spec.uniform_priors) {
      for (std::size_t k = 0; k < bins; ++k) priors[i][k] = 1.0 / static_cast<double>(bins);
    } else {
      for (std::size_t k = 0; k < pixels; ++k) priors[i][frames[i].pixels[k]] += 1.0;
      for (double& v : priors[i]) v /= static_cast<double>(pixels);
    }
  }

  const std::size_t l_lo = spec.l_min == 0 ? (n > 4 ? n - 4 : 1) : spec.l_min;
  const std::size_t l_hi = spec.l_max == 0 ? n : spec.l_max;
  if (l_hi < l_lo) throw std::invalid_argument("l_max below l_min");

  ImageRunResult result;
  result.quantized = frames;

  decode::DecodeOptions opt;
  opt.k_max = spec.k_max;

  for (std::size_t l = l_lo; l <= l_hi; ++l) {
    const std::size_t li = l - l_lo;
    result.l_values.push_back(l);
    std::size_t total_errors = 0;
    std::vector<double> psnr_acc(n, 0.0);
    std::vector<GrayImage> decoded_last;
    std::size_t rank_last = 0;

    for (std::size_t b = 0; b < spec.batches; ++b) {
      std::mt19937_64 g = rng::make_stream(spec.seed, 0xb0 + li, spec.fixed_matrix ? 0 : b);
      const coding::CodingMatrix a = coding::CodingMatrix::random(l, n, field, g);
      const coding::Preprocessor pre(a);
      rank_last = pre.rank();

      // Template graph; workers clone it and swap per-pixel targets.
      coding::CodedBatch proto(a, std::vector<std::uint8_t>(l, 0));
      proto.a_prime = pre.reduced();
      proto.y_prime.assign(pre.rank(), 0);
      const decode::FactorGraph graph_template =
          decode::build_factor_graph(proto, corr, priors, map);

      std::vector<GrayImage> decoded(n);
      for (std::size_t i = 0; i < n; ++i) {
        decoded[i].width = frames[0].width;
        decoded[i].height = frames[0].height;
        decoded[i].pixels.assign(pixels, 0);
      }
      std::vector<char> failed(pixels, 0);

      const std::size_t workers =
          spec.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.workers;
      const std::size_t chunk = (pixels + workers - 1) / workers;
      parallel_for(workers, workers, [&](std::size_t w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(pixels, begin + chunk);
        if (begin >= end) return;
        decode::FactorGraph graph = graph_template;
        std::vector<std::uint8_t> x_hat(n), y(l);
        for (std::size_t px = begin; px < end; ++px) {
          for (std::size_t i = 0; i < n; ++i) x_hat[i] = map.to_field(frames[i].pixels[px]);
          y = coding::encode(a, x_hat);
          graph.set_targets(pre.apply(y));
          const decode::DecodeResult res = decode::decode_graph(graph, opt);
          bool bad = false;
          for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t sym = res.symbols[i];
            decoded[i].pixels[px] = static_cast<std::uint8_t>(map.from_field(sym));
            if (sym != x_hat[i]) bad = true;
          }
          failed[px] = bad ? 1 : 0;
        }
      });

      total_errors += static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
      for (std::size_t i = 0; i < n; ++i) {
        psnr_acc[i] += psnr_db(frames[i], decoded[i], spec.bits);
      }
      if (b + 1 == spec.batches) decoded_last = std::move(decoded);
    }

    const double denom = static_cast<double>(pixels * spec.batches);
    result.rows.push_back({"images", n, q, "avg", static_cast<double>(l), "error_rate",
                           static_cast<double>(total_errors) / denom, pixels * spec.batches});
    double psnr_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) psnr_mean += psnr_acc[i] / static_cast<double>(spec.batches);
    psnr_mean /= static_cast<double>(n);
    result.rows.push_back(
        {"images", n, q, "avg", static_cast<double>(l), "psnr_db", psnr_mean, pixels * spec.batches});
    for (std::size_t i = 0; i < n; ++i) {
      result.rows.push_back({"images", n, q, "f" + std::to_string(i), static_cast<double>(l),
                             "psnr_db", psnr_acc[i] / static_cast<double>(spec.batches),
                             pixels * spec.batches});
    }

    if (!spec.dump_decoded.empty()) {
      std::filesystem::create_directories(spec.dump_decoded);
      const unsigned shift = 8 - spec.bits;
      for (std::size_t i = 0; i < n; ++i) {
        GrayImage out = decoded_last[i];
        for (auto& px : out.pixels) px = static_cast<std::uint8_t>(px << shift);
        write_pgm(out, spec.dump_decoded /
                           ("decoded_L" + std::to_string(l) + "_f" + std::to_string(i) + ".pgm"));
      }
    }
    result.decoded.push_back(std::move(decoded_last));
    result.ranks.push_back(rank_last);
  }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<ResultRow> run_from_config(const std::string& experiment, Config& cfg,
                                       const std::filesystem::path& out_path) {
  std::vector<ResultRow> rows;
  if (experiment == "bound") {
    const BoundSweepSpec spec = BoundSweepSpec::from_config(cfg);
    cfg.ensure_all_consumed();
    rows = run_bound_sweep(spec);
  } else if (experiment == "sensor") {
    const SensorSpec spec = SensorSpec::from_config(cfg);
    cfg.ensure_all_consumed();
    rows = run_sensor_experiment(spec);
  } else if (experiment == "images") {
    const ImageSpec spec = ImageSpec::from_config(cfg);
    cfg.ensure_all_consumed();
    rows = run_image_experiment(spec).rows;
  } else {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  const std::string comments = "# experiment = " + experiment + "\n" + cfg.resolved_comment_block();
  emit_csv(rows, comments, out_path);
  return rows;
}

}  // namespace ncorr::harness
