#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ncorr/config.hpp"
#include "ncorr/csv.hpp"
#include "ncorr/pgm.hpp"

namespace ncorr::harness {

/// Runs fn(0..n-1) on `workers` threads (0 = hardware concurrency). Work is
/// handed out by an atomic counter; results must be stored by index so the
/// outcome never depends on scheduling.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Maximum-likelihood parameter of the zero-mean discrete Laplacian fitted
/// to observed integer differences, clamped into (0, 1).
double fit_laplacian_p(std::uint64_t n_samples, std::uint64_t sum_abs_diffs);

// ---------------------------------------------------------------------------
// bound sweep

struct BoundSweepSpec {
  std::size_t n_sources = 30;
  std::size_t alphabet = 32;               // chain state count
  std::vector<double> p_list = {0.05, 0.10, 0.15, 0.25, 0.50};
  std::vector<std::size_t> fields = {32};  // q' >= alphabet
  std::size_t l_min = 0;
  std::size_t l_max = 40;
  std::vector<double> deltas;              // empty: skip min-symbols rows

  static BoundSweepSpec from_config(Config& cfg);
};

std::vector<ResultRow> run_bound_sweep(const BoundSweepSpec& spec);

// ---------------------------------------------------------------------------
// sensor experiment

struct SensorSpec {
  std::size_t n_sensors = 20;
  std::vector<double> betas = {0.01, 0.2};
  unsigned bits = 3;
  double quant_range = 4.0;
  std::vector<std::size_t> fields = {8};  // q >= 2^bits
  std::size_t l_min = 14;
  std::size_t l_max = 22;
  std::size_t samples = 1000;
  std::size_t k_max = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  static SensorSpec from_config(Config& cfg);
};

std::vector<ResultRow> run_sensor_experiment(const SensorSpec& spec);

// ---------------------------------------------------------------------------
// image experiment

struct ImageSpec {
  std::filesystem::path frames_dir;
  std::size_t frames = 5;     // N sources
  unsigned bits = 4;
  std::size_t field = 0;      // 0: use 2^bits
  std::size_t l_min = 0;      // 0: N-4
  std::size_t l_max = 0;      // 0: N
  std::size_t batches = 1;    // coding matrices per L (fresh randomness each)
  bool fixed_matrix = false;  // reuse the first batch matrix (debug mode)
  std::size_t k_max = 100;
  double p_override = 0.0;    // 0: maximum-likelihood fit per pair
  std::size_t window = 0;     // temporal correlation window, 0: all pairs
  bool uniform_priors = false;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::filesystem::path dump_decoded;  // empty: do not write frames

  static ImageSpec from_config(Config& cfg);
};

struct ImageRunResult {
  std::vector<ResultRow> rows;
  // decoded[l_index][frame] for the last batch at each L, quantized domain
  std::vector<std::vector<GrayImage>> decoded;
  std::vector<GrayImage> quantized;     // quantized originals
  std::vector<std::size_t> ranks;       // rank of the (last) matrix per L
  std::vector<std::size_t> l_values;
};

ImageRunResult run_image_experiment(const ImageSpec& spec);

/// Reads config + seed override, runs the named experiment and writes the
/// CSV. Returns the rows it wrote.
std::vector<ResultRow> run_from_config(const std::string& experiment, Config& cfg,
                                       const std::filesystem::path& out_path);

}  // namespace ncorr::harness
