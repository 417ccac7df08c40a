#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ncorr::harness {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::size_t size() const { return width * height; }
};

/// Binary PGM (P5, maxval <= 255). Header comments are skipped; anything
/// else malformed throws std::runtime_error.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// PSNR in dB between two equally sized images whose pixel values use
/// `bits` bits. A zero MSE reports the lossless sentinel (+infinity).
double psnr_db(const GrayImage& a, const GrayImage& b, unsigned bits);

}  // namespace ncorr::harness
