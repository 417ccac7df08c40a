#include "ncorr/pgm.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace ncorr::harness {

namespace {

// Next whitespace-separated token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.peek()) != EOF && !std::isspace(c)) {
      tok.push_back(static_cast<char>(in.get()));
    }
    return tok;
  }
  throw std::runtime_error("unexpected end of PGM header");
}

std::size_t parse_header_number(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  try {
    const long v = std::stol(tok);
    if (v <= 0) throw std::runtime_error("");
    return static_cast<std::size_t>(v);
  } catch (...) {
    throw std::runtime_error(std::string("bad PGM ") + what + ": '" + tok + "'");
  }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (next_token(in) != "P5") throw std::runtime_error(path.string() + ": not a binary PGM (P5)");
  GrayImage img;
  img.width = parse_header_number(in, "width");
  img.height = parse_header_number(in, "height");
  const std::size_t maxval = parse_header_number(in, "maxval");
  if (maxval > 255) {
    throw std::runtime_error(path.string() + ": 16-bit PGM not supported (maxval " +
                             std::to_string(maxval) + ")");
  }
  in.get();  // single whitespace after maxval
  img.pixels.resize(img.size());
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.size()) {
    throw std::runtime_error(path.string() + ": truncated pixel data");
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

double psnr_db(const GrayImage& a, const GrayImage& b, unsigned bits) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("image sizes differ");
  }
  if (a.size() == 0) throw std::invalid_argument("empty image");
  double se = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a.pixels[k]) - static_cast<double>(b.pixels[k]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = static_cast<double>((1u << bits) - 1);
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace ncorr::harness
