#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ncorr::harness {

/// One metric sample of an experiment run.
struct ResultRow {
  std::string experiment;
  std::size_t n = 0;
  std::size_t q = 0;
  std::string param;   // experiment-specific: p, beta, bit depth, frame id
  double l = 0.0;      // grid coordinate: L for most rows, delta for min_symbols
  std::string metric;  // bound, min_l_over_n, error_rate, psnr_db
  double value = 0.0;
  std::size_t samples = 0;
};

/// Writes `# ...` comment lines, the fixed header and one line per row.
/// Output is byte-deterministic for identical inputs (LF endings, fixed
/// float formatting).
void emit_csv(const std::vector<ResultRow>& rows, const std::string& comment_block,
              std::ostream& out);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& comment_block,
              const std::filesystem::path& path);

/// Parses rows written by emit_csv (comments skipped). Round-trips exactly
/// for values emitted by it.
std::vector<ResultRow> parse_csv(std::istream& in);

std::string format_number(double v);

}  // namespace ncorr::harness
