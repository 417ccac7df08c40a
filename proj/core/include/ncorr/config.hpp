#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ncorr::harness {

/// Flat `key = value` configuration. Lines starting with '#' and blank lines
/// are ignored. Every key an experiment understands is consumed through the
/// typed getters; leftovers are reported as errors so typos never pass
/// silently.
class Config {
 public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  std::size_t get_size(const std::string& key, std::size_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback);
  std::vector<std::size_t> get_size_list(const std::string& key, std::vector<std::size_t> fallback);

  /// Throws std::runtime_error naming any key that was never consumed.
  void ensure_all_consumed() const;

  /// Deterministic "# key = value" lines of everything consumed (with the
  /// defaults filled in), for embedding into result files.
  std::string resolved_comment_block() const;

 private:
  std::string take(const std::string& key);
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace ncorr::harness
