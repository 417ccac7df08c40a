#include "ncorr/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ncorr::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + " has no '=': " + t);
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key)) {
      throw std::runtime_error("config key '" + key + "' appears twice");
    }
    cfg.values_[key] = value;
    cfg.consumed_[key] = false;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  consumed_[key] = false;
}

std::string Config::take(const std::string& key) {
  consumed_[key] = true;
  return values_.at(key);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  const std::string v = has(key) ? take(key) : fallback;
  resolved_[key] = v;
  return v;
}

std::string Config::require_string(const std::string& key) {
  if (!has(key)) throw std::runtime_error("missing required config key '" + key + "'");
  const std::string v = take(key);
  resolved_[key] = v;
  return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) {
    resolved_[key] = std::to_string(fallback);
    return fallback;
  }
  const std::string v = take(key);
  try {
    const std::uint64_t r = std::stoull(v);
    resolved_[key] = std::to_string(r);
    return r;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "' is not an unsigned integer: " + v);
  }
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

double Config::get_double(const std::string& key, double fallback) {
  if (!has(key)) {
    std::ostringstream os;
    os << fallback;
    resolved_[key] = os.str();
    return fallback;
  }
  const std::string v = take(key);
  try {
    const double r = std::stod(v);
    resolved_[key] = v;
    return r;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "' is not a number: " + v);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) {
    resolved_[key] = fallback ? "true" : "false";
    return fallback;
  }
  const std::string v = take(key);
  resolved_[key] = v;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config key '" + key + "' is not a boolean: " + v);
}

std::vector<double> Config::get_double_list(const std::string& key, std::vector<double> fallback) {
  if (!has(key)) {
    std::ostringstream os;
    for (std::size_t i = 0; i < fallback.size(); ++i) os << (i ? "," : "") << fallback[i];
    resolved_[key] = os.str();
    return fallback;
  }
  const std::string v = take(key);
  resolved_[key] = v;
  std::vector<double> out;
  for (const std::string& item : split_commas(v)) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw std::runtime_error("config key '" + key + "' has a non-numeric item: " + item);
    }
  }
  if (out.empty()) throw std::runtime_error("config key '" + key + "' is an empty list");
  return out;
}

std::vector<std::size_t> Config::get_size_list(const std::string& key,
                                               std::vector<std::size_t> fallback) {
  if (!has(key)) {
    std::ostringstream os;
    for (std::size_t i = 0; i < fallback.size(); ++i) os << (i ? "," : "") << fallback[i];
    resolved_[key] = os.str();
    return fallback;
  }
  const std::string v = take(key);
  resolved_[key] = v;
  std::vector<std::size_t> out;
  for (const std::string& item : split_commas(v)) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(item)));
    } catch (...) {
      throw std::runtime_error("config key '" + key + "' has a non-integer item: " + item);
    }
  }
  if (out.empty()) throw std::runtime_error("config key '" + key + "' is an empty list");
  return out;
}

void Config::ensure_all_consumed() const {
  std::string unknown;
  for (const auto& [key, used] : consumed_) {
    if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) {
    throw std::runtime_error("unknown config keys: " + unknown);
  }
}

std::string Config::resolved_comment_block() const {
  std::string out;
  for (const auto& [key, value] : resolved_) {
    out += "# " + key + " = " + value + "\n";
  }
  return out;
}

}  // namespace ncorr::harness
