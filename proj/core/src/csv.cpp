#include "ncorr/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ncorr::harness {

namespace {
constexpr const char* kHeader = "experiment,N,q,param,L,metric,value,samples";
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& comment_block,
              std::ostream& out) {
  out << comment_block;
  out << kHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.experiment << ',' << r.n << ',' << r.q << ',' << r.param << ','
        << format_number(r.l) << ',' << r.metric << ',' << format_number(r.value) << ','
        << r.samples << "\n";
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& comment_block,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // keep LF endings everywhere
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_csv(rows, comment_block, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ResultRow> parse_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kHeader) throw std::runtime_error("unexpected CSV header: " + line);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + " has " +
                               std::to_string(fields.size()) + " fields");
    }
    ResultRow r;
    r.experiment = fields[0];
    r.n = std::stoul(fields[1]);
    r.q = std::stoul(fields[2]);
    r.param = fields[3];
    r.l = fields[4] == "inf" ? std::numeric_limits<double>::infinity() : std::stod(fields[4]);
    r.metric = fields[5];
    r.value = fields[6] == "inf" ? std::numeric_limits<double>::infinity() : std::stod(fields[6]);
    r.samples = std::stoul(fields[7]);
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw std::runtime_error("CSV has no header");
  return rows;
}

}  // namespace ncorr::harness
