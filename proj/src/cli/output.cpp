#include "holo/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "holo/cli/scenario.hpp"

namespace holo::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    cells_.push_back(s);
    return *this;
  }
  // Quoted cell with doubled quotes.
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  cells_.push_back(q + '"');
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(double v) { return *this << format_number(v); }

CsvTable::Row& CsvTable::Row::operator<<(int v) { return *this << std::to_string(v); }

CsvTable::Row& CsvTable::Row::operator<<(const std::complex<double>& z) {
  *this << z.real();
  return *this << z.imag();
}

CsvTable::Row& CsvTable::row() {
  rows_.emplace_back();
  return rows_.back();
}

std::string CsvTable::str() const {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + '\n';
  };
  std::string out = join(header_);
  for (const auto& r : rows_) out += join(r.cells_);
  return out;
}

std::string summary_json(const std::string& command, const std::string& scenario,
                         const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSummaryVersion;
  j["command"] = command;
  j["scenario"] = scenario;
  bool all = true;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["residual"] = c.residual;
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    if (!c.detail.empty()) e["detail"] = c.detail;
    list.push_back(e);
    all = all && c.pass;
  }
  j["checks"] = list;
  j["pass"] = all;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace holo::cli
