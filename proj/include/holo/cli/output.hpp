#pragma once

#include <complex>
#include <string>
#include <vector>

namespace holo::cli {

constexpr int kSummaryVersion = 1;

// Shortest-independent fixed format: 17 significant digits, '.' decimal, no locale.
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(const std::string& s);
    Row& operator<<(const char* s) { return *this << std::string(s); }
    Row& operator<<(double v);
    Row& operator<<(int v);
    // Real and imaginary parts as two cells.
    Row& operator<<(const std::complex<double>& z);

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  Row& row();
  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

std::string summary_json(const std::string& command, const std::string& scenario,
                         const std::vector<CheckResult>& checks);

// Writes the whole file or throws IoError.
void write_file(const std::string& path, const std::string& content);

}  // namespace holo::cli
