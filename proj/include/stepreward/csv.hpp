#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "stepreward/errors.hpp"

namespace stepreward {

/// Round-trip-exact formatting; the same double always yields the same text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV writer with a hard NaN/Inf guard: a non-finite value anywhere in an
/// output row aborts the run as a numerical error.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path.string()) {
    out_.open(path, std::ios::binary);
    if (!out_) throw validation_error("cannot write output file: " + path_);
    out_ << header << "\n";
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    std::string line;
    ((append(line, fields)), ...);
    line.back() = '\n';
    out_ << line;
  }

 private:
  void append(std::string& line, double v) {
    if (!std::isfinite(v)) {
      throw numerical_error("non-finite value in output file " + path_);
    }
    line += format_double(v);
    line += ',';
  }
  void append(std::string& line, int v) { line += std::to_string(v) + ','; }
  void append(std::string& line, std::size_t v) { line += std::to_string(v) + ','; }
  void append(std::string& line, const std::string& v) { line += v + ','; }
  void append(std::string& line, const char* v) { line += std::string(v) + ','; }

  std::string path_;
  std::ofstream out_;
};

}  // namespace stepreward
