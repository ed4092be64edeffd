#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace weyl_lab::io {

// Shortest round-trip decimal form of a double (to_chars). Parsing the result
// gives back the identical bits, and the output is platform-independent.
std::string fmt(double v);
std::string fmt(std::int64_t v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  // '#'-prefixed comment line (units, provenance of columns)
  void comment(const std::string& text);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  bool good() const { return static_cast<bool>(out_); }

  template <class... Args>
  void row_of(const Args&... args) {
    row(std::vector<std::string>{cell(args)...});
  }

  static std::string cell(double v) { return fmt(v); }
  static std::string cell(int v) { return fmt(static_cast<std::int64_t>(v)); }
  static std::string cell(long v) { return fmt(static_cast<std::int64_t>(v)); }
  static std::string cell(long long v) { return fmt(static_cast<std::int64_t>(v)); }
  static std::string cell(std::size_t v) { return fmt(static_cast<std::int64_t>(v)); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

 private:
  std::ofstream out_;
};

}  // namespace weyl_lab::io
