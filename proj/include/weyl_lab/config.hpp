#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Flat key-value experiment configs: a TOML subset with strings, numbers,
// booleans, single-line scalar arrays, and one level of [section] tables.
// Keys inside [section] are addressed as "section.key". Every diagnostic
// carries the 1-based line and column it points at.
namespace weyl_lab::config {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line, int col);
  int line = 0;
  int col = 0;
};

struct Value {
  enum class Kind { string, number, boolean, array };
  Kind kind = Kind::string;
  std::string str;
  double num = 0;
  bool flag = false;
  std::vector<Value> items;  // scalar elements only
  int line = 0, col = 0;
};

class Config {
 public:
  bool has(const std::string& key) const;

  // typed getters; a missing key or a type mismatch raises ConfigError with
  // the value's location (or 0:0 when the key is absent)
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

  const Value& at(const std::string& key) const;

  // keys in file order
  const std::vector<std::string>& keys() const { return order_; }
  // keys no getter has touched; non-empty after a run means the config
  // carries settings nothing consumed, which is treated as an error
  std::vector<std::string> unconsumed() const;

  void insert(const std::string& key, Value v);  // parser use

 private:
  std::map<std::string, Value> values_;
  std::vector<std::string> order_;
  mutable std::set<std::string> touched_;
};

Config parse_string(const std::string& text);
Config parse_file(const std::string& path);

}  // namespace weyl_lab::config
