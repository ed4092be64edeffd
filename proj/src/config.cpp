#include "weyl_lab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace weyl_lab::config {

namespace {

std::string locate(const std::string& msg, int line, int col) {
  std::ostringstream os;
  os << "line " << line << ", column " << col << ": " << msg;
  return os.str();
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_blank() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }
  void skip_to_eol() {
    while (!done() && peek() != '\n') take();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line, col); }
};

bool key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string read_key(Cursor& c) {
  if (c.done() || !key_char(c.peek())) c.fail("expected a key");
  std::string k;
  while (!c.done() && key_char(c.peek())) k.push_back(c.take());
  return k;
}

Value read_string(Cursor& c) {
  Value v;
  v.kind = Value::Kind::string;
  v.line = c.line;
  v.col = c.col;
  c.take();
  while (true) {
    if (c.done() || c.peek() == '\n') c.fail("unterminated string");
    char ch = c.take();
    if (ch == '"') return v;
    if (ch == '\\') {
      if (c.done()) c.fail("unterminated string");
      char e = c.take();
      switch (e) {
        case '"': v.str.push_back('"'); break;
        case '\\': v.str.push_back('\\'); break;
        case 'n': v.str.push_back('\n'); break;
        case 't': v.str.push_back('\t'); break;
        case 'r': v.str.push_back('\r'); break;
        default: c.fail(std::string("unknown escape \\") + e);
      }
      continue;
    }
    v.str.push_back(ch);
  }
}

Value read_scalar(Cursor& c);

Value read_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::array;
  v.line = c.line;
  v.col = c.col;
  c.take();
  while (true) {
    c.skip_blank();
    if (c.done() || c.peek() == '\n') c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      return v;
    }
    if (c.peek() == '[') c.fail("nested arrays are not supported");
    v.items.push_back(read_scalar(c));
    c.skip_blank();
    if (c.done() || c.peek() == '\n') c.fail("unterminated array");
    if (c.peek() == ',') {
      c.take();
      continue;
    }
    if (c.peek() != ']') c.fail("expected ',' or ']' in array");
  }
}

Value read_scalar(Cursor& c) {
  if (c.peek() == '"') return read_string(c);

  Value v;
  v.line = c.line;
  v.col = c.col;
  std::string tok;
  while (!c.done() && c.peek() != '\n' && c.peek() != ',' && c.peek() != ']' &&
         c.peek() != '#' && c.peek() != ' ' && c.peek() != '\t' && c.peek() != '\r')
    tok.push_back(c.take());
  if (tok.empty()) throw ConfigError("expected a value", v.line, v.col);
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::boolean;
    v.flag = tok == "true";
    return v;
  }
  double num = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), num);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ConfigError("'" + tok + "' is not a number, boolean, or quoted string", v.line,
                      v.col);
  v.kind = Value::Kind::number;
  v.num = num;
  return v;
}

const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::string: return "string";
    case Value::Kind::number: return "number";
    case Value::Kind::boolean: return "boolean";
    case Value::Kind::array: return "array";
  }
  return "value";
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, int line_, int col_)
    : std::runtime_error(locate(msg, line_, col_)), line(line_), col(col_) {}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const Value& Config::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'", 0, 0);
  touched_.insert(key);
  return it->second;
}

double Config::number(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::number)
    throw ConfigError("key '" + key + "' holds a " + kind_name(v.kind) + ", expected a number",
                      v.line, v.col);
  return v.num;
}

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::int64_t Config::integer(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::number)
    throw ConfigError("key '" + key + "' holds a " + kind_name(v.kind) + ", expected a number",
                      v.line, v.col);
  auto i = static_cast<std::int64_t>(v.num);
  if (static_cast<double>(i) != v.num)
    throw ConfigError("key '" + key + "' must be an integer", v.line, v.col);
  return i;
}

std::int64_t Config::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string Config::string(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::string)
    throw ConfigError("key '" + key + "' holds a " + kind_name(v.kind) + ", expected a string",
                      v.line, v.col);
  return v.str;
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool Config::boolean(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::boolean)
    throw ConfigError("key '" + key + "' holds a " + kind_name(v.kind) + ", expected a boolean",
                      v.line, v.col);
  return v.flag;
}

bool Config::boolean(const std::string& key, bool fallback) const {
  return has(key) ? boolean(key) : fallback;
}

std::vector<double> Config::numbers(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind == Value::Kind::number) return {v.num};
  if (v.kind != Value::Kind::array)
    throw ConfigError("key '" + key + "' holds a " + kind_name(v.kind) +
                          ", expected an array of numbers",
                      v.line, v.col);
  std::vector<double> out;
  for (const Value& e : v.items) {
    if (e.kind != Value::Kind::number)
      throw ConfigError("array '" + key + "' mixes in a " + kind_name(e.kind) +
                            ", expected numbers",
                        e.line, e.col);
    out.push_back(e.num);
  }
  return out;
}

std::vector<double> Config::numbers(const std::string& key,
                                    std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

std::vector<std::string> Config::unconsumed() const {
  std::vector<std::string> out;
  for (const std::string& k : order_)
    if (!touched_.count(k)) out.push_back(k);
  return out;
}

void Config::insert(const std::string& key, Value v) {
  if (values_.count(key))
    throw ConfigError("duplicate key '" + key + "'", v.line, v.col);
  values_.emplace(key, std::move(v));
  order_.push_back(key);
}

Config parse_string(const std::string& text) {
  Config cfg;
  Cursor c{text};
  std::string section;
  while (!c.done()) {
    c.skip_blank();
    if (c.done()) break;
    char ch = c.peek();
    if (ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '#') {
      c.skip_to_eol();
      continue;
    }
    if (ch == '[') {
      int line = c.line, col = c.col;
      c.take();
      c.skip_blank();
      std::string name = read_key(c);
      c.skip_blank();
      if (c.done() || c.peek() != ']') c.fail("expected ']' after the section name");
      c.take();
      c.skip_blank();
      if (!c.done() && c.peek() != '\n' && c.peek() != '#')
        c.fail("unexpected text after the section header");
      (void)line;
      (void)col;
      section = name;
      continue;
    }
    int kline = c.line, kcol = c.col;
    std::string key = read_key(c);
    c.skip_blank();
    if (c.done() || c.peek() != '=') throw ConfigError("expected '=' after the key", c.line, c.col);
    c.take();
    c.skip_blank();
    if (c.done() || c.peek() == '\n') c.fail("missing value");
    Value v = c.peek() == '[' ? read_array(c) : read_scalar(c);
    c.skip_blank();
    if (!c.done() && c.peek() != '\n' && c.peek() != '#')
      c.fail("unexpected text after the value");
    if (!c.done() && c.peek() == '#') c.skip_to_eol();
    std::string full = section.empty() ? key : section + "." + key;
    if (v.line == 0) v.line = kline;
    if (v.col == 0) v.col = kcol;
    cfg.insert(full, std::move(v));
  }
  return cfg;
}

Config parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

}  // namespace weyl_lab::config
