#include "config_file.hpp"

#include <algorithm>
#include <charconv>
#include <initializer_list>

#include "clearlens/error.hpp"
#include "text_util.hpp"

namespace clearlens::detail {
namespace {

bool is_bare_key_char(char ch) { return is_ascii_alnum(ch) || ch == '_' || ch == '-'; }

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<TomlTable> parse() {
    std::vector<TomlTable> tables(1);
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        std::string name = key();
        skip_spaces();
        expect(']');
        for (const TomlTable& t : tables) {
          if (!t.name.empty() && t.name == name) fail("duplicate table [" + name + "]");
        }
        if (name.empty()) fail("empty table name");
        tables.push_back(TomlTable{name, {}});
      } else {
        std::string k = key();
        skip_spaces();
        expect('=');
        skip_spaces();
        TomlValue v = value();
        TomlTable& table = tables.back();
        if (table.find(k) != nullptr) fail("duplicate key '" + k + "'");
        table.entries.emplace_back(std::move(k), std::move(v));
      }
      end_of_line();
    }
    return tables;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_) + ": " + why);
  }

  void expect(char ch) {
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (peek() == ' ' || peek() == '\t') ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    expect('\n');
    ++line_;
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (!at_end()) newline();
  }

  std::string key() {
    if (peek() == '"' || peek() == '\'') return string_value();
    std::size_t start = pos_;
    while (is_bare_key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    if (peek() == '.') fail("dotted keys are not supported");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string string_value() {
    char quote = peek();
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char ch = text_[pos_++];
      if (ch == quote) return out;
      if (ch != '\\' || quote == '\'') {
        out.push_back(ch);
        continue;
      }
      if (at_end()) fail("unterminated string");
      char esc = text_[pos_++];
      switch (esc) {
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        case 'r':
          out.push_back('\r');
          break;
        case '"':
        case '\\':
          out.push_back(esc);
          break;
        case 'u':
        case 'U': {
          std::size_t digits = esc == 'u' ? 4 : 8;
          if (pos_ + digits > text_.size()) fail("short unicode escape");
          char32_t cp = 0;
          for (std::size_t i = 0; i < digits; ++i) {
            char h = text_[pos_ + i];
            if (!is_ascii_hex(h)) fail("bad unicode escape");
            cp = cp * 16 + static_cast<char32_t>(hex_value(h));
          }
          pos_ += digits;
          append_utf8(out, cp);
          break;
        }
        default:
          fail(std::string("unknown escape \\") + esc);
      }
    }
  }

  TomlValue value() {
    char ch = peek();
    if (ch == '"' || ch == '\'') return string_value();
    if (ch == '[') return array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  TomlValue number() {
    std::size_t start = pos_;
    while (!at_end() && (is_ascii_alnum(peek()) || peek() == '+' || peek() == '-' ||
                         peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string digits;
    for (char ch : text_.substr(start, pos_ - start)) {
      if (ch != '_') digits.push_back(ch);
    }
    if (digits.empty()) fail("expected a value");
    if (digits.front() == '+') digits.erase(0, 1);
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (ec == std::errc{} && ptr == last) return out;
    } else {
      double out = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (ec == std::errc{} && ptr == last) return out;
    }
    fail("invalid value '" + std::string(text_.substr(start, pos_ - start)) + "'");
  }

  void skip_array_space() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }

  TomlValue array() {
    expect('[');
    std::vector<std::string> items;
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        ++pos_;
        return items;
      }
      if (peek() != '"' && peek() != '\'') fail("only arrays of strings are supported");
      items.push_back(string_value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

[[noreturn]] void wrong_type(std::string_view key, std::string_view want) {
  throw Error(ErrorCode::InvalidConfig,
              "config key '" + std::string(key) + "' must be " + std::string(want));
}

}  // namespace

const TomlValue* TomlTable::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::optional<std::string> TomlTable::get_string(std::string_view key) const {
  const TomlValue* v = find(key);
  if (v == nullptr) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  wrong_type(key, "a string");
}

std::optional<double> TomlTable::get_number(std::string_view key) const {
  const TomlValue* v = find(key);
  if (v == nullptr) return std::nullopt;
  if (const auto* d = std::get_if<double>(v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  wrong_type(key, "a number");
}

std::optional<std::int64_t> TomlTable::get_integer(std::string_view key) const {
  const TomlValue* v = find(key);
  if (v == nullptr) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  wrong_type(key, "an integer");
}

std::optional<bool> TomlTable::get_bool(std::string_view key) const {
  const TomlValue* v = find(key);
  if (v == nullptr) return std::nullopt;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  wrong_type(key, "true or false");
}

std::optional<std::vector<std::string>> TomlTable::get_string_array(std::string_view key) const {
  const TomlValue* v = find(key);
  if (v == nullptr) return std::nullopt;
  if (const auto* a = std::get_if<std::vector<std::string>>(v)) return *a;
  wrong_type(key, "an array of strings");
}

void TomlTable::expect_keys(std::initializer_list<std::string_view> known) const {
  for (const auto& entry : entries) {
    if (std::find(known.begin(), known.end(), entry.first) == known.end()) {
      std::string where = name.empty() ? std::string("top level") : "[" + name + "]";
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + entry.first + "' in " + where);
    }
  }
}

std::vector<TomlTable> parse_toml(std::string_view text) { return Reader(text).parse(); }

}  // namespace clearlens::detail
