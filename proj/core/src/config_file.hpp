#pragma once

// Reader for the TOML subset used by clearlens configuration files: tables,
// bare or quoted keys, strings, integers, floats, booleans and arrays of
// strings. Dotted keys, inline tables and dates are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace clearlens::detail {

using TomlValue = std::variant<bool, std::int64_t, double, std::string, std::vector<std::string>>;

struct TomlTable {
  // Empty for keys that precede the first table header.
  std::string name;
  std::vector<std::pair<std::string, TomlValue>> entries;

  const TomlValue* find(std::string_view key) const;

  // Typed accessors throw Error{InvalidConfig} on a type mismatch and return
  // nullopt when the key is absent. Integers are accepted as numbers.
  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<double> get_number(std::string_view key) const;
  std::optional<std::int64_t> get_integer(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  std::optional<std::vector<std::string>> get_string_array(std::string_view key) const;

  // Throws Error{InvalidConfig} for a key outside `known`.
  void expect_keys(std::initializer_list<std::string_view> known) const;
};

// Throws Error{InvalidConfig} with the line number of the first problem.
std::vector<TomlTable> parse_toml(std::string_view text);

}  // namespace clearlens::detail
