#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace clearlens {

enum class Scheme { Http, Https };

std::string_view to_string(Scheme scheme);
std::uint16_t default_port(Scheme scheme);

// An absolute http(s) URL split into its parts. Host is lowercased, path is
// never empty and characters outside the URL code points are percent-encoded,
// so to_string() of a parsed value reparses to the same parts.
struct SourceUrl {
  std::string raw;
  Scheme scheme = Scheme::Http;
  std::string host;
  std::uint16_t port = 80;
  std::string path = "/";
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  // scheme://host[:port] with the port omitted when it is the default.
  std::string origin() const;
  // path plus ?query, no fragment; what goes on the HTTP request line.
  std::string request_target() const;
  std::string to_string() const;
  std::string without_fragment() const;

  // Compares parts only; `raw` is provenance, not identity.
  bool same_parts(const SourceUrl& other) const;
};

// Parses user or document input into an absolute URL. Input without a scheme
// is taken as http. Throws Error{MalformedUrl} or Error{UnsupportedScheme}.
SourceUrl parse_url(std::string_view raw);

// Lowercased scheme when `text` starts with `scheme ":"`, otherwise empty.
std::string scheme_of(std::string_view text);

// Encodes every byte outside ALPHA / DIGIT / "-" / "." / "_" / "~" as %XX
// with uppercase hex. Space becomes %20.
std::string percent_encode_component(std::string_view text);

// Decodes %XX sequences; malformed escapes are kept literally. '+' is not
// treated as a space.
std::string percent_decode(std::string_view text);

// Value of the first `name` parameter in an undecoded query string, decoded
// with form rules ('+' is a space).
std::optional<std::string> query_parameter(std::string_view query, std::string_view name);

}  // namespace clearlens
