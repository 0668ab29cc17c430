#include "clearlens/source_url.hpp"

#include <algorithm>
#include <charconv>

#include "clearlens/error.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

bool is_scheme_char(char ch) {
  return detail::is_ascii_alnum(ch) || ch == '+' || ch == '-' || ch == '.';
}

bool needs_encoding(unsigned char ch) {
  if (ch <= 0x20 || ch >= 0x7F) return true;
  switch (ch) {
    case '"':
    case '<':
    case '>':
    case '`':
    case '{':
    case '}':
    case '\\':
    case '^':
    case '|':
      return true;
    default:
      return false;
  }
}

std::string encode_unsafe(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    auto byte = static_cast<unsigned char>(ch);
    if (needs_encoding(byte)) {
      detail::append_percent_escape(out, byte);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

bool is_host_char(char ch) {
  return detail::is_ascii_alnum(ch) || ch == '-' || ch == '.' || ch == '_';
}

// Drops leading/trailing C0 controls and spaces, and tabs/newlines anywhere.
std::string clean_input(std::string_view raw) {
  std::size_t first = 0;
  std::size_t last = raw.size();
  while (first < last && static_cast<unsigned char>(raw[first]) <= 0x20) ++first;
  while (last > first && static_cast<unsigned char>(raw[last - 1]) <= 0x20) --last;
  std::string out;
  out.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) {
    char ch = raw[i];
    if (ch == '\t' || ch == '\n' || ch == '\r') continue;
    out.push_back(ch);
  }
  return out;
}

// "localhost:8080" or "example.com:81/x" look like scheme:... but are a bare
// host with a port.
bool looks_like_host_port(std::string_view text, std::size_t colon) {
  std::size_t i = colon + 1;
  std::size_t digits = 0;
  while (i < text.size() && detail::is_ascii_digit(text[i])) {
    ++i;
    ++digits;
  }
  return digits > 0 && (i == text.size() || text[i] == '/' || text[i] == '?' || text[i] == '#');
}

[[noreturn]] void malformed(std::string_view raw, std::string_view why) {
  throw Error(ErrorCode::MalformedUrl,
              "malformed URL '" + std::string(raw) + "': " + std::string(why));
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Https ? "https" : "http";
}

std::uint16_t default_port(Scheme scheme) {
  return scheme == Scheme::Https ? 443 : 80;
}

std::string SourceUrl::origin() const {
  std::string out(clearlens::to_string(scheme));
  out += "://";
  out += host;
  if (port != default_port(scheme)) {
    out += ':';
    out += std::to_string(port);
  }
  return out;
}

std::string SourceUrl::request_target() const {
  std::string out = path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

std::string SourceUrl::without_fragment() const {
  return origin() + request_target();
}

std::string SourceUrl::to_string() const {
  std::string out = without_fragment();
  if (fragment) {
    out += '#';
    out += *fragment;
  }
  return out;
}

bool SourceUrl::same_parts(const SourceUrl& other) const {
  return scheme == other.scheme && host == other.host && port == other.port &&
         path == other.path && query == other.query && fragment == other.fragment;
}

std::string scheme_of(std::string_view text) {
  if (text.empty() || !detail::is_ascii_alpha(text.front())) return {};
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] == ':') return detail::ascii_lower(text.substr(0, i));
    if (!is_scheme_char(text[i])) return {};
  }
  return {};
}

SourceUrl parse_url(std::string_view raw) {
  std::string input = clean_input(raw);
  if (input.empty()) malformed(raw, "empty");

  SourceUrl url;
  url.raw = std::string(raw);

  std::string_view rest = input;
  std::string scheme = scheme_of(rest);
  if (!scheme.empty() && !looks_like_host_port(rest, scheme.size())) {
    if (scheme != "http" && scheme != "https") {
      throw Error(ErrorCode::UnsupportedScheme,
                  "unsupported URL scheme '" + scheme + "' in '" + std::string(raw) + "'");
    }
    url.scheme = scheme == "https" ? Scheme::Https : Scheme::Http;
    rest.remove_prefix(scheme.size() + 1);
    if (!detail::starts_with(rest, "//")) malformed(raw, "expected '//' after scheme");
    rest.remove_prefix(2);
  } else if (detail::starts_with(rest, "//")) {
    rest.remove_prefix(2);
  }

  std::size_t authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  if (authority.find('@') != std::string_view::npos) malformed(raw, "credentials are not supported");

  std::string_view host_part = authority;
  std::string_view port_part;
  if (detail::starts_with(authority, "[")) {
    std::size_t close = authority.find(']');
    if (close == std::string_view::npos) malformed(raw, "unterminated IPv6 literal");
    host_part = authority.substr(0, close + 1);
    std::string_view after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') malformed(raw, "junk after IPv6 literal");
      port_part = after.substr(1);
    }
    for (char ch : host_part.substr(1, host_part.size() - 2)) {
      if (!detail::is_ascii_hex(ch) && ch != ':' && ch != '.') malformed(raw, "bad IPv6 literal");
    }
  } else {
    std::size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
      host_part = authority.substr(0, colon);
      port_part = authority.substr(colon + 1);
    }
    for (char ch : host_part) {
      if (!is_host_char(ch)) malformed(raw, "invalid character in host");
    }
  }
  if (host_part.empty() || host_part == "[]") malformed(raw, "missing host");
  url.host = detail::ascii_lower(host_part);

  url.port = default_port(url.scheme);
  if (!port_part.empty()) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port_part.data(), port_part.data() + port_part.size(), value);
    if (ec != std::errc{} || ptr != port_part.data() + port_part.size() || value == 0 ||
        value > 65535) {
      malformed(raw, "invalid port");
    }
    url.port = static_cast<std::uint16_t>(value);
  }

  std::size_t hash = rest.find('#');
  if (hash != std::string_view::npos) {
    url.fragment = encode_unsafe(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  std::size_t question = rest.find('?');
  if (question != std::string_view::npos) {
    url.query = encode_unsafe(rest.substr(question + 1));
    rest = rest.substr(0, question);
  }
  url.path = rest.empty() ? std::string("/") : encode_unsafe(rest);
  return url;
}

std::string percent_encode_component(std::string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char ch : text) {
    if (detail::is_ascii_alnum(ch) || ch == '-' || ch == '.' || ch == '_' || ch == '~') {
      out.push_back(ch);
    } else {
      detail::append_percent_escape(out, static_cast<unsigned char>(ch));
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() && detail::is_ascii_hex(text[i + 1]) && detail::is_ascii_hex(text[i + 2])) {
      out.push_back(static_cast<char>(detail::hex_value(text[i + 1]) * 16 +
                                      detail::hex_value(text[i + 2])));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::optional<std::string> query_parameter(std::string_view query, std::string_view name) {
  auto form_decode = [](std::string_view part) {
    std::string plus_as_space(part);
    std::replace(plus_as_space.begin(), plus_as_space.end(), '+', ' ');
    return percent_decode(plus_as_space);
  };
  while (!query.empty()) {
    std::size_t amp = query.find('&');
    std::string_view pair = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (pair.empty()) continue;
    std::size_t eq = pair.find('=');
    std::string key = form_decode(pair.substr(0, eq));
    if (key != name) continue;
    return eq == std::string_view::npos ? std::string{} : form_decode(pair.substr(eq + 1));
  }
  return std::nullopt;
}

}  // namespace clearlens
