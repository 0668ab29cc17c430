#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace clearlens {

// Canonical lowercase name for a charset label, or nullopt when no decoder
// exists for it. "latin1", "iso-8859-1" and "us-ascii" map to windows-1252.
std::optional<std::string> canonical_charset(std::string_view label);

inline bool is_supported_charset(std::string_view label) {
  return canonical_charset(label).has_value();
}

// Converts `bytes` in `charset` to UTF-8. Invalid sequences become U+FFFD and
// a leading UTF-8 byte order mark is dropped. Throws Error{UnsupportedCharset}.
std::string decode_to_utf8(std::string_view bytes, std::string_view charset);

// The charset parameter of a Content-Type header value, unvalidated.
std::optional<std::string> charset_from_content_type(std::string_view content_type);

// Looks for <meta charset> or <meta http-equiv content="...charset=..."> in the
// first 1024 bytes.
std::optional<std::string> sniff_meta_charset(std::string_view body);

// Header parameter, then meta sniff, then utf-8; labels without a decoder are
// skipped. Always returns a supported canonical name.
std::string resolve_charset(std::string_view content_type, std::string_view body);

}  // namespace clearlens
