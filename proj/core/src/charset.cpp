#include "clearlens/charset.hpp"

#include <iconv.h>

#include <array>
#include <cerrno>
#include <memory>

#include "clearlens/error.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

// windows-1252 bytes 0x80..0x9F; 0 marks the five undefined slots, which map
// to the C1 control of the same value.
constexpr std::array<char16_t, 32> kWindows1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178,
};

std::string normalize_label(std::string_view label) {
  std::string_view trimmed = detail::trim_html_space(label);
  if (trimmed.size() >= 2 && (trimmed.front() == '"' || trimmed.front() == '\'') &&
      trimmed.back() == trimmed.front()) {
    trimmed = trimmed.substr(1, trimmed.size() - 2);
  }
  return detail::ascii_lower(detail::trim_html_space(trimmed));
}

struct IconvCloser {
  void operator()(void* cd) const { iconv_close(static_cast<iconv_t>(cd)); }
};
using IconvHandle = std::unique_ptr<void, IconvCloser>;

IconvHandle open_decoder(const std::string& charset) {
  iconv_t cd = iconv_open("UTF-8", charset.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return nullptr;
  return IconvHandle(cd);
}

std::string decode_utf8(std::string_view bytes) {
  if (detail::starts_with(bytes, "\xEF\xBB\xBF")) bytes.remove_prefix(3);
  std::string out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    detail::append_utf8(out, detail::next_code_point(bytes, pos));
  }
  return out;
}

std::string decode_windows_1252(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 8);
  for (char ch : bytes) {
    auto byte = static_cast<unsigned char>(ch);
    char32_t cp = byte;
    if (byte >= 0x80 && byte <= 0x9F && kWindows1252High[byte - 0x80] != 0) {
      cp = kWindows1252High[byte - 0x80];
    }
    detail::append_utf8(out, cp);
  }
  return out;
}

std::string decode_with_iconv(std::string_view bytes, const std::string& charset) {
  IconvHandle handle = open_decoder(charset);
  if (!handle) {
    throw Error(ErrorCode::UnsupportedCharset, "unsupported charset '" + charset + "'");
  }
  auto cd = static_cast<iconv_t>(handle.get());
  std::string out;
  std::string buffer(4096, '\0');
  char* in = const_cast<char*>(bytes.data());
  std::size_t in_left = bytes.size();
  while (in_left > 0) {
    char* dst = buffer.data();
    std::size_t dst_left = buffer.size();
    std::size_t rc = iconv(cd, &in, &in_left, &dst, &dst_left);
    out.append(buffer.data(), buffer.size() - dst_left);
    if (rc == static_cast<std::size_t>(-1)) {
      if (errno == E2BIG) continue;
      // EILSEQ or a truncated trailing sequence: replace one byte and resync.
      detail::append_utf8(out, 0xFFFD);
      ++in;
      --in_left;
      iconv(cd, nullptr, nullptr, nullptr, nullptr);
    }
  }
  return out;
}

}  // namespace

std::optional<std::string> canonical_charset(std::string_view label) {
  std::string name = normalize_label(label);
  if (name.empty()) return std::nullopt;
  if (name == "utf-8" || name == "utf8" || name == "unicode-1-1-utf-8") return "utf-8";
  if (name == "windows-1252" || name == "cp1252" || name == "iso-8859-1" ||
      name == "iso8859-1" || name == "latin1" || name == "l1" || name == "us-ascii" ||
      name == "ascii" || name == "iso_8859-1" || name == "x-cp1252") {
    return "windows-1252";
  }
  for (char ch : name) {
    if (!detail::is_ascii_alnum(ch) && ch != '-' && ch != '_' && ch != '.' && ch != ':') {
      return std::nullopt;
    }
  }
  if (!open_decoder(name)) return std::nullopt;
  return name;
}

std::string decode_to_utf8(std::string_view bytes, std::string_view charset) {
  std::optional<std::string> canonical = canonical_charset(charset);
  if (!canonical) {
    throw Error(ErrorCode::UnsupportedCharset,
                "unsupported charset '" + std::string(charset) + "'");
  }
  if (*canonical == "utf-8") return decode_utf8(bytes);
  if (*canonical == "windows-1252") return decode_windows_1252(bytes);
  return decode_with_iconv(bytes, *canonical);
}

std::optional<std::string> charset_from_content_type(std::string_view content_type) {
  std::string lower = detail::ascii_lower(content_type);
  std::size_t at = lower.find("charset");
  while (at != std::string::npos) {
    std::size_t i = at + 7;
    while (i < lower.size() && detail::is_html_space(lower[i])) ++i;
    if (i < lower.size() && lower[i] == '=') {
      ++i;
      while (i < lower.size() && detail::is_html_space(lower[i])) ++i;
      std::size_t end = i;
      if (end < lower.size() && (lower[end] == '"' || lower[end] == '\'')) {
        char quote = lower[end];
        std::size_t close = lower.find(quote, end + 1);
        if (close == std::string::npos) return std::nullopt;
        return std::string(content_type.substr(end + 1, close - end - 1));
      }
      while (end < lower.size() && lower[end] != ';' && !detail::is_html_space(lower[end])) ++end;
      if (end > i) return std::string(content_type.substr(i, end - i));
      return std::nullopt;
    }
    at = lower.find("charset", at + 7);
  }
  return std::nullopt;
}

std::optional<std::string> sniff_meta_charset(std::string_view body) {
  std::string head = detail::ascii_lower(body.substr(0, 1024));
  std::size_t pos = 0;
  while ((pos = head.find("<meta", pos)) != std::string::npos) {
    std::size_t close = head.find('>', pos);
    std::string_view tag = std::string_view(head).substr(
        pos, close == std::string::npos ? std::string::npos : close - pos);
    std::size_t original_offset = pos;
    pos += 5;

    std::size_t attr = tag.find("charset");
    if (attr == std::string_view::npos) continue;
    // Either charset=... as its own attribute or inside content="...".
    std::size_t i = attr + 7;
    while (i < tag.size() && detail::is_html_space(tag[i])) ++i;
    if (i >= tag.size() || tag[i] != '=') continue;
    ++i;
    while (i < tag.size() && detail::is_html_space(tag[i])) ++i;
    if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
      // A quote here opens either the charset attribute value or, for the
      // http-equiv form, nothing (content="text/html; charset=x" has no quote).
      ++i;
    }
    std::size_t end = i;
    while (end < tag.size() && tag[end] != '"' && tag[end] != '\'' && tag[end] != ';' &&
           tag[end] != '/' && !detail::is_html_space(tag[end])) {
      ++end;
    }
    if (end > i) {
      return std::string(body.substr(original_offset + i, end - i));
    }
  }
  return std::nullopt;
}

std::string resolve_charset(std::string_view content_type, std::string_view body) {
  if (auto declared = charset_from_content_type(content_type)) {
    if (auto canonical = canonical_charset(*declared)) return *canonical;
  }
  if (auto sniffed = sniff_meta_charset(body)) {
    if (auto canonical = canonical_charset(*sniffed)) {
      // A document that could be read far enough to find an ASCII meta tag is
      // not UTF-16.
      if (canonical->rfind("utf-16", 0) == 0) return "utf-8";
      return *canonical;
    }
  }
  return "utf-8";
}

}  // namespace clearlens
