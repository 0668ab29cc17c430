#include "html_tokenizer.hpp"

#include <array>
#include <optional>
#include <unordered_map>

#include "text_util.hpp"

namespace clearlens::html::detail {
namespace {

struct NamedReference {
  std::string_view name;
  std::string_view value;
};

constexpr NamedReference kNamedReferences[] = {
#include "entities.inc"
};

constexpr std::size_t kLongestReferenceName = 32;

const std::unordered_map<std::string_view, std::string_view>& named_references() {
  static const auto* table = [] {
    auto* map = new std::unordered_map<std::string_view, std::string_view>();
    map->reserve(std::size(kNamedReferences));
    for (const auto& ref : kNamedReferences) map->emplace(ref.name, ref.value);
    return map;
  }();
  return *table;
}

// Numeric references to 0x80..0x9F name windows-1252 characters.
constexpr std::array<char32_t, 32> kC1Replacements = {
    0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0x8D,   0x017D, 0x8F,   0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178,
};

std::string normalize_newlines(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < input.size() && input[i + 1] == '\n') ++i;
    } else {
      out.push_back(input[i]);
    }
  }
  return out;
}

constexpr std::string_view kReplacementChar = "\xEF\xBF\xBD";

Token make_text(std::string text) {
  Token token;
  token.type = Token::Type::Character;
  token.data = std::move(text);
  return token;
}

Token make_comment(std::string text) {
  Token token;
  token.type = Token::Type::Comment;
  token.data = std::move(text);
  return token;
}

}  // namespace

Tokenizer::Tokenizer(std::string_view input) : input_(normalize_newlines(input)) {}

void Tokenizer::switch_to(State state, std::string end_tag) {
  state_ = state;
  end_tag_ = std::move(end_tag);
}

Token Tokenizer::next() {
  if (state_ != State::Data) return raw_token();

  std::string text;
  while (!at_end()) {
    char ch = peek();
    if (ch == '<') {
      char following = peek(1);
      bool opens_markup = clearlens::detail::is_ascii_alpha(following) || following == '/' ||
                          following == '!' || following == '?';
      if (!opens_markup) {
        text.push_back('<');
        ++pos_;
        continue;
      }
      if (!text.empty()) return make_text(std::move(text));
      Token token = tag_open();
      if (token.type == Token::Type::Character && token.data.empty()) continue;
      return token;
    }
    if (ch == '&') {
      ++pos_;
      character_reference(text, false);
      continue;
    }
    ++pos_;
    if (ch == '\0') continue;
    text.push_back(ch);
  }
  if (!text.empty()) return make_text(std::move(text));
  return Token{};
}

Token Tokenizer::tag_open() {
  // peek() is '<' followed by one of alpha, '/', '!', '?'.
  char following = peek(1);
  if (following == '!') {
    pos_ += 2;
    return markup_declaration();
  }
  if (following == '?') {
    pos_ += 1;
    return bogus_comment();
  }
  if (following == '/') {
    char after = peek(2);
    if (clearlens::detail::is_ascii_alpha(after)) {
      pos_ += 2;
      return end_tag();
    }
    if (after == '>') {
      pos_ += 3;
      return make_text("");
    }
    if (pos_ + 2 >= input_.size()) {
      pos_ += 2;
      return make_text("</");
    }
    pos_ += 2;
    return bogus_comment();
  }
  pos_ += 1;
  return start_tag();
}

Token Tokenizer::start_tag() {
  Token token;
  token.type = Token::Type::StartTag;
  while (!at_end()) {
    char ch = peek();
    if (clearlens::detail::is_html_space(ch) || ch == '/' || ch == '>') break;
    ++pos_;
    if (ch == '\0') {
      token.name.append(kReplacementChar);
    } else {
      token.name.push_back(clearlens::detail::ascii_lower(ch));
    }
  }
  read_attributes(token);
  return token;
}

Token Tokenizer::end_tag() {
  Token token;
  token.type = Token::Type::EndTag;
  while (!at_end()) {
    char ch = peek();
    if (clearlens::detail::is_html_space(ch) || ch == '/' || ch == '>') break;
    ++pos_;
    if (ch == '\0') {
      token.name.append(kReplacementChar);
    } else {
      token.name.push_back(clearlens::detail::ascii_lower(ch));
    }
  }
  read_attributes(token);
  token.attributes.clear();
  token.self_closing = false;
  return token;
}

void Tokenizer::read_attributes(Token& token) {
  auto eof = [&] {
    // A tag cut off by the end of input is dropped.
    token = Token{};
  };
  while (true) {
    while (!at_end() && clearlens::detail::is_html_space(peek())) ++pos_;
    if (at_end()) return eof();
    if (peek() == '>') {
      ++pos_;
      return;
    }
    if (peek() == '/') {
      ++pos_;
      if (peek() == '>') {
        ++pos_;
        token.self_closing = true;
        return;
      }
      continue;
    }

    std::string name;
    if (peek() == '=') {
      name.push_back('=');
      ++pos_;
    }
    while (!at_end()) {
      char ch = peek();
      if (clearlens::detail::is_html_space(ch) || ch == '/' || ch == '>' || ch == '=') break;
      ++pos_;
      if (ch == '\0') {
        name.append(kReplacementChar);
      } else {
        name.push_back(clearlens::detail::ascii_lower(ch));
      }
    }
    while (!at_end() && clearlens::detail::is_html_space(peek())) ++pos_;
    if (at_end()) return eof();

    std::string value;
    if (peek() == '=') {
      ++pos_;
      while (!at_end() && clearlens::detail::is_html_space(peek())) ++pos_;
      if (at_end()) return eof();
      char quote = peek();
      if (quote == '"' || quote == '\'') {
        ++pos_;
        while (!at_end() && peek() != quote) {
          char ch = peek();
          ++pos_;
          if (ch == '&') {
            character_reference(value, true);
          } else if (ch == '\0') {
            value.append(kReplacementChar);
          } else {
            value.push_back(ch);
          }
        }
        if (at_end()) return eof();
        ++pos_;
      } else {
        while (!at_end() && !clearlens::detail::is_html_space(peek()) && peek() != '>') {
          char ch = peek();
          ++pos_;
          if (ch == '&') {
            character_reference(value, true);
          } else if (ch == '\0') {
            value.append(kReplacementChar);
          } else {
            value.push_back(ch);
          }
        }
        if (at_end()) return eof();
      }
    }

    bool duplicate = false;
    for (const Attribute& existing : token.attributes) {
      if (existing.name == name) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) token.attributes.push_back(Attribute{std::move(name), std::move(value)});
  }
}

Token Tokenizer::markup_declaration() {
  // pos_ is just past "<!".
  if (peek() == '-' && peek(1) == '-') {
    pos_ += 2;
    return comment();
  }
  if (input_.size() - pos_ >= 7 &&
      clearlens::detail::iequals(std::string_view(input_).substr(pos_, 7), "doctype")) {
    std::size_t close = input_.find('>', pos_);
    pos_ = close == std::string::npos ? input_.size() : close + 1;
    Token token;
    token.type = Token::Type::Doctype;
    return token;
  }
  return bogus_comment();
}

Token Tokenizer::comment() {
  // pos_ is just past "<!--".
  if (peek() == '>') {
    ++pos_;
    return make_comment("");
  }
  if (peek() == '-' && peek(1) == '>') {
    pos_ += 2;
    return make_comment("");
  }
  std::size_t end = pos_;
  std::size_t close_length = 0;
  while (end < input_.size()) {
    if (input_.compare(end, 3, "-->") == 0) {
      close_length = 3;
      break;
    }
    if (input_.compare(end, 4, "--!>") == 0) {
      close_length = 4;
      break;
    }
    ++end;
  }
  std::string data;
  for (std::size_t i = pos_; i < end; ++i) {
    if (input_[i] == '\0') {
      data.append(kReplacementChar);
    } else {
      data.push_back(input_[i]);
    }
  }
  pos_ = end + close_length;
  if (pos_ > input_.size()) pos_ = input_.size();
  return make_comment(std::move(data));
}

Token Tokenizer::bogus_comment() {
  std::size_t close = input_.find('>', pos_);
  std::size_t end = close == std::string::npos ? input_.size() : close;
  std::string data;
  for (std::size_t i = pos_; i < end; ++i) {
    if (input_[i] == '\0') {
      data.append(kReplacementChar);
    } else {
      data.push_back(input_[i]);
    }
  }
  pos_ = close == std::string::npos ? input_.size() : close + 1;
  return make_comment(std::move(data));
}

bool Tokenizer::appropriate_end_tag_at(std::size_t at) const {
  std::size_t name_start = at + 2;
  std::size_t name_end = name_start + end_tag_.size();
  if (name_end >= input_.size()) return false;
  if (!clearlens::detail::iequals(std::string_view(input_).substr(name_start, end_tag_.size()),
                                  end_tag_)) {
    return false;
  }
  char after = input_[name_end];
  return clearlens::detail::is_html_space(after) || after == '/' || after == '>';
}

Token Tokenizer::raw_token() {
  std::string text;
  while (!at_end()) {
    char ch = peek();
    if (state_ != State::PlainText && ch == '<' && peek(1) == '/' &&
        appropriate_end_tag_at(pos_)) {
      if (!text.empty()) return make_text(std::move(text));
      pos_ += 2;
      state_ = State::Data;
      return end_tag();
    }
    ++pos_;
    if (state_ == State::RcData && ch == '&') {
      character_reference(text, false);
    } else if (ch == '\0') {
      text.append(kReplacementChar);
    } else {
      text.push_back(ch);
    }
  }
  if (!text.empty()) return make_text(std::move(text));
  return Token{};
}

void Tokenizer::character_reference(std::string& out, bool in_attribute) {
  // pos_ is just past '&'.
  if (peek() == '#') {
    std::size_t start = pos_;
    ++pos_;
    bool hex = false;
    if (peek() == 'x' || peek() == 'X') {
      hex = true;
      ++pos_;
    }
    std::size_t digits = 0;
    std::uint64_t value = 0;
    while (!at_end()) {
      char ch = peek();
      bool digit = hex ? clearlens::detail::is_ascii_hex(ch) : clearlens::detail::is_ascii_digit(ch);
      if (!digit) break;
      value = value * (hex ? 16 : 10) + static_cast<std::uint64_t>(clearlens::detail::hex_value(ch));
      if (value > 0x10FFFF) value = 0x110000;
      ++digits;
      ++pos_;
    }
    if (digits == 0) {
      pos_ = start;
      out.push_back('&');
      return;
    }
    if (peek() == ';') ++pos_;
    char32_t cp = static_cast<char32_t>(value);
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      cp = 0xFFFD;
    } else if (cp >= 0x80 && cp <= 0x9F) {
      cp = kC1Replacements[cp - 0x80];
    }
    clearlens::detail::append_utf8(out, cp);
    return;
  }

  std::size_t run = 0;
  while (pos_ + run < input_.size() && run < kLongestReferenceName &&
         clearlens::detail::is_ascii_alnum(input_[pos_ + run])) {
    ++run;
  }
  if (run == 0) {
    out.push_back('&');
    return;
  }
  const auto& table = named_references();
  std::string_view candidates(input_.data() + pos_, run);
  if (pos_ + run < input_.size() && input_[pos_ + run] == ';') {
    std::string with_semicolon(candidates);
    with_semicolon.push_back(';');
    if (auto it = table.find(with_semicolon); it != table.end()) {
      out.append(it->second);
      pos_ += run + 1;
      return;
    }
  }
  for (std::size_t length = run; length > 0; --length) {
    auto it = table.find(candidates.substr(0, length));
    if (it == table.end()) continue;
    if (in_attribute) {
      char next_char = pos_ + length < input_.size() ? input_[pos_ + length] : '\0';
      if (next_char == '=' || clearlens::detail::is_ascii_alnum(next_char)) break;
    }
    out.append(it->second);
    pos_ += length;
    return;
  }
  out.push_back('&');
}

}  // namespace clearlens::html::detail
