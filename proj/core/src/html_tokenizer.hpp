#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clearlens/html.hpp"

namespace clearlens::html::detail {

struct Token {
  enum class Type { StartTag, EndTag, Character, Comment, Doctype, EndOfFile };

  Type type = Type::EndOfFile;
  std::string name;
  std::vector<Attribute> attributes;
  bool self_closing = false;
  // Character and comment data.
  std::string data;
};

// Splits UTF-8 markup into tokens. The tree builder switches the content
// model after start tags of raw-text elements.
class Tokenizer {
 public:
  enum class State { Data, RcData, RawText, PlainText };

  explicit Tokenizer(std::string_view input);

  Token next();

  // Content up to `</end_tag` is text; RcData also decodes character
  // references.
  void switch_to(State state, std::string end_tag = {});

 private:
  bool at_end() const { return pos_ >= input_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < input_.size() ? input_[pos_ + ahead] : '\0';
  }

  Token data_token();
  Token raw_token();
  Token tag_open();
  Token start_tag();
  Token end_tag();
  Token comment();
  Token bogus_comment();
  Token markup_declaration();
  void read_attributes(Token& token);
  bool appropriate_end_tag_at(std::size_t at) const;
  // Decodes a character reference starting after '&' into `out`.
  void character_reference(std::string& out, bool in_attribute);

  std::string input_;
  std::size_t pos_ = 0;
  State state_ = State::Data;
  std::string end_tag_;
};

}  // namespace clearlens::html::detail
