// Tree construction after the HTML5 parsing algorithm: insertion modes,
// implied tags, the list of active formatting elements with the adoption
// agency algorithm, and foster parenting for tables. Not covered: foreign
// content (svg/math are ordinary elements), frameset documents, template
// contents as a separate fragment, scripting.

#include <algorithm>
#include <optional>

#include "clearlens/charset.hpp"
#include "clearlens/html.hpp"
#include "html_tags.hpp"
#include "html_tokenizer.hpp"
#include "text_util.hpp"

namespace clearlens::html {
namespace {

using detail::Token;
using detail::Tokenizer;
using tags::one_of;

constexpr NodeId kMarker = kNoNode - 1;

enum class Mode {
  Initial,
  BeforeHead,
  InHead,
  InHeadNoscript,
  AfterHead,
  InBody,
  Text,
  InTable,
  InTableText,
  InCaption,
  InColumnGroup,
  InTableBody,
  InRow,
  InCell,
  InSelect,
  AfterBody,
  AfterAfterBody,
};

bool is_whitespace_only(std::string_view text) {
  return std::all_of(text.begin(), text.end(), clearlens::detail::is_html_space);
}

std::size_t leading_whitespace(std::string_view text) {
  std::size_t n = 0;
  while (n < text.size() && clearlens::detail::is_html_space(text[n])) ++n;
  return n;
}

Token synthetic_start(std::string name) {
  Token token;
  token.type = Token::Type::StartTag;
  token.name = std::move(name);
  return token;
}

class TreeBuilder {
 public:
  TreeBuilder(Document& doc, std::string_view input) : doc_(doc), tokenizer_(input) {}

  void run() {
    while (true) {
      Token token = tokenizer_.next();
      bool eof = token.type == Token::Type::EndOfFile;
      process(token);
      if (eof) break;
    }
    finish();
  }

 private:
  // ---- tree access -------------------------------------------------------

  NodeId current() const { return open_.empty() ? kNoNode : open_.back(); }
  const std::string& tag(NodeId id) const { return doc_.tag(id); }
  bool current_is(std::string_view name) const {
    return !open_.empty() && tag(current()) == name;
  }

  bool in_open(NodeId id) const { return std::find(open_.begin(), open_.end(), id) != open_.end(); }

  bool has_open(std::string_view name) const {
    return std::any_of(open_.begin(), open_.end(), [&](NodeId id) { return tag(id) == name; });
  }

  enum class Scope { Default, ListItem, Button, Table, Select };

  static bool is_scope_boundary(std::string_view name, Scope scope) {
    switch (scope) {
      case Scope::Table:
        return one_of(name, {"html", "table", "template"});
      case Scope::Select:
        return !one_of(name, {"optgroup", "option"});
      case Scope::ListItem:
        if (one_of(name, {"ol", "ul"})) return true;
        break;
      case Scope::Button:
        if (name == "button") return true;
        break;
      case Scope::Default:
        break;
    }
    return one_of(name, {"applet", "caption", "html", "table", "td", "th", "marquee", "object",
                         "template"});
  }

  bool in_scope(std::string_view name, Scope scope = Scope::Default) const {
    for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
      if (tag(*it) == name) return true;
      if (is_scope_boundary(tag(*it), scope)) return false;
    }
    return false;
  }

  bool node_in_scope(NodeId target) const {
    for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
      if (*it == target) return true;
      if (is_scope_boundary(tag(*it), Scope::Default)) return false;
    }
    return false;
  }

  bool heading_in_scope() const {
    for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
      if (tags::is_heading(tag(*it))) return true;
      if (is_scope_boundary(tag(*it), Scope::Default)) return false;
    }
    return false;
  }

  void pop_until(std::string_view name) {
    while (!open_.empty()) {
      bool match = tag(current()) == name;
      open_.pop_back();
      if (match) return;
    }
  }

  void pop_until_heading() {
    while (!open_.empty()) {
      bool match = tags::is_heading(tag(current()));
      open_.pop_back();
      if (match) return;
    }
  }

  void remove_from_open(NodeId id) {
    auto it = std::find(open_.begin(), open_.end(), id);
    if (it != open_.end()) open_.erase(it);
  }

  void generate_implied_end_tags(std::string_view except = {}) {
    while (!open_.empty() && tags::has_implied_end_tag(tag(current())) &&
           tag(current()) != except) {
      open_.pop_back();
    }
  }

  void close_p_element() {
    generate_implied_end_tags("p");
    pop_until("p");
  }

  void close_p_in_button_scope() {
    if (in_scope("p", Scope::Button)) close_p_element();
  }

  // ---- insertion ---------------------------------------------------------

  struct InsertionPlace {
    NodeId parent;
    NodeId before;  // kNoNode appends
  };

  InsertionPlace appropriate_place(NodeId target) const {
    if (foster_parenting_ &&
        one_of(tag(target), {"table", "tbody", "tfoot", "thead", "tr"})) {
      for (std::size_t i = open_.size(); i-- > 0;) {
        if (tag(open_[i]) != "table") continue;
        NodeId table = open_[i];
        if (doc_.parent(table) != kNoNode) return {doc_.parent(table), table};
        return {open_[i - 1], kNoNode};
      }
      return {open_.front(), kNoNode};
    }
    return {target, kNoNode};
  }

  void insert_at(InsertionPlace place, NodeId node) {
    doc_.insert_before(place.parent, node, place.before);
  }

  NodeId insert_element(const Token& token) {
    NodeId element = doc_.create_element(token.name, token.attributes);
    insert_at(appropriate_place(current()), element);
    open_.push_back(element);
    return element;
  }

  void insert_void(const Token& token) {
    insert_element(token);
    open_.pop_back();
  }

  void insert_characters(std::string_view text) {
    if (text.empty()) return;
    InsertionPlace place = appropriate_place(current());
    if (place.parent == doc_.document_node()) return;
    const auto& siblings = doc_.children(place.parent);
    NodeId previous = kNoNode;
    if (place.before == kNoNode) {
      if (!siblings.empty()) previous = siblings.back();
    } else {
      auto it = std::find(siblings.begin(), siblings.end(), place.before);
      if (it != siblings.begin()) previous = *(it - 1);
    }
    if (previous != kNoNode && doc_.kind(previous) == NodeKind::Text) {
      doc_.append_text(previous, text);
      return;
    }
    insert_at(place, doc_.create_text(std::string(text)));
  }

  void insert_comment(const Token& token, NodeId parent = kNoNode) {
    NodeId comment = doc_.create_comment(token.data);
    if (parent != kNoNode) {
      doc_.append_child(parent, comment);
    } else {
      insert_at(appropriate_place(current()), comment);
    }
  }

  // ---- active formatting elements ----------------------------------------

  void push_formatting(NodeId element) {
    // At most three equivalent entries after the last marker.
    int equivalent = 0;
    std::size_t earliest = 0;
    for (std::size_t i = formatting_.size(); i-- > 0;) {
      NodeId entry = formatting_[i];
      if (entry == kMarker) break;
      if (tag(entry) == tag(element) &&
          same_attributes(doc_.node(entry).attributes, doc_.node(element).attributes)) {
        ++equivalent;
        earliest = i;
      }
    }
    if (equivalent >= 3) formatting_.erase(formatting_.begin() + static_cast<long>(earliest));
    formatting_.push_back(element);
  }

  static bool same_attributes(const std::vector<Attribute>& a, const std::vector<Attribute>& b) {
    if (a.size() != b.size()) return false;
    return std::all_of(a.begin(), a.end(), [&](const Attribute& attr) {
      return std::find(b.begin(), b.end(), attr) != b.end();
    });
  }

  void reconstruct_formatting() {
    if (formatting_.empty()) return;
    std::size_t index = formatting_.size() - 1;
    if (formatting_[index] == kMarker || in_open(formatting_[index])) return;
    while (index > 0) {
      --index;
      if (formatting_[index] == kMarker || in_open(formatting_[index])) {
        ++index;
        break;
      }
    }
    for (; index < formatting_.size(); ++index) {
      const Node& original = doc_.node(formatting_[index]);
      Token token = synthetic_start(original.tag);
      token.attributes = original.attributes;
      formatting_[index] = insert_element(token);
    }
  }

  void clear_formatting_to_marker() {
    while (!formatting_.empty()) {
      NodeId entry = formatting_.back();
      formatting_.pop_back();
      if (entry == kMarker) return;
    }
  }

  void remove_from_formatting(NodeId id) {
    auto it = std::find(formatting_.begin(), formatting_.end(), id);
    if (it != formatting_.end()) formatting_.erase(it);
  }

  NodeId formatting_after_marker(std::string_view name) const {
    for (std::size_t i = formatting_.size(); i-- > 0;) {
      if (formatting_[i] == kMarker) return kNoNode;
      if (tag(formatting_[i]) == name) return formatting_[i];
    }
    return kNoNode;
  }

  NodeId clone_element(NodeId original) {
    const Node& node = doc_.node(original);
    return doc_.create_element(node.tag, node.attributes);
  }

  // Returns false when the caller should fall back to "any other end tag".
  bool adoption_agency(const std::string& subject) {
    if (!open_.empty() && tag(current()) == subject &&
        std::find(formatting_.begin(), formatting_.end(), current()) == formatting_.end()) {
      open_.pop_back();
      return true;
    }
    for (int outer = 0; outer < 8; ++outer) {
      NodeId formatting_element = formatting_after_marker(subject);
      if (formatting_element == kNoNode) return false;
      if (!in_open(formatting_element)) {
        remove_from_formatting(formatting_element);
        return true;
      }
      if (!node_in_scope(formatting_element)) return true;

      auto fe_pos = static_cast<std::size_t>(
          std::find(open_.begin(), open_.end(), formatting_element) - open_.begin());
      std::size_t fb_pos = open_.size();
      for (std::size_t i = fe_pos + 1; i < open_.size(); ++i) {
        if (tags::is_special(tag(open_[i]))) {
          fb_pos = i;
          break;
        }
      }
      if (fb_pos == open_.size()) {
        open_.resize(fe_pos);
        remove_from_formatting(formatting_element);
        return true;
      }
      NodeId furthest_block = open_[fb_pos];
      NodeId common_ancestor = open_[fe_pos - 1];
      auto bookmark = static_cast<std::size_t>(
          std::find(formatting_.begin(), formatting_.end(), formatting_element) -
          formatting_.begin());

      NodeId last_node = furthest_block;
      std::size_t node_pos = fb_pos;
      for (int inner = 1;; ++inner) {
        --node_pos;
        NodeId node = open_[node_pos];
        if (node == formatting_element) break;
        auto af = std::find(formatting_.begin(), formatting_.end(), node);
        if (inner > 3 && af != formatting_.end()) {
          auto af_index = static_cast<std::size_t>(af - formatting_.begin());
          formatting_.erase(af);
          if (af_index < bookmark) --bookmark;
          af = formatting_.end();
        }
        if (af == formatting_.end()) {
          open_.erase(open_.begin() + static_cast<long>(node_pos));
          continue;
        }
        NodeId replacement = clone_element(node);
        *af = replacement;
        open_[node_pos] = replacement;
        node = replacement;
        if (last_node == furthest_block) {
          bookmark = static_cast<std::size_t>(af - formatting_.begin()) + 1;
        }
        doc_.append_child(node, last_node);
        last_node = node;
      }

      doc_.detach(last_node);
      insert_at(appropriate_place(common_ancestor), last_node);

      NodeId new_element = clone_element(formatting_element);
      std::vector<NodeId> moved = doc_.children(furthest_block);
      for (NodeId child : moved) doc_.append_child(new_element, child);
      doc_.append_child(furthest_block, new_element);

      auto old_index = static_cast<std::size_t>(
          std::find(formatting_.begin(), formatting_.end(), formatting_element) -
          formatting_.begin());
      formatting_.erase(formatting_.begin() + static_cast<long>(old_index));
      if (old_index < bookmark) --bookmark;
      bookmark = std::min(bookmark, formatting_.size());
      formatting_.insert(formatting_.begin() + static_cast<long>(bookmark), new_element);

      remove_from_open(formatting_element);
      auto fb_it = std::find(open_.begin(), open_.end(), furthest_block);
      open_.insert(fb_it + 1, new_element);
    }
    return true;
  }

  void any_other_end_tag(const std::string& name) {
    for (std::size_t i = open_.size(); i-- > 0;) {
      NodeId node = open_[i];
      if (tag(node) == name) {
        generate_implied_end_tags(name);
        open_.resize(i);
        return;
      }
      if (tags::is_special(tag(node))) return;
    }
  }

  // ---- mode bookkeeping --------------------------------------------------

  void reset_insertion_mode() {
    for (std::size_t i = open_.size(); i-- > 0;) {
      bool last = i == 0;
      const std::string& name = tag(open_[i]);
      if (name == "select") {
        mode_ = Mode::InSelect;
        return;
      }
      if ((name == "td" || name == "th") && !last) {
        mode_ = Mode::InCell;
        return;
      }
      if (name == "tr") {
        mode_ = Mode::InRow;
        return;
      }
      if (tags::is_table_section(name)) {
        mode_ = Mode::InTableBody;
        return;
      }
      if (name == "caption") {
        mode_ = Mode::InCaption;
        return;
      }
      if (name == "colgroup") {
        mode_ = Mode::InColumnGroup;
        return;
      }
      if (name == "table") {
        mode_ = Mode::InTable;
        return;
      }
      if (name == "template") {
        mode_ = Mode::InBody;
        return;
      }
      if (name == "head" && !last) {
        mode_ = Mode::InHead;
        return;
      }
      if (name == "body") {
        mode_ = Mode::InBody;
        return;
      }
      if (name == "html") {
        mode_ = head_ == kNoNode ? Mode::BeforeHead : Mode::AfterHead;
        return;
      }
      if (last) {
        mode_ = Mode::InBody;
        return;
      }
    }
    mode_ = Mode::InBody;
  }

  void start_raw(const Token& token, Tokenizer::State state) {
    insert_element(token);
    tokenizer_.switch_to(state, token.name);
    original_mode_ = mode_;
    mode_ = Mode::Text;
  }

  void create_html(const Token* token) {
    NodeId html = doc_.create_element("html", token ? token->attributes : std::vector<Attribute>{});
    doc_.append_child(doc_.document_node(), html);
    open_.push_back(html);
  }

  void insert_head(const Token& token) {
    head_ = insert_element(token);
  }

  // ---- dispatch ----------------------------------------------------------

  void process(Token& token) {
    if (token.type == Token::Type::Character && skip_next_newline_) {
      skip_next_newline_ = false;
      if (!token.data.empty() && token.data.front() == '\n') token.data.erase(0, 1);
      if (token.data.empty()) return;
    } else if (token.type != Token::Type::Character) {
      skip_next_newline_ = false;
    }
    while (dispatch(token)) {
    }
  }

  // Returns true to reprocess `token` in the (new) current mode.
  bool dispatch(Token& token) {
    switch (mode_) {
      case Mode::Initial: return initial(token);
      case Mode::BeforeHead: return before_head(token);
      case Mode::InHead: return in_head(token);
      case Mode::InHeadNoscript: return in_head_noscript(token);
      case Mode::AfterHead: return after_head(token);
      case Mode::InBody: return in_body(token);
      case Mode::Text: return text(token);
      case Mode::InTable: return in_table(token);
      case Mode::InTableText: return in_table_text(token);
      case Mode::InCaption: return in_caption(token);
      case Mode::InColumnGroup: return in_column_group(token);
      case Mode::InTableBody: return in_table_body(token);
      case Mode::InRow: return in_row(token);
      case Mode::InCell: return in_cell(token);
      case Mode::InSelect: return in_select(token);
      case Mode::AfterBody: return after_body(token);
      case Mode::AfterAfterBody: return after_after_body(token);
    }
    return false;
  }

  // Strips leading whitespace from a character token; returns the stripped
  // prefix so the caller can insert or drop it.
  static std::string take_leading_whitespace(Token& token) {
    std::size_t n = leading_whitespace(token.data);
    std::string prefix = token.data.substr(0, n);
    token.data.erase(0, n);
    return prefix;
  }

  bool initial(Token& token) {
    switch (token.type) {
      case Token::Type::Character:
        take_leading_whitespace(token);
        if (token.data.empty()) return false;
        break;
      case Token::Type::Comment:
        insert_comment(token, doc_.document_node());
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag:
        if (token.name == "html") {
          create_html(&token);
          mode_ = Mode::BeforeHead;
          return false;
        }
        break;
      case Token::Type::EndTag:
        if (!one_of(token.name, {"head", "body", "html", "br"})) return false;
        break;
      case Token::Type::EndOfFile:
        break;
    }
    create_html(nullptr);
    mode_ = Mode::BeforeHead;
    return true;
  }

  bool before_head(Token& token) {
    switch (token.type) {
      case Token::Type::Character:
        take_leading_whitespace(token);
        if (token.data.empty()) return false;
        break;
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag:
        if (token.name == "html") return in_body(token);
        if (token.name == "head") {
          insert_head(token);
          mode_ = Mode::InHead;
          return false;
        }
        break;
      case Token::Type::EndTag:
        if (!one_of(token.name, {"head", "body", "html", "br"})) return false;
        break;
      case Token::Type::EndOfFile:
        break;
    }
    insert_head(synthetic_start("head"));
    mode_ = Mode::InHead;
    return true;
  }

  bool in_head(Token& token) {
    switch (token.type) {
      case Token::Type::Character: {
        std::string ws = take_leading_whitespace(token);
        insert_characters(ws);
        if (token.data.empty()) return false;
        break;
      }
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag: {
        const std::string& name = token.name;
        if (name == "html") return in_body(token);
        if (one_of(name, {"base", "basefont", "bgsound", "link", "meta"})) {
          insert_void(token);
          return false;
        }
        if (name == "title") {
          start_raw(token, Tokenizer::State::RcData);
          return false;
        }
        if (name == "noscript") {
          insert_element(token);
          mode_ = Mode::InHeadNoscript;
          return false;
        }
        if (one_of(name, {"noframes", "style", "script"})) {
          start_raw(token, Tokenizer::State::RawText);
          return false;
        }
        if (name == "template") {
          insert_element(token);
          formatting_.push_back(kMarker);
          frameset_ok_ = false;
          mode_ = Mode::InBody;
          return false;
        }
        if (name == "head") return false;
        break;
      }
      case Token::Type::EndTag:
        if (token.name == "head") {
          open_.pop_back();
          mode_ = Mode::AfterHead;
          return false;
        }
        if (token.name == "template") {
          end_template();
          return false;
        }
        if (!one_of(token.name, {"body", "html", "br"})) return false;
        break;
      case Token::Type::EndOfFile:
        break;
    }
    open_.pop_back();
    mode_ = Mode::AfterHead;
    return true;
  }

  bool in_head_noscript(Token& token) {
    switch (token.type) {
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag:
        if (token.name == "html") return in_body(token);
        if (one_of(token.name, {"basefont", "bgsound", "link", "meta", "noframes", "style"})) {
          return in_head(token);
        }
        if (one_of(token.name, {"head", "noscript"})) return false;
        break;
      case Token::Type::EndTag:
        if (token.name == "noscript") {
          open_.pop_back();
          mode_ = Mode::InHead;
          return false;
        }
        if (token.name != "br") return false;
        break;
      case Token::Type::Comment:
        return in_head(token);
      case Token::Type::Character: {
        std::string ws = take_leading_whitespace(token);
        insert_characters(ws);
        if (token.data.empty()) return false;
        break;
      }
      case Token::Type::EndOfFile:
        break;
    }
    open_.pop_back();
    mode_ = Mode::InHead;
    return true;
  }

  bool after_head(Token& token) {
    switch (token.type) {
      case Token::Type::Character: {
        std::string ws = take_leading_whitespace(token);
        insert_characters(ws);
        if (token.data.empty()) return false;
        break;
      }
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag: {
        const std::string& name = token.name;
        if (name == "html") return in_body(token);
        if (name == "body") {
          insert_element(token);
          frameset_ok_ = false;
          mode_ = Mode::InBody;
          return false;
        }
        if (one_of(name, {"base", "basefont", "bgsound", "link", "meta", "noframes", "script",
                          "style", "template", "title"})) {
          open_.push_back(head_);
          Mode before = mode_;
          in_head(token);
          // Raw-text elements leave head on the stack until their end tag.
          if (mode_ == Mode::Text) {
            original_mode_ = before;
            pending_head_pop_ = true;
          } else {
            remove_from_open(head_);
            if (mode_ == Mode::InHead) mode_ = before;
          }
          return false;
        }
        if (name == "head") return false;
        break;
      }
      case Token::Type::EndTag:
        if (token.name == "template") return in_head(token);
        if (!one_of(token.name, {"body", "html", "br"})) return false;
        break;
      case Token::Type::EndOfFile:
        break;
    }
    insert_element(synthetic_start("body"));
    mode_ = Mode::InBody;
    return true;
  }

  bool text(Token& token) {
    if (token.type == Token::Type::Character) {
      insert_characters(token.data);
      return false;
    }
    if (token.type == Token::Type::EndOfFile) {
      open_.pop_back();
      finish_text_mode();
      return true;
    }
    // The tokenizer only yields the matching end tag here.
    open_.pop_back();
    finish_text_mode();
    return false;
  }

  void finish_text_mode() {
    mode_ = original_mode_;
    if (pending_head_pop_) {
      remove_from_open(head_);
      pending_head_pop_ = false;
    }
  }

  void end_template() {
    if (!has_open("template")) return;
    generate_implied_end_tags();
    pop_until("template");
    clear_formatting_to_marker();
    reset_insertion_mode();
  }

  bool in_body(Token& token) {
    switch (token.type) {
      case Token::Type::Character:
        body_characters(token.data);
        return false;
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag:
        return body_start_tag(token);
      case Token::Type::EndTag:
        return body_end_tag(token);
      case Token::Type::EndOfFile:
        return false;
    }
    return false;
  }

  void body_characters(std::string_view data) {
    if (data.empty()) return;
    reconstruct_formatting();
    insert_characters(data);
    if (!is_whitespace_only(data)) frameset_ok_ = false;
  }

  bool body_start_tag(Token& token) {
    const std::string& name = token.name;
    if (name == "html") {
      if (!has_open("template")) doc_.merge_attributes(open_.front(), token.attributes);
      return false;
    }
    if (one_of(name, {"base", "basefont", "bgsound", "link", "meta", "noframes", "script",
                      "style", "template", "title"})) {
      return in_head(token);
    }
    if (name == "body") {
      if (open_.size() >= 2 && tag(open_[1]) == "body" && !has_open("template")) {
        frameset_ok_ = false;
        doc_.merge_attributes(open_[1], token.attributes);
      }
      return false;
    }
    if (name == "frameset") return false;
    if (tags::closes_p_on_start(name)) {
      close_p_in_button_scope();
      insert_element(token);
      return false;
    }
    if (tags::is_heading(name)) {
      close_p_in_button_scope();
      if (tags::is_heading(tag(current()))) open_.pop_back();
      insert_element(token);
      return false;
    }
    if (name == "pre" || name == "listing") {
      close_p_in_button_scope();
      insert_element(token);
      skip_next_newline_ = true;
      frameset_ok_ = false;
      return false;
    }
    if (name == "form") {
      if (form_ != kNoNode && !has_open("template")) return false;
      close_p_in_button_scope();
      NodeId form = insert_element(token);
      if (!has_open("template")) form_ = form;
      return false;
    }
    if (name == "li" || name == "dd" || name == "dt") {
      frameset_ok_ = false;
      for (std::size_t i = open_.size(); i-- > 0;) {
        const std::string& node = tag(open_[i]);
        bool matches = name == "li" ? node == "li" : (node == "dd" || node == "dt");
        if (matches) {
          generate_implied_end_tags(node);
          pop_until(std::string(node));
          break;
        }
        if (tags::is_special(node) && !one_of(node, {"address", "div", "p"})) break;
      }
      close_p_in_button_scope();
      insert_element(token);
      return false;
    }
    if (name == "plaintext") {
      close_p_in_button_scope();
      insert_element(token);
      tokenizer_.switch_to(Tokenizer::State::PlainText);
      return false;
    }
    if (name == "button") {
      if (in_scope("button")) {
        generate_implied_end_tags();
        pop_until("button");
      }
      reconstruct_formatting();
      insert_element(token);
      frameset_ok_ = false;
      return false;
    }
    if (name == "a") {
      NodeId existing = formatting_after_marker("a");
      if (existing != kNoNode) {
        if (!adoption_agency("a")) any_other_end_tag("a");
        remove_from_formatting(existing);
        remove_from_open(existing);
      }
      reconstruct_formatting();
      push_formatting(insert_element(token));
      return false;
    }
    if (name == "nobr") {
      reconstruct_formatting();
      if (in_scope("nobr")) {
        if (!adoption_agency("nobr")) any_other_end_tag("nobr");
        reconstruct_formatting();
      }
      push_formatting(insert_element(token));
      return false;
    }
    if (tags::is_formatting(name)) {
      reconstruct_formatting();
      push_formatting(insert_element(token));
      return false;
    }
    if (one_of(name, {"applet", "marquee", "object"})) {
      reconstruct_formatting();
      insert_element(token);
      formatting_.push_back(kMarker);
      frameset_ok_ = false;
      return false;
    }
    if (name == "table") {
      close_p_in_button_scope();
      insert_element(token);
      frameset_ok_ = false;
      mode_ = Mode::InTable;
      return false;
    }
    if (one_of(name, {"area", "br", "embed", "img", "keygen", "wbr"})) {
      reconstruct_formatting();
      insert_void(token);
      frameset_ok_ = false;
      return false;
    }
    if (name == "input") {
      reconstruct_formatting();
      insert_void(token);
      return false;
    }
    if (one_of(name, {"param", "source", "track"})) {
      insert_void(token);
      return false;
    }
    if (name == "hr") {
      close_p_in_button_scope();
      insert_void(token);
      frameset_ok_ = false;
      return false;
    }
    if (name == "image") {
      token.name = "img";
      return true;
    }
    if (name == "textarea") {
      insert_element(token);
      tokenizer_.switch_to(Tokenizer::State::RcData, "textarea");
      skip_next_newline_ = true;
      frameset_ok_ = false;
      original_mode_ = mode_;
      mode_ = Mode::Text;
      return false;
    }
    if (name == "xmp") {
      close_p_in_button_scope();
      reconstruct_formatting();
      frameset_ok_ = false;
      start_raw(token, Tokenizer::State::RawText);
      return false;
    }
    if (name == "iframe") {
      frameset_ok_ = false;
      start_raw(token, Tokenizer::State::RawText);
      return false;
    }
    if (name == "noembed") {
      start_raw(token, Tokenizer::State::RawText);
      return false;
    }
    if (name == "select") {
      reconstruct_formatting();
      insert_element(token);
      frameset_ok_ = false;
      mode_ = Mode::InSelect;
      return false;
    }
    if (name == "optgroup" || name == "option") {
      if (current_is("option")) open_.pop_back();
      reconstruct_formatting();
      insert_element(token);
      return false;
    }
    if (one_of(name, {"rb", "rtc"})) {
      if (in_scope("ruby")) generate_implied_end_tags();
      insert_element(token);
      return false;
    }
    if (one_of(name, {"rp", "rt"})) {
      if (in_scope("ruby")) generate_implied_end_tags("rtc");
      insert_element(token);
      return false;
    }
    if (one_of(name, {"caption", "col", "colgroup", "frame", "head", "tbody", "td", "tfoot",
                      "th", "thead", "tr"})) {
      return false;
    }
    reconstruct_formatting();
    insert_element(token);
    if (token.self_closing && (name == "svg" || name == "math")) open_.pop_back();
    return false;
  }

  bool body_end_tag(Token& token) {
    const std::string& name = token.name;
    if (name == "template") {
      end_template();
      return false;
    }
    if (name == "body" || name == "html") {
      if (!in_scope("body")) return false;
      mode_ = Mode::AfterBody;
      return name == "html";
    }
    if (tags::is_block_end(name)) {
      if (!in_scope(name)) return false;
      generate_implied_end_tags();
      pop_until(name);
      return false;
    }
    if (name == "form") {
      if (has_open("template")) {
        if (!in_scope("form")) return false;
        generate_implied_end_tags();
        pop_until("form");
        return false;
      }
      NodeId form = form_;
      form_ = kNoNode;
      if (form == kNoNode || !node_in_scope(form)) return false;
      generate_implied_end_tags();
      remove_from_open(form);
      return false;
    }
    if (name == "p") {
      if (!in_scope("p", Scope::Button)) insert_element(synthetic_start("p"));
      close_p_element();
      return false;
    }
    if (name == "li") {
      if (!in_scope("li", Scope::ListItem)) return false;
      generate_implied_end_tags("li");
      pop_until("li");
      return false;
    }
    if (name == "dd" || name == "dt") {
      if (!in_scope(name)) return false;
      generate_implied_end_tags(name);
      pop_until(name);
      return false;
    }
    if (tags::is_heading(name)) {
      if (!heading_in_scope()) return false;
      generate_implied_end_tags();
      pop_until_heading();
      return false;
    }
    if (tags::is_formatting(name)) {
      if (!adoption_agency(name)) any_other_end_tag(name);
      return false;
    }
    if (one_of(name, {"applet", "marquee", "object"})) {
      if (!in_scope(name)) return false;
      generate_implied_end_tags();
      pop_until(name);
      clear_formatting_to_marker();
      return false;
    }
    if (name == "br") {
      Token br = synthetic_start("br");
      reconstruct_formatting();
      insert_void(br);
      frameset_ok_ = false;
      return false;
    }
    any_other_end_tag(name);
    return false;
  }

  // ---- tables ------------------------------------------------------------

  void clear_to_context(std::initializer_list<std::string_view> context) {
    while (!open_.empty() && !one_of(tag(current()), context)) open_.pop_back();
  }
  void clear_to_table_context() { clear_to_context({"table", "template", "html"}); }
  void clear_to_table_body_context() {
    clear_to_context({"tbody", "tfoot", "thead", "template", "html"});
  }
  void clear_to_row_context() { clear_to_context({"tr", "template", "html"}); }

  bool in_table_anything_else(Token& token) {
    foster_parenting_ = true;
    in_body(token);
    foster_parenting_ = false;
    return false;
  }

  bool in_table(Token& token) {
    switch (token.type) {
      case Token::Type::Character:
        if (one_of(tag(current()), {"table", "tbody", "template", "tfoot", "thead", "tr"})) {
          pending_table_text_.clear();
          original_mode_ = mode_;
          mode_ = Mode::InTableText;
          return true;
        }
        return in_table_anything_else(token);
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag: {
        const std::string& name = token.name;
        if (name == "caption") {
          clear_to_table_context();
          formatting_.push_back(kMarker);
          insert_element(token);
          mode_ = Mode::InCaption;
          return false;
        }
        if (name == "colgroup") {
          clear_to_table_context();
          insert_element(token);
          mode_ = Mode::InColumnGroup;
          return false;
        }
        if (name == "col") {
          clear_to_table_context();
          insert_element(synthetic_start("colgroup"));
          mode_ = Mode::InColumnGroup;
          return true;
        }
        if (tags::is_table_section(name)) {
          clear_to_table_context();
          insert_element(token);
          mode_ = Mode::InTableBody;
          return false;
        }
        if (one_of(name, {"td", "th", "tr"})) {
          clear_to_table_context();
          insert_element(synthetic_start("tbody"));
          mode_ = Mode::InTableBody;
          return true;
        }
        if (name == "table") {
          if (!in_scope("table", Scope::Table)) return false;
          pop_until("table");
          reset_insertion_mode();
          return true;
        }
        if (one_of(name, {"style", "script", "template"})) return in_head(token);
        if (name == "input") {
          const std::string* type = nullptr;
          for (const Attribute& attr : token.attributes) {
            if (attr.name == "type") type = &attr.value;
          }
          if (type && clearlens::detail::iequals(*type, "hidden")) {
            insert_void(token);
            return false;
          }
          return in_table_anything_else(token);
        }
        if (name == "form") {
          if (has_open("template") || form_ != kNoNode) return false;
          form_ = insert_element(token);
          open_.pop_back();
          return false;
        }
        return in_table_anything_else(token);
      }
      case Token::Type::EndTag: {
        const std::string& name = token.name;
        if (name == "table") {
          if (!in_scope("table", Scope::Table)) return false;
          pop_until("table");
          reset_insertion_mode();
          return false;
        }
        if (one_of(name, {"body", "caption", "col", "colgroup", "html", "tbody", "td", "tfoot",
                          "th", "thead", "tr"})) {
          return false;
        }
        if (name == "template") return in_head(token);
        return in_table_anything_else(token);
      }
      case Token::Type::EndOfFile:
        return in_body(token);
    }
    return false;
  }

  bool in_table_text(Token& token) {
    if (token.type == Token::Type::Character) {
      pending_table_text_ += token.data;
      return false;
    }
    if (!is_whitespace_only(pending_table_text_)) {
      foster_parenting_ = true;
      body_characters(pending_table_text_);
      foster_parenting_ = false;
    } else {
      insert_characters(pending_table_text_);
    }
    pending_table_text_.clear();
    mode_ = original_mode_;
    return true;
  }

  bool in_caption(Token& token) {
    bool closes = false;
    bool reprocess = false;
    if (token.type == Token::Type::EndTag && token.name == "caption") {
      closes = true;
    } else if ((token.type == Token::Type::StartTag &&
                one_of(token.name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th",
                                    "thead", "tr"})) ||
               (token.type == Token::Type::EndTag && token.name == "table")) {
      closes = true;
      reprocess = true;
    } else if (token.type == Token::Type::EndTag &&
               one_of(token.name, {"body", "col", "colgroup", "html", "tbody", "td", "tfoot",
                                   "th", "thead", "tr"})) {
      return false;
    }
    if (!closes) return in_body(token);
    if (!in_scope("caption", Scope::Table)) return false;
    generate_implied_end_tags();
    pop_until("caption");
    clear_formatting_to_marker();
    mode_ = Mode::InTable;
    return reprocess;
  }

  bool in_column_group(Token& token) {
    switch (token.type) {
      case Token::Type::Character: {
        std::string ws = take_leading_whitespace(token);
        insert_characters(ws);
        if (token.data.empty()) return false;
        break;
      }
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag:
        if (token.name == "html") return in_body(token);
        if (token.name == "col") {
          insert_void(token);
          return false;
        }
        if (token.name == "template") return in_head(token);
        break;
      case Token::Type::EndTag:
        if (token.name == "colgroup") {
          if (!current_is("colgroup")) return false;
          open_.pop_back();
          mode_ = Mode::InTable;
          return false;
        }
        if (token.name == "col") return false;
        if (token.name == "template") return in_head(token);
        break;
      case Token::Type::EndOfFile:
        return in_body(token);
    }
    if (!current_is("colgroup")) return false;
    open_.pop_back();
    mode_ = Mode::InTable;
    return true;
  }

  bool in_table_body(Token& token) {
    if (token.type == Token::Type::StartTag) {
      const std::string& name = token.name;
      if (name == "tr") {
        clear_to_table_body_context();
        insert_element(token);
        mode_ = Mode::InRow;
        return false;
      }
      if (name == "th" || name == "td") {
        clear_to_table_body_context();
        insert_element(synthetic_start("tr"));
        mode_ = Mode::InRow;
        return true;
      }
      if (one_of(name, {"caption", "col", "colgroup", "tbody", "tfoot", "thead"})) {
        if (!in_scope("tbody", Scope::Table) && !in_scope("thead", Scope::Table) &&
            !in_scope("tfoot", Scope::Table)) {
          return false;
        }
        clear_to_table_body_context();
        open_.pop_back();
        mode_ = Mode::InTable;
        return true;
      }
    } else if (token.type == Token::Type::EndTag) {
      const std::string& name = token.name;
      if (tags::is_table_section(name)) {
        if (!in_scope(name, Scope::Table)) return false;
        clear_to_table_body_context();
        open_.pop_back();
        mode_ = Mode::InTable;
        return false;
      }
      if (name == "table") {
        if (!in_scope("tbody", Scope::Table) && !in_scope("thead", Scope::Table) &&
            !in_scope("tfoot", Scope::Table)) {
          return false;
        }
        clear_to_table_body_context();
        open_.pop_back();
        mode_ = Mode::InTable;
        return true;
      }
      if (one_of(name, {"body", "caption", "col", "colgroup", "html", "td", "th", "tr"})) {
        return false;
      }
    }
    return in_table(token);
  }

  bool in_row(Token& token) {
    if (token.type == Token::Type::StartTag) {
      const std::string& name = token.name;
      if (name == "th" || name == "td") {
        clear_to_row_context();
        insert_element(token);
        mode_ = Mode::InCell;
        formatting_.push_back(kMarker);
        return false;
      }
      if (one_of(name, {"caption", "col", "colgroup", "tbody", "tfoot", "thead", "tr"})) {
        if (!in_scope("tr", Scope::Table)) return false;
        clear_to_row_context();
        open_.pop_back();
        mode_ = Mode::InTableBody;
        return true;
      }
    } else if (token.type == Token::Type::EndTag) {
      const std::string& name = token.name;
      if (name == "tr") {
        if (!in_scope("tr", Scope::Table)) return false;
        clear_to_row_context();
        open_.pop_back();
        mode_ = Mode::InTableBody;
        return false;
      }
      if (name == "table") {
        if (!in_scope("tr", Scope::Table)) return false;
        clear_to_row_context();
        open_.pop_back();
        mode_ = Mode::InTableBody;
        return true;
      }
      if (tags::is_table_section(name)) {
        if (!in_scope(name, Scope::Table)) return false;
        if (!in_scope("tr", Scope::Table)) return false;
        clear_to_row_context();
        open_.pop_back();
        mode_ = Mode::InTableBody;
        return true;
      }
      if (one_of(name, {"body", "caption", "col", "colgroup", "html", "td", "th"})) return false;
    }
    return in_table(token);
  }

  void close_cell() {
    generate_implied_end_tags();
    while (!open_.empty()) {
      bool cell = one_of(tag(current()), {"td", "th"});
      open_.pop_back();
      if (cell) break;
    }
    clear_formatting_to_marker();
    mode_ = Mode::InRow;
  }

  bool in_cell(Token& token) {
    if (token.type == Token::Type::EndTag) {
      const std::string& name = token.name;
      if (name == "td" || name == "th") {
        if (!in_scope(name, Scope::Table)) return false;
        generate_implied_end_tags();
        pop_until(name);
        clear_formatting_to_marker();
        mode_ = Mode::InRow;
        return false;
      }
      if (one_of(name, {"body", "caption", "col", "colgroup", "html"})) return false;
      if (one_of(name, {"table", "tbody", "tfoot", "thead", "tr"})) {
        if (!in_scope(name, Scope::Table)) return false;
        close_cell();
        return true;
      }
    } else if (token.type == Token::Type::StartTag &&
               one_of(token.name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th",
                                   "thead", "tr"})) {
      if (!in_scope("td", Scope::Table) && !in_scope("th", Scope::Table)) return false;
      close_cell();
      return true;
    }
    return in_body(token);
  }

  bool in_select(Token& token) {
    switch (token.type) {
      case Token::Type::Character:
        insert_characters(token.data);
        return false;
      case Token::Type::Comment:
        insert_comment(token);
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag: {
        const std::string& name = token.name;
        if (name == "html") return in_body(token);
        if (name == "option") {
          if (current_is("option")) open_.pop_back();
          insert_element(token);
          return false;
        }
        if (name == "optgroup") {
          if (current_is("option")) open_.pop_back();
          if (current_is("optgroup")) open_.pop_back();
          insert_element(token);
          return false;
        }
        if (name == "hr") {
          if (current_is("option")) open_.pop_back();
          if (current_is("optgroup")) open_.pop_back();
          insert_void(token);
          return false;
        }
        if (name == "select") {
          if (!in_scope("select", Scope::Select)) return false;
          pop_until("select");
          reset_insertion_mode();
          return false;
        }
        bool table_breakout = one_of(name, {"caption", "table", "tbody", "tfoot", "thead", "tr",
                                            "td", "th"}) &&
                              has_open("table");
        if (table_breakout || one_of(name, {"input", "keygen", "textarea"})) {
          if (!in_scope("select", Scope::Select)) return false;
          pop_until("select");
          reset_insertion_mode();
          return true;
        }
        if (one_of(name, {"script", "template"})) return in_head(token);
        return false;
      }
      case Token::Type::EndTag: {
        const std::string& name = token.name;
        if (name == "optgroup") {
          if (current_is("option") && open_.size() >= 2 &&
              tag(open_[open_.size() - 2]) == "optgroup") {
            open_.pop_back();
          }
          if (current_is("optgroup")) open_.pop_back();
          return false;
        }
        if (name == "option") {
          if (current_is("option")) open_.pop_back();
          return false;
        }
        if (name == "select") {
          if (!in_scope("select", Scope::Select)) return false;
          pop_until("select");
          reset_insertion_mode();
          return false;
        }
        bool table_breakout = one_of(name, {"caption", "table", "tbody", "tfoot", "thead", "tr",
                                            "td", "th"}) &&
                              has_open("table");
        if (table_breakout) {
          if (!in_scope(name, Scope::Table)) return false;
          pop_until("select");
          reset_insertion_mode();
          return true;
        }
        if (name == "template") return in_head(token);
        return false;
      }
      case Token::Type::EndOfFile:
        return false;
    }
    return false;
  }

  bool after_body(Token& token) {
    switch (token.type) {
      case Token::Type::Character:
        if (is_whitespace_only(token.data)) return in_body(token);
        break;
      case Token::Type::Comment:
        insert_comment(token, open_.front());
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::StartTag:
        if (token.name == "html") return in_body(token);
        break;
      case Token::Type::EndTag:
        if (token.name == "html") {
          mode_ = Mode::AfterAfterBody;
          return false;
        }
        break;
      case Token::Type::EndOfFile:
        return false;
    }
    mode_ = Mode::InBody;
    return true;
  }

  bool after_after_body(Token& token) {
    switch (token.type) {
      case Token::Type::Comment:
        insert_comment(token, doc_.document_node());
        return false;
      case Token::Type::Doctype:
        return false;
      case Token::Type::Character:
        if (is_whitespace_only(token.data)) return in_body(token);
        break;
      case Token::Type::StartTag:
        if (token.name == "html") return in_body(token);
        break;
      case Token::Type::EndTag:
        break;
      case Token::Type::EndOfFile:
        return false;
    }
    mode_ = Mode::InBody;
    return true;
  }

  void finish() {
    // Guarantees html > head + body even for inputs that stopped early.
    if (doc_.root() == kNoNode) create_html(nullptr);
    NodeId html = doc_.root();
    if (doc_.head() == kNoNode) {
      NodeId head = doc_.create_element("head");
      const auto& kids = doc_.children(html);
      doc_.insert_before(html, head, kids.empty() ? kNoNode : kids.front());
    }
    if (doc_.body() == kNoNode) doc_.append_child(html, doc_.create_element("body"));
  }

  Document& doc_;
  Tokenizer tokenizer_;
  Mode mode_ = Mode::Initial;
  Mode original_mode_ = Mode::InBody;
  std::vector<NodeId> open_;
  std::vector<NodeId> formatting_;
  NodeId head_ = kNoNode;
  NodeId form_ = kNoNode;
  bool frameset_ok_ = true;
  bool foster_parenting_ = false;
  bool skip_next_newline_ = false;
  bool pending_head_pop_ = false;
  std::string pending_table_text_;
};

}  // namespace

Document parse_html(std::string_view body, std::string_view charset, SourceUrl base_url) {
  std::string text = decode_to_utf8(body, charset);
  Document doc;
  doc.base_url = std::move(base_url);
  TreeBuilder(doc, text).run();
  return doc;
}

}  // namespace clearlens::html
