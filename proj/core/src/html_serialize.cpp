#include <algorithm>
#include <locale>

#include "clearlens/html.hpp"
#include "html_tags.hpp"
#include "text_util.hpp"

namespace clearlens::html {
namespace {

constexpr std::string_view kNbsp = "\xC2\xA0";

void escape_into(std::string& out, std::string_view text, bool attribute) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out.push_back(ch);
        }
        break;
      case '<':
        out += attribute ? "<" : "&lt;";
        break;
      case '>':
        out += attribute ? ">" : "&gt;";
        break;
      default:
        if (text.substr(i, 2) == kNbsp) {
          out += "&nbsp;";
          ++i;
        } else {
          out.push_back(ch);
        }
    }
  }
}

void serialize_node(const Document& doc, NodeId id, std::string& out) {
  const Node& node = doc.node(id);
  switch (node.kind) {
    case NodeKind::Document:
      for (NodeId child : node.children) serialize_node(doc, child, out);
      return;
    case NodeKind::Comment:
      out += "<!--";
      out += node.data;
      out += "-->";
      return;
    case NodeKind::Text: {
      NodeId parent = node.parent;
      if (parent != kNoNode && doc.is_element(parent) && tags::is_raw_text(doc.tag(parent))) {
        out += node.data;
      } else {
        escape_into(out, node.data, false);
      }
      return;
    }
    case NodeKind::Element:
      break;
  }
  out.push_back('<');
  out += node.tag;
  for (const Attribute& attr : node.attributes) {
    out.push_back(' ');
    out += attr.name;
    out += "=\"";
    escape_into(out, attr.value, true);
    out.push_back('"');
  }
  out.push_back('>');
  if (tags::is_void(node.tag)) return;
  if (tags::one_of(node.tag, {"pre", "textarea", "listing"}) && !node.children.empty()) {
    const Node& first = doc.node(node.children.front());
    if (first.kind == NodeKind::Text && !first.data.empty() && first.data.front() == '\n') {
      out.push_back('\n');
    }
  }
  for (NodeId child : node.children) serialize_node(doc, child, out);
  out += "</";
  out += node.tag;
  out.push_back('>');
}

bool is_unicode_space(char32_t cp) {
  if (cp >= 0x09 && cp <= 0x0D) return true;
  switch (cp) {
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

const std::ctype<wchar_t>* folding_facet() {
  static const std::ctype<wchar_t>* facet = []() -> const std::ctype<wchar_t>* {
    try {
      static const std::locale utf8_locale("C.UTF-8");
      return &std::use_facet<std::ctype<wchar_t>>(utf8_locale);
    } catch (const std::runtime_error&) {
      return nullptr;
    }
  }();
  return facet;
}

char32_t fold(char32_t cp) {
  if (cp < 0x80) return static_cast<char32_t>(detail::ascii_lower(static_cast<char>(cp)));
  const auto* facet = folding_facet();
  if (facet == nullptr) return cp;
  return static_cast<char32_t>(facet->tolower(static_cast<wchar_t>(cp)));
}

void tokenize_into(std::string_view text, std::vector<std::string>& tokens) {
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = detail::next_code_point(text, pos);
    if (is_unicode_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      detail::append_utf8(current, fold(cp));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
}

bool equal_subtrees(const Document& a, NodeId an, const Document& b, NodeId bn) {
  const Node& x = a.node(an);
  const Node& y = b.node(bn);
  if (x.kind != y.kind || x.tag != y.tag || x.data != y.data || x.attributes != y.attributes ||
      x.children.size() != y.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!equal_subtrees(a, x.children[i], b, y.children[i])) return false;
  }
  return true;
}

void dump_node(const Document& doc, NodeId id, int depth, std::string& out) {
  const Node& node = doc.node(id);
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  switch (node.kind) {
    case NodeKind::Document:
      for (NodeId child : node.children) dump_node(doc, child, depth, out);
      return;
    case NodeKind::Comment:
      out += indent + "<!-- " + node.data + " -->\n";
      return;
    case NodeKind::Text:
      out += indent + "\"" + node.data + "\"\n";
      return;
    case NodeKind::Element:
      break;
  }
  out += indent + "<" + node.tag + ">\n";
  std::vector<Attribute> sorted = node.attributes;
  std::sort(sorted.begin(), sorted.end(),
            [](const Attribute& l, const Attribute& r) { return l.name < r.name; });
  for (const Attribute& attr : sorted) {
    out += indent + "  " + attr.name + "=\"" + attr.value + "\"\n";
  }
  for (NodeId child : node.children) dump_node(doc, child, depth + 1, out);
}

bool declares_charset(const Document& doc, NodeId meta) {
  if (doc.has_attribute(meta, "charset")) return true;
  const std::string* equiv = doc.attribute(meta, "http-equiv");
  return equiv != nullptr && detail::iequals(detail::trim_html_space(*equiv), "content-type");
}

}  // namespace

std::string serialize(const Document& doc) {
  std::string out = "<!DOCTYPE html>";
  serialize_node(doc, doc.document_node(), out);
  return out;
}

std::vector<std::string> text_content(const Document& doc) {
  std::vector<std::string> tokens;
  std::vector<NodeId> stack(doc.children(doc.document_node()).rbegin(),
                            doc.children(doc.document_node()).rend());
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const Node& node = doc.node(id);
    if (node.kind == NodeKind::Text) {
      tokenize_into(node.data, tokens);
    } else if (node.kind == NodeKind::Element && !tags::hides_text(node.tag)) {
      stack.insert(stack.end(), node.children.rbegin(), node.children.rend());
    }
  }
  return tokens;
}

bool structurally_equal(const Document& a, const Document& b) {
  return equal_subtrees(a, a.document_node(), b, b.document_node());
}

std::string debug_dump(const Document& doc) {
  std::string out;
  dump_node(doc, doc.document_node(), 0, out);
  return out;
}

void ensure_utf8_meta(Document& doc) {
  for (NodeId meta : doc.elements_by_tag("meta")) {
    if (declares_charset(doc, meta)) doc.remove(meta);
  }
  NodeId head = doc.head();
  if (head == kNoNode) return;
  NodeId meta = doc.create_element("meta", {Attribute{"charset", "utf-8"}});
  const auto& kids = doc.children(head);
  doc.insert_before(head, meta, kids.empty() ? kNoNode : kids.front());
}

}  // namespace clearlens::html
