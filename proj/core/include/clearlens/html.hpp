#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clearlens/source_url.hpp"

namespace clearlens::html {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind { Document, Element, Text, Comment };

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Node {
  NodeKind kind = NodeKind::Element;
  // Lowercase tag name for elements, empty otherwise.
  std::string tag;
  // Source order, names lowercase and unique.
  std::vector<Attribute> attributes;
  // Character data of Text and Comment nodes.
  std::string data;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
};

// An HTML tree stored in an arena. Node 0 is the document node; its element
// child is the html root. Detached nodes stay in the arena but are
// unreachable, so NodeIds remain stable across mutation.
class Document {
 public:
  Document();

  // html > head + body with nothing else.
  static Document blank(SourceUrl base_url);

  NodeId document_node() const { return 0; }
  NodeId root() const;
  NodeId head() const;
  NodeId body() const;

  const Node& node(NodeId id) const { return nodes_.at(id); }
  NodeKind kind(NodeId id) const { return node(id).kind; }
  NodeId parent(NodeId id) const { return node(id).parent; }
  const std::vector<NodeId>& children(NodeId id) const { return node(id).children; }
  bool is_element(NodeId id, std::string_view tag) const;
  bool is_element(NodeId id) const { return kind(id) == NodeKind::Element; }
  const std::string& tag(NodeId id) const { return node(id).tag; }

  NodeId create_element(std::string tag, std::vector<Attribute> attributes = {});
  NodeId create_text(std::string data);
  NodeId create_comment(std::string data);

  // `child` is detached from its current parent first.
  void append_child(NodeId parent, NodeId child);
  void insert_before(NodeId parent, NodeId child, NodeId reference);
  void detach(NodeId id);

  // Detaches `id`. If that leaves two Text siblings adjacent, an empty
  // comment is inserted between them so the boundary survives a
  // serialize/parse cycle.
  void remove(NodeId id);
  // Replaces `id` with its children, keeping Text boundaries as remove() does.
  void unwrap(NodeId id);

  void append_text(NodeId text_node, std::string_view data);
  void set_text(NodeId text_node, std::string data);

  const std::string* attribute(NodeId id, std::string_view name) const;
  bool has_attribute(NodeId id, std::string_view name) const {
    return attribute(id, name) != nullptr;
  }
  void set_attribute(NodeId id, std::string_view name, std::string value);
  bool remove_attribute(NodeId id, std::string_view name);
  // Adds attributes whose names the element does not carry yet.
  void merge_attributes(NodeId id, std::span<const Attribute> attributes);

  // Pre-order, excluding `id` itself.
  std::vector<NodeId> descendants(NodeId id) const;
  std::vector<NodeId> elements_by_tag(std::string_view tag) const;
  // Nodes reachable from the document node, including it.
  std::size_t node_count() const;

  // Resolution base for relative references in this document.
  SourceUrl base_url;

 private:
  NodeId add_node(Node node);
  void separate_text_at(NodeId parent, std::size_t index);

  std::vector<Node> nodes_;
};

// Decodes `body` from `charset` and builds a tree with HTML5-style error
// recovery; it never fails on markup. Throws Error{UnsupportedCharset}.
Document parse_html(std::string_view body, std::string_view charset, SourceUrl base_url);

// UTF-8 output with a doctype. parse_html(serialize(d)) is structurally equal
// to d for any d produced by parse_html, except where error recovery put an
// element under an ancestor its start tag would close (an a inside an a, a
// div inside a p): no markup expresses those trees.
std::string serialize(const Document& doc);

// Visible text tokens in document order: text under script, style, noscript
// and template is skipped, each Text node is split on Unicode whitespace and
// tokens are case-folded.
std::vector<std::string> text_content(const Document& doc);

// Same tag names, attributes (in order), text and comments.
bool structurally_equal(const Document& a, const Document& b);

// Indented tree listing, one node per line, attributes sorted by name.
// Used by tests to compare trees against reference parser output.
std::string debug_dump(const Document& doc);

// Drops every charset-declaring meta element and inserts <meta charset="utf-8">
// as the first child of head, matching what serialize() emits.
void ensure_utf8_meta(Document& doc);

}  // namespace clearlens::html
