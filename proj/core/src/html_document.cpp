#include <algorithm>
#include <stdexcept>

#include "clearlens/html.hpp"
#include "html_tags.hpp"

namespace clearlens::html {

Document::Document() {
  Node document;
  document.kind = NodeKind::Document;
  nodes_.push_back(std::move(document));
}

Document Document::blank(SourceUrl base_url) {
  Document doc;
  doc.base_url = std::move(base_url);
  NodeId html = doc.create_element("html");
  doc.append_child(doc.document_node(), html);
  doc.append_child(html, doc.create_element("head"));
  doc.append_child(html, doc.create_element("body"));
  return doc;
}

NodeId Document::root() const {
  for (NodeId child : children(document_node())) {
    if (is_element(child)) return child;
  }
  return kNoNode;
}

NodeId Document::head() const {
  NodeId html = root();
  if (html == kNoNode) return kNoNode;
  for (NodeId child : children(html)) {
    if (is_element(child, "head")) return child;
  }
  return kNoNode;
}

NodeId Document::body() const {
  NodeId html = root();
  if (html == kNoNode) return kNoNode;
  for (NodeId child : children(html)) {
    if (is_element(child, "body")) return child;
  }
  return kNoNode;
}

bool Document::is_element(NodeId id, std::string_view tag) const {
  const Node& n = node(id);
  return n.kind == NodeKind::Element && n.tag == tag;
}

NodeId Document::add_node(Node node) {
  if (nodes_.size() >= kNoNode - 1) throw std::length_error("document too large");
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Document::create_element(std::string tag, std::vector<Attribute> attributes) {
  Node n;
  n.kind = NodeKind::Element;
  n.tag = std::move(tag);
  n.attributes = std::move(attributes);
  return add_node(std::move(n));
}

NodeId Document::create_text(std::string data) {
  Node n;
  n.kind = NodeKind::Text;
  n.data = std::move(data);
  return add_node(std::move(n));
}

NodeId Document::create_comment(std::string data) {
  Node n;
  n.kind = NodeKind::Comment;
  n.data = std::move(data);
  return add_node(std::move(n));
}

void Document::detach(NodeId id) {
  Node& n = nodes_.at(id);
  if (n.parent == kNoNode) return;
  auto& siblings = nodes_.at(n.parent).children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), id));
  n.parent = kNoNode;
}

void Document::append_child(NodeId parent, NodeId child) {
  detach(child);
  nodes_.at(parent).children.push_back(child);
  nodes_.at(child).parent = parent;
}

void Document::insert_before(NodeId parent, NodeId child, NodeId reference) {
  if (reference == kNoNode) {
    append_child(parent, child);
    return;
  }
  detach(child);
  auto& siblings = nodes_.at(parent).children;
  auto at = std::find(siblings.begin(), siblings.end(), reference);
  siblings.insert(at, child);
  nodes_.at(child).parent = parent;
}

void Document::separate_text_at(NodeId parent, std::size_t index) {
  // `index` is the position of the right-hand node of a possible text pair.
  const auto& siblings = nodes_.at(parent).children;
  if (index == 0 || index >= siblings.size()) return;
  if (kind(siblings[index - 1]) == NodeKind::Text && kind(siblings[index]) == NodeKind::Text) {
    insert_before(parent, create_comment(""), siblings[index]);
  }
}

void Document::remove(NodeId id) {
  NodeId parent = nodes_.at(id).parent;
  if (parent == kNoNode) return;
  const auto& siblings = nodes_.at(parent).children;
  auto index = static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), id) -
                                        siblings.begin());
  detach(id);
  separate_text_at(parent, index);
}

void Document::unwrap(NodeId id) {
  NodeId parent = nodes_.at(id).parent;
  if (parent == kNoNode) return;
  std::vector<NodeId> moved = nodes_.at(id).children;
  for (NodeId child : moved) insert_before(parent, child, id);
  remove(id);
  if (!moved.empty()) {
    const auto& siblings = nodes_.at(parent).children;
    auto first = static_cast<std::size_t>(
        std::find(siblings.begin(), siblings.end(), moved.front()) - siblings.begin());
    separate_text_at(parent, first);
  }
}

void Document::append_text(NodeId text_node, std::string_view data) {
  nodes_.at(text_node).data.append(data);
}

void Document::set_text(NodeId text_node, std::string data) {
  nodes_.at(text_node).data = std::move(data);
}

const std::string* Document::attribute(NodeId id, std::string_view name) const {
  for (const Attribute& attr : node(id).attributes) {
    if (attr.name == name) return &attr.value;
  }
  return nullptr;
}

void Document::set_attribute(NodeId id, std::string_view name, std::string value) {
  auto& attrs = nodes_.at(id).attributes;
  for (Attribute& attr : attrs) {
    if (attr.name == name) {
      attr.value = std::move(value);
      return;
    }
  }
  attrs.push_back(Attribute{std::string(name), std::move(value)});
}

bool Document::remove_attribute(NodeId id, std::string_view name) {
  auto& attrs = nodes_.at(id).attributes;
  auto it = std::find_if(attrs.begin(), attrs.end(),
                         [&](const Attribute& attr) { return attr.name == name; });
  if (it == attrs.end()) return false;
  attrs.erase(it);
  return true;
}

void Document::merge_attributes(NodeId id, std::span<const Attribute> attributes) {
  for (const Attribute& attr : attributes) {
    if (!has_attribute(id, attr.name)) nodes_.at(id).attributes.push_back(attr);
  }
}

std::vector<NodeId> Document::descendants(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack(children(id).rbegin(), children(id).rend());
  while (!stack.empty()) {
    NodeId current = stack.back();
    stack.pop_back();
    out.push_back(current);
    const auto& kids = children(current);
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  return out;
}

std::vector<NodeId> Document::elements_by_tag(std::string_view tag) const {
  std::vector<NodeId> out;
  for (NodeId id : descendants(document_node())) {
    if (is_element(id, tag)) out.push_back(id);
  }
  return out;
}

std::size_t Document::node_count() const {
  return descendants(document_node()).size() + 1;
}

}  // namespace clearlens::html
