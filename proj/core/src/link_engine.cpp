#include "clearlens/link_engine.hpp"

#include "clearlens/error.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

using html::Document;
using html::NodeId;

struct Reference {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

std::string clean_href(std::string_view href) {
  href = detail::trim_html_space(href);
  std::string out;
  out.reserve(href.size());
  for (char ch : href) {
    if (ch != '\t' && ch != '\n' && ch != '\r') out.push_back(ch);
  }
  return out;
}

// The component split of the generic URI grammar.
Reference split_reference(std::string_view text) {
  Reference ref;
  std::string scheme = scheme_of(text);
  if (!scheme.empty()) {
    ref.scheme = scheme;
    text.remove_prefix(scheme.size() + 1);
  }
  if (detail::starts_with(text, "//")) {
    text.remove_prefix(2);
    std::size_t end = text.find_first_of("/?#");
    ref.authority = std::string(text.substr(0, end));
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end);
  }
  std::size_t hash = text.find('#');
  if (hash != std::string_view::npos) {
    ref.fragment = std::string(text.substr(hash + 1));
    text = text.substr(0, hash);
  }
  std::size_t question = text.find('?');
  if (question != std::string_view::npos) {
    ref.query = std::string(text.substr(question + 1));
    text = text.substr(0, question);
  }
  ref.path = std::string(text);
  return ref;
}

std::string remove_dot_segments(std::string_view input) {
  std::string out;
  while (!input.empty()) {
    if (detail::starts_with(input, "../")) {
      input.remove_prefix(3);
    } else if (detail::starts_with(input, "./")) {
      input.remove_prefix(2);
    } else if (detail::starts_with(input, "/./")) {
      input.remove_prefix(2);
    } else if (input == "/.") {
      input = "/";
    } else if (detail::starts_with(input, "/../") || input == "/..") {
      input = input.size() == 3 ? std::string_view("/") : input.substr(3);
      std::size_t cut = out.rfind('/');
      out.erase(cut == std::string::npos ? 0 : cut);
    } else if (input == "." || input == "..") {
      input = {};
    } else {
      std::size_t next = input.find('/', 1);
      out += input.substr(0, next);
      input = next == std::string_view::npos ? std::string_view{} : input.substr(next);
    }
  }
  return out;
}

std::string merge_paths(const SourceUrl& base, std::string_view path) {
  std::size_t slash = base.path.rfind('/');
  if (slash == std::string::npos) return "/" + std::string(path);
  return base.path.substr(0, slash + 1) + std::string(path);
}

std::string authority_of(const SourceUrl& url) {
  std::string origin = url.origin();
  return origin.substr(origin.find("://") + 3);
}

bool keeps_scheme(std::string_view scheme) { return scheme == "mailto" || scheme == "tel"; }

NodeId first_base_with_href(const Document& doc) {
  for (NodeId id : doc.elements_by_tag("base")) {
    if (doc.has_attribute(id, "href")) return id;
  }
  return html::kNoNode;
}

bool absolutize_attribute(Document& doc, NodeId id, std::string_view name, const SourceUrl& base) {
  const std::string* value = doc.attribute(id, name);
  if (value == nullptr) return false;
  std::string updated;
  if (name == "srcset") {
    updated = absolutize_srcset(*value, base);
  } else {
    LinkClass kind = classify(*value).kind;
    if (kind != LinkClass::Relative && kind != LinkClass::Absolute) return false;
    try {
      updated = resolve(base, *value).to_string();
    } catch (const Error&) {
      return false;
    }
  }
  if (updated == *value) return false;
  doc.set_attribute(id, name, std::move(updated));
  return true;
}

}  // namespace

std::string_view to_string(LinkClass kind) {
  switch (kind) {
    case LinkClass::Relative:
      return "Relative";
    case LinkClass::Absolute:
      return "Absolute";
    case LinkClass::Fragment:
      return "Fragment";
    case LinkClass::NonHttpScheme:
      return "NonHttpScheme";
  }
  return "unknown";
}

Classification classify(std::string_view href) {
  std::string text = clean_href(href);
  if (detail::starts_with(text, "#")) return {LinkClass::Fragment, {}};
  if (detail::starts_with(text, "//")) return {LinkClass::Absolute, {}};
  std::string scheme = scheme_of(text);
  if (scheme.empty()) return {LinkClass::Relative, {}};
  if (scheme == "http" || scheme == "https") return {LinkClass::Absolute, {}};
  return {LinkClass::NonHttpScheme, scheme};
}

UrlParts split_base(const SourceUrl& url) {
  std::string path_and_query = url.request_target();
  if (url.fragment) path_and_query += "#" + *url.fragment;
  return {url.origin(), std::move(path_and_query)};
}

SourceUrl resolve(const SourceUrl& base, std::string_view href) {
  std::string cleaned = clean_href(href);
  Reference r = split_reference(cleaned);
  Reference t;
  if (r.scheme) {
    t.scheme = r.scheme;
    t.authority = r.authority;
    t.path = remove_dot_segments(r.path);
    t.query = r.query;
  } else {
    t.scheme = std::string(to_string(base.scheme));
    if (r.authority) {
      t.authority = r.authority;
      t.path = remove_dot_segments(r.path);
      t.query = r.query;
    } else {
      t.authority = authority_of(base);
      if (r.path.empty()) {
        t.path = base.path;
        t.query = r.query ? r.query : base.query;
      } else {
        t.path = remove_dot_segments(r.path.front() == '/' ? r.path : merge_paths(base, r.path));
        t.query = r.query;
      }
    }
  }
  t.fragment = r.fragment;

  if (!t.authority) {
    throw Error(ErrorCode::MalformedUrl, "reference '" + cleaned + "' has no authority");
  }
  std::string target = *t.scheme + "://" + *t.authority + t.path;
  if (t.query) target += "?" + *t.query;
  if (t.fragment) target += "#" + *t.fragment;
  return parse_url(target);
}

SourceUrl document_base(const Document& doc, const SourceUrl& page_url) {
  NodeId base = first_base_with_href(doc);
  if (base == html::kNoNode) return page_url;
  try {
    return resolve(page_url, *doc.attribute(base, "href"));
  } catch (const Error&) {
    return page_url;
  }
}

std::vector<LinkComponent> extract_links(const Document& doc, const SourceUrl& base) {
  std::vector<LinkComponent> out;
  for (NodeId id : doc.elements_by_tag("a")) {
    const std::string* href = doc.attribute(id, "href");
    if (href == nullptr) continue;
    LinkComponent link;
    link.node = id;
    link.original = *href;
    link.classification = classify(*href);
    if (link.classification.kind == LinkClass::Relative ||
        link.classification.kind == LinkClass::Absolute) {
      try {
        link.resolved = resolve(base, *href);
      } catch (const Error&) {
      }
    }
    out.push_back(std::move(link));
  }
  return out;
}

bool is_render_link(std::string_view href, std::string_view service_base) {
  std::string text = clean_href(href);
  std::string prefix = std::string(service_base) + "/render";
  return detail::starts_with(text, prefix) &&
         (text.size() == prefix.size() || text[prefix.size()] == '?');
}

std::string rewrite_link(const LinkComponent& link, std::string_view service_base,
                         const RenderParams& params) {
  switch (link.classification.kind) {
    case LinkClass::Fragment:
      return link.original;
    case LinkClass::NonHttpScheme:
      return keeps_scheme(link.classification.scheme) ? link.original : "#";
    case LinkClass::Relative:
    case LinkClass::Absolute:
      break;
  }
  if (is_render_link(link.original, service_base)) return link.original;
  if (!link.resolved) return "#";
  std::string out = std::string(service_base) + "/render?url=" +
                    percent_encode_component(link.resolved->to_string());
  for (const auto& [name, value] : params) {
    out += "&" + percent_encode_component(name) + "=" + percent_encode_component(value);
  }
  return out;
}

std::string absolutize_srcset(std::string_view srcset, const SourceUrl& base) {
  std::string out;
  std::size_t pos = 0;
  auto is_space = [](char ch) { return detail::is_html_space(ch); };
  while (pos < srcset.size()) {
    while (pos < srcset.size() && (is_space(srcset[pos]) || srcset[pos] == ',')) ++pos;
    if (pos >= srcset.size()) break;
    std::size_t start = pos;
    while (pos < srcset.size() && !is_space(srcset[pos])) ++pos;
    std::string_view url = srcset.substr(start, pos - start);
    std::string_view descriptors;
    if (url.back() == ',') {
      while (!url.empty() && url.back() == ',') url.remove_suffix(1);
    } else {
      std::size_t desc_start = pos;
      int depth = 0;
      while (pos < srcset.size() && (depth > 0 || srcset[pos] != ',')) {
        if (srcset[pos] == '(') ++depth;
        if (srcset[pos] == ')' && depth > 0) --depth;
        ++pos;
      }
      descriptors = detail::trim_html_space(srcset.substr(desc_start, pos - desc_start));
    }
    if (url.empty()) continue;
    std::string resolved(url);
    LinkClass kind = classify(url).kind;
    if (kind == LinkClass::Relative || kind == LinkClass::Absolute) {
      try {
        resolved = resolve(base, url).to_string();
      } catch (const Error&) {
      }
    }
    if (!out.empty()) out += ", ";
    out += resolved;
    if (!descriptors.empty()) {
      out += ' ';
      out += descriptors;
    }
  }
  return out;
}

int rewrite_resources(Document& doc, const SourceUrl& page_url) {
  SourceUrl base = document_base(doc, page_url);
  int changed = 0;
  for (NodeId id : doc.elements_by_tag("img")) {
    changed += absolutize_attribute(doc, id, "src", base);
    changed += absolutize_attribute(doc, id, "srcset", base);
  }
  for (NodeId id : doc.elements_by_tag("video")) {
    changed += absolutize_attribute(doc, id, "poster", base);
  }
  return changed;
}

LinkStats rewrite_links(Document& doc, const SourceUrl& page_url, std::string_view service_base,
                        const RenderParams& params) {
  LinkStats stats;
  stats.resources_rewritten = rewrite_resources(doc, page_url);
  SourceUrl base = document_base(doc, page_url);
  for (const LinkComponent& link : extract_links(doc, base)) {
    std::string href = rewrite_link(link, service_base, params);
    if (href == link.original) continue;
    doc.set_attribute(link.node, link.attr, std::move(href));
    ++stats.links_rewritten;
  }
  for (NodeId id : doc.elements_by_tag("base")) doc.remove(id);
  return stats;
}

}  // namespace clearlens
