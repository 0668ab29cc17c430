#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clearlens/html.hpp"
#include "clearlens/source_url.hpp"

namespace clearlens {

enum class LinkClass { Relative, Absolute, Fragment, NonHttpScheme };

std::string_view to_string(LinkClass kind);

struct Classification {
  LinkClass kind = LinkClass::Relative;
  // Lowercased, set for NonHttpScheme only.
  std::string scheme;

  friend bool operator==(const Classification&, const Classification&) = default;
};

// "#..." is a Fragment, http(s) URLs and "//host/..." are Absolute, other
// schemes are NonHttpScheme, anything else is Relative.
Classification classify(std::string_view href);

struct LinkComponent {
  html::NodeId node = html::kNoNode;
  std::string attr = "href";
  std::string original;
  Classification classification;
  // Set for Relative and Absolute hrefs that resolve to a valid http(s) URL.
  std::optional<SourceUrl> resolved;
};

struct UrlParts {
  // scheme://host[:port]
  std::string base;
  // Path, query and fragment.
  std::string path_and_query;
};

UrlParts split_base(const SourceUrl& url);

// Reference resolution of `href` against `base` with dot-segment removal.
// A protocol-relative href takes the base's scheme. Throws Error{MalformedUrl}
// or Error{UnsupportedScheme} when the result is not a valid http(s) URL.
SourceUrl resolve(const SourceUrl& base, std::string_view href);

// The base for relative references: the first <base href> resolved against
// the page URL, or the page URL.
SourceUrl document_base(const html::Document& doc, const SourceUrl& page_url);

// One component per <a href>, in document order, resolved against `base`.
std::vector<LinkComponent> extract_links(const html::Document& doc, const SourceUrl& base);

// Extra query parameters appended to proxied links, e.g. preset and scale.
using RenderParams = std::vector<std::pair<std::string, std::string>>;

// service_base + "/render?url=" + percent-encoded target for Relative and
// Absolute links. Fragments, mailto and tel are unchanged, links already
// pointing at service_base + "/render" are unchanged, everything else
// (javascript:, data:, other schemes, unresolvable hrefs) becomes "#".
std::string rewrite_link(const LinkComponent& link, std::string_view service_base,
                         const RenderParams& params = {});

bool is_render_link(std::string_view href, std::string_view service_base);

// Makes img src/srcset and video poster absolute against document_base.
// Returns the number of attributes changed.
int rewrite_resources(html::Document& doc, const SourceUrl& page_url);

// Absolutizes every candidate URL of a srcset value, keeping descriptors.
std::string absolutize_srcset(std::string_view srcset, const SourceUrl& base);

struct LinkStats {
  int links_rewritten = 0;
  int resources_rewritten = 0;
};

// Resources first, then anchors, then every <base> element is removed since
// all rewritten references are absolute.
LinkStats rewrite_links(html::Document& doc, const SourceUrl& page_url,
                        std::string_view service_base, const RenderParams& params = {});

}  // namespace clearlens
