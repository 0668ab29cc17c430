#pragma once

// Element categories used by the tree builder, serializer and passes.

#include <algorithm>
#include <initializer_list>
#include <string_view>

namespace clearlens::html::tags {

inline bool one_of(std::string_view tag, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

inline bool is_void(std::string_view tag) {
  return one_of(tag, {"area", "base", "basefont", "bgsound", "br", "col", "embed", "frame",
                      "hr", "img", "input", "keygen", "link", "meta", "param", "source",
                      "track", "wbr"});
}

// Children serialized verbatim.
inline bool is_raw_text(std::string_view tag) {
  return one_of(tag, {"style", "script", "xmp", "iframe", "noembed", "noframes", "plaintext"});
}

inline bool is_special(std::string_view tag) {
  return one_of(
      tag,
      {"address", "applet", "area",    "article", "aside",    "base",     "basefont", "bgsound",
       "blockquote", "body", "br",     "button",  "caption",  "center",   "col",      "colgroup",
       "dd",      "details", "dir",    "div",     "dl",       "dt",       "embed",    "fieldset",
       "figcaption", "figure", "footer", "form",  "frame",    "frameset", "h1",       "h2",
       "h3",      "h4",      "h5",     "h6",      "head",     "header",   "hgroup",   "hr",
       "html",    "iframe",  "img",    "input",   "keygen",   "li",       "link",     "listing",
       "main",    "marquee", "menu",   "meta",    "nav",      "noembed",  "noframes", "noscript",
       "object",  "ol",      "p",      "param",   "plaintext", "pre",     "script",   "search",
       "section", "select",  "source", "style",   "summary",  "table",    "tbody",    "td",
       "template", "textarea", "tfoot", "th",     "thead",    "title",    "tr",       "track",
       "ul",      "wbr",     "xmp"});
}

inline bool is_formatting(std::string_view tag) {
  return one_of(tag, {"a", "b", "big", "code", "em", "font", "i", "nobr", "s", "small", "strike",
                      "strong", "tt", "u"});
}

inline bool is_heading(std::string_view tag) {
  return one_of(tag, {"h1", "h2", "h3", "h4", "h5", "h6"});
}

inline bool has_implied_end_tag(std::string_view tag) {
  return one_of(tag, {"dd", "dt", "li", "optgroup", "option", "p", "rb", "rp", "rt", "rtc"});
}

inline bool closes_p_on_start(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog",
                      "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer", "header",
                      "hgroup", "main", "menu", "nav", "ol", "p", "search", "section", "summary",
                      "ul"});
}

inline bool is_block_end(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "button", "center", "details",
                      "dialog", "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer",
                      "header", "hgroup", "listing", "main", "menu", "nav", "ol", "pre",
                      "search", "section", "summary", "ul"});
}

inline bool is_table_section(std::string_view tag) {
  return one_of(tag, {"tbody", "tfoot", "thead"});
}

// Text under these is not page content.
inline bool hides_text(std::string_view tag) {
  return one_of(tag, {"script", "style", "noscript", "template"});
}

}  // namespace clearlens::html::tags
