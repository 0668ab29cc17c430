#include "clearlens/style_engine.hpp"

#include <algorithm>
#include <cmath>

#include "clearlens/error.hpp"
#include "html_tags.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

using html::Document;
using html::NodeId;
using html::NodeKind;

double channel(std::string_view hex) {
  double c = (detail::hex_value(hex[0]) * 16 + detail::hex_value(hex[1])) / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double relative_luminance(std::string_view color) {
  std::string_view hex = color.empty() ? color : color.substr(1);
  if (color.size() != 7 || color.front() != '#' ||
      !std::all_of(hex.begin(), hex.end(), detail::is_ascii_hex)) {
    throw Error(ErrorCode::MalformedColor, "malformed color '" + std::string(color) + "'");
  }
  return 0.2126 * channel(hex.substr(0, 2)) + 0.7152 * channel(hex.substr(2, 2)) +
         0.0722 * channel(hex.substr(4, 2));
}

void invalid(const ClearPrintPreset& preset, const std::string& why) {
  throw Error(ErrorCode::InvalidPreset, "preset '" + preset.name + "': " + why);
}

bool is_wrapper(std::string_view tag) {
  return html::tags::one_of(tag, {"font", "center", "big", "small", "marquee", "blink"});
}

bool is_media(std::string_view tag) {
  return html::tags::one_of(tag, {"img", "video", "audio", "canvas", "iframe", "embed", "object",
                                  "svg", "picture", "source", "input"});
}

bool rel_has(std::string_view rel, std::string_view token) {
  std::size_t pos = 0;
  while (pos < rel.size()) {
    while (pos < rel.size() && detail::is_html_space(rel[pos])) ++pos;
    std::size_t end = pos;
    while (end < rel.size() && !detail::is_html_space(rel[end])) ++end;
    if (end > pos && detail::iequals(rel.substr(pos, end - pos), token)) return true;
    pos = end;
  }
  return false;
}

bool is_marked(const Document& doc, NodeId id) {
  const std::string* marker = doc.attribute(id, kMarkerAttribute);
  return marker != nullptr && *marker == kMarkerValue;
}

std::string sheet_text(const Document& doc, NodeId style) {
  std::string text;
  for (NodeId child : doc.children(style)) {
    if (doc.kind(child) == NodeKind::Text) text += doc.node(child).data;
  }
  return text;
}

std::string font_stack(const std::vector<std::string>& families) {
  std::string out;
  for (const std::string& family : families) {
    if (!out.empty()) out += ", ";
    bool generic = html::tags::one_of(family, {"serif", "sans-serif", "monospace", "cursive",
                                               "fantasy", "system-ui"});
    if (generic || family.find_first_of(" \t") == std::string::npos) {
      out += family;
    } else {
      out += '"' + family + '"';
    }
  }
  return out;
}

}  // namespace

double contrast_ratio(std::string_view fg, std::string_view bg) {
  double a = relative_luminance(fg);
  double b = relative_luminance(bg);
  return (std::max(a, b) + 0.05) / (std::min(a, b) + 0.05);
}

void validate_preset(const ClearPrintPreset& preset) {
  if (preset.name.empty()) invalid(preset, "name is empty");
  if (preset.font_family_stack.empty()) invalid(preset, "font_family_stack is empty");
  if (preset.base_font_size < 16.0) invalid(preset, "base_font_size is below 16");
  if (preset.line_height < 1.5) invalid(preset, "line_height is below 1.5");
  if (preset.max_line_width <= 0) invalid(preset, "max_line_width must be positive");
  double text = 0.0;
  double link = 0.0;
  try {
    text = contrast_ratio(preset.text_color, preset.background_color);
    link = contrast_ratio(preset.link_color, preset.background_color);
  } catch (const Error& e) {
    invalid(preset, e.what());
  }
  if (text < 7.0) invalid(preset, "text contrast " + detail::format_decimal(text, 2) + " is below 7");
  if (link < 4.5) invalid(preset, "link contrast " + detail::format_decimal(link, 2) + " is below 4.5");
}

double clamp_scale(double scale) {
  if (!std::isfinite(scale)) return 1.0;
  return std::clamp(scale, 0.75, 2.0);
}

ClearPrintPreset scaled(ClearPrintPreset preset, double scale) {
  preset.base_font_size *= clamp_scale(scale);
  return preset;
}

std::string_view to_string(StyleKind kind) {
  switch (kind) {
    case StyleKind::StyleElement:
      return "StyleElement";
    case StyleKind::ExternalStylesheetLink:
      return "ExternalStylesheetLink";
    case StyleKind::InlineStyleAttr:
      return "InlineStyleAttr";
    case StyleKind::PresentationalAttr:
      return "PresentationalAttr";
    case StyleKind::ScriptElement:
      return "ScriptElement";
    case StyleKind::WrapperElement:
      return "WrapperElement";
  }
  return "unknown";
}

bool is_presentational_attribute(std::string_view tag, std::string_view name) {
  if (name == "width" || name == "height") return !is_media(tag);
  return html::tags::one_of(name, {"font", "bgcolor", "color", "align", "text", "link", "vlink",
                                   "alink", "background", "border", "cellpadding", "cellspacing",
                                   "valign"});
}

bool is_external_stylesheet(const Document& doc, NodeId id) {
  if (!doc.is_element(id, "link")) return false;
  const std::string* rel = doc.attribute(id, "rel");
  return rel != nullptr && rel_has(*rel, "stylesheet");
}

std::vector<StyleComponent> extract_style_components(const Document& doc) {
  std::vector<StyleComponent> out;
  for (NodeId id : doc.descendants(doc.document_node())) {
    if (!doc.is_element(id)) continue;
    const std::string& tag = doc.tag(id);
    if (tag == "style") {
      out.push_back({id, StyleKind::StyleElement, {}, {}, is_marked(doc, id)});
    } else if (tag == "script") {
      out.push_back({id, StyleKind::ScriptElement, {}, {}, false});
    } else if (is_external_stylesheet(doc, id)) {
      const std::string* href = doc.attribute(id, "href");
      out.push_back({id, StyleKind::ExternalStylesheetLink, "href", href ? *href : "", false});
    } else if (is_wrapper(tag)) {
      out.push_back({id, StyleKind::WrapperElement, {}, {}, false});
    }
    for (const html::Attribute& attr : doc.node(id).attributes) {
      if (attr.name == "style") {
        out.push_back({id, StyleKind::InlineStyleAttr, attr.name, attr.value, false});
      } else if (is_presentational_attribute(tag, attr.name)) {
        out.push_back({id, StyleKind::PresentationalAttr, attr.name, attr.value, false});
      }
    }
  }
  return out;
}

StyleAction equivalent_style(const StyleComponent& component, const ClearPrintPreset&) {
  if (component.marked) return StyleAction::Keep;
  if (component.kind == StyleKind::WrapperElement) return StyleAction::RemoveElementKeepChildren;
  return StyleAction::Remove;
}

StyleStats apply_clearprint(Document& doc, const ClearPrintPreset& preset) {
  StyleStats stats;
  std::vector<NodeId> marked;
  std::vector<NodeId> unwraps;
  for (const StyleComponent& component : extract_style_components(doc)) {
    StyleAction action = equivalent_style(component, preset);
    if (action == StyleAction::Keep) {
      marked.push_back(component.node);
      continue;
    }
    if (component.kind == StyleKind::ScriptElement) {
      ++stats.scripts_removed;
    } else {
      ++stats.styles_removed;
    }
    switch (component.kind) {
      case StyleKind::InlineStyleAttr:
      case StyleKind::PresentationalAttr:
        doc.remove_attribute(component.node, component.name);
        break;
      case StyleKind::WrapperElement:
        unwraps.push_back(component.node);
        break;
      default:
        doc.remove(component.node);
    }
  }
  for (auto it = unwraps.rbegin(); it != unwraps.rend(); ++it) doc.unwrap(*it);

  NodeId head = doc.head();
  NodeId sheet = html::kNoNode;
  for (NodeId id : marked) {
    if (sheet == html::kNoNode && doc.parent(id) == head) {
      sheet = id;
    } else {
      doc.remove(id);
      ++stats.styles_removed;
    }
  }
  if (head == html::kNoNode) return stats;
  if (sheet == html::kNoNode) {
    sheet = doc.create_element("style", {html::Attribute{std::string(kMarkerAttribute),
                                                         std::string(kMarkerValue)}});
  } else if (doc.children(head).back() != sheet) {
    doc.remove(sheet);
  }
  if (doc.parent(sheet) != head) doc.append_child(head, sheet);

  std::string css = render_stylesheet(preset);
  if (sheet_text(doc, sheet) != css || doc.children(sheet).size() != 1) {
    while (!doc.children(sheet).empty()) doc.detach(doc.children(sheet).back());
    doc.append_child(sheet, doc.create_text(std::move(css)));
  }
  return stats;
}

std::string render_stylesheet(const ClearPrintPreset& p) {
  const std::string size = detail::format_decimal(p.base_font_size, 2) + "px";
  const std::string line = detail::format_decimal(p.line_height, 2);
  std::string css;
  css += "html { font-size: " + size + " !important; background-color: " + p.background_color +
         " !important; }\n";
  css += "body { color: " + p.text_color + " !important; background-color: " +
         p.background_color + " !important; max-width: " + std::to_string(p.max_line_width) +
         "ch !important; margin: 0 auto !important; padding: 1em !important; }\n";
  css += "* { font-family: " + font_stack(p.font_family_stack) +
         " !important; font-size: 1rem !important; line-height: " + line +
         " !important; color: inherit !important; background: transparent !important;"
         " font-style: normal !important; text-align: left !important;"
         " letter-spacing: normal !important; }\n";
  css += "h1, h1 * { font-size: 2rem !important; }\n";
  css += "h2, h2 * { font-size: 1.6rem !important; }\n";
  css += "h3, h3 * { font-size: 1.3rem !important; }\n";
  css += "h1, h2, h3, h4, h5, h6, strong, b, em, i { font-weight: bold !important; }\n";
  css += "a, a:link, a:visited { color: " + p.link_color +
         " !important; text-decoration: underline !important; }\n";
  css += ":focus { outline: 3px solid " + p.text_color +
         " !important; outline-offset: 2px !important; }\n";
  css += "img, video { max-width: 100% !important; height: auto !important; }\n";
  return css;
}

}  // namespace clearlens
