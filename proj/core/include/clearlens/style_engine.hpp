#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clearlens/html.hpp"

namespace clearlens {

// A Clear Print skin. Alignment is always left, links are always underlined
// and italics are always suppressed, so those are not fields.
struct ClearPrintPreset {
  std::string name;
  std::vector<std::string> font_family_stack;
  double base_font_size = 16.0;
  double line_height = 1.5;
  std::string text_color;
  std::string background_color;
  std::string link_color;
  int max_line_width = 70;
};

// WCAG contrast ratio of two "#RRGGBB" colors, 1.0 to 21.0.
// Throws Error{MalformedColor}.
double contrast_ratio(std::string_view fg, std::string_view bg);

// Throws Error{InvalidPreset} naming the first broken constraint: text
// contrast below 7, link contrast below 4.5, base size below 16, line height
// below 1.5, empty font stack or non-positive line width.
void validate_preset(const ClearPrintPreset& preset);

// base_font_size multiplied by `scale`, which is clamped to [0.75, 2.0].
ClearPrintPreset scaled(ClearPrintPreset preset, double scale);

double clamp_scale(double scale);

// The marker carried by the injected sheet.
inline constexpr std::string_view kMarkerAttribute = "data-clearlens";
inline constexpr std::string_view kMarkerValue = "1";

enum class StyleKind {
  StyleElement,
  ExternalStylesheetLink,
  InlineStyleAttr,
  PresentationalAttr,
  ScriptElement,
  // font, center, big, small, marquee and blink.
  WrapperElement,
};

std::string_view to_string(StyleKind kind);

struct StyleComponent {
  html::NodeId node = html::kNoNode;
  StyleKind kind = StyleKind::StyleElement;
  // Attribute name for PresentationalAttr, "href" for ExternalStylesheetLink,
  // "style" for InlineStyleAttr; empty otherwise.
  std::string name;
  std::string value;
  // A style element carrying the injected-sheet marker.
  bool marked = false;
};

enum class StyleAction { Remove, RemoveElementKeepChildren, Keep };

// True for presentational attributes that the engine strips from `tag`.
// width and height stay on media elements.
bool is_presentational_attribute(std::string_view tag, std::string_view name);

bool is_external_stylesheet(const html::Document& doc, html::NodeId id);

// Every style and script carrier in document order.
std::vector<StyleComponent> extract_style_components(const html::Document& doc);

StyleAction equivalent_style(const StyleComponent& component, const ClearPrintPreset& preset);

struct StyleStats {
  int styles_removed = 0;
  int scripts_removed = 0;
};

// Removes every component per equivalent_style and leaves exactly one marked
// style element, holding render_stylesheet(preset), as the last child of head.
StyleStats apply_clearprint(html::Document& doc, const ClearPrintPreset& preset);

std::string render_stylesheet(const ClearPrintPreset& preset);

}  // namespace clearlens
