#include "clearlens/presets.hpp"

#include <fstream>
#include <sstream>

#include "clearlens/error.hpp"
#include "config_file.hpp"

namespace clearlens {
namespace {

std::vector<ClearPrintPreset> build_shipped() {
  const std::vector<std::string> fonts = {"Arial", "Helvetica", "Verdana", "sans-serif"};
  std::vector<ClearPrintPreset> presets = {
      {"default", fonts, 16.0, 1.5, "#000000", "#FFFFFF", "#0000CC", 70},
      {"white-on-black", fonts, 16.0, 1.5, "#FFFFFF", "#000000", "#FFFF00", 70},
      {"yellow-on-black", fonts, 16.0, 1.5, "#FFFF00", "#000000", "#FFFFFF", 70},
  };
  for (const ClearPrintPreset& preset : presets) validate_preset(preset);
  return presets;
}

}  // namespace

const std::vector<ClearPrintPreset>& shipped_presets() {
  static const std::vector<ClearPrintPreset> presets = build_shipped();
  return presets;
}

std::vector<ClearPrintPreset> parse_preset_catalog(std::string_view text) {
  std::vector<ClearPrintPreset> out;
  for (const detail::TomlTable& table : detail::parse_toml(text)) {
    if (table.name.empty()) {
      if (!table.entries.empty()) {
        throw Error(ErrorCode::InvalidConfig, "preset fields must sit inside a [name] table");
      }
      continue;
    }
    table.expect_keys({"font_family_stack", "base_font_size", "line_height", "text_color",
                       "background_color", "link_color", "max_line_width"});
    ClearPrintPreset preset = shipped_presets().front();
    preset.name = table.name;
    if (auto v = table.get_string_array("font_family_stack")) preset.font_family_stack = *v;
    if (auto v = table.get_number("base_font_size")) preset.base_font_size = *v;
    if (auto v = table.get_number("line_height")) preset.line_height = *v;
    if (auto v = table.get_string("text_color")) preset.text_color = *v;
    if (auto v = table.get_string("background_color")) preset.background_color = *v;
    if (auto v = table.get_string("link_color")) preset.link_color = *v;
    if (auto v = table.get_integer("max_line_width")) preset.max_line_width = static_cast<int>(*v);
    validate_preset(preset);
    out.push_back(std::move(preset));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "preset catalog defines no presets");
  return out;
}

std::vector<ClearPrintPreset> load_preset_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read preset catalog " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_preset_catalog(text.str());
}

const ClearPrintPreset* find_preset(const std::vector<ClearPrintPreset>& catalog,
                                    std::string_view name) {
  for (const ClearPrintPreset& preset : catalog) {
    if (preset.name == name) return &preset;
  }
  return nullptr;
}

}  // namespace clearlens
