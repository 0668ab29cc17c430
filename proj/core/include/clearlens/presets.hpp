#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "clearlens/style_engine.hpp"

namespace clearlens {

// default (black on white), white-on-black and yellow-on-black.
const std::vector<ClearPrintPreset>& shipped_presets();

// A catalog file holds one table per preset:
//
//   [yellow-on-black]
//   font_family_stack = ["Verdana", "Arial", "sans-serif"]
//   base_font_size = 18
//   text_color = "#FFFF00"
//
// Fields left out take the value of the "default" shipped preset. Every
// preset is validated. Throws Error{InvalidConfig} or Error{InvalidPreset}.
std::vector<ClearPrintPreset> parse_preset_catalog(std::string_view text);
std::vector<ClearPrintPreset> load_preset_catalog(const std::filesystem::path& path);

// nullptr when no preset has that name.
const ClearPrintPreset* find_preset(const std::vector<ClearPrintPreset>& catalog,
                                    std::string_view name);

}  // namespace clearlens
