#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "clearlens/error.hpp"
#include "clearlens/presets.hpp"
#include "clearlens/style_engine.hpp"
#include "invariants.hpp"

namespace clearlens {
namespace {

const SourceUrl kBase = parse_url("http://x.example/");

html::Document parse(std::string_view text) { return html::parse_html(text, "utf-8", kBase); }

const ClearPrintPreset& preset(std::string_view name) {
  return *find_preset(shipped_presets(), name);
}

TEST(Contrast, Extremes) {
  EXPECT_EQ(contrast_ratio("#000000", "#FFFFFF"), 21.0);
  EXPECT_EQ(contrast_ratio("#FFFFFF", "#000000"), 21.0);
  EXPECT_EQ(contrast_ratio("#ABCDEF", "#ABCDEF"), 1.0);
  EXPECT_NEAR(contrast_ratio("#FFFF00", "#000000"), 19.56, 0.01);
}

TEST(Contrast, MatchesLuminanceOracle) {
  std::ifstream in(std::string(CLEARLENS_TEST_DATA_DIR) + "/contrast_cases.tsv");
  std::string fg;
  std::string bg;
  double expected = 0;
  int count = 0;
  while (in >> fg >> bg >> expected) {
    EXPECT_NEAR(contrast_ratio(fg, bg), expected, 5e-6) << fg << " " << bg;
    ++count;
  }
  EXPECT_GE(count, 50);
}

TEST(Contrast, RejectsMalformedColors) {
  for (const char* bad : {"000000", "#00000", "#GGGGGG", "", "#0000000"}) {
    try {
      contrast_ratio(bad, "#FFFFFF");
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedColor);
    }
  }
}

TEST(Presets, ShippedPresetsAreValid) {
  ASSERT_EQ(shipped_presets().size(), 3u);
  for (const auto& p : shipped_presets()) {
    EXPECT_NO_THROW(validate_preset(p)) << p.name;
    EXPECT_GE(contrast_ratio(p.text_color, p.background_color), 7.0) << p.name;
    EXPECT_GE(contrast_ratio(p.link_color, p.background_color), 4.5) << p.name;
  }
}

TEST(Presets, ValidationNamesConstraint) {
  ClearPrintPreset p = preset("default");
  p.text_color = "#777777";
  EXPECT_THROW(validate_preset(p), Error);
  p = preset("default");
  p.base_font_size = 12;
  EXPECT_THROW(validate_preset(p), Error);
  p = preset("default");
  p.line_height = 1.2;
  EXPECT_THROW(validate_preset(p), Error);
  p = preset("default");
  p.font_family_stack.clear();
  EXPECT_THROW(validate_preset(p), Error);
  p = preset("default");
  p.max_line_width = 0;
  EXPECT_THROW(validate_preset(p), Error);
}

TEST(Presets, ScaleIsClamped) {
  EXPECT_EQ(scaled(preset("default"), 1.5).base_font_size, 24.0);
  EXPECT_EQ(scaled(preset("default"), 10).base_font_size, 32.0);
  EXPECT_EQ(scaled(preset("default"), 0.1).base_font_size, 12.0);
  EXPECT_EQ(clamp_scale(std::numeric_limits<double>::quiet_NaN()), 1.0);
}

TEST(ExtractStyleComponents, ThreeKinds) {
  auto doc = parse("<style>p{}</style><link rel=stylesheet href=a.css><p style='color:red'>x");
  auto components = extract_style_components(doc);
  ASSERT_EQ(components.size(), 3u);
  EXPECT_EQ(components[0].kind, StyleKind::StyleElement);
  EXPECT_EQ(components[1].kind, StyleKind::ExternalStylesheetLink);
  EXPECT_EQ(components[1].value, "a.css");
  EXPECT_EQ(components[2].kind, StyleKind::InlineStyleAttr);
  EXPECT_EQ(components[2].value, "color:red");
}

TEST(ExtractStyleComponents, PresentationalAttributes) {
  auto doc = parse("<body bgcolor='#fff'><font color=red>x</font>");
  int presentational = 0;
  int wrappers = 0;
  for (const auto& c : extract_style_components(doc)) {
    if (c.kind == StyleKind::PresentationalAttr) ++presentational;
    if (c.kind == StyleKind::WrapperElement) ++wrappers;
  }
  EXPECT_EQ(presentational, 2);
  EXPECT_EQ(wrappers, 1);
}

TEST(ExtractStyleComponents, NothingToFind) {
  EXPECT_TRUE(extract_style_components(parse("<p>plain <a href=x>link</a></p>")).empty());
}

TEST(ExtractStyleComponents, MediaKeepsDimensions) {
  EXPECT_FALSE(is_presentational_attribute("img", "width"));
  EXPECT_TRUE(is_presentational_attribute("table", "width"));
  EXPECT_TRUE(is_presentational_attribute("td", "valign"));
  EXPECT_FALSE(is_presentational_attribute("p", "class"));
}

TEST(EquivalentStyle, Actions) {
  const auto& p = preset("default");
  EXPECT_EQ(equivalent_style({0, StyleKind::InlineStyleAttr, "style", "color:red", false}, p),
            StyleAction::Remove);
  EXPECT_EQ(equivalent_style({0, StyleKind::StyleElement, "", "", true}, p), StyleAction::Keep);
  EXPECT_EQ(equivalent_style({0, StyleKind::WrapperElement, "", "", false}, p),
            StyleAction::RemoveElementKeepChildren);
}

TEST(ApplyClearprint, WrapperTextPreservedVerbatim) {
  auto doc = parse("<p>before <font face=x>inside <b>bold</b></font> after <center>c</center>");
  auto before = html::text_content(doc);
  apply_clearprint(doc, preset("default"));
  EXPECT_TRUE(doc.elements_by_tag("font").empty());
  EXPECT_TRUE(doc.elements_by_tag("center").empty());
  EXPECT_EQ(html::text_content(doc), before);
  EXPECT_EQ(html::text_content(parse(html::serialize(doc))), before);
}

TEST(ApplyClearprint, StyledPagePostconditions) {
  auto doc = parse("<head><style>p{}</style><link rel=stylesheet href=a.css>"
                   "<script src=s.js></script></head><p style='color:red'>x</p>");
  StyleStats stats = apply_clearprint(doc, preset("default"));
  EXPECT_EQ(stats.styles_removed, 3);
  EXPECT_EQ(stats.scripts_removed, 1);
  auto violations = testing::output_violations(doc, "http://svc");
  EXPECT_TRUE(violations.empty()) << violations.front();
}

TEST(ApplyClearprint, TransformedPageIsUnchanged) {
  auto doc = parse("<p style=x><font>t</font><script>s()</script>");
  apply_clearprint(doc, preset("default"));
  std::string once = html::serialize(doc);
  auto again = parse(once);
  StyleStats stats = apply_clearprint(again, preset("default"));
  EXPECT_EQ(stats.styles_removed, 0);
  EXPECT_EQ(stats.scripts_removed, 0);
  EXPECT_TRUE(html::structurally_equal(parse(once), again));
  EXPECT_EQ(html::serialize(again), once);
}

TEST(ApplyClearprint, StyleTextIsNotContent) {
  auto doc = parse("<style>p{color:red}</style><p>kept</p>");
  apply_clearprint(doc, preset("default"));
  auto tokens = html::text_content(doc);
  EXPECT_EQ(tokens, (std::vector<std::string>{"kept"}));
  EXPECT_EQ(html::serialize(doc).find("p{color:red}"), std::string::npos);
}

TEST(ApplyClearprint, DuplicateMarkedSheetsCollapse) {
  auto doc = parse("<head><style data-clearlens=1>a</style><style data-clearlens=1>b</style>"
                   "<title>t</title></head>");
  apply_clearprint(doc, preset("yellow-on-black"));
  auto styles = doc.elements_by_tag("style");
  ASSERT_EQ(styles.size(), 1u);
  EXPECT_EQ(doc.children(doc.head()).back(), styles[0]);
}

TEST(RenderStylesheet, DefaultColors) {
  std::string sheet = render_stylesheet(preset("default"));
  EXPECT_NE(sheet.find("body {"), std::string::npos);
  EXPECT_NE(sheet.find("color: #000000"), std::string::npos);
  EXPECT_NE(sheet.find("background-color: #FFFFFF"), std::string::npos);
  EXPECT_NE(sheet.find("font-size: 16px"), std::string::npos);
  EXPECT_NE(sheet.find("text-decoration: underline"), std::string::npos);
}

TEST(RenderStylesheet, YellowOnBlack) {
  std::string sheet = render_stylesheet(preset("yellow-on-black"));
  EXPECT_NE(sheet.find("color: #FFFF00"), std::string::npos);
  EXPECT_NE(sheet.find("background-color: #000000"), std::string::npos);
}

}  // namespace
}  // namespace clearlens
