#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clearlens/error.hpp"
#include "clearlens/evaluator.hpp"

namespace clearlens {
namespace {

const std::vector<double> kPublishedConversion = {79, 63, 86, 84, 96, 85, 86, 78, 81, 79};

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(CLEARLENS_TEST_DATA_DIR) + "/" + name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TEST(ConversionRate, IdenticalDocuments) {
  auto doc = html::parse_html("<p>a b c</p>", "utf-8", parse_url("http://e.com/"));
  EXPECT_EQ(conversion_rate(doc, doc), 100.0);
}

TEST(ConversionRate, MultisetIntersection) {
  EXPECT_EQ(conversion_rate({"a", "b", "c", "d"}, {"a", "b", "c"}), 75.0);
  EXPECT_EQ(conversion_rate({"a", "a", "b", "b"}, {"a", "b", "b", "b", "z"}), 75.0);
  EXPECT_EQ(conversion_rate({}, {"x"}), 100.0);
  EXPECT_EQ(conversion_rate({"x"}, {}), 0.0);
}

TEST(Summarize, PublishedConversionColumn) {
  std::vector<ConversionReport> rows;
  for (std::size_t i = 0; i < kPublishedConversion.size(); ++i) {
    rows.push_back({"B" + std::to_string(i + 1), "", 0, 0, kPublishedConversion[i]});
  }
  BatchSummary summary = summarize(rows);
  EXPECT_NEAR(summary.mean_conversion_rate, 81.7, 1e-9);
  EXPECT_EQ(format_number(summary.mean_conversion_rate), "81.7");
  EXPECT_EQ(static_cast<int>(std::lround(summary.mean_conversion_rate)), 82);
}

TEST(Summarize, SingleRowAndEmpty) {
  BatchSummary one = summarize({{"B1", "u", 3.5, 1.25, 90}});
  EXPECT_EQ(one.mean_nlt_ms, 3.5);
  EXPECT_EQ(one.mean_wlt_ms, 1.25);
  EXPECT_EQ(one.mean_conversion_rate, 90.0);
  BatchSummary none = summarize({});
  EXPECT_EQ(none.mean_conversion_rate, 0.0);
}

TEST(Csv, ReplaysPublishedBatches) {
  auto rows = read_csv(read_data("published_batches.csv"));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[4].batch_label, "B5");
  EXPECT_EQ(rows[4].nlt_ms, 15880.0);
  BatchSummary summary = summarize(rows);
  EXPECT_EQ(format_number(summary.mean_conversion_rate), "81.7");
  EXPECT_EQ(format_number(summary.mean_nlt_ms), "10289");
  EXPECT_EQ(format_number(summary.mean_wlt_ms), "5146");
}

TEST(Csv, WriteThenRead) {
  BatchSummary summary = summarize({{"B1", "http://e.com/a,b", 12.5, 3.25, 100},
                                    {"B2", "http://e.com/\"q\"", 7, 2, 50}});
  std::ostringstream out;
  write_csv(out, summary);
  const std::string text = out.str();
  EXPECT_EQ(text.front(), '#');
  EXPECT_NE(text.find("batch,url,nlt_ms,wlt_ms,conversion_rate\n"), std::string::npos);
  EXPECT_NE(text.find("summary,,9.75,2.625,75\n"), std::string::npos);
  auto rows = read_csv(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].url, "http://e.com/a,b");
  EXPECT_EQ(rows[1].url, "http://e.com/\"q\"");
  EXPECT_EQ(rows[0].wlt_ms, 3.25);
}

TEST(Csv, RejectsMalformedRows) {
  EXPECT_THROW(read_csv("B1,u,1,2\n"), Error);
  EXPECT_THROW(read_csv("B1,u,x,2,3\n"), Error);
}

TEST(Manifest, Parses) {
  auto urls = parse_manifest("# corpus\n\nB1,http://e.com/a\n B2 , http://e.com/b?x=1,2 \n");
  ASSERT_EQ(urls.size(), 2u);
  EXPECT_EQ(urls[1].label, "B2");
  EXPECT_EQ(urls[1].url, "http://e.com/b?x=1,2");
  EXPECT_THROW(parse_manifest("no comma here\n"), Error);
  EXPECT_TRUE(parse_manifest("\n# only comments\n").empty());
}

TEST(BatchEvaluate, EmptyListIsInvalid) {
  try {
    batch_evaluate({}, TransformConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(PlotData, PerLabelMeans) {
  BatchSummary summary = summarize({{"B1", "a", 10, 4, 100}, {"B1", "b", 20, 6, 80},
                                    {"B2", "c", 5, 1, 90}});
  auto stem = std::filesystem::temp_directory_path() / "clearlens_plot_test";
  auto paths = write_plot_data(summary, stem);
  ASSERT_EQ(paths.size(), 3u);
  std::ifstream nlt(paths[0]);
  std::stringstream buffer;
  buffer << nlt.rdbuf();
  EXPECT_NE(buffer.str().find("B1\t15"), std::string::npos);
  EXPECT_NE(buffer.str().find("B2\t5"), std::string::npos);
  for (const auto& p : paths) std::filesystem::remove(p);
}

TEST(FormatNumber, TrimsZeros) {
  EXPECT_EQ(format_number(100.0), "100");
  EXPECT_EQ(format_number(2.5), "2.5");
  EXPECT_EQ(format_number(1.23456), "1.235");
  EXPECT_EQ(format_number(-0.0001), "0");
}

TEST(SubresourceUrls, StylesheetsAndScripts) {
  auto doc = html::parse_html("<head><base href='/b/'><link rel=stylesheet href=a.css>"
                              "<link rel=icon href=i.ico><script src=s.js></script>"
                              "<script>inline()</script></head>",
                              "utf-8", parse_url("http://e.com/p"));
  auto urls = subresource_urls(doc, parse_url("http://e.com/p"));
  ASSERT_EQ(urls.size(), 2u);
  EXPECT_EQ(urls[0].to_string(), "http://e.com/b/a.css");
  EXPECT_EQ(urls[1].to_string(), "http://e.com/b/s.js");
}

}  // namespace
}  // namespace clearlens
