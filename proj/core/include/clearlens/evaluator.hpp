#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "clearlens/html.hpp"
#include "clearlens/pipeline.hpp"

namespace clearlens {

struct ConversionReport {
  std::string batch_label;
  std::string url;
  double nlt_ms = 0.0;
  double wlt_ms = 0.0;
  double conversion_rate = 0.0;
};

struct FailedUrl {
  std::string batch_label;
  std::string url;
  std::string message;
};

struct BatchSummary {
  std::vector<ConversionReport> rows;
  std::vector<FailedUrl> failures;
  double mean_conversion_rate = 0.0;
  double mean_nlt_ms = 0.0;
  double mean_wlt_ms = 0.0;
};

struct LabeledUrl {
  std::string label;
  std::string url;
};

// 100 * |tokens(original) ∩ tokens(transformed)| / |tokens(original)| with
// multiset intersection; 100 when the original has no tokens.
double conversion_rate(const html::Document& original, const html::Document& transformed);
double conversion_rate(const std::vector<std::string>& original,
                       const std::vector<std::string>& transformed);

struct LoadTimes {
  double nlt_ms = 0.0;
  double wlt_ms = 0.0;
  int subresources = 0;
};

// Stylesheet links and external scripts of a parsed page, resolved against
// the document base. Unresolvable references are skipped.
std::vector<SourceUrl> subresource_urls(const html::Document& doc, const SourceUrl& page_url);

// nlt = page fetch + subresource count x one measured subresource fetch;
// wlt = page fetch + transform.
LoadTimes measure_load(const FetchedPage& page, const AccessiblePage& accessible,
                       const FetchOptions& opts);
LoadTimes measure_load(const SourceUrl& url, const TransformConfig& cfg);

struct UrlEvaluation {
  ConversionReport report;
  TransformStats stats;
};

// One fetch, one transform, timings and conversion rate for a single URL.
UrlEvaluation evaluate_url(const LabeledUrl& url, const TransformConfig& cfg);

// Arithmetic means of `rows`; zero for an empty list.
BatchSummary summarize(std::vector<ConversionReport> rows);

// Evaluates up to `parallelism` URLs at a time. Rows follow input order and
// failing URLs are collected in `failures`. Throws Error{AllUrlsFailed} when
// nothing succeeds and Error{InvalidConfig} for an empty list.
BatchSummary batch_evaluate(const std::vector<LabeledUrl>& urls, const TransformConfig& cfg,
                            int parallelism = 4);

// "label,url" per line; blank lines and lines starting with '#' are skipped.
// Throws Error{InvalidConfig} on a line without a comma.
std::vector<LabeledUrl> parse_manifest(std::string_view text);

// Comment line describing the load-time model, header
// "batch,url,nlt_ms,wlt_ms,conversion_rate", one line per row and a final
// "summary" line with the means.
void write_csv(std::ostream& out, const BatchSummary& summary);

// Reads rows written by write_csv or hand-made tables with the same
// columns. Comment lines and summary lines are skipped. Throws
// Error{InvalidConfig}.
std::vector<ConversionReport> read_csv(std::string_view text);

// Figure data as two-column TSV files (label, value) keyed by batch label,
// values being per-label means: <stem>_nlt.tsv, <stem>_wlt.tsv and
// <stem>_conversion.tsv. Returns the written paths.
std::vector<std::filesystem::path> write_plot_data(const BatchSummary& summary,
                                                   const std::filesystem::path& stem);

// Numbers as reported: at most three decimals, trailing zeros trimmed.
std::string format_number(double value);

}  // namespace clearlens
