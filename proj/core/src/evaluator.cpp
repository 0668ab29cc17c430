#include "clearlens/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "clearlens/error.hpp"
#include "clearlens/style_engine.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

constexpr std::string_view kCsvHeader = "batch,url,nlt_ms,wlt_ms,conversion_rate";
constexpr std::string_view kModelNote =
    "# nlt_ms = page fetch + (stylesheets + scripts) x one measured subresource fetch; "
    "wlt_ms = page fetch + transform";

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line, int line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back().push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(ch);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::InvalidConfig, "CSV line " + std::to_string(line_no) + ": unclosed quote");
  }
  return fields;
}

double parse_number(std::string_view text, int line_no) {
  text = detail::trim_html_space(text);
  if (!text.empty() && text.back() == '%') text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || value < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "CSV line " + std::to_string(line_no) +
                                              ": invalid number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  return lines;
}

}  // namespace

std::string format_number(double value) { return detail::format_decimal(value, 3); }

double conversion_rate(const std::vector<std::string>& original,
                       const std::vector<std::string>& transformed) {
  if (original.empty()) return 100.0;
  std::unordered_map<std::string_view, int> available;
  for (const std::string& token : transformed) ++available[token];
  std::size_t common = 0;
  for (const std::string& token : original) {
    auto it = available.find(token);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return 100.0 * static_cast<double>(common) / static_cast<double>(original.size());
}

double conversion_rate(const html::Document& original, const html::Document& transformed) {
  return conversion_rate(html::text_content(original), html::text_content(transformed));
}

std::vector<SourceUrl> subresource_urls(const html::Document& doc, const SourceUrl& page_url) {
  SourceUrl base = document_base(doc, page_url);
  std::vector<SourceUrl> out;
  for (html::NodeId id : doc.descendants(doc.document_node())) {
    const std::string* ref = nullptr;
    if (is_external_stylesheet(doc, id)) {
      ref = doc.attribute(id, "href");
    } else if (doc.is_element(id, "script")) {
      ref = doc.attribute(id, "src");
    }
    if (ref == nullptr) continue;
    LinkClass kind = classify(*ref).kind;
    if (kind != LinkClass::Relative && kind != LinkClass::Absolute) continue;
    try {
      out.push_back(resolve(base, *ref));
    } catch (const Error&) {
    }
  }
  return out;
}

LoadTimes measure_load(const FetchedPage& page, const AccessiblePage& accessible,
                       const FetchOptions& opts) {
  html::Document original = html::parse_html(page.body, page.charset, page.final_url);
  std::vector<SourceUrl> resources = subresource_urls(original, page.final_url);
  LoadTimes times;
  times.subresources = static_cast<int>(resources.size());
  double per_resource = 0.0;
  if (!resources.empty()) {
    try {
      per_resource = fetch_resource(resources.front(), opts).fetch_duration_ms;
    } catch (const Error&) {
      per_resource = page.fetch_duration_ms;
    }
  }
  times.nlt_ms = page.fetch_duration_ms + per_resource * static_cast<double>(resources.size());
  times.wlt_ms = page.fetch_duration_ms + accessible.transform_duration_ms;
  return times;
}

LoadTimes measure_load(const SourceUrl& url, const TransformConfig& cfg) {
  FetchedPage page = fetch(url, cfg.fetch);
  AccessiblePage accessible = transform_fetched(page, cfg);
  return measure_load(page, accessible, cfg.fetch);
}

UrlEvaluation evaluate_url(const LabeledUrl& url, const TransformConfig& cfg) {
  FetchedPage page = fetch(parse_url(url.url), cfg.fetch);
  AccessiblePage accessible = transform_fetched(page, cfg);
  LoadTimes times = measure_load(page, accessible, cfg.fetch);

  html::Document original = html::parse_html(page.body, page.charset, page.final_url);
  html::Document transformed = html::parse_html(accessible.html, "utf-8", page.final_url);

  UrlEvaluation out;
  out.report = {url.label, url.url, times.nlt_ms, times.wlt_ms,
                conversion_rate(original, transformed)};
  out.stats = accessible.stats;
  return out;
}

BatchSummary summarize(std::vector<ConversionReport> rows) {
  BatchSummary summary;
  summary.rows = std::move(rows);
  if (summary.rows.empty()) return summary;
  for (const ConversionReport& row : summary.rows) {
    summary.mean_conversion_rate += row.conversion_rate;
    summary.mean_nlt_ms += row.nlt_ms;
    summary.mean_wlt_ms += row.wlt_ms;
  }
  auto n = static_cast<double>(summary.rows.size());
  summary.mean_conversion_rate /= n;
  summary.mean_nlt_ms /= n;
  summary.mean_wlt_ms /= n;
  return summary;
}

BatchSummary batch_evaluate(const std::vector<LabeledUrl>& urls, const TransformConfig& cfg,
                            int parallelism) {
  if (urls.empty()) throw Error(ErrorCode::InvalidConfig, "no URLs to evaluate");
  std::vector<std::optional<ConversionReport>> results(urls.size());
  std::vector<std::optional<std::string>> errors(urls.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < urls.size(); i = next++) {
      try {
        results[i] = evaluate_url(urls[i], cfg).report;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)),
                                                1, urls.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<ConversionReport> rows;
  std::vector<FailedUrl> failures;
  for (std::size_t i = 0; i < urls.size(); ++i) {
    if (results[i]) {
      rows.push_back(std::move(*results[i]));
    } else {
      failures.push_back({urls[i].label, urls[i].url, errors[i].value_or("unknown error")});
    }
  }
  if (rows.empty()) {
    std::string first = failures.front().url + ": " + failures.front().message;
    throw Error(ErrorCode::AllUrlsFailed,
                "all " + std::to_string(urls.size()) + " URLs failed; first: " + first);
  }
  BatchSummary summary = summarize(std::move(rows));
  summary.failures = std::move(failures);
  return summary;
}

std::vector<LabeledUrl> parse_manifest(std::string_view text) {
  std::vector<LabeledUrl> out;
  int line_no = 0;
  for (std::string_view line : lines_of(text)) {
    ++line_no;
    std::string_view trimmed = detail::trim_html_space(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::size_t comma = trimmed.find(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "manifest line " + std::to_string(line_no) + ": expected 'label,url'");
    }
    out.push_back({std::string(detail::trim_html_space(trimmed.substr(0, comma))),
                   std::string(detail::trim_html_space(trimmed.substr(comma + 1)))});
  }
  return out;
}

void write_csv(std::ostream& out, const BatchSummary& summary) {
  out << kModelNote << '\n' << kCsvHeader << '\n';
  for (const ConversionReport& row : summary.rows) {
    out << csv_field(row.batch_label) << ',' << csv_field(row.url) << ','
        << format_number(row.nlt_ms) << ',' << format_number(row.wlt_ms) << ','
        << format_number(row.conversion_rate) << '\n';
  }
  out << "summary,," << format_number(summary.mean_nlt_ms) << ','
      << format_number(summary.mean_wlt_ms) << ',' << format_number(summary.mean_conversion_rate)
      << '\n';
}

std::vector<ConversionReport> read_csv(std::string_view text) {
  std::vector<ConversionReport> rows;
  int line_no = 0;
  bool header_seen = false;
  for (std::string_view line : lines_of(text)) {
    ++line_no;
    if (detail::trim_html_space(line).empty() || line.front() == '#') continue;
    std::vector<std::string> fields = split_csv_line(line, line_no);
    if (!header_seen && detail::iequals(fields.front(), "batch")) {
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) {
      throw Error(ErrorCode::InvalidConfig,
                  "CSV line " + std::to_string(line_no) + ": expected 5 columns, got " +
                      std::to_string(fields.size()));
    }
    if (fields.front() == "summary") continue;
    ConversionReport row{fields[0], fields[1], parse_number(fields[2], line_no),
                         parse_number(fields[3], line_no), parse_number(fields[4], line_no)};
    if (row.conversion_rate > 100.0) {
      throw Error(ErrorCode::InvalidConfig,
                  "CSV line " + std::to_string(line_no) + ": conversion rate above 100");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::filesystem::path> write_plot_data(const BatchSummary& summary,
                                                   const std::filesystem::path& stem) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ConversionReport*>> groups;
  for (const ConversionReport& row : summary.rows) {
    auto [it, inserted] = groups.try_emplace(row.batch_label);
    if (inserted) order.push_back(row.batch_label);
    it->second.push_back(&row);
  }
  struct Series {
    std::string suffix;
    double ConversionReport::*field;
  };
  const Series series[] = {{"_nlt.tsv", &ConversionReport::nlt_ms},
                           {"_wlt.tsv", &ConversionReport::wlt_ms},
                           {"_conversion.tsv", &ConversionReport::conversion_rate}};
  std::vector<std::filesystem::path> written;
  for (const Series& s : series) {
    std::filesystem::path path = stem;
    path += s.suffix;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    for (const std::string& label : order) {
      double total = 0.0;
      for (const ConversionReport* row : groups[label]) total += row->*s.field;
      out << label << '\t' << format_number(total / static_cast<double>(groups[label].size()))
          << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace clearlens
