#include "clearlens/pipeline.hpp"

#include <chrono>

#include "clearlens/error.hpp"
#include "clearlens/html.hpp"

namespace clearlens {

void TransformConfig::validate() const {
  validate_preset(preset);
  fetch.validate();
  if (service_base.empty() || service_base.back() == '/') {
    throw Error(ErrorCode::InvalidConfig,
                "service base '" + service_base + "' must be an absolute URL without a trailing slash");
  }
  SourceUrl parsed;
  try {
    parsed = parse_url(service_base);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, "service base: " + std::string(e.what()));
  }
  if (scheme_of(service_base).empty() || parsed.query || parsed.fragment) {
    throw Error(ErrorCode::InvalidConfig,
                "service base '" + service_base + "' must be scheme://host[:port][/path]");
  }
}

std::string to_string(const TransformStats& stats) {
  return "styles_removed=" + std::to_string(stats.styles_removed) +
         "; scripts_removed=" + std::to_string(stats.scripts_removed) +
         "; links_rewritten=" + std::to_string(stats.links_rewritten);
}

AccessiblePage transform_fetched(const FetchedPage& page, const TransformConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  html::Document doc = html::parse_html(page.body, page.charset, page.final_url);
  StyleStats styles = apply_clearprint(doc, cfg.preset);
  LinkStats links = rewrite_links(doc, page.final_url, cfg.service_base, cfg.render_params);
  html::ensure_utf8_meta(doc);

  AccessiblePage out;
  out.source_url = page.final_url;
  out.html = html::serialize(doc);
  out.stats = {styles.styles_removed, styles.scripts_removed, links.links_rewritten};
  out.transform_duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

AccessiblePage transform_url(const SourceUrl& url, const TransformConfig& cfg) {
  return transform_fetched(fetch(url, cfg.fetch), cfg);
}

}  // namespace clearlens
