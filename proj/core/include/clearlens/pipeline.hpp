#pragma once

#include <string>

#include "clearlens/fetcher.hpp"
#include "clearlens/link_engine.hpp"
#include "clearlens/style_engine.hpp"

namespace clearlens {

struct TransformConfig {
  ClearPrintPreset preset;
  // Absolute http(s) URL without a trailing slash.
  std::string service_base;
  FetchOptions fetch;
  // Appended to every proxied link so navigation keeps the reader's settings.
  RenderParams render_params;

  // Throws Error{InvalidConfig}.
  void validate() const;
};

struct TransformStats {
  int styles_removed = 0;
  int scripts_removed = 0;
  int links_rewritten = 0;
};

struct AccessiblePage {
  SourceUrl source_url;
  std::string html;
  double transform_duration_ms = 0.0;
  TransformStats stats;
};

// "styles_removed=2; scripts_removed=1; links_rewritten=3"
std::string to_string(const TransformStats& stats);

// parse, style pass, link pass, serialize. Deterministic for equal inputs.
AccessiblePage transform_fetched(const FetchedPage& page, const TransformConfig& cfg);

// fetch then transform_fetched; source_url is the post-redirect URL.
AccessiblePage transform_url(const SourceUrl& url, const TransformConfig& cfg);

}  // namespace clearlens
