#pragma once

#include <string>

#include "clearlens/source_url.hpp"

namespace clearlens {

struct FetchOptions {
  double timeout_ms = 15000.0;
  int max_redirects = 10;
  std::size_t max_body_bytes = 8 * 1024 * 1024;
  std::string user_agent = "clearlens/1.0";

  // Throws Error{InvalidConfig}.
  void validate() const;
};

struct FetchedPage {
  SourceUrl requested_url;
  SourceUrl final_url;
  int status = 0;
  std::string content_type;
  // Canonical name accepted by parse_html.
  std::string charset;
  std::string body;
  double fetch_duration_ms = 0.0;
};

bool is_html_content_type(std::string_view content_type);

// GET with manual redirect following. Stateless: no cookies are stored or
// sent. The whole call, redirects included, is bounded by opts.timeout_ms.
// Throws Error with Timeout, TooManyRedirects, HttpError, NotHtml,
// BodyTooLarge, ConnectionFailed or UnsupportedScheme (redirect target).
FetchedPage fetch(const SourceUrl& url, const FetchOptions& opts);

// Same transport without the HTML content-type check; charset is left empty.
// Used to time subresources.
FetchedPage fetch_resource(const SourceUrl& url, const FetchOptions& opts);

}  // namespace clearlens
