#include "clearlens/fetcher.hpp"

#include <chrono>
#include <optional>

#include <httplib.h>

#include "clearlens/charset.hpp"
#include "clearlens/error.hpp"
#include "clearlens/link_engine.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

using Clock = std::chrono::steady_clock;

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void set_timeouts(httplib::Client& client, std::chrono::microseconds remaining) {
  auto sec = static_cast<time_t>(remaining.count() / 1000000);
  auto usec = static_cast<time_t>(remaining.count() % 1000000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
}

FetchedPage get(const SourceUrl& url, const FetchOptions& opts, bool require_html) {
  opts.validate();
  const Clock::time_point start = Clock::now();
  const Clock::time_point deadline =
      start + std::chrono::microseconds(static_cast<std::int64_t>(opts.timeout_ms * 1000.0));

  FetchedPage page;
  page.requested_url = url;
  SourceUrl current = url;
  int redirects = 0;

  while (true) {
    auto remaining = std::chrono::duration_cast<std::chrono::microseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      throw Error(ErrorCode::Timeout, "timed out fetching " + url.to_string());
    }

    httplib::Client client(current.origin());
    set_timeouts(client, remaining);
    client.set_follow_location(false);
    client.set_url_encode(false);
    client.set_keep_alive(false);
    client.set_decompress(true);

    httplib::Headers headers = {
        {"User-Agent", opts.user_agent},
        {"Accept", "text/html,application/xhtml+xml;q=0.9,*/*;q=0.8"},
        {"Accept-Encoding", "gzip, deflate"},
    };

    int status = 0;
    std::string content_type;
    std::string location;
    std::string body;
    std::optional<Error> failure;

    auto on_response = [&](const httplib::Response& res) {
      status = res.status;
      content_type = res.get_header_value("Content-Type");
      location = res.get_header_value("Location");
      if (is_redirect(status) && !location.empty()) return false;
      if (status < 200 || status > 299) {
        failure = Error(ErrorCode::HttpError,
                        "HTTP " + std::to_string(status) + " from " + current.to_string(), status);
        return false;
      }
      if (require_html && !is_html_content_type(content_type)) {
        std::string shown = content_type.empty() ? "no content type" : content_type;
        failure = Error(ErrorCode::NotHtml, current.to_string() + " is not HTML (" + shown + ")");
        return false;
      }
      if (res.has_header("Content-Length") && !res.has_header("Content-Encoding")) {
        std::uint64_t length = res.get_header_value_u64("Content-Length");
        if (length > opts.max_body_bytes) {
          failure = Error(ErrorCode::BodyTooLarge,
                          current.to_string() + " declares " + std::to_string(length) + " bytes");
          return false;
        }
      }
      return true;
    };
    auto on_data = [&](const char* data, std::size_t size) {
      if (body.size() + size > opts.max_body_bytes) {
        failure = Error(ErrorCode::BodyTooLarge, current.to_string() + " exceeds " +
                                                     std::to_string(opts.max_body_bytes) +
                                                     " bytes");
        return false;
      }
      if (Clock::now() > deadline) {
        failure = Error(ErrorCode::Timeout, "timed out fetching " + url.to_string());
        return false;
      }
      body.append(data, size);
      return true;
    };

    httplib::Result result = client.Get(current.request_target(), headers, on_response, on_data);

    if (failure) throw *failure;
    if (is_redirect(status) && !location.empty()) {
      if (++redirects > opts.max_redirects) {
        throw Error(ErrorCode::TooManyRedirects,
                    "more than " + std::to_string(opts.max_redirects) + " redirects from " +
                        url.to_string());
      }
      current = resolve(current, location);
      continue;
    }
    if (!result) {
      if (result.error() == httplib::Error::ConnectionTimeout || Clock::now() >= deadline) {
        throw Error(ErrorCode::Timeout, "timed out fetching " + url.to_string());
      }
      throw Error(ErrorCode::ConnectionFailed,
                  "cannot fetch " + current.to_string() + ": " + httplib::to_string(result.error()));
    }

    page.final_url = current;
    page.status = status;
    page.content_type = content_type;
    page.body = std::move(body);
    if (require_html) page.charset = resolve_charset(page.content_type, page.body);
    page.fetch_duration_ms = elapsed_ms(start);
    return page;
  }
}

}  // namespace

void FetchOptions::validate() const {
  if (!(timeout_ms > 0.0)) throw Error(ErrorCode::InvalidConfig, "fetch timeout must be positive");
  if (max_redirects < 0) throw Error(ErrorCode::InvalidConfig, "max_redirects must be >= 0");
  if (max_body_bytes == 0) throw Error(ErrorCode::InvalidConfig, "max_body_bytes must be positive");
}

bool is_html_content_type(std::string_view content_type) {
  std::string_view media = content_type.substr(0, content_type.find(';'));
  media = detail::trim_html_space(media);
  return detail::iequals(media, "text/html") || detail::iequals(media, "application/xhtml+xml");
}

FetchedPage fetch(const SourceUrl& url, const FetchOptions& opts) { return get(url, opts, true); }

FetchedPage fetch_resource(const SourceUrl& url, const FetchOptions& opts) {
  return get(url, opts, false);
}

}  // namespace clearlens
