#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clearlens {

enum class ErrorCode {
  MalformedUrl,
  UnsupportedScheme,
  Timeout,
  TooManyRedirects,
  HttpError,
  NotHtml,
  BodyTooLarge,
  ConnectionFailed,
  UnsupportedCharset,
  MalformedColor,
  InvalidPreset,
  InvalidConfig,
  AllUrlsFailed,
  LoopDetected,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library. `http_status` carries the upstream
// status for HttpError and is 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int http_status = 0)
      : std::runtime_error(message), code_(code), http_status_(http_status) {}

  ErrorCode code() const noexcept { return code_; }
  int http_status() const noexcept { return http_status_; }

 private:
  ErrorCode code_;
  int http_status_;
};

}  // namespace clearlens
