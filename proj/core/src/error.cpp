#include "clearlens/error.hpp"

namespace clearlens {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::UnsupportedScheme: return "UnsupportedScheme";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TooManyRedirects: return "TooManyRedirects";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::NotHtml: return "NotHtml";
    case ErrorCode::BodyTooLarge: return "BodyTooLarge";
    case ErrorCode::ConnectionFailed: return "ConnectionFailed";
    case ErrorCode::UnsupportedCharset: return "UnsupportedCharset";
    case ErrorCode::MalformedColor: return "MalformedColor";
    case ErrorCode::InvalidPreset: return "InvalidPreset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::AllUrlsFailed: return "AllUrlsFailed";
    case ErrorCode::LoopDetected: return "LoopDetected";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace clearlens
