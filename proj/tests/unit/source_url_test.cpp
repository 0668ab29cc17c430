#include <gtest/gtest.h>

#include "clearlens/error.hpp"
#include "clearlens/source_url.hpp"

namespace clearlens {
namespace {

ErrorCode code_of(std::string_view raw) {
  try {
    parse_url(raw);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << raw;
  return ErrorCode::IoError;
}

TEST(ParseUrl, SplitsHttpsUrl) {
  SourceUrl url = parse_url("https://example.com/a?x=1");
  EXPECT_EQ(url.scheme, Scheme::Https);
  EXPECT_EQ(url.host, "example.com");
  EXPECT_EQ(url.port, 443);
  EXPECT_EQ(url.path, "/a");
  EXPECT_EQ(url.query, "x=1");
  EXPECT_FALSE(url.fragment);
}

TEST(ParseUrl, BareHostDefaultsToHttp) {
  SourceUrl url = parse_url("example.com");
  EXPECT_EQ(url.scheme, Scheme::Http);
  EXPECT_EQ(url.host, "example.com");
  EXPECT_EQ(url.path, "/");
  EXPECT_EQ(url.to_string(), "http://example.com/");
}

TEST(ParseUrl, BareHostWithPort) {
  SourceUrl url = parse_url("localhost:8080/x");
  EXPECT_EQ(url.host, "localhost");
  EXPECT_EQ(url.port, 8080);
  EXPECT_EQ(url.path, "/x");
}

TEST(ParseUrl, RejectsOtherSchemes) {
  EXPECT_EQ(code_of("javascript:alert(1)"), ErrorCode::UnsupportedScheme);
  EXPECT_EQ(code_of("file:///etc/passwd"), ErrorCode::UnsupportedScheme);
  EXPECT_EQ(code_of("ftp://e.com/"), ErrorCode::UnsupportedScheme);
}

TEST(ParseUrl, RejectsMalformedInput) {
  EXPECT_EQ(code_of(""), ErrorCode::MalformedUrl);
  EXPECT_EQ(code_of("http://"), ErrorCode::MalformedUrl);
  EXPECT_EQ(code_of("http://e.com:99999/"), ErrorCode::MalformedUrl);
}

TEST(ParseUrl, LowercasesHostAndKeepsExplicitPort) {
  SourceUrl url = parse_url("HTTP://Example.COM:8080/P");
  EXPECT_EQ(url.host, "example.com");
  EXPECT_EQ(url.origin(), "http://example.com:8080");
  EXPECT_EQ(url.path, "/P");
}

TEST(ParseUrl, EncodesUnsafeCharactersAndReparsesStably) {
  SourceUrl url = parse_url("http://e.com/a b?q=<x>#f g");
  EXPECT_EQ(url.path, "/a%20b");
  EXPECT_EQ(url.query, "q=%3Cx%3E");
  EXPECT_EQ(url.fragment, "f%20g");
  EXPECT_TRUE(parse_url(url.to_string()).same_parts(url));
}

TEST(ParseUrl, RequestTargetDropsFragment) {
  SourceUrl url = parse_url("http://e.com/p?a=1#top");
  EXPECT_EQ(url.request_target(), "/p?a=1");
  EXPECT_EQ(url.without_fragment(), "http://e.com/p?a=1");
}

TEST(PercentEncoding, ComponentEncodesReservedBytes) {
  EXPECT_EQ(percent_encode_component("a b&c=d/é"), "a%20b%26c%3Dd%2F%C3%A9");
  EXPECT_EQ(percent_encode_component("AZaz09-._~"), "AZaz09-._~");
}

TEST(PercentEncoding, DecodeKeepsMalformedEscapes) {
  EXPECT_EQ(percent_decode("%41%zz%4"), "A%zz%4");
  EXPECT_EQ(percent_decode("a+b"), "a+b");
}

TEST(QueryParameter, DecodesFormEncoding) {
  EXPECT_EQ(query_parameter("url=http%3A%2F%2Fe.com&x=a+b", "x"), "a b");
  EXPECT_EQ(query_parameter("url=http%3A%2F%2Fe.com&x=a+b", "url"), "http://e.com");
  EXPECT_FALSE(query_parameter("a=1", "b"));
}

TEST(SchemeOf, OnlyForSchemePrefix) {
  EXPECT_EQ(scheme_of("MailTo:x@y"), "mailto");
  EXPECT_EQ(scheme_of("/a:b"), "");
  EXPECT_EQ(scheme_of("1ab:c"), "");
}

}  // namespace
}  // namespace clearlens
