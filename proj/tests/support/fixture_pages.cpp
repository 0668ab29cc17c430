#include "fixture_pages.hpp"

namespace clearlens::testing {
namespace {

std::string doctype_for(int n) {
  switch (n % 3) {
    case 0:
      return "";
    case 1:
      return "<!DOCTYPE html>\n";
    default:
      return "<!DOCTYPE HTML PUBLIC \"-//W3C//DTD HTML 4.01 Transitional//EN\" "
             "\"http://www.w3.org/TR/html4/loose.dtd\">\n";
  }
}

}  // namespace

std::string fixture_page_content_type(int n) {
  return n == 7 ? "text/html; charset=windows-1252" : "text/html; charset=utf-8";
}

std::string fixture_page(int n) {
  const std::string id = std::to_string(n);
  const std::string next = std::to_string((n + 1) % kFixturePageCount);
  std::string page = doctype_for(n);
  page += "<html><head>\n";
  if (n != 7) page += "<meta http-equiv=\"Content-Type\" content=\"text/html; charset=utf-8\">\n";
  page += "<title>Fixture page " + id + "</title>\n";
  if (n % 4 == 0) page += "<base href=\"/page/\">\n";
  page += "<link rel=\"stylesheet\" href=\"/css/site-" + id + "-a.css\">\n";
  page += "<link rel=\"alternate stylesheet\" type=\"text/css\" href=\"../css/site-" + id +
          "-b.css\" title=\"wide\">\n";
  page += "<link rel=\"icon\" href=\"/favicon.ico\">\n";
  page += "<style type=\"text/css\">body { font-family: Times; } .note { color: #777 }</style>\n";
  page += "<script src=\"/js/app-" + id + ".js\"></script>\n";
  page += "<script>document.title = 'changed <b>not text</b>';</script>\n";
  page += "</head>\n";
  page += "<body bgcolor=\"#EEEEEE\" text=\"#333333\" link=\"#999999\" vlink=\"#AAAAAA\">\n";
  page += "<center><h1 style=\"color: gray; font-style: italic\">Heading number " + id +
          "</h1></center>\n";
  page += "<table border=\"1\" cellpadding=\"3\" cellspacing=\"0\" width=\"80%\">"
          "<tr><td valign=\"top\" bgcolor=\"#FFFFCC\"><font face=\"Arial\" size=\"2\" "
          "color=\"#888888\">Cell text " + id + " &amp; more</font><td align=\"right\">Second "
          "cell</table>\n";
  page += "<p align=\"justify\" class=\"note\">Paragraph for page " + id +
          " with <a href=\"" + next + "\">next page</a>, <a href=\"/page/0\">home</a>, "
          "<a href=\"http://other.example/abs?x=1&amp;y=2\">absolute</a>, "
          "<a href=\"//cdn.example/p\">protocol relative</a>, "
          "<a href=\"#section\">fragment</a>, <a href=\"mailto:someone@example.com\">mail</a>, "
          "<a href=\"tel:+15550100\">phone</a>, <a href=\"javascript:alert(1)\">script link</a>, "
          "<a href=\"data:text/html,hi\">data link</a> and <a name=\"anchor\">a named anchor</a>.\n";
  page += "<img src=\"img/photo-" + id + ".png\" srcset=\"img/p1.png 1x, img/p2.png 2x\" "
          "width=\"320\" height=\"200\" alt=\"photo " + id + "\">\n";
  if (n == 7) {
    page += "<p>Caf\xE9 na\xEFve r\xE9sum\xE9 \x93quoted\x94\n";
  } else {
    page += "<p>Caf\xC3\xA9 na\xC3\xAFve r\xC3\xA9sum\xC3\xA9 \xE6\x9D\xB1\xE4\xBA\xAC "
            "\xE2\x80\x9Cquoted\xE2\x80\x9D\n";
  }
  page += "<ul><li>One<li>Two <b>bold <i>both</b> italic</i></ul>\n";
  page += "<marquee behavior=\"scroll\">moving text " + id + "</marquee> <blink>blinking</blink> "
          "<big>big words</big> <small>small print</small>\n";
  page += "<div style=\"display:none\" id=\"section\">hidden div text</div>\n";
  page += "<noscript>Please enable JavaScript</noscript>\n";
  if (n % 2 == 1) {
    page += "<form action=\"/search\" method=\"get\"><input name=\"q\" size=\"30\">"
            "<input type=\"submit\" value=\"Search\"></form>\n";
  }
  if (n % 5 == 0) {
    page += "<div><p>unclosed paragraph <span>and span\n<table><tr><td>stray "
            "cell</table></div>\n";
  }
  page += "<p>Last paragraph of page " + id + ".</p>\n";
  page += "<script type=\"text/javascript\">var tracker = 'x';</script>\n";
  page += "</body></html>\n";
  return page;
}

std::string fixture_stylesheet(const std::string& name) {
  return "/* " + name + " */\nbody { background: url(bg.png); color: #444; }\np { font-size: 11px; }\n";
}

std::string fixture_script(const std::string& name) {
  return "// " + name + "\nwindow.onload = function () { document.body.style.color = 'red'; };\n";
}

}  // namespace clearlens::testing
