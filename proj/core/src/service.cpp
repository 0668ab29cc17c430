#include "clearlens/service.hpp"

#include <charconv>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>

#include <json.hpp>

#include "clearlens/error.hpp"
#include "clearlens/evaluator.hpp"
#include "clearlens/html.hpp"
#include "clearlens/pipeline.hpp"
#include "clearlens/presets.hpp"
#include "config_file.hpp"
#include "text_util.hpp"

namespace clearlens {
namespace {

using json = nlohmann::json;

constexpr const char* kHtmlType = "text/html; charset=utf-8";

std::string escape_html(std::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(ch);
    }
  }
  return out;
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedUrl:
    case ErrorCode::UnsupportedScheme:
    case ErrorCode::InvalidPreset:
    case ErrorCode::LoopDetected:
      return 400;
    case ErrorCode::Timeout:
      return 504;
    case ErrorCode::BodyTooLarge:
      return 413;
    default:
      return 502;
  }
}

std::string_view title_for(int status) {
  switch (status) {
    case 400:
      return "That address cannot be opened";
    case 413:
      return "That page is too large";
    case 504:
      return "That page took too long to answer";
    default:
      return "That page could not be fetched";
  }
}

std::string error_page(int status, std::string_view message, const ClearPrintPreset& preset) {
  html::Document doc = html::Document::blank(SourceUrl{});
  doc.set_attribute(doc.root(), "lang", "en");
  auto add = [&doc](html::NodeId parent, std::string tag, std::string text) {
    html::NodeId el = doc.create_element(std::move(tag));
    if (!text.empty()) doc.append_child(el, doc.create_text(std::move(text)));
    doc.append_child(parent, el);
    return el;
  };
  std::string title(title_for(status));
  add(doc.head(), "title", title);
  add(doc.body(), "h1", title);
  add(doc.body(), "p", std::string(message));
  html::NodeId back = add(doc.body(), "p", "");
  html::NodeId link = add(back, "a", "Try another address");
  doc.set_attribute(link, "href", "/");
  apply_clearprint(doc, preset);
  html::ensure_utf8_meta(doc);
  return html::serialize(doc);
}

std::string landing_page(const ServiceConfig& config, const ClearPrintPreset& preset) {
  std::string options;
  for (const ClearPrintPreset& p : config.presets) {
    options += "<option value=\"" + escape_html(p.name) + "\"";
    if (p.name == config.default_preset) options += " selected";
    options += ">" + escape_html(p.name) + "</option>";
  }
  std::string scales;
  for (std::string_view s : {"0.75", "1", "1.25", "1.5", "2"}) {
    double value = std::stod(std::string(s));
    scales += "<option value=\"" + std::string(s) + "\"";
    if (s == "1") scales += " selected";
    scales += ">" + detail::format_decimal(value * 100, 0) + "%</option>";
  }
  return "<!DOCTYPE html><html lang=\"en\"><head><meta charset=\"utf-8\">"
         "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">"
         "<title>clearlens</title><style data-clearlens=\"1\">" +
         render_stylesheet(preset) +
         "label { display: block; margin-top: 1em; font-weight: bold !important; }\n"
         "input, select, button { border: 2px solid " + preset.text_color +
         " !important; padding: 0.4em; }\n"
         "input { width: 100%; box-sizing: border-box; }\n"
         "</style></head><body><main><h1>clearlens</h1>"
         "<p>Type the address of a web page. It will be shown in large, high-contrast text and "
         "its links will open the same way.</p>"
         "<form action=\"/render\" method=\"get\">"
         "<label for=\"url\">Web address</label>"
         "<input id=\"url\" name=\"url\" type=\"text\" inputmode=\"url\" required "
         "placeholder=\"example.com\">"
         "<label for=\"preset\">Colours</label><select id=\"preset\" name=\"preset\">" +
         options +
         "</select><label for=\"scale\">Text size</label><select id=\"scale\" name=\"scale\">" +
         scales +
         "</select><p><button type=\"submit\">Open accessible page</button></p></form>"
         "</main></body></html>";
}

json preset_json(const ClearPrintPreset& p, bool is_default) {
  return {{"name", p.name},
          {"font_family_stack", p.font_family_stack},
          {"base_font_size", p.base_font_size},
          {"line_height", p.line_height},
          {"text_color", p.text_color},
          {"background_color", p.background_color},
          {"link_color", p.link_color},
          {"max_line_width", p.max_line_width},
          {"default", is_default}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct RenderRequest {
  SourceUrl target;
  TransformConfig cfg;
};

}  // namespace

ServiceConfig::ServiceConfig() : presets(shipped_presets()) {}

void ServiceConfig::validate() const {
  split_listen_address(listen_address);
  if (!public_base.empty()) {
    TransformConfig probe{shipped_presets().front(), public_base, fetch, {}};
    probe.validate();
  }
  fetch.validate();
  if (max_concurrent_transforms < 1) {
    throw Error(ErrorCode::InvalidConfig, "max_concurrent_transforms must be >= 1");
  }
  if (presets.empty()) throw Error(ErrorCode::InvalidConfig, "no presets configured");
  if (find_preset(presets, default_preset) == nullptr) {
    throw Error(ErrorCode::InvalidConfig, "default preset '" + default_preset + "' is not defined");
  }
}

std::pair<std::string, int> split_listen_address(std::string_view address) {
  std::size_t colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::InvalidConfig,
                "listen address '" + std::string(address) + "' must be host:port");
  }
  std::string host(address.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  std::string_view port_text = address.substr(colon + 1);
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "listen address '" + std::string(address) +
                                              "' has an invalid port");
  }
  return {host, port};
}

ServiceConfig parse_service_config(std::string_view text, const std::filesystem::path& base_dir) {
  ServiceConfig config;
  auto relative = [&base_dir](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  for (const detail::TomlTable& table : detail::parse_toml(text)) {
    if (table.name.empty()) {
      if (!table.entries.empty()) {
        throw Error(ErrorCode::InvalidConfig, "keys must sit inside [server] or [fetch]");
      }
    } else if (table.name == "server") {
      table.expect_keys({"listen", "public_base", "default_preset", "max_concurrent_transforms",
                         "assets_dir", "presets_file"});
      if (auto v = table.get_string("listen")) config.listen_address = *v;
      if (auto v = table.get_string("public_base")) config.public_base = *v;
      if (auto v = table.get_string("default_preset")) config.default_preset = *v;
      if (auto v = table.get_integer("max_concurrent_transforms")) {
        config.max_concurrent_transforms = static_cast<int>(*v);
      }
      if (auto v = table.get_string("assets_dir")) config.assets_dir = relative(*v);
      if (auto v = table.get_string("presets_file")) {
        config.presets = load_preset_catalog(relative(*v));
      }
    } else if (table.name == "fetch") {
      table.expect_keys({"timeout_ms", "max_redirects", "max_body_bytes", "user_agent"});
      if (auto v = table.get_number("timeout_ms")) config.fetch.timeout_ms = *v;
      if (auto v = table.get_integer("max_redirects")) config.fetch.max_redirects = static_cast<int>(*v);
      if (auto v = table.get_integer("max_body_bytes")) {
        if (*v <= 0) throw Error(ErrorCode::InvalidConfig, "max_body_bytes must be positive");
        config.fetch.max_body_bytes = static_cast<std::size_t>(*v);
      }
      if (auto v = table.get_string("user_agent")) config.fetch.user_agent = *v;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown config table [" + table.name + "]");
    }
  }
  return config;
}

void apply_environment(ServiceConfig& config, const EnvLookup& getenv) {
  if (const char* v = getenv("CLEARLENS_LISTEN"); v != nullptr && *v != '\0') {
    config.listen_address = v;
  }
  if (const char* v = getenv("CLEARLENS_PUBLIC_BASE"); v != nullptr && *v != '\0') {
    config.public_base = v;
  }
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path,
                                  const EnvLookup& getenv) {
  ServiceConfig config;
  if (path) config = parse_service_config(read_file(*path), path->parent_path());
  apply_environment(config, getenv);
  config.validate();
  return config;
}

struct Service::Impl {
  explicit Impl(ServiceConfig c)
      : config(std::move(c)),
        limiter(config.max_concurrent_transforms),
        default_preset(*find_preset(config.presets, config.default_preset)) {}

  ServiceConfig config;
  httplib::Server server;
  std::counting_semaphore<4096> limiter;
  ClearPrintPreset default_preset;
  std::string public_base;
  std::string host;
  int port = -1;
  std::thread thread;

  void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(error_page(status, message, default_preset), kHtmlType);
  }

  void send_json_error(httplib::Response& res, int status, ErrorCode code,
                       const std::string& message) {
    res.status = status;
    json body = {{"error", std::string(to_string(code))}, {"message", message}};
    res.set_content(body.dump(), "application/json");
  }

  bool is_own_origin(const SourceUrl& target) const {
    try {
      if (parse_url(public_base).origin() == target.origin()) return true;
    } catch (const Error&) {
    }
    bool loopback_listen = host == "0.0.0.0" || host == "::" || host == "127.0.0.1" ||
                           host == "localhost" || host == "::1";
    bool loopback_target = target.host == "127.0.0.1" || target.host == "localhost" ||
                           target.host == "[::1]" || target.host == host;
    return loopback_listen && loopback_target && target.port == port;
  }

  // Throws Error with MalformedUrl, UnsupportedScheme, LoopDetected or
  // InvalidPreset.
  RenderRequest prepare(const httplib::Request& req) {
    std::string raw = req.get_param_value("url");
    if (detail::trim_html_space(raw).empty()) {
      throw Error(ErrorCode::MalformedUrl, "Add a web address, for example example.com.");
    }
    RenderRequest out;
    out.target = parse_url(raw);
    if (is_own_origin(out.target)) {
      throw Error(ErrorCode::LoopDetected, "clearlens does not open its own pages.");
    }
    ClearPrintPreset preset = default_preset;
    if (req.has_param("preset") && !req.get_param_value("preset").empty()) {
      std::string name = req.get_param_value("preset");
      const ClearPrintPreset* found = find_preset(config.presets, name);
      if (found == nullptr) throw Error(ErrorCode::InvalidPreset, "Unknown colour preset '" + name + "'.");
      preset = *found;
      out.cfg.render_params.emplace_back("preset", name);
    }
    if (req.has_param("scale") && !req.get_param_value("scale").empty()) {
      std::string text = req.get_param_value("scale");
      double scale = 1.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), scale);
      if (ec == std::errc{} && ptr == text.data() + text.size()) {
        scale = clamp_scale(scale);
        preset = scaled(preset, scale);
        out.cfg.render_params.emplace_back("scale", detail::format_decimal(scale, 3));
      }
    }
    out.cfg.preset = std::move(preset);
    out.cfg.service_base = public_base;
    out.cfg.fetch = config.fetch;
    return out;
  }

  void handle_render(const httplib::Request& req, httplib::Response& res) {
    try {
      RenderRequest request = prepare(req);
      limiter.acquire();
      struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
      } release{limiter};
      AccessiblePage page = transform_url(request.target, request.cfg);
      res.status = 200;
      res.set_header("X-Clearlens-Stats", to_string(page.stats));
      res.set_header("X-Clearlens-Source", page.source_url.to_string());
      res.set_content(page.html, kHtmlType);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 502, e.what());
    }
  }

  void handle_report(const httplib::Request& req, httplib::Response& res) {
    try {
      RenderRequest request = prepare(req);
      limiter.acquire();
      struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
      } release{limiter};
      UrlEvaluation eval = evaluate_url({"api", request.target.to_string()}, request.cfg);
      json body = {{"url", eval.report.url},
                   {"nlt_ms", eval.report.nlt_ms},
                   {"wlt_ms", eval.report.wlt_ms},
                   {"conversion_rate", eval.report.conversion_rate},
                   {"stats",
                    {{"styles_removed", eval.stats.styles_removed},
                     {"scripts_removed", eval.stats.scripts_removed},
                     {"links_rewritten", eval.stats.links_rewritten}}}};
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      send_json_error(res, status_for(e.code()), e.code(), e.what());
    } catch (const std::exception& e) {
      send_json_error(res, 502, ErrorCode::ConnectionFailed, e.what());
    }
  }

  void routes() {
    int workers = config.max_concurrent_transforms + 8;
    server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

    server.Get("/", [this](const httplib::Request&, httplib::Response& res) {
      std::filesystem::path index = config.assets_dir / "index.html";
      if (!config.assets_dir.empty() && std::filesystem::is_regular_file(index)) {
        res.set_content(read_file(index), kHtmlType);
      } else {
        res.set_content(landing_page(config, default_preset), kHtmlType);
      }
    });
    server.Get("/render", [this](const httplib::Request& req, httplib::Response& res) {
      handle_render(req, res);
    });
    server.Get("/api/report", [this](const httplib::Request& req, httplib::Response& res) {
      handle_report(req, res);
    });
    server.Get("/api/presets", [this](const httplib::Request&, httplib::Response& res) {
      json list = json::array();
      for (const ClearPrintPreset& p : config.presets) {
        list.push_back(preset_json(p, p.name == config.default_preset));
      }
      res.set_content(list.dump(), "application/json");
    });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    if (!config.assets_dir.empty() && std::filesystem::is_directory(config.assets_dir)) {
      server.set_mount_point("/assets", config.assets_dir.string());
    }
    server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
      if (res.status == 404 && res.body.empty()) {
        res.set_content(error_page(404, "There is no page at this address.", default_preset),
                        kHtmlType);
      }
    });
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  impl_->config.validate();
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  if (impl_->port >= 0) return impl_->port;
  auto [host, port] = split_listen_address(impl_->config.listen_address);
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::IoError, "cannot listen on " + impl_->config.listen_address);
  }
  impl_->host = host;
  impl_->port = bound;
  if (impl_->config.public_base.empty()) {
    std::string shown = host == "0.0.0.0" || host == "::" ? std::string("127.0.0.1") : host;
    if (shown.find(':') != std::string::npos) shown = "[" + shown + "]";
    impl_->public_base = "http://" + shown + ":" + std::to_string(bound);
  } else {
    impl_->public_base = impl_->config.public_base;
  }
  return bound;
}

void Service::run() {
  bind();
  impl_->server.listen_after_bind();
}

int Service::start() {
  int bound = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::port() const { return impl_->port; }

const std::string& Service::public_base() const { return impl_->public_base; }

}  // namespace clearlens
