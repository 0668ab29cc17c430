#include "fixture_origin.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "fixture_pages.hpp"

namespace clearlens::testing {

struct FixtureOrigin::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::chrono::milliseconds latency;
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  std::map<std::string, std::pair<std::string, std::string>> custom;

  void routes() {
    server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
      if (latency.count() > 0) std::this_thread::sleep_for(latency);
      return httplib::Server::HandlerResponse::Unhandled;
    });
    server.Get(R"(/page/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      int n = std::stoi(req.matches[1]);
      if (n >= kFixturePageCount) {
        res.status = 404;
        return;
      }
      res.set_content(fixture_page(n), fixture_page_content_type(n));
    });
    server.Get(R"(/css/(.+))", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(fixture_stylesheet(req.matches[1]), "text/css");
    });
    server.Get(R"(/js/(.+))", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(fixture_script(req.matches[1]), "application/javascript");
    });
    server.Get("/hi", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<p>hi</p>", "text/html");
    });
    server.Get("/moved", [](const httplib::Request&, httplib::Response& res) {
      res.status = 301;
      res.set_header("Location", "/b");
    });
    server.Get("/b", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<p>landed on b</p>", "text/html; charset=utf-8");
    });
    server.Get(R"(/redirect/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      int n = std::stoi(req.matches[1]);
      if (n > 0) {
        res.status = 302;
        res.set_header("Location", "/redirect/" + std::to_string(n - 1));
        return;
      }
      res.set_content("<p>end of chain <a href=\"sibling\">sibling</a> "
                      "<a href=\"../up\">up</a></p>",
                      "text/html");
    });
    server.Get("/loop", [](const httplib::Request&, httplib::Response& res) {
      res.status = 302;
      res.set_header("Location", "/loop");
    });
    server.Get("/stall", [this](const httplib::Request&, httplib::Response& res) {
      for (int i = 0; i < 1000 && !stopping; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      res.set_content("<p>too late</p>", "text/html");
    });
    server.Get("/image.png", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string("\x89PNG\r\n\x1a\n", 8), "image/png");
    });
    server.Get("/big", [](const httplib::Request&, httplib::Response& res) {
      std::string body = "<p>";
      body.append(2 * 1024 * 1024, 'x');
      body += "</p>";
      res.set_content(body, "text/html");
    });
    server.Get(R"(/status/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      res.status = std::stoi(req.matches[1]);
      res.set_content("<p>status page</p>", "text/html");
    });
    server.Get("/latin1", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<p>caf\xE9 \x80</p>", "text/html; charset=ISO-8859-1");
    });
    server.Get("/scripts2", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html><head><script>a()</script></head><body><p>two scripts</p>"
                      "<script src=\"/js/x.js\"></script></body></html>",
                      "text/html");
    });
    server.Get(R"(/custom/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      auto it = custom.find(req.matches[1]);
      if (it == custom.end()) {
        res.status = 404;
        return;
      }
      res.set_content(it->second.second, it->second.first);
    });
  }
};

FixtureOrigin::FixtureOrigin(std::chrono::milliseconds latency) : impl_(std::make_unique<Impl>()) {
  impl_->latency = latency;
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(32); };
  impl_->routes();
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw std::runtime_error("fixture origin cannot bind");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

FixtureOrigin::~FixtureOrigin() {
  impl_->stopping = true;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string FixtureOrigin::base() const { return "http://127.0.0.1:" + std::to_string(port()); }

int FixtureOrigin::port() const { return impl_->port; }

void FixtureOrigin::add(const std::string& name, const std::string& content_type,
                        const std::string& body) {
  std::lock_guard lock(impl_->mutex);
  impl_->custom[name] = {content_type, body};
}

}  // namespace clearlens::testing
