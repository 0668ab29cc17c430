#pragma once

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clearlens/fetcher.hpp"
#include "clearlens/style_engine.hpp"

namespace clearlens {

struct ServiceConfig {
  std::string listen_address = "127.0.0.1:8080";
  // External URL used as service_base when rewriting links. Empty means
  // "http://" + the bound address.
  std::string public_base;
  std::string default_preset = "default";
  FetchOptions fetch;
  int max_concurrent_transforms = 8;
  std::vector<ClearPrintPreset> presets;
  // Static web_ui bundle served under /assets/; index.html there replaces
  // the built-in landing page. Empty disables both.
  std::filesystem::path assets_dir;

  ServiceConfig();

  // Throws Error{InvalidConfig}.
  void validate() const;
};

// [server] listen, public_base, default_preset, max_concurrent_transforms,
// assets_dir, presets_file; [fetch] timeout_ms, max_redirects,
// max_body_bytes, user_agent. Relative paths are taken from `base_dir`.
ServiceConfig parse_service_config(std::string_view text, const std::filesystem::path& base_dir = {});

using EnvLookup = std::function<const char*(const char*)>;

// CLEARLENS_LISTEN and CLEARLENS_PUBLIC_BASE override the file values.
void apply_environment(ServiceConfig& config, const EnvLookup& getenv = &std::getenv);

// Defaults, then the file when given, then the environment.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path,
                                  const EnvLookup& getenv = &std::getenv);

// {host, port} of "host:port" or "[v6]:port". Throws Error{InvalidConfig}.
std::pair<std::string, int> split_listen_address(std::string_view address);

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listen address; port 0 picks a free port. Returns the port.
  int bind();
  // Serves until stop(). Binds first if needed.
  void run();
  // bind() and run() on a background thread.
  int start();
  void stop();

  int port() const;
  const std::string& public_base() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clearlens
