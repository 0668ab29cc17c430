#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "clearlens/error.hpp"
#include "clearlens/service.hpp"

namespace clearlens {
namespace {

TEST(ServiceConfig, Defaults) {
  ServiceConfig config;
  EXPECT_EQ(config.listen_address, "127.0.0.1:8080");
  EXPECT_EQ(config.default_preset, "default");
  EXPECT_EQ(config.presets.size(), 3u);
  EXPECT_NO_THROW(config.validate());
}

TEST(ServiceConfig, ParsesTables) {
  ServiceConfig config = parse_service_config(R"(
[server]
listen = "0.0.0.0:9000"
public_base = "https://clearlens.example"
default_preset = "yellow-on-black"
max_concurrent_transforms = 3
assets_dir = "web"

[fetch]
timeout_ms = 2500
max_redirects = 4
max_body_bytes = 1048576
user_agent = "test-agent"
)",
                                              "/srv/clearlens");
  EXPECT_EQ(config.listen_address, "0.0.0.0:9000");
  EXPECT_EQ(config.public_base, "https://clearlens.example");
  EXPECT_EQ(config.default_preset, "yellow-on-black");
  EXPECT_EQ(config.max_concurrent_transforms, 3);
  EXPECT_EQ(config.assets_dir, std::filesystem::path("/srv/clearlens/web"));
  EXPECT_EQ(config.fetch.timeout_ms, 2500.0);
  EXPECT_EQ(config.fetch.max_redirects, 4);
  EXPECT_EQ(config.fetch.max_body_bytes, 1048576u);
  EXPECT_EQ(config.fetch.user_agent, "test-agent");
  EXPECT_NO_THROW(config.validate());
}

TEST(ServiceConfig, PresetsFileRelativeToConfig) {
  auto dir = std::filesystem::temp_directory_path() / "clearlens_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "presets.toml") << "[big]\nbase_font_size = 24\n";
  std::ofstream(dir / "clearlens.toml") << "[server]\npresets_file = \"presets.toml\"\n"
                                           "default_preset = \"big\"\n";
  ServiceConfig config = load_service_config(dir / "clearlens.toml", [](const char*) -> const char* {
    return nullptr;
  });
  ASSERT_EQ(config.presets.size(), 1u);
  EXPECT_EQ(config.presets[0].base_font_size, 24.0);
  std::filesystem::remove_all(dir);
}

TEST(ServiceConfig, ShippedExampleLoads) {
  auto path = std::filesystem::path(CLEARLENS_TEST_DATA_DIR) / "../../config/clearlens.toml";
  ServiceConfig config = load_service_config(path, [](const char*) -> const char* { return nullptr; });
  EXPECT_EQ(config.presets.size(), 4u);
  EXPECT_EQ(config.presets[3].name, "large-print");
  EXPECT_EQ(config.presets[3].base_font_size, 24.0);
}

TEST(ServiceConfig, RejectsUnknownKeysAndValues) {
  EXPECT_THROW(parse_service_config("[server]\nport = 1\n"), Error);
  EXPECT_THROW(parse_service_config("[cache]\n"), Error);
  EXPECT_THROW(parse_service_config("listen = \"x\"\n"), Error);
  ServiceConfig bad;
  bad.default_preset = "missing";
  EXPECT_THROW(bad.validate(), Error);
  bad = ServiceConfig{};
  bad.max_concurrent_transforms = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = ServiceConfig{};
  bad.fetch.timeout_ms = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(ServiceConfig, EnvironmentOverrides) {
  std::map<std::string, std::string> env = {{"CLEARLENS_LISTEN", "127.0.0.1:0"},
                                            {"CLEARLENS_PUBLIC_BASE", "http://proxy.example"}};
  ServiceConfig config;
  apply_environment(config, [&env](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(config.listen_address, "127.0.0.1:0");
  EXPECT_EQ(config.public_base, "http://proxy.example");
}

TEST(ServiceConfig, ListenAddress) {
  EXPECT_EQ(split_listen_address("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_EQ(split_listen_address("[::1]:0"), (std::pair<std::string, int>{"::1", 0}));
  EXPECT_THROW(split_listen_address("localhost"), Error);
  EXPECT_THROW(split_listen_address("localhost:http"), Error);
  EXPECT_THROW(split_listen_address("localhost:70000"), Error);
}

}  // namespace
}  // namespace clearlens
