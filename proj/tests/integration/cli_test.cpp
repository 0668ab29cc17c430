#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "clearlens/service.hpp"
#include "clearlens/source_url.hpp"
#include "fixture_origin.hpp"
#include "fixture_pages.hpp"
#include "invariants.hpp"

namespace clearlens {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("clearlens_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  RunResult run(const std::string& args) {
    const fs::path err_file = dir / "stderr.txt";
    std::string command = "env -u CLEARLENS_LISTEN -u CLEARLENS_PUBLIC_BASE " +
                          std::string(CLEARLENS_CLI_PATH) + " " + args + " 2>" + err_file.string();
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) return result;
    std::array<char, 4096> buffer{};
    std::size_t n = 0;
    while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.out.append(buffer.data(), n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.err = slurp(err_file);
    return result;
  }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir / name, std::ios::binary) << text;
    return dir / name;
  }

  fs::path dir;
};

TEST_F(CliTest, TransformFileToStdout) {
  fs::path page = write("page.html", testing::fixture_page(3));
  RunResult r = run("transform " + page.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  auto violations = testing::output_violations(r.out, "http://127.0.0.1:8080");
  EXPECT_TRUE(violations.empty()) << violations.front();
  EXPECT_NE(r.err.find("scripts_removed=3"), std::string::npos);
}

TEST_F(CliTest, TransformUrlToFile) {
  testing::FixtureOrigin origin;
  fs::path out = dir / "out.html";
  RunResult r = run("transform " + origin.url("/page/2") + " -o " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("links_rewritten="), std::string::npos);
  EXPECT_TRUE(testing::output_violations(slurp(out), "http://127.0.0.1:8080").empty());
}

TEST_F(CliTest, UnreadablePath) {
  RunResult r = run("transform " + (dir / "missing.html").string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find((dir / "missing.html").string()), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("transform").exit_code, 1);
  EXPECT_EQ(run("frobnicate").exit_code, 1);
  fs::path page = write("p.html", "<p>x</p>");
  EXPECT_EQ(run("transform " + page.string() + " --preset neon").exit_code, 1);
}

TEST_F(CliTest, ReplaySummary) {
  fs::path csv = dir / "replay.csv";
  RunResult r = run("eval --replay --urls " + std::string(CLEARLENS_TEST_DATA_DIR) +
                    "/published_batches.csv --out " + csv.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("mean conversion rate: 81.7 (82%)"), std::string::npos) << r.out;
  EXPECT_NE(slurp(csv).find("summary,,10289,5146,81.7"), std::string::npos);
}

TEST_F(CliTest, EvalFixtureManifest) {
  testing::FixtureOrigin origin;
  std::string manifest;
  for (int n = 0; n < 10; ++n) manifest += "B" + std::to_string(n + 1) + "," + origin.url("/page/" + std::to_string(n)) + "\n";
  fs::path urls = write("urls.csv", manifest);
  fs::path csv = dir / "report.csv";
  RunResult r = run("eval --urls " + urls.string() + " --out " + csv.string() + " --plot " +
                    (dir / "fig").string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  std::string report = slurp(csv);
  int rows = 0;
  std::istringstream lines(report);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("B", 0) == 0) {
      ++rows;
      EXPECT_EQ(line.substr(line.rfind(',') + 1), "100") << line;
    }
  }
  EXPECT_EQ(rows, 10);
  EXPECT_NE(report.find("summary,,"), std::string::npos);
  EXPECT_NE(r.out.find("mean conversion rate: 100 (100%)"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "fig_nlt.tsv"));
  EXPECT_TRUE(fs::exists(dir / "fig_conversion.tsv"));
}

TEST_F(CliTest, EmptyManifest) {
  fs::path urls = write("empty.csv", "# nothing\n");
  EXPECT_EQ(run("eval --urls " + urls.string() + " --out " + (dir / "r.csv").string()).exit_code, 1);
}

TEST_F(CliTest, AllUrlsFailed) {
  testing::FixtureOrigin origin;
  fs::path urls = write("bad.csv", "B1," + origin.url("/status/500") + "\n");
  EXPECT_EQ(run("eval --urls " + urls.string() + " --out " + (dir / "r.csv").string()).exit_code, 2);
}

TEST_F(CliTest, MatchesServiceOutput) {
  testing::FixtureOrigin origin;
  ServiceConfig config;
  config.listen_address = "127.0.0.1:0";
  Service service(config);
  service.start();
  fs::path cfg = write("clearlens.toml", "[server]\npublic_base = \"" + service.public_base() + "\"\n");
  httplib::Client client("127.0.0.1", service.port());
  for (int n : {1, 7}) {
    const std::string target = origin.url("/page/" + std::to_string(n));
    auto res = client.Get("/render?url=" + percent_encode_component(target) +
                          "&preset=yellow-on-black&scale=1.5");
    ASSERT_TRUE(res);
    RunResult r = run("transform " + target + " --preset yellow-on-black --scale 1.5 --config " +
                      cfg.string());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(r.out, res->body) << "page " << n;
  }
  service.stop();
}

}  // namespace
}  // namespace clearlens
