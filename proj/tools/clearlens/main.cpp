#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "clearlens/charset.hpp"
#include "clearlens/error.hpp"
#include "clearlens/evaluator.hpp"
#include "clearlens/pipeline.hpp"
#include "clearlens/presets.hpp"
#include "clearlens/service.hpp"

namespace {

using namespace clearlens;

constexpr std::string_view kFileBase = "http://local.invalid/";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return text.str();
}

void write_output(const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path->string());
}

std::optional<std::filesystem::path> as_path(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return std::filesystem::path(text);
}

std::string service_base_of(const ServiceConfig& config) {
  if (!config.public_base.empty()) return config.public_base;
  auto [host, port] = split_listen_address(config.listen_address);
  if (host == "0.0.0.0" || host == "::") host = "127.0.0.1";
  if (host.find(':') != std::string::npos) host = "[" + host + "]";
  return "http://" + host + ":" + std::to_string(port);
}

TransformConfig transform_config(const ServiceConfig& config, const std::string& preset_name,
                                 std::optional<double> scale) {
  TransformConfig cfg;
  std::string name = preset_name.empty() ? config.default_preset : preset_name;
  const ClearPrintPreset* preset = find_preset(config.presets, name);
  if (preset == nullptr) throw Error(ErrorCode::InvalidPreset, "unknown preset '" + name + "'");
  cfg.preset = *preset;
  if (!preset_name.empty()) cfg.render_params.emplace_back("preset", preset_name);
  if (scale) {
    double clamped = clamp_scale(*scale);
    cfg.preset = scaled(cfg.preset, clamped);
    cfg.render_params.emplace_back("scale", format_number(clamped));
  }
  cfg.service_base = service_base_of(config);
  cfg.fetch = config.fetch;
  cfg.validate();
  return cfg;
}

bool is_url_target(const std::string& target) {
  std::string scheme = scheme_of(target);
  return scheme == "http" || scheme == "https";
}

int run_transform(const std::string& config_path, const std::string& target,
                  const std::string& preset, std::optional<double> scale, const std::string& out) {
  ServiceConfig config = load_service_config(as_path(config_path));
  TransformConfig cfg = transform_config(config, preset, scale);
  AccessiblePage page;
  if (is_url_target(target)) {
    page = transform_url(parse_url(target), cfg);
  } else {
    FetchedPage fetched;
    fetched.requested_url = parse_url(kFileBase);
    fetched.final_url = fetched.requested_url;
    fetched.status = 200;
    fetched.content_type = "text/html";
    fetched.body = read_file(target);
    fetched.charset = resolve_charset("", fetched.body);
    page = transform_fetched(fetched, cfg);
  }
  write_output(as_path(out), page.html);
  std::cerr << to_string(page.stats) << '\n';
  return 0;
}

void print_summary(const BatchSummary& summary) {
  std::cout << "rows: " << summary.rows.size() << '\n'
            << "failed: " << summary.failures.size() << '\n'
            << "mean nlt: " << format_number(summary.mean_nlt_ms) << '\n'
            << "mean wlt: " << format_number(summary.mean_wlt_ms) << '\n'
            << "mean conversion rate: " << format_number(summary.mean_conversion_rate) << " ("
            << std::lround(summary.mean_conversion_rate) << "%)\n";
}

int run_eval(const std::string& config_path, const std::string& urls, const std::string& out,
             bool replay, int parallel, const std::string& plot) {
  std::string text = read_file(urls);
  BatchSummary summary;
  if (replay) {
    std::vector<ConversionReport> rows = read_csv(text);
    if (rows.empty()) {
      std::cerr << "clearlens: " << urls << " has no rows\n";
      return 1;
    }
    summary = summarize(std::move(rows));
  } else {
    std::vector<LabeledUrl> manifest = parse_manifest(text);
    if (manifest.empty()) {
      std::cerr << "clearlens: " << urls << " lists no URLs\n";
      return 1;
    }
    ServiceConfig config = load_service_config(as_path(config_path));
    TransformConfig cfg = transform_config(config, "", std::nullopt);
    try {
      summary = batch_evaluate(manifest, cfg, parallel);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllUrlsFailed) throw;
      std::cerr << "clearlens: " << e.what() << '\n';
      return 2;
    }
    for (const FailedUrl& failure : summary.failures) {
      std::cerr << "clearlens: skipped " << failure.batch_label << ' ' << failure.url << ": "
                << failure.message << '\n';
    }
  }
  std::ostringstream csv;
  write_csv(csv, summary);
  write_output(std::filesystem::path(out), csv.str());
  if (!plot.empty()) write_plot_data(summary, plot);
  print_summary(summary);
  return 0;
}

int run_serve(const std::string& config_path, const std::string& listen) {
  ServiceConfig config = load_service_config(as_path(config_path));
  if (!listen.empty()) config.listen_address = listen;
  Service service(std::move(config));
  service.bind();
  std::cerr << "clearlens listening on " << service.public_base() << '\n';
  service.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clearlens: Clear Print accessibility proxy"};
  app.require_subcommand(1);

  std::string config_path;

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string listen;
  serve->add_option("--config", config_path, "TOML configuration file");
  serve->add_option("--listen", listen, "host:port to listen on");

  auto* transform = app.add_subcommand("transform", "Transform one page or file");
  std::string target;
  std::string preset;
  std::optional<double> scale;
  std::string out;
  transform->add_option("target", target, "URL or HTML file")->required();
  transform->add_option("--preset", preset, "Preset name");
  transform->add_option("--scale", scale, "Font scale, clamped to 0.75-2.0");
  transform->add_option("-o,--out", out, "Output file (default: standard output)");
  transform->add_option("--config", config_path, "TOML configuration file");

  auto* eval = app.add_subcommand("eval", "Evaluate a URL batch or replay a report");
  std::string urls;
  std::string report;
  bool replay = false;
  int parallel = 4;
  std::string plot;
  eval->add_option("--urls", urls, "label,url manifest, or a report CSV with --replay")->required();
  eval->add_option("--out", report, "CSV report to write")->required();
  eval->add_flag("--replay", replay, "Summarize an existing report without fetching");
  eval->add_option("--parallel", parallel, "URLs evaluated at once")->check(CLI::Range(1, 64));
  eval->add_option("--plot", plot, "Write <stem>_nlt.tsv, <stem>_wlt.tsv and <stem>_conversion.tsv");
  eval->add_option("--config", config_path, "TOML configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*serve) return run_serve(config_path, listen);
    if (*transform) return run_transform(config_path, target, preset, scale, out);
    return run_eval(config_path, urls, report, replay, parallel, plot);
  } catch (const std::exception& e) {
    std::cerr << "clearlens: " << e.what() << '\n';
    return 1;
  }
}
