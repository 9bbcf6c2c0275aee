// Command-line front end: analyze, compare, render.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dramaturg/error.hpp"
#include "dramaturg/render.hpp"
#include "dramaturg/report.hpp"

namespace fs = std::filesystem;
using namespace dramaturg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitScorer = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const ScorerError*>(&e)) return kExitScorer;
  return kExitAnalysis;
}

void report_error(const std::string& context, const std::exception& e) {
  std::cerr << "dramaturg: ";
  if (!context.empty()) std::cerr << context << ": ";
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    std::cerr << to_string(err->kind());
    if (!err->stage().empty()) std::cerr << " [" << err->stage() << "]";
    std::cerr << ": ";
  }
  std::cerr << e.what() << '\n';
}

std::set<render::Format> formats_or_usage(const std::string& list) {
  try {
    return render::parse_formats(list);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

struct AnalyzeArgs {
  std::vector<std::string> files;
  std::string config;
  std::string scorer;
  std::string out = "out";
  std::string format = "json,csv,svg";
  std::optional<std::size_t> top_n;
  std::optional<std::size_t> window;
  std::optional<std::uint32_t> seed;
  bool no_cache = false;
  double handshake_timeout = 10.0;
  double request_timeout = 30.0;
  std::size_t batch_size = 32;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto formats = formats_or_usage(a.format);
  if (a.batch_size == 0) throw UsageError("--batch-size must be positive");

  report::AnalysisConfig cfg;
  std::string config_path = a.config;
  if (config_path.empty()) {
    if (const char* env = std::getenv("DRAMATURG_CONFIG"); env && *env) config_path = env;
  }
  if (!config_path.empty()) cfg = report::load_config(config_path);
  if (!a.scorer.empty()) {
    if (a.scorer != "lexicon" && a.scorer.rfind("external:", 0) != 0) {
      throw UsageError("--scorer must be 'lexicon' or 'external:<cmd-or-url>'");
    }
    cfg.scorer = a.scorer;
  }
  if (a.top_n) cfg.top_n = *a.top_n;
  if (a.window) cfg.window = *a.window;
  if (a.seed) cfg.seed = *a.seed;

  report::AnalyzeOptions opts;
  if (!a.no_cache) opts.cache_dir = fs::path(a.out) / report::kCacheDirName;
  opts.client.handshake_timeout = std::chrono::milliseconds(static_cast<long>(a.handshake_timeout * 1000));
  opts.client.request_timeout = std::chrono::milliseconds(static_cast<long>(a.request_timeout * 1000));
  opts.client.batch_size = a.batch_size;

  std::vector<std::future<report::AnalyzeResult>> jobs;
  jobs.reserve(a.files.size());
  for (const auto& file : a.files) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &opts, file] { return report::analyze_play(file, cfg, opts); }));
  }

  int status = kExitOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      const auto result = jobs[i].get();
      const auto dir = fs::path(a.out) / render::title_slug(result.report.title);
      render::render_play(result.report, formats, dir);
      std::cout << a.files[i] << " -> " << dir.string() << (result.from_cache ? " (cached)" : "") << '\n';
    } catch (const std::exception& e) {
      report_error(a.files[i], e);
      status = std::max(status, exit_code_for(e));
    }
  }
  return status;
}

int run_compare(const std::vector<std::string>& files, const std::string& out) {
  std::vector<report::PlayReport> reports;
  reports.reserve(files.size());
  for (const auto& f : files) reports.push_back(report::load_report(f));
  const auto text = render::comparison_json(report::compare_plays(reports));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    const fs::path path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os || !(os << text)) throw IoError("cannot write " + out);
  }
  return kExitOk;
}

int run_render(const std::string& file, const std::string& format, const std::string& out) {
  const auto formats = formats_or_usage(format);
  const auto r = report::load_report(file);
  const fs::path dir = out.empty() ? fs::path(file).parent_path() : fs::path(out);
  for (const auto& p : render::render_play(r, formats, dir.empty() ? fs::path(".") : dir)) {
    std::cout << p.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dramaturg: lexical and affective analysis of dramatic texts"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "analyze one or more plays");
  analyze->add_option("file", an.files, "UTF-8 play text")->required()->check(CLI::ExistingFile);
  analyze->add_option("--config", an.config, "JSON configuration (default: $DRAMATURG_CONFIG)");
  analyze->add_option("--scorer", an.scorer, "lexicon | external:<command or host:port>");
  analyze->add_option("--out", an.out, "output directory")->capture_default_str();
  analyze->add_option("--format", an.format, "comma-separated subset of json,csv,svg")->capture_default_str();
  analyze->add_option("--top-n", an.top_n, "frequency table size")->check(CLI::PositiveNumber);
  analyze->add_option("--window", an.window, "segment length in words")->check(CLI::PositiveNumber);
  analyze->add_option("--seed", an.seed, "word-cloud layout seed");
  analyze->add_flag("--no-cache", an.no_cache, "always recompute");
  analyze->add_option("--handshake-timeout", an.handshake_timeout, "seconds")->capture_default_str();
  analyze->add_option("--request-timeout", an.request_timeout, "seconds")->capture_default_str();
  analyze->add_option("--batch-size", an.batch_size, "requests in flight per batch")->capture_default_str();

  std::vector<std::string> compare_files;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "compare previously written reports");
  compare->add_option("report", compare_files, "report.json files")->required()->expected(2, -1)
      ->check(CLI::ExistingFile);
  compare->add_option("--out", compare_out, "write the comparison here instead of stdout");

  std::string render_file, render_format = "svg", render_out;
  auto* rend = app.add_subcommand("render", "re-render outputs from a report.json");
  rend->add_option("report", render_file, "report.json")->required()->check(CLI::ExistingFile);
  rend->add_option("--format", render_format, "comma-separated subset of json,csv,svg")->capture_default_str();
  rend->add_option("--out", render_out, "output directory (default: beside the report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) return run_analyze(an);
    if (compare->parsed()) return run_compare(compare_files, compare_out);
    return run_render(render_file, render_format, render_out);
  } catch (const std::exception& e) {
    report_error("", e);
    return exit_code_for(e);
  }
}
