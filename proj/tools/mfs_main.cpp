// mfs: batch runner for the cross-section, surface and geodesic experiments.
//
//   mfs --config run.json [--out result.csv] [--format csv|json] [--seed N]
//   mfs --suite theorem1|kakutani|mono|flatness|section5 [--out table.csv]
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure or failing suite.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfs/parallel.hpp"
#include "mfs/runner.hpp"
#include "mfs/suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cross-section, Finsler surface and geodesic experiments"};
  std::string config_path, suite, out, format;
  std::uint64_t seed = 0;
  int threads = 1;
  auto* config_opt = app.add_option("--config", config_path, "JSON experiment configuration");
  auto* suite_opt = app.add_option("--suite", suite, "Acceptance bundle to run");
  auto* out_opt = app.add_option("--out", out, "Output file (default: stdout)");
  auto* format_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the configuration");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  config_opt->excludes(suite_opt);
  app.set_version_flag("--version", mfs::cli::kVersion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mfs::cli::kValidation;
  }
  if (!*config_opt && !*suite_opt) {
    std::cerr << "one of --config or --suite is required\n" << app.help();
    return mfs::cli::kValidation;
  }

  mfs::set_thread_count(threads);
  mfs::cli::RunOptions opts;
  if (*out_opt) opts.out = out;
  if (*format_opt) opts.format = format;
  if (*seed_opt) opts.seed = seed;

  if (*suite_opt) return mfs::cli::run_suite(suite, opts, std::cout, std::cerr);

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot read " << config_path << "\n";
    return mfs::cli::kValidation;
  }
  mfs::cli::json raw;
  try {
    raw = mfs::cli::json::parse(in);
  } catch (const mfs::cli::json::parse_error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return mfs::cli::kValidation;
  }
  return mfs::cli::run_config(raw, opts, std::cout, std::cerr);
}
