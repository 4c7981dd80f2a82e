//
// gcdvsms: multistart experiments over simplex-lifted benchmark functions.
//
//   gcdvsms run [config.json] [--function F --n N --d D --seeds ... ]
//   gcdvsms summarize results.csv
//   gcdvsms list
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/evaluation error.
//

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simplexopt/harness.hpp"

namespace {

// "1,2,3" as an explicit list, or "count:base" for base..base+count-1.
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  if (const auto colon = spec.find(':'); colon != std::string::npos) {
    const std::uint64_t count = std::stoull(spec.substr(0, colon));
    const std::uint64_t base = std::stoull(spec.substr(colon + 1));
    if (count == 0) throw simplexopt::ConfigError("--seeds: count must be >= 1");
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(base + i);
    return seeds;
  }
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ',')) seeds.push_back(std::stoull(tok));
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GCDVSMS benchmark experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a seeded multistart experiment");
  std::string config_path, function, variant, seeds_spec, out_path;
  int n = 0, d = 0, parallel = 0;
  bool trace = false, baseline = false;
  run->add_option("config", config_path, "Config file (JSON)");
  run->add_option("--function", function, "Benchmark name");
  run->add_option("--n", n, "Number of simplex blocks");
  run->add_option("--d", d, "Hypercube dimension per block");
  run->add_option("--seeds", seeds_spec, "Comma list, or count:base");
  run->add_option("--variant", variant, "canonical or paper_literal");
  run->add_flag("--trace", trace, "Write a per-seed iteration trace");
  run->add_flag("--baseline", baseline, "Add a budget-matched random-search row");
  run->add_option("--out", out_path, "Results file path");
  run->add_option("--parallel", parallel, "Concurrent starts");

  auto* summ = app.add_subcommand("summarize", "Summarize a results file");
  std::string results_path;
  summ->add_option("results", results_path, "Results CSV file")->required();

  auto* list = app.add_subcommand("list", "List the benchmark registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      simplexopt::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = simplexopt::load_config(config_path);
      if (!function.empty()) cfg.function = function;
      if (n > 0) cfg.n = n;
      if (d > 0) cfg.d = d;
      if (!variant.empty())
        cfg.variant = simplexopt::variant_from_string(variant);
      if (!seeds_spec.empty()) cfg.seeds = parse_seeds(seeds_spec);
      if (trace) cfg.trace = true;
      if (baseline) cfg.baseline = true;
      if (!out_path.empty()) cfg.output_path = out_path;
      if (parallel > 0) cfg.parallel_starts = parallel;
      if (cfg.seeds.empty()) cfg.seeds = {1};

      auto rows = simplexopt::run_experiment(cfg);
      std::cout << "wrote " << rows.size() << " rows to " << cfg.output_path
                << "\n\n"
                << simplexopt::format_summary_table(simplexopt::summarize(rows));
    } else if (summ->parsed()) {
      auto rows = simplexopt::read_results(results_path);
      std::cout << simplexopt::format_summary_table(simplexopt::summarize(rows));
    } else if (list->parsed()) {
      for (const auto& name : simplexopt::benchmark_names()) {
        auto b = simplexopt::make_benchmark(name, 2);
        std::cout << name << "  box [" << b.lower << ", " << b.upper
                  << "]  variants: canonical, paper_literal\n";
      }
    }
  } catch (const simplexopt::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
