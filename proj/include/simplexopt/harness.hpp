//
// file: harness.hpp
//
// Experiment runner: seeded multistart matrices over the benchmark
// registry, an evaluation-budget-matched random-search baseline, CSV
// result persistence, and grouped summaries.
//

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "simplexopt/benchmarks.hpp"
#include "simplexopt/engine.hpp"
#include "simplexopt/simplex.hpp"

namespace simplexopt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string function = "sphere";
  int n = 1;
  int d = 2;
  Variant variant = Variant::canonical;
  std::vector<std::uint64_t> seeds;
  TuningParams tuning;
  bool baseline = false;  // budget-matched random search per seed
  std::string output_path = "results.csv";
  bool trace = false;
  int parallel_starts = 1;

  void validate() const {
    if (seeds.empty()) throw ConfigError("config: seeds must be nonempty");
    if (n < 1 || d < 1) throw ConfigError("config: n and d must be >= 1");
    if (parallel_starts < 1)
      throw ConfigError("config: parallel_starts must be >= 1");
    if (output_path.empty()) throw ConfigError("config: output_path is empty");
    if (std::find(benchmark_names().begin(), benchmark_names().end(), function) ==
        benchmark_names().end())
      throw ConfigError("config: unknown function: " + function);
    try {
      tuning.validate(BlockShape(std::vector<int>(n, d + 1)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
};

struct ResultRow {
  std::string function;
  int n = 0;
  int d = 0;
  std::string variant;
  std::uint64_t seed = 0;
  std::string algorithm;  // "gcdvsms" or "random_search"
  double best_value = 0.0;
  int runs_used = 0;
  int iterations = 0;
  long long evaluations = 0;
  double wall_time_seconds = 0.0;
};

struct SummaryRow {
  std::string function;
  int n = 0;
  int d = 0;
  std::string algorithm;
  double min_value = 0.0;
  double mean_value = 0.0;
  double mean_time = 0.0;
  double mean_evaluations = 0.0;
  int seed_count = 0;
};

namespace detail {

/// Round-trip-safe decimal form of a double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Config file (JSON; unknown keys are errors)
// ---------------------------------------------------------------------------

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "function") {
        cfg.function = value.get<std::string>();
      } else if (key == "n") {
        cfg.n = value.get<int>();
      } else if (key == "d") {
        cfg.d = value.get<int>();
      } else if (key == "variant") {
        cfg.variant = variant_from_string(value.get<std::string>());
      } else if (key == "seeds") {
        if (value.is_array()) {
          cfg.seeds = value.get<std::vector<std::uint64_t>>();
        } else if (value.is_object()) {
          std::uint64_t count = 0, base = 1;
          for (const auto& [sk, sv] : value.items()) {
            if (sk == "count")
              count = sv.get<std::uint64_t>();
            else if (sk == "base_seed")
              base = sv.get<std::uint64_t>();
            else
              throw ConfigError("config: unknown seeds key: " + sk);
          }
          if (count == 0) throw ConfigError("config: seeds.count must be >= 1");
          cfg.seeds.resize(count);
          for (std::uint64_t i = 0; i < count; ++i) cfg.seeds[i] = base + i;
        } else {
          throw ConfigError("config: seeds must be a list or {count, base_seed}");
        }
      } else if (key == "tuning") {
        for (const auto& [tk, tv] : value.items()) {
          if (tk == "s_initial")
            cfg.tuning.s_initial = tv.get<double>();
          else if (tk == "rho1")
            cfg.tuning.rho1 = tv.get<double>();
          else if (tk == "rho2")
            cfg.tuning.rho2 = tv.get<double>();
          else if (tk == "phi")
            cfg.tuning.phi = tv.get<double>();
          else if (tk == "lambda")
            cfg.tuning.lambda = tv.get<double>();
          else if (tk == "tol_fun_1")
            cfg.tuning.tol_fun_1 = tv.get<double>();
          else if (tk == "tol_fun_2")
            cfg.tuning.tol_fun_2 = tv.get<double>();
          else if (tk == "max_iter")
            cfg.tuning.max_iter = tv.get<int>();
          else if (tk == "max_runs")
            cfg.tuning.max_runs = tv.get<int>();
          else
            throw ConfigError("config: unknown tuning key: " + tk);
        }
      } else if (key == "baseline") {
        cfg.baseline = value.get<bool>();
      } else if (key == "output_path") {
        cfg.output_path = value.get<std::string>();
      } else if (key == "trace") {
        cfg.trace = value.get<bool>();
      } else if (key == "parallel_starts") {
        cfg.parallel_starts = value.get<int>();
      } else {
        throw ConfigError("config: unknown key: " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Random-search baseline
// ---------------------------------------------------------------------------

/// Best of `budget` uniform draws. Deterministic per seed.
inline std::pair<BlockPoint, double> random_search(const SimplexObjective& objective,
                                                   long long budget,
                                                   std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("random_search: budget must be >= 1");
  std::mt19937_64 rng(seed);
  BlockPoint best;
  double best_value = 0.0;
  for (long long k = 0; k < budget; ++k) {
    BlockPoint p = sample_uniform(objective.shape(), rng);
    const double y = objective.evaluate(p);
    if (k == 0 || y < best_value) {
      best_value = y;
      best = std::move(p);
    }
  }
  return {std::move(best), best_value};
}

// ---------------------------------------------------------------------------
// Result files
// ---------------------------------------------------------------------------

inline const char* results_header() {
  return "function,n,d,variant,seed,algorithm,best_value,runs_used,iterations,"
         "evaluations,wall_time_seconds";
}

inline void write_results(const std::vector<ResultRow>& rows,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << results_header() << '\n';
  for (const auto& r : rows) {
    out << r.function << ',' << r.n << ',' << r.d << ',' << r.variant << ','
        << r.seed << ',' << r.algorithm << ','
        << detail::format_double(r.best_value) << ',' << r.runs_used << ','
        << r.iterations << ',' << r.evaluations << ','
        << detail::format_double(r.wall_time_seconds) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != results_header())
    throw std::runtime_error("unexpected results header in " + path);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 11)
      throw std::runtime_error("malformed results row in " + path);
    ResultRow r;
    r.function = f[0];
    r.n = std::stoi(f[1]);
    r.d = std::stoi(f[2]);
    r.variant = f[3];
    r.seed = std::stoull(f[4]);
    r.algorithm = f[5];
    r.best_value = std::stod(f[6]);
    r.runs_used = std::stoi(f[7]);
    r.iterations = std::stoi(f[8]);
    r.evaluations = std::stoll(f[9]);
    r.wall_time_seconds = std::stod(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trace_path(const std::string& output_path, std::uint64_t seed) {
  return output_path + ".trace.seed" + std::to_string(seed) + ".csv";
}

inline void write_trace(const std::vector<TraceRecord>& records,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "run,iteration,best_value,gs,block,coordinate,direction,evaluations\n";
  for (const auto& t : records) {
    out << t.run << ',' << t.iteration << ',' << format_double(t.best_value)
        << ',' << format_double(t.gs) << ',' << t.block << ',' << t.coordinate
        << ',' << t.direction << ',' << t.evaluations << '\n';
  }
}

}  // namespace detail

/// Run the configured multistart matrix: one gcdvsms row per seed
/// (starting point drawn by that seed), plus one budget-matched
/// random-search row per seed when the baseline is enabled. Rows come
/// back in seed order regardless of scheduling; the result file is
/// written to config.output_path.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();

  const std::size_t num_seeds = config.seeds.size();
  std::vector<ResultRow> gcd_rows(num_seeds);
  std::vector<ResultRow> rs_rows(num_seeds);

  auto run_one = [&](std::size_t k) {
    const std::uint64_t seed = config.seeds[k];
    SimplexObjective objective =
        make_objective(config.function, config.n, config.d, config.variant);
    BlockPoint p0 = sample_uniform(objective.shape(), seed);

    std::vector<TraceRecord> trace_records;
    OptimizeOptions opts;
    if (config.trace)
      opts.trace = [&trace_records](const TraceRecord& t) {
        trace_records.push_back(t);
      };

    const auto t0 = std::chrono::steady_clock::now();
    OptimizeResult res = optimize(p0, objective, config.tuning, opts);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - t0;

    ResultRow row;
    row.function = config.function;
    row.n = config.n;
    row.d = config.d;
    row.variant = to_string(config.variant);
    row.seed = seed;
    row.algorithm = "gcdvsms";
    row.best_value = res.value;
    row.runs_used = res.runs;
    row.iterations = res.iterations;
    row.evaluations = res.total_evaluations;
    row.wall_time_seconds = elapsed.count();
    gcd_rows[k] = row;

    if (config.trace)
      detail::write_trace(trace_records,
                          detail::trace_path(config.output_path, seed));

    if (config.baseline) {
      SimplexObjective rs_objective =
          make_objective(config.function, config.n, config.d, config.variant);
      const auto r0 = std::chrono::steady_clock::now();
      auto [point, value] =
          random_search(rs_objective, res.total_evaluations, seed);
      const std::chrono::duration<double> rs_elapsed =
          std::chrono::steady_clock::now() - r0;
      ResultRow rs;
      rs.function = config.function;
      rs.n = config.n;
      rs.d = config.d;
      rs.variant = to_string(config.variant);
      rs.seed = seed;
      rs.algorithm = "random_search";
      rs.best_value = value;
      rs.runs_used = 0;
      rs.iterations = 0;
      rs.evaluations = rs_objective.evaluations();
      rs.wall_time_seconds = rs_elapsed.count();
      rs_rows[k] = rs;
    }
  };

  const unsigned workers = std::min<unsigned>(
      static_cast<unsigned>(config.parallel_starts), num_seeds);
  if (workers <= 1) {
    for (std::size_t k = 0; k < num_seeds; ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t k = next.fetch_add(1);
          if (k >= num_seeds) return;
          try {
            run_one(k);
          } catch (...) {
            std::lock_guard<std::mutex> g(error_mutex);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  std::vector<ResultRow> rows;
  rows.reserve(num_seeds * (config.baseline ? 2 : 1));
  for (std::size_t k = 0; k < num_seeds; ++k) {
    rows.push_back(gcd_rows[k]);
    if (config.baseline) rows.push_back(rs_rows[k]);
  }
  write_results(rows, config.output_path);
  return rows;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no rows");
  using Key = std::tuple<std::string, int, int, std::string>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows)
    groups[{r.function, r.n, r.d, r.algorithm}].push_back(&r);

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    std::tie(s.function, s.n, s.d, s.algorithm) = key;
    s.seed_count = static_cast<int>(members.size());
    s.min_value = members.front()->best_value;
    for (const ResultRow* r : members) {
      s.min_value = std::min(s.min_value, r->best_value);
      s.mean_value += r->best_value;
      s.mean_time += r->wall_time_seconds;
      s.mean_evaluations += static_cast<double>(r->evaluations);
    }
    s.mean_value /= s.seed_count;
    s.mean_time /= s.seed_count;
    s.mean_evaluations /= s.seed_count;
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %4s %4s %-14s %12s %12s %10s %12s %6s\n",
                "function", "n", "d", "algorithm", "min_value", "mean_value",
                "mean_time", "mean_evals", "seeds");
  os << line;
  for (const auto& s : rows) {
    std::snprintf(line, sizeof line,
                  "%-10s %4d %4d %-14s %12.4e %12.4e %10.3f %12.1f %6d\n",
                  s.function.c_str(), s.n, s.d, s.algorithm.c_str(), s.min_value,
                  s.mean_value, s.mean_time, s.mean_evaluations, s.seed_count);
    os << line;
  }
  return os.str();
}

}  // namespace simplexopt
