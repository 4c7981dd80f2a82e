//
// file: engine.hpp
//
// GCDVSMS: greedy coordinate descent with varying step sizes on multiple
// simplex blocks. Each iteration scores up to 2M single-coordinate moves
// (M = total coordinates), shrinking each local step until the candidate
// is feasible, accepts at most one move, and sparsifies the updated block.
// The global step decays when an iteration fails to improve (CC3), a run
// stops when the step hits its floor (CC1), and runs chain until two
// consecutive runs agree (CC2).
//

#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "simplexopt/simplex.hpp"

namespace simplexopt {

/// User-facing controls plus iteration/run caps. Defaults follow the
/// standard tuning for this algorithm.
struct TuningParams {
  double s_initial = 1.0;   // initial global step size
  double rho1 = 1.01;       // step decay rate, first run
  double rho2 = 1.01;       // step decay rate, later runs
  double phi = 1e-4;        // step size threshold (floor)
  double lambda = 1e-6;     // sparsity threshold
  double tol_fun_1 = 1e-6;  // per-iteration improvement tolerance (CC3)
  double tol_fun_2 = 1e-6;  // inter-run improvement tolerance (CC2)
  int max_iter = 5000;
  int max_runs = 200;

  void validate(const BlockShape& shape) const {
    if (!(phi > 0.0)) throw std::invalid_argument("TuningParams: phi must be > 0");
    if (!(s_initial > phi))
      throw std::invalid_argument("TuningParams: s_initial must exceed phi");
    if (!(rho1 > 1.0) || !(rho2 > 1.0))
      throw std::invalid_argument("TuningParams: decay rates must be > 1");
    if (!(lambda >= 0.0) || !(lambda < 1.0 / shape.max_block_size()))
      throw std::invalid_argument(
          "TuningParams: lambda must be in [0, 1/max block size)");
    if (!(tol_fun_1 >= 0.0) || !(tol_fun_2 >= 0.0))
      throw std::invalid_argument("TuningParams: tolerances must be >= 0");
    if (max_iter < 1 || max_runs < 1)
      throw std::invalid_argument("TuningParams: caps must be >= 1");
  }
};

/// Thrown when the objective returns a non-finite value; carries the
/// offending point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::string what, BlockPoint at)
      : std::runtime_error(std::move(what)), point(std::move(at)) {}
  BlockPoint point;
};

/// Evaluation contract for f over a BlockPoint, with evaluation counting.
/// The wrapped function must be deterministic and side-effect-free; it may
/// be called concurrently.
class SimplexObjective {
 public:
  using Fn = std::function<double(const BlockPoint&)>;

  SimplexObjective(BlockShape shape, Fn fn)
      : shape_(std::move(shape)), fn_(std::move(fn)) {
    shape_.validate();
  }

  double evaluate(const BlockPoint& p) const {
    const double y = fn_(p);
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    if (!std::isfinite(y))
      throw EvaluationError("objective returned a non-finite value", p);
    return y;
  }

  const BlockShape& shape() const { return shape_; }
  long long evaluations() const {
    return evaluations_.load(std::memory_order_relaxed);
  }
  void reset_evaluations() { evaluations_.store(0, std::memory_order_relaxed); }

 private:
  BlockShape shape_;
  Fn fn_;
  mutable std::atomic<long long> evaluations_{0};
};

/// One per-iteration trace record. Block/coordinate are 1-based here to
/// match the usual simplex-block notation; direction is +1/-1, or 0 when
/// no move improved.
struct TraceRecord {
  int run = 0;
  int iteration = 0;
  double best_value = 0.0;
  double gs = 0.0;
  int block = 0;
  int coordinate = 0;
  int direction = 0;
  long long evaluations = 0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct ShrunkMove {
  SimplexVector candidate;
  double step;
};

/// Build the move with step s, halving the step by rho while the candidate
/// is infeasible. Returns nullopt (skip) when the significant set is empty
/// or the step is exhausted (s <= rho*phi before a feasible candidate
/// appears). The significant set depends only on (v, i, lambda), so it is
/// computed once.
inline std::optional<ShrunkMove> shrink_until_feasible(const SimplexVector& v,
                                                       int i, bool positive,
                                                       double s, double rho,
                                                       double phi, double lambda) {
  if (significant_indices(v, i, lambda).empty()) return std::nullopt;
  while (s > rho * phi) {
    SimplexVector cand =
        positive ? positive_move(v, i, s, lambda) : negative_move(v, i, s, lambda);
    if (is_feasible(cand)) {
      clamp_small_negatives(cand);
      return ShrunkMove{std::move(cand), s};
    }
    s /= rho;
  }
  return std::nullopt;
}

/// The accepted move of an iteration (0-based indices; direction 0 means
/// no candidate beat the incumbent and only the sparsify of the argmin
/// block was applied).
struct MoveInfo {
  int block = 0;
  int coordinate = -1;
  int direction = 0;
};

struct IterationResult {
  BlockPoint point;
  double value = 0.0;
  double gs = 0.0;
  bool stop = false;  // CC1: no improvement and gs at its floor
  MoveInfo move;
  int candidate_evaluations = 0;
};

namespace detail {

struct Candidate {
  int block;
  int coordinate;
  int direction;  // +1 or -1
  SimplexVector vec;
  double value;
};

/// Evaluate all candidates, each as the incumbent point with one block
/// swapped. Order of evaluation never matters: selection happens later
/// with a fixed tie-break.
inline void evaluate_candidates(std::vector<Candidate>& cands, const BlockPoint& p,
                                const SimplexObjective& objective,
                                unsigned threads) {
  auto eval_range = [&](std::size_t lo, std::size_t hi) {
    BlockPoint scratch = p;
    for (std::size_t c = lo; c < hi; ++c) {
      std::swap(scratch[cands[c].block], cands[c].vec);
      cands[c].value = objective.evaluate(scratch);
      std::swap(scratch[cands[c].block], cands[c].vec);
    }
  };
  if (threads <= 1 || cands.size() < 2) {
    eval_range(0, cands.size());
    return;
  }
  const unsigned nt = std::min<unsigned>(threads, cands.size());
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = (cands.size() + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(cands.size(), lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        eval_range(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> g(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// One greedy sweep: score the feasible positive and negative move of every
/// coordinate (skips keep the sentinel value Y and can never win), pick the
/// best candidate per block (negative wins +/- ties, lowest coordinate wins
/// otherwise), pick the best block (lowest index wins ties), sparsify the
/// winning block, and re-evaluate. Y' decides whether gs survives (improved
/// by more than tol_fun_1), decays by rho, or triggers CC1.
inline IterationResult iterate(const BlockPoint& p, double y, double gs,
                               const SimplexObjective& objective,
                               const TuningParams& params, double rho,
                               unsigned eval_threads = 1) {
  const int B = static_cast<int>(p.size());

  std::vector<detail::Candidate> cands;
  cands.reserve(2 * static_cast<std::size_t>(objective.shape().total_size()));
  for (int j = 0; j < B; ++j) {
    const int nj = static_cast<int>(p[j].size());
    for (int dir : {+1, -1}) {
      for (int i = 0; i < nj; ++i) {
        auto mv = shrink_until_feasible(p[j], i, dir > 0, gs, rho, params.phi,
                                        params.lambda);
        if (mv)
          cands.push_back({j, i, dir, std::move(mv->candidate), y});
      }
    }
  }

  detail::evaluate_candidates(cands, p, objective, eval_threads);

  // Per-block winners. best_pos/best_neg start at the sentinel Y so a
  // block with no strictly improving candidate keeps p_j unchanged.
  std::vector<double> f_temp(B, y);
  std::vector<int> winner(B, -1);  // index into cands, -1 = keep block
  {
    std::vector<double> best_pos(B, y), best_neg(B, y);
    std::vector<int> idx_pos(B, -1), idx_neg(B, -1);
    for (int c = 0; c < static_cast<int>(cands.size()); ++c) {
      const auto& cd = cands[c];
      auto& best = cd.direction > 0 ? best_pos[cd.block] : best_neg[cd.block];
      auto& idx = cd.direction > 0 ? idx_pos[cd.block] : idx_neg[cd.block];
      if (cd.value < best) {  // strict: lowest coordinate wins ties
        best = cd.value;
        idx = c;
      }
    }
    for (int j = 0; j < B; ++j) {
      if (std::min(best_pos[j], best_neg[j]) < y) {
        // Equal +/- values select the negative move.
        winner[j] = best_pos[j] < best_neg[j] ? idx_pos[j] : idx_neg[j];
        f_temp[j] = cands[winner[j]].value;
      }
    }
  }

  // Across blocks: lowest index wins ties.
  int w = 0;
  for (int j = 1; j < B; ++j)
    if (f_temp[j] < f_temp[w]) w = j;

  IterationResult out;
  out.point = p;
  out.point[w] =
      sparsify(winner[w] >= 0 ? cands[winner[w]].vec : p[w], params.lambda);
  out.value = objective.evaluate(out.point);
  out.candidate_evaluations = static_cast<int>(cands.size());
  out.move.block = w;
  if (winner[w] >= 0) {
    out.move.coordinate = cands[winner[w]].coordinate;
    out.move.direction = cands[winner[w]].direction;
  }
  if (y - out.value > params.tol_fun_1) {
    out.gs = gs;
  } else if (gs > rho * params.phi) {
    out.gs = gs / rho;
  } else {
    out.gs = gs;
    out.stop = true;
  }
  return out;
}

enum class RunStop { cc1, max_iter };

struct RunResult {
  BlockPoint point;
  double value = 0.0;
  int iterations = 0;
  long long evaluations = 0;
  RunStop stop_reason = RunStop::cc1;
};

/// One run: gs starts at s_initial and iterations repeat until CC1 fires
/// or max_iter is reached.
inline RunResult run_stage1(const BlockPoint& p0, double rho,
                            const SimplexObjective& objective,
                            const TuningParams& params, int run_index = 1,
                            const TraceSink& trace = {},
                            unsigned eval_threads = 1) {
  if (!objective.shape().matches(p0))
    throw std::invalid_argument("run_stage1: point does not match objective shape");
  if (!is_feasible(p0))
    throw std::invalid_argument("run_stage1: infeasible starting point");

  const long long evals0 = objective.evaluations();
  BlockPoint p = p0;
  double y = objective.evaluate(p);
  double gs = params.s_initial;

  RunResult out;
  for (int h = 1;; ++h) {
    auto it = iterate(p, y, gs, objective, params, rho, eval_threads);
    p = std::move(it.point);
    y = it.value;
    gs = it.gs;
    if (trace)
      trace(TraceRecord{run_index, h, y, gs, it.move.block + 1,
                        it.move.coordinate + 1, it.move.direction,
                        objective.evaluations()});
    if (it.stop) {
      out.stop_reason = RunStop::cc1;
      out.iterations = h;
      break;
    }
    if (h + 1 > params.max_iter) {
      out.stop_reason = RunStop::max_iter;
      out.iterations = h;
      break;
    }
  }
  out.point = std::move(p);
  out.value = y;
  out.evaluations = objective.evaluations() - evals0;
  return out;
}

enum class OptimizeStop { cc2, max_runs };

struct OptimizeResult {
  BlockPoint point;
  double value = 0.0;
  int runs = 0;
  int iterations = 0;  // summed over runs
  long long total_evaluations = 0;
  OptimizeStop stop_reason = OptimizeStop::max_runs;
};

struct OptimizeOptions {
  TraceSink trace;
  unsigned eval_threads = 1;
};

/// Multi-run driver: run 1 uses rho1, later runs rho2; each run starts
/// from the previous run's output; stops when the inter-run improvement
/// drops below tol_fun_2 (CC2) or max_runs is exhausted.
inline OptimizeResult optimize(const BlockPoint& p0,
                               const SimplexObjective& objective,
                               const TuningParams& params,
                               const OptimizeOptions& opts = {}) {
  params.validate(objective.shape());
  const long long evals0 = objective.evaluations();

  OptimizeResult out;
  RunResult cur =
      run_stage1(p0, params.rho1, objective, params, 1, opts.trace, opts.eval_threads);
  out.runs = 1;
  out.iterations = cur.iterations;
  out.point = cur.point;
  out.value = cur.value;
  out.stop_reason = OptimizeStop::max_runs;

  while (out.runs < params.max_runs) {
    RunResult next = run_stage1(cur.point, params.rho2, objective, params,
                                out.runs + 1, opts.trace, opts.eval_threads);
    ++out.runs;
    out.iterations += next.iterations;
    const double improvement = cur.value - next.value;
    if (next.value <= out.value) {
      out.point = next.point;
      out.value = next.value;
    }
    cur = std::move(next);
    if (improvement < params.tol_fun_2) {
      out.stop_reason = OptimizeStop::cc2;
      break;
    }
  }
  out.total_evaluations = objective.evaluations() - evals0;
  return out;
}

}  // namespace simplexopt
