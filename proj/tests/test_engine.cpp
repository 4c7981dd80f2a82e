#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "simplexopt/benchmarks.hpp"
#include "simplexopt/engine.hpp"
#include "simplexopt/simplex.hpp"

using namespace simplexopt;

namespace {

SimplexObjective first_coordinate_objective() {
  return SimplexObjective(BlockShape{2},
                          [](const BlockPoint& p) { return p[0][0]; });
}

SimplexObjective constant_objective(BlockShape shape, double c) {
  return SimplexObjective(std::move(shape),
                          [c](const BlockPoint&) { return c; });
}

}  // namespace

TEST_CASE("TuningParams validation") {
  BlockShape shape{3, 4};
  TuningParams params;
  CHECK_NOTHROW(params.validate(shape));

  TuningParams bad = params;
  bad.s_initial = 1e-5;  // below phi
  CHECK_THROWS_AS(bad.validate(shape), std::invalid_argument);

  bad = params;
  bad.rho1 = 1.0;
  CHECK_THROWS_AS(bad.validate(shape), std::invalid_argument);

  bad = params;
  bad.lambda = 0.3;  // >= 1/max(n_j) = 0.25
  CHECK_THROWS_AS(bad.validate(shape), std::invalid_argument);
}

TEST_CASE("SimplexObjective counts evaluations and rejects non-finite values") {
  auto obj = first_coordinate_objective();
  CHECK(obj.evaluations() == 0);
  CHECK(obj.evaluate({{0.25, 0.75}}) == 0.25);
  CHECK(obj.evaluations() == 1);

  SimplexObjective bad(BlockShape{2}, [](const BlockPoint&) {
    return std::numeric_limits<double>::quiet_NaN();
  });
  CHECK_THROWS_AS(bad.evaluate({{0.5, 0.5}}), EvaluationError);
}

TEST_CASE("shrink_until_feasible") {
  SUBCASE("first attempt feasible") {
    auto mv = shrink_until_feasible({0.5, 0.5}, 0, true, 0.25, 1.01, 1e-4, 1e-6);
    REQUIRE(mv.has_value());
    CHECK(mv->step == 0.25);
    CHECK(mv->candidate[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(mv->candidate[1] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("one shrink makes the move feasible") {
    auto mv = shrink_until_feasible({0.9, 0.1}, 0, true, 0.15, 2.0, 1e-4, 1e-6);
    REQUIRE(mv.has_value());
    CHECK(mv->step == doctest::Approx(0.075).epsilon(1e-14));
    CHECK(mv->candidate[0] == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(mv->candidate[1] == doctest::Approx(0.025).epsilon(1e-14));
  }
  SUBCASE("negative move off a vertex exhausts the step") {
    CHECK_FALSE(
        shrink_until_feasible({0.0, 1.0}, 0, false, 1.0, 1.01, 1e-4, 1e-6));
  }
  SUBCASE("empty significant set skips") {
    CHECK_FALSE(
        shrink_until_feasible({0.0, 1.0}, 1, true, 0.25, 1.01, 1e-4, 1e-6));
  }
}

TEST_CASE("iterate: hand-enumerated move on f(p) = p[0]") {
  auto obj = first_coordinate_objective();
  TuningParams params;
  // Four candidates: (0.75,0.25)->0.75, (0.25,0.75)->0.25 twice,
  // (0.75,0.25)->0.75. The +/- tie at 0.25 selects the negative move at
  // coordinate 1 (1-based).
  auto r = iterate({{0.5, 0.5}}, 0.5, 0.25, obj, params, 1.01);
  CHECK(r.point[0][0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.point[0][1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.move.block == 0);
  CHECK(r.move.coordinate == 0);
  CHECK(r.move.direction == -1);
  CHECK(r.gs == 0.25);  // improvement 0.25 > tol_fun_1
  CHECK_FALSE(r.stop);
  CHECK(r.candidate_evaluations == 4);
}

TEST_CASE("iterate: vertex point decays the global step") {
  auto obj = first_coordinate_objective();
  TuningParams params;
  auto r = iterate({{0.0, 1.0}}, 0.0, 0.25, obj, params, 1.01);
  CHECK(r.point == BlockPoint{{0.0, 1.0}});
  CHECK(r.value == 0.0);
  CHECK(r.gs == doctest::Approx(0.25 / 1.01).epsilon(1e-14));
  CHECK(r.move.direction == 0);
  // Only the (1,+) candidate survives shrinking; the others skip.
  CHECK(r.candidate_evaluations == 1);
}

TEST_CASE("iterate: constant objective never accepts a move") {
  auto obj = constant_objective(BlockShape{2, 3}, 3.0);
  TuningParams params;
  BlockPoint p{{0.5, 0.5}, {0.2, 0.3, 0.5}};
  auto r = iterate(p, 3.0, 0.25, obj, params, 1.01);
  CHECK(r.point == p);
  CHECK(r.value == 3.0);
  CHECK(r.move.block == 0);  // ties select the lowest block index
  CHECK(r.move.direction == 0);
  CHECK(r.gs == doctest::Approx(0.25 / 1.01).epsilon(1e-14));
}

TEST_CASE("iterate: evaluation budget is at most 2M + 1") {
  auto obj = make_objective("rastrigin", 2, 3);
  const int M = obj.shape().total_size();
  auto p = sample_uniform(obj.shape(), 11);
  const double y = obj.evaluate(p);
  TuningParams params;
  const long long before = obj.evaluations();
  auto r = iterate(p, y, 1.0, obj, params, params.rho1);
  const long long used = obj.evaluations() - before;
  CHECK(r.candidate_evaluations <= 2 * M);
  CHECK(used == r.candidate_evaluations + 1);
}

TEST_CASE("iterate: parallel candidate evaluation matches sequential") {
  auto obj = make_objective("ackley", 3, 4);
  auto p = sample_uniform(obj.shape(), 21);
  const double y = obj.evaluate(p);
  TuningParams params;
  auto seq = iterate(p, y, 1.0, obj, params, params.rho1, 1);
  auto par = iterate(p, y, 1.0, obj, params, params.rho1, 4);
  CHECK(seq.point == par.point);
  CHECK(seq.value == par.value);
  CHECK(seq.move.block == par.move.block);
  CHECK(seq.move.coordinate == par.move.coordinate);
  CHECK(seq.move.direction == par.move.direction);
}

TEST_CASE("run_stage1: 1-D convex quadratic reaches the interior optimum") {
  SimplexObjective obj(BlockShape{2}, [](const BlockPoint& p) {
    const double t = p[0][0] - 0.25;
    return t * t;
  });
  TuningParams params;
  auto r = run_stage1({{0.5, 0.5}}, params.rho1, obj, params);
  CHECK(std::abs(r.point[0][0] - 0.25) <= 5e-4);
  CHECK(r.value <= 2.5e-7);
  CHECK(r.stop_reason == RunStop::cc1);
}

TEST_CASE("run_stage1: constant objective stops by CC1, not max_iter") {
  auto obj = constant_objective(BlockShape{3}, 1.5);
  TuningParams params;
  BlockPoint p0{{0.2, 0.3, 0.5}};
  auto r = run_stage1(p0, params.rho1, obj, params);
  CHECK(r.stop_reason == RunStop::cc1);
  CHECK(r.iterations < params.max_iter);
  CHECK(r.point == p0);
  CHECK(r.value == 1.5);
}

TEST_CASE("run_stage1: linear objective reaches the best vertex") {
  SimplexObjective obj(BlockShape{3}, [](const BlockPoint& p) {
    return 3.0 * p[0][0] + 1.0 * p[0][1] + 2.0 * p[0][2];
  });
  TuningParams params;
  auto r = run_stage1({{1.0 / 3, 1.0 / 3, 1.0 / 3}}, params.rho1, obj, params);
  CHECK(r.point[0][1] >= 0.999);
  CHECK(std::abs(r.value - 1.0) <= 1e-3);
}

TEST_CASE("run_stage1 rejects infeasible or mismatched starts") {
  auto obj = first_coordinate_objective();
  TuningParams params;
  CHECK_THROWS_AS(run_stage1({{0.4, 0.4}}, 1.01, obj, params),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_stage1({{0.2, 0.3, 0.5}}, 1.01, obj, params),
                  std::invalid_argument);
}

TEST_CASE("optimize: constant objective runs exactly twice") {
  auto obj = constant_objective(BlockShape{2, 2}, 42.0);
  TuningParams params;
  BlockPoint p0{{0.5, 0.5}, {0.25, 0.75}};
  auto r = optimize(p0, obj, params);
  CHECK(r.runs == 2);
  CHECK(r.value == 42.0);
  CHECK(r.point == p0);
  CHECK(r.stop_reason == OptimizeStop::cc2);
}

TEST_CASE("optimize: modified Sphere n=1 d=5 converges from any seed") {
  TuningParams params;
  for (std::uint64_t seed : {3u, 17u, 99u}) {
    auto obj = make_objective("sphere", 1, 5);
    auto p0 = sample_uniform(obj.shape(), seed);
    auto r = optimize(p0, obj, params);
    CHECK(r.value <= 1e-3);
  }
}

TEST_CASE("optimize: converged quadratic uses at most 3 runs") {
  SimplexObjective obj(BlockShape{2}, [](const BlockPoint& p) {
    const double t = p[0][0] - 0.25;
    return t * t;
  });
  TuningParams params;
  auto r = optimize({{0.5, 0.5}}, obj, params);
  CHECK(std::abs(r.point[0][0] - 0.25) <= 5e-4);
  CHECK(r.value <= 2.5e-7);
  CHECK(r.runs <= 3);
}

TEST_CASE("optimize: every evaluated point is feasible") {
  BlockShape shape{6, 3};
  auto lifted = lift_to_simplex(make_benchmark("rastrigin", 5));
  SimplexObjective obj(shape, [&](const BlockPoint& p) {
    REQUIRE(is_feasible(p, 1e-12));
    return lifted(p[0]) + p[1][0] * p[1][0];
  });
  TuningParams params;
  auto r = optimize(sample_uniform(shape, 4), obj, params);
  CHECK(std::isfinite(r.value));
}

TEST_CASE("optimize: monotone within runs and across runs") {
  auto obj = make_objective("griewank", 2, 3);
  TuningParams params;
  std::vector<TraceRecord> records;
  OptimizeOptions opts;
  opts.trace = [&](const TraceRecord& t) { records.push_back(t); };
  auto r = optimize(sample_uniform(obj.shape(), 8), obj, params, opts);
  REQUIRE(!records.empty());

  double prev = std::numeric_limits<double>::infinity();
  int prev_run = 0;
  double run_final = std::numeric_limits<double>::infinity();
  for (const auto& t : records) {
    if (t.run != prev_run) {
      // A new run starts from the previous run's output.
      CHECK(t.best_value <= run_final + 1e-12);
      prev_run = t.run;
    } else {
      CHECK(t.best_value <= prev + 1e-12);
    }
    prev = t.best_value;
    run_final = t.best_value;
  }
  CHECK(r.value <= records.front().best_value);
}

TEST_CASE("optimize: single-block update per iteration") {
  auto obj = make_objective("ackley", 3, 3);
  TuningParams params;
  BlockPoint p = sample_uniform(obj.shape(), 31);
  double y = obj.evaluate(p);
  double gs = params.s_initial;
  for (int h = 0; h < 50; ++h) {
    auto r = iterate(p, y, gs, obj, params, params.rho1);
    int changed = 0;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (r.point[j] != p[j]) ++changed;
    CHECK(changed <= 1);
    p = r.point;
    y = r.value;
    gs = r.gs;
    if (r.stop) break;
  }
}

TEST_CASE("optimize: deterministic, bit-identical repeats") {
  TuningParams params;
  auto run_once = [&](unsigned threads) {
    auto obj = make_objective("rastrigin", 2, 4);
    OptimizeOptions opts;
    opts.eval_threads = threads;
    auto r = optimize(sample_uniform(obj.shape(), 12345), obj, params, opts);
    return std::make_tuple(r.point, r.value, r.runs, obj.evaluations());
  };
  auto a = run_once(1);
  auto b = run_once(1);
  CHECK(a == b);
  // Concurrency never changes the selected moves or the counts.
  auto c = run_once(3);
  CHECK(a == c);
}
