//
// file: benchmarks.hpp
//
// The four classic hypercube test functions, an affine lift that turns a
// box-constrained benchmark into a simplex-block objective with one inert
// slack coordinate, and the n-block sum used by the experiment harness.
//
// Each function comes in two variants: "canonical" is the standard
// textbook form with its global minimum value of 0 at the origin;
// "paper_literal" keeps a few commonly circulated transcription quirks
// (Rastrigin without the factor 10 on the cosine, Ackley with 0.5 in
// place of 1/d, Griewank without the leading 1). Canonical is the default
// everywhere.
//

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simplexopt/engine.hpp"
#include "simplexopt/simplex.hpp"

namespace simplexopt {

enum class Variant { canonical, paper_literal };

inline std::string to_string(Variant v) {
  return v == Variant::canonical ? "canonical" : "paper_literal";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "canonical") return Variant::canonical;
  if (s == "paper_literal") return Variant::paper_literal;
  throw std::invalid_argument("unknown variant: " + s);
}

inline double rastrigin(std::span<const double> x,
                        Variant v = Variant::canonical) {
  const double cos_weight = v == Variant::canonical ? 10.0 : 1.0;
  double sum = 10.0 * static_cast<double>(x.size());
  for (double xi : x)
    sum += xi * xi - cos_weight * std::cos(2.0 * std::numbers::pi * xi);
  return sum;
}

inline double ackley(std::span<const double> x, Variant v = Variant::canonical) {
  const double scale =
      v == Variant::canonical ? 1.0 / static_cast<double>(x.size()) : 0.5;
  double sq = 0.0, cs = 0.0;
  for (double xi : x) {
    sq += xi * xi;
    cs += std::cos(2.0 * std::numbers::pi * xi);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(scale * sq)) - std::exp(scale * cs) +
         std::numbers::e + 20.0;
}

inline double sphere(std::span<const double> x, Variant = Variant::canonical) {
  double sum = 0.0;
  for (double xi : x) sum += xi * xi;
  return sum;
}

inline double griewank(std::span<const double> x,
                       Variant v = Variant::canonical) {
  double sum = v == Variant::canonical ? 1.0 : 0.0;
  double prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i] / 4000.0;
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum - prod;
}

/// A named test function on the box [lower, upper]^d.
struct HypercubeBenchmark {
  std::string name;
  int d = 0;
  double lower = 0.0;
  double upper = 0.0;
  Variant variant = Variant::canonical;
  double (*eval)(std::span<const double>, Variant) = nullptr;

  double operator()(std::span<const double> x) const { return eval(x, variant); }
};

inline const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"ackley", "griewank",
                                                 "rastrigin", "sphere"};
  return names;
}

/// Default boxes: Rastrigin/Sphere [-5.12, 5.12], Ackley [-5, 5],
/// Griewank [-500, 500].
inline HypercubeBenchmark make_benchmark(const std::string& name, int d,
                                         Variant v = Variant::canonical) {
  if (d < 1) throw std::invalid_argument("make_benchmark: d must be >= 1");
  if (name == "rastrigin") return {name, d, -5.12, 5.12, v, &rastrigin};
  if (name == "ackley") return {name, d, -5.0, 5.0, v, &ackley};
  if (name == "sphere") return {name, d, -5.12, 5.12, v, &sphere};
  if (name == "griewank") return {name, d, -500.0, 500.0, v, &griewank};
  throw std::invalid_argument("unknown benchmark: " + name);
}

/// The benchmark composed with the map y_i -> (u-l)*d*y_i + l on the
/// first d coordinates of a (d+1)-simplex vector. The slack coordinate
/// completes the simplex and never enters the value. No clamping: the
/// formula extends naturally outside [0, 1/d]^d.
struct LiftedObjective {
  HypercubeBenchmark base;

  double operator()(const SimplexVector& ybar) const {
    if (static_cast<int>(ybar.size()) != base.d + 1)
      throw std::invalid_argument("LiftedObjective: block must have size d+1");
    const double scale = (base.upper - base.lower) * static_cast<double>(base.d);
    std::vector<double> x(base.d);
    for (int i = 0; i < base.d; ++i) x[i] = scale * ybar[i] + base.lower;
    return base(x);
  }

  /// Box point -> simplex block: y_i = (x_i - l) / (d*(u - l)), slack last.
  SimplexVector lift_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != base.d)
      throw std::invalid_argument("lift_point: expected a d-vector");
    const double scale = (base.upper - base.lower) * static_cast<double>(base.d);
    SimplexVector y(base.d + 1);
    double sum = 0.0;
    for (int i = 0; i < base.d; ++i) {
      y[i] = (x[i] - base.lower) / scale;
      sum += y[i];
    }
    y[base.d] = 1.0 - sum;
    return y;
  }
};

inline LiftedObjective lift_to_simplex(HypercubeBenchmark base) {
  return LiftedObjective{std::move(base)};
}

/// The n-block sum H(y_1,...,y_n) = sum_v h(y_v), each block on Delta^d.
inline SimplexObjective multi_block(LiftedObjective lifted, int n) {
  if (n < 1) throw std::invalid_argument("multi_block: n must be >= 1");
  BlockShape shape(std::vector<int>(n, lifted.base.d + 1));
  return SimplexObjective(
      std::move(shape), [lifted = std::move(lifted)](const BlockPoint& p) {
        double sum = 0.0;
        for (const auto& block : p) sum += lifted(block);
        return sum;
      });
}

inline SimplexObjective make_objective(const std::string& name, int n, int d,
                                       Variant v = Variant::canonical) {
  return multi_block(lift_to_simplex(make_benchmark(name, d, v)), n);
}

/// Minimizer of the lifted n-block objective for canonical variants,
/// whose box-space optimum sits at the origin: every block has
/// y_i = -l/(d*(u-l)) and the slack takes the rest; the value is 0.
inline std::pair<BlockPoint, double> known_optimum(const HypercubeBenchmark& base,
                                                   int n) {
  if (base.variant != Variant::paper_literal) {
    const double yi =
        -base.lower / (static_cast<double>(base.d) * (base.upper - base.lower));
    SimplexVector block(base.d + 1, yi);
    block[base.d] = 1.0 - static_cast<double>(base.d) * yi;
    return {BlockPoint(n, block), 0.0};
  }
  throw std::invalid_argument(
      "known_optimum: unsupported for paper_literal variants");
}

}  // namespace simplexopt
