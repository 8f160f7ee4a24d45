#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "fbgtpe/exec.hpp"
#include "fbgtpe/frames.hpp"
#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::eval {

inline constexpr double kDeflectionSplitMm = 10.0;

struct StratumStats {
  double mean_mm = 0.0;
  double std_mm = 0.0;
  double max_mm = 0.0;
  std::size_t count = 0;
};

// Euclidean tip-error statistics for one method. Deflection is the distance
// of the true tip from the straight pose, stratified at 10 mm.
struct ErrorReport {
  std::string method;
  std::vector<double> errors_mm;      // per test sample
  std::vector<double> deflections_mm;
  double mean_mm = 0.0;
  double std_mm = 0.0;
  double max_mm = 0.0;
  std::size_t count = 0;
  StratumStats small_deflection;  // <= 10 mm
  StratumStats large_deflection;  // > 10 mm
};

ErrorReport make_report(std::string method, std::vector<double> errors_mm,
                        std::vector<double> deflections_mm);

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Seed-deterministic uniform split without replacement; disjoint and
// exhaustive.
Split split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

enum class Method { conventional, regression_1f, regression_2f, regression_3f };
std::string method_name(Method m);

struct Protocol {
  double train_fraction = 0.7;
  int repeats = 10;
  std::uint64_t seed = 0;
  int n_segments = 1000;
  int model_order = 1;
  bool bias = true;
  // Score against the noisy tracker tips instead of the exact truth,
  // emulating measurement-limited ground truth.
  bool eval_vs_tracker = false;
};

struct MethodOutcome {
  Method method = Method::conventional;
  bool ok = false;
  std::string error;
  ErrorReport report;
};

// Trains and evaluates every requested method on one shared split. The
// conventional method consumes the same test frames without training, with
// the estimator geometry. A failing method is recorded, not fatal to the
// others.
std::vector<MethodOutcome> compare(const std::vector<frames::AlignedPair>& pairs,
                                   const std::vector<Eigen::Vector3d>& truth_tips_mm,
                                   const sensor::SensorGeometry& estimator_geom,
                                   const std::vector<Method>& methods,
                                   const Protocol& protocol, Exec exec = Exec::parallel);

struct RepeatedEvalResult {
  std::vector<ErrorReport> reports;  // one per repeat, seeds = seed + index
  double mean_of_means_mm = 0.0;
  double std_of_means_mm = 0.0;
};

// Repeated random-split evaluation of one method.
RepeatedEvalResult repeated_eval(const std::vector<frames::AlignedPair>& pairs,
                                 const std::vector<Eigen::Vector3d>& truth_tips_mm,
                                 const sensor::SensorGeometry& estimator_geom,
                                 Method method, const Protocol& protocol,
                                 Exec exec = Exec::parallel);

}  // namespace fbgtpe::eval
