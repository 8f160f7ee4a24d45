#include "fbgtpe/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "fbgtpe/regression.hpp"
#include "fbgtpe/shape_recon.hpp"

namespace fbgtpe::eval {

namespace {

StratumStats stats_of(const std::vector<double>& values) {
  StratumStats st;
  st.count = values.size();
  if (values.empty()) return st;
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    st.max_mm = std::max(st.max_mm, v);
  }
  st.mean_mm = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - st.mean_mm) * (v - st.mean_mm);
  st.std_mm = std::sqrt(ss / static_cast<double>(values.size()));
  return st;
}

std::vector<int> fibers_for(Method m) {
  switch (m) {
    case Method::regression_1f: return {0};
    case Method::regression_2f: return {0, 1};
    case Method::regression_3f: return {0, 1, 2};
    default: return {};
  }
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::conventional: return "conventional";
    case Method::regression_1f: return "regression-1f";
    case Method::regression_2f: return "regression-2f";
    case Method::regression_3f: return "regression-3f";
  }
  return "unknown";
}

ErrorReport make_report(std::string method, std::vector<double> errors_mm,
                        std::vector<double> deflections_mm) {
  if (errors_mm.size() != deflections_mm.size())
    throw std::invalid_argument("errors and deflections differ in length");
  ErrorReport report;
  report.method = std::move(method);
  report.errors_mm = std::move(errors_mm);
  report.deflections_mm = std::move(deflections_mm);
  report.count = report.errors_mm.size();

  const StratumStats all = stats_of(report.errors_mm);
  report.mean_mm = all.mean_mm;
  report.std_mm = all.std_mm;
  report.max_mm = all.max_mm;

  std::vector<double> small, large;
  for (std::size_t i = 0; i < report.errors_mm.size(); ++i) {
    if (report.deflections_mm[i] <= kDeflectionSplitMm)
      small.push_back(report.errors_mm[i]);
    else
      large.push_back(report.errors_mm[i]);
  }
  report.small_deflection = stats_of(small);
  report.large_deflection = stats_of(large);
  return report;
}

Split split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  if (n < 2) throw std::invalid_argument("need at least 2 samples to split");
  auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n - 1);

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(indices.begin(), indices.end(), rng);

  Split split;
  split.train.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(k));
  split.test.assign(indices.begin() + static_cast<std::ptrdiff_t>(k), indices.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

// Shared evaluation context for one split.
struct EvalContext {
  const std::vector<frames::AlignedPair>& pairs;
  const std::vector<Eigen::Vector3d>& truth;
  const sensor::SensorGeometry& geom;
  const Protocol& protocol;
  Split split;
};

ErrorReport evaluate_method(const EvalContext& ctx, Method method, Exec exec) {
  const auto& pairs = ctx.pairs;
  const auto& protocol = ctx.protocol;
  const Eigen::Vector3d straight_tip(0.0, 0.0, ctx.geom.cdm_length_mm);

  auto target_of = [&](std::size_t i) -> Eigen::Vector3d {
    return protocol.eval_vs_tracker ? pairs[i].tip_mm : ctx.truth[i];
  };

  std::vector<Eigen::Vector3d> estimates(ctx.split.test.size());
  if (method == Method::conventional) {
    std::vector<sensor::WavelengthFrame> test_frames;
    test_frames.reserve(ctx.split.test.size());
    for (std::size_t i : ctx.split.test)
      test_frames.push_back({pairs[i].timestamp_s, pairs[i].wavelengths_nm});
    recon::EstimatorOptions opts;
    opts.n_segments = protocol.n_segments;
    opts.model_order = protocol.model_order;
    estimates = (exec == Exec::parallel)
                    ? recon::estimate_tips_batch(test_frames, ctx.geom, opts)
                    : recon::estimate_tips_batch_serial(test_frames, ctx.geom, opts);
  } else {
    std::string fibers;
    for (int f : fibers_for(method)) fibers.push_back(static_cast<char>('a' + f));
    std::vector<frames::AlignedPair> train_pairs;
    train_pairs.reserve(ctx.split.train.size());
    for (std::size_t i : ctx.split.train) train_pairs.push_back(pairs[i]);
    const auto model = reg::ablate(train_pairs, ctx.geom, fibers, protocol.bias);
    for (std::size_t t = 0; t < ctx.split.test.size(); ++t)
      estimates[t] = reg::predict(model, pairs[ctx.split.test[t]].wavelengths_nm);
  }

  std::vector<double> errors, deflections;
  errors.reserve(estimates.size());
  deflections.reserve(estimates.size());
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    const std::size_t i = ctx.split.test[t];
    errors.push_back((estimates[t] - target_of(i)).norm());
    deflections.push_back((ctx.truth[i] - straight_tip).norm());
  }
  return make_report(method_name(method), std::move(errors), std::move(deflections));
}

}  // namespace

std::vector<MethodOutcome> compare(const std::vector<frames::AlignedPair>& pairs,
                                   const std::vector<Eigen::Vector3d>& truth_tips_mm,
                                   const sensor::SensorGeometry& estimator_geom,
                                   const std::vector<Method>& methods,
                                   const Protocol& protocol, Exec exec) {
  if (pairs.size() != truth_tips_mm.size())
    throw std::invalid_argument("pairs and truth tips differ in length");
  if (methods.empty()) throw std::invalid_argument("no methods requested");

  EvalContext ctx{pairs, truth_tips_mm, estimator_geom, protocol,
                  split_indices(pairs.size(), protocol.train_fraction, protocol.seed)};

  std::vector<MethodOutcome> outcomes;
  outcomes.reserve(methods.size());
  for (Method m : methods) {
    MethodOutcome outcome;
    outcome.method = m;
    try {
      outcome.report = evaluate_method(ctx, m, exec);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
      outcome.report.method = method_name(m);
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

RepeatedEvalResult repeated_eval(const std::vector<frames::AlignedPair>& pairs,
                                 const std::vector<Eigen::Vector3d>& truth_tips_mm,
                                 const sensor::SensorGeometry& estimator_geom,
                                 Method method, const Protocol& protocol, Exec exec) {
  if (protocol.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (pairs.size() != truth_tips_mm.size())
    throw std::invalid_argument("pairs and truth tips differ in length");

  RepeatedEvalResult result;
  result.reports.resize(static_cast<std::size_t>(protocol.repeats));
  std::exception_ptr first_error;
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int r = 0; r < protocol.repeats; ++r) {
    try {
      EvalContext ctx{pairs, truth_tips_mm, estimator_geom, protocol,
                      split_indices(pairs.size(), protocol.train_fraction,
                                    protocol.seed + static_cast<std::uint64_t>(r))};
      // Inner batch stays serial; the repeats are the parallel dimension.
      result.reports[static_cast<std::size_t>(r)] =
          evaluate_method(ctx, method, Exec::serial);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<double> means;
  means.reserve(result.reports.size());
  for (const auto& rep : result.reports) means.push_back(rep.mean_mm);
  const StratumStats st = stats_of(means);
  result.mean_of_means_mm = st.mean_mm;
  result.std_of_means_mm = st.std_mm;
  return result;
}

}  // namespace fbgtpe::eval
