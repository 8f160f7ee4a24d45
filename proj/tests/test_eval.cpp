#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbgtpe/eval_harness.hpp"
#include "fbgtpe/io/keyvalue.hpp"
#include "fbgtpe/simulator.hpp"
#include "test_support.hpp"

using namespace fbgtpe;
using fbgtpe::testing::nominal_geometry;

namespace {

// Aligned pairs whose tips are an exact linear map of the wavelengths.
std::pair<std::vector<frames::AlignedPair>, std::vector<Eigen::Vector3d>> exact_linear_data(
    int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 2.0);
  Eigen::MatrixXd B(9, 3);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 3; ++j) B(i, j) = noise(rng) * 0.1;
  std::vector<frames::AlignedPair> pairs;
  std::vector<Eigen::Vector3d> truth;
  for (int r = 0; r < n; ++r) {
    frames::AlignedPair p;
    p.timestamp_s = 0.05 * r;
    Eigen::VectorXd x(9);
    p.wavelengths_nm.resize(9);
    for (int k = 0; k < 9; ++k) {
      const double w = 1550.0 + noise(rng);
      p.wavelengths_nm[static_cast<std::size_t>(k)] = w;
      x(k) = w;
    }
    p.tip_mm = B.transpose() * x;
    pairs.push_back(p);
    truth.push_back(p.tip_mm);
  }
  return {pairs, truth};
}

std::string serialize_report(const eval::ErrorReport& r) {
  std::string s = r.method;
  for (double e : r.errors_mm) s += ',' + io::format_double(e);
  return s;
}

}  // namespace

TEST_CASE("split is deterministic, disjoint and exhaustive") {
  const auto s = eval::split_indices(10, 0.7, 42);
  CHECK(s.train.size() == 7);
  CHECK(s.test.size() == 3);
  const auto s2 = eval::split_indices(10, 0.7, 42);
  CHECK(s.train == s2.train);
  CHECK(s.test == s2.test);
  const auto s3 = eval::split_indices(10, 0.7, 43);
  CHECK(s.train != s3.train);

  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  CHECK(*all.rbegin() == 9);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
}

TEST_CASE("split proportions hold across seeds") {
  double fraction_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = eval::split_indices(97, 0.7, seed);
    fraction_sum += static_cast<double>(s.train.size()) / 97.0;
  }
  CHECK(std::abs(fraction_sum / 1000.0 - 0.7) < 0.01);
}

TEST_CASE("split rejects degenerate requests") {
  CHECK_THROWS_AS((void)eval::split_indices(1, 0.7, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)eval::split_indices(10, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)eval::split_indices(10, 1.0, 0), std::invalid_argument);
}

TEST_CASE("report aggregates match recomputation and strata sum to the total") {
  const std::vector<double> errors{0.5, 1.5, 2.5, 3.5};
  const std::vector<double> deflections{5.0, 9.0, 15.0, 25.0};
  const auto r = eval::make_report("demo", errors, deflections);
  double mean = 0;
  for (double e : errors) mean += e / 4.0;
  CHECK(r.mean_mm == mean);
  CHECK(r.max_mm == 3.5);
  CHECK(r.mean_mm <= r.max_mm);
  CHECK(r.std_mm >= 0.0);
  CHECK(r.count == 4);
  CHECK(r.small_deflection.count + r.large_deflection.count == r.count);
  CHECK(r.small_deflection.count == 2);
  CHECK(r.small_deflection.mean_mm == doctest::Approx(1.0));
  CHECK(r.large_deflection.mean_mm == doctest::Approx(3.0));
}

TEST_CASE("repeated evaluation on exact linear data reports zero error") {
  const auto g = nominal_geometry();
  const auto [pairs, truth] = exact_linear_data(60, 9);
  eval::Protocol protocol;
  protocol.repeats = 5;
  const auto result = eval::repeated_eval(pairs, truth, g, eval::Method::regression_3f,
                                          protocol, Exec::serial);
  REQUIRE(result.reports.size() == 5);
  for (const auto& rep : result.reports) CHECK(rep.mean_mm < 1e-6);
  CHECK(result.std_of_means_mm <= result.mean_of_means_mm + 1e-12);

  eval::Protocol once = protocol;
  once.repeats = 1;
  const auto single =
      eval::repeated_eval(pairs, truth, g, eval::Method::regression_3f, once, Exec::serial);
  CHECK(single.std_of_means_mm == 0.0);
}

TEST_CASE("test indices never leak into the training set") {
  const auto [pairs, truth] = exact_linear_data(40, 3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = eval::split_indices(pairs.size(), 0.7, seed);
    std::set<std::size_t> train(s.train.begin(), s.train.end());
    for (std::size_t t : s.test) CHECK(train.count(t) == 0);
  }
}

TEST_CASE("matched zero-noise scenario scores near zero for every method") {
  const auto g = nominal_geometry();
  // small curvature keeps the wavelength-to-tip map in its linear regime
  auto sc = sim::BendingScenario::matched(5.0, 0.5);
  sc.duration_s = 20.0;
  const auto result = sim::simulate(sc, g, Exec::serial);
  const auto ds = sim::make_dataset(result);
  eval::Protocol protocol;
  const auto outcomes =
      eval::compare(ds.pairs, ds.truth_tips_mm, result.estimator_geometry,
                    {eval::Method::conventional, eval::Method::regression_1f,
                     eval::Method::regression_2f, eval::Method::regression_3f},
                    protocol, Exec::serial);
  for (const auto& o : outcomes) {
    REQUIRE(o.ok);
    CHECK(o.report.mean_mm < 0.1);
  }
}

TEST_CASE("conventional report is identical with and without the other methods") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::paper_default(11);
  sc.duration_s = 6.0;
  const auto result = sim::simulate(sc, g, Exec::serial);
  const auto ds = sim::make_dataset(result);
  eval::Protocol protocol;
  const auto alone = eval::compare(ds.pairs, ds.truth_tips_mm, result.estimator_geometry,
                                   {eval::Method::conventional}, protocol, Exec::serial);
  const auto together =
      eval::compare(ds.pairs, ds.truth_tips_mm, result.estimator_geometry,
                    {eval::Method::regression_3f, eval::Method::conventional,
                     eval::Method::regression_1f},
                    protocol, Exec::serial);
  REQUIRE(alone.size() == 1);
  const auto* conv = &together[1];
  REQUIRE(conv->method == eval::Method::conventional);
  CHECK(serialize_report(alone[0].report) == serialize_report(conv->report));
}

TEST_CASE("a failing method is recorded without aborting the others") {
  const auto g = nominal_geometry();
  const auto [pairs_full, truth_full] = exact_linear_data(14, 21);
  // 14 pairs -> 10 train rows < 10 columns only for the 3-fiber model with
  // bias; with 9 train rows it is underdetermined
  const std::vector<frames::AlignedPair> pairs(pairs_full.begin(), pairs_full.begin() + 13);
  const std::vector<Eigen::Vector3d> truth(truth_full.begin(), truth_full.begin() + 13);
  eval::Protocol protocol;
  const auto outcomes = eval::compare(pairs, truth, g,
                                      {eval::Method::conventional, eval::Method::regression_3f},
                                      protocol, Exec::serial);
  REQUIRE(outcomes.size() == 2);
  CHECK(outcomes[0].ok);
  CHECK_FALSE(outcomes[1].ok);
  CHECK(outcomes[1].error.find("underdetermined") != std::string::npos);
}
