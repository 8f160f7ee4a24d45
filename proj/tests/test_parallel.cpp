#include <doctest.h>

#include "fbgtpe/eval_harness.hpp"
#include "fbgtpe/shape_recon.hpp"
#include "fbgtpe/simulator.hpp"
#include "test_support.hpp"

using namespace fbgtpe;
using fbgtpe::testing::nominal_geometry;

// The OpenMP kernels must reproduce the serial reference bit for bit.

TEST_CASE("batch tip estimation: parallel equals serial") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::paper_default(2);
  sc.duration_s = 4.0;
  const auto result = sim::simulate(sc, g, Exec::serial);
  recon::EstimatorOptions opts;
  opts.n_segments = 200;
  const auto serial =
      recon::estimate_tips_batch_serial(result.wavelengths, result.estimator_geometry, opts);
  const auto parallel =
      recon::estimate_tips_batch(result.wavelengths, result.estimator_geometry, opts);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("simulation: parallel equals serial") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::paper_default(3);
  sc.duration_s = 4.0;
  const auto a = sim::simulate(sc, g, Exec::serial);
  const auto b = sim::simulate(sc, g, Exec::parallel);
  REQUIRE(a.wavelengths.size() == b.wavelengths.size());
  for (std::size_t i = 0; i < a.wavelengths.size(); ++i) {
    CHECK(a.wavelengths[i].timestamp_s == b.wavelengths[i].timestamp_s);
    CHECK(a.wavelengths[i].wavelengths_nm == b.wavelengths[i].wavelengths_nm);
  }
  REQUIRE(a.tracker.size() == b.tracker.size());
  for (std::size_t i = 0; i < a.tracker.size(); ++i) {
    CHECK(a.tracker[i].position_mm == b.tracker[i].position_mm);
    CHECK(a.truth[i].position_mm == b.truth[i].position_mm);
  }
}

TEST_CASE("repeated evaluation: parallel equals serial") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::paper_default(4);
  sc.duration_s = 6.0;
  const auto result = sim::simulate(sc, g, Exec::serial);
  const auto ds = sim::make_dataset(result);
  eval::Protocol protocol;
  protocol.repeats = 6;
  const auto a = eval::repeated_eval(ds.pairs, ds.truth_tips_mm, result.estimator_geometry,
                                     eval::Method::regression_3f, protocol, Exec::serial);
  const auto b = eval::repeated_eval(ds.pairs, ds.truth_tips_mm, result.estimator_geometry,
                                     eval::Method::regression_3f, protocol, Exec::parallel);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t r = 0; r < a.reports.size(); ++r)
    CHECK(a.reports[r].errors_mm == b.reports[r].errors_mm);
  CHECK(a.mean_of_means_mm == b.mean_of_means_mm);
  CHECK(a.std_of_means_mm == b.std_of_means_mm);
}

TEST_CASE("batch estimation propagates per-frame failures") {
  const auto g = nominal_geometry();
  std::vector<sensor::WavelengthFrame> frames(3, {0.0, g.base_wavelengths_nm});
  frames[1].wavelengths_nm.resize(4);  // malformed frame
  CHECK_THROWS_AS((void)recon::estimate_tips_batch(frames, g), std::invalid_argument);
  CHECK_THROWS_AS((void)recon::estimate_tips_batch_serial(frames, g), std::invalid_argument);
}
