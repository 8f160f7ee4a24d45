#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fbgtpe/regression.hpp"
#include "fbgtpe/shape_recon.hpp"
#include "fbgtpe/simulator.hpp"
#include "test_support.hpp"

using namespace fbgtpe;
using fbgtpe::testing::nominal_geometry;

TEST_CASE("zero curvature scenario produces base wavelengths and a constant tip") {
  const auto g = nominal_geometry();
  const auto sc = sim::BendingScenario::matched(0.0);
  const auto result = sim::simulate(sc, g, Exec::serial);
  for (const auto& frame : result.wavelengths)
    for (std::size_t k = 0; k < frame.wavelengths_nm.size(); ++k)
      CHECK(frame.wavelengths_nm[k] == g.base_wavelengths_nm[k]);
  for (const auto& tip : result.truth)
    CHECK((tip.position_mm - Eigen::Vector3d(0, 0, g.cdm_length_mm)).norm() < 1e-9);
}

TEST_CASE("identical seeds give bit-identical streams") {
  const auto g = nominal_geometry();
  const auto a = sim::simulate(sim::BendingScenario::paper_default(5), g);
  const auto b = sim::simulate(sim::BendingScenario::paper_default(5), g);
  REQUIRE(a.wavelengths.size() == b.wavelengths.size());
  for (std::size_t i = 0; i < a.wavelengths.size(); ++i)
    CHECK(a.wavelengths[i].wavelengths_nm == b.wavelengths[i].wavelengths_nm);
  REQUIRE(a.tracker.size() == b.tracker.size());
  for (std::size_t i = 0; i < a.tracker.size(); ++i)
    CHECK(a.tracker[i].position_mm == b.tracker[i].position_mm);

  const auto c = sim::simulate(sim::BendingScenario::paper_default(6), g);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.wavelengths.size() && !any_diff; ++i)
    any_diff = a.wavelengths[i].wavelengths_nm != c.wavelengths[i].wavelengths_nm;
  CHECK(any_diff);
}

TEST_CASE("matched constant-curvature truth agrees with the closed-form arc") {
  const auto g = nominal_geometry();
  const double kappa = 50.0, phi = 0.6;
  const auto sc = sim::BendingScenario::matched(kappa, phi);
  const double theta = kappa * 1e-3 * g.cdm_length_mm;
  const double rho = 1000.0 / kappa;
  const Eigen::Matrix3d Rz = Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const Eigen::Matrix3d Ry = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Vector3d d(1, 0, 0);
  const Eigen::Vector3d expected =
      Rz * Eigen::Vector3d(rho * (1 - std::cos(theta)), 0, rho * std::sin(theta)) +
      g.center_offset_mm * (d - (Rz * Ry * Rz.transpose()) * d);
  CHECK((sim::exact_cdm_tip(sc, g, sc.duration_s) - expected).norm() < 1e-6);
}

TEST_CASE("conventional pipeline closes the loop on matched data") {
  const auto g = nominal_geometry();
  const auto sc = sim::BendingScenario::matched(20.0, 0.4);
  const auto result = sim::simulate(sc, g, Exec::serial);
  const auto& frame = result.wavelengths.back();
  recon::EstimatorOptions opts;
  opts.n_segments = 1000;
  const auto tip = recon::tip_estimate(frame, result.estimator_geometry, opts);
  const auto truth = sim::exact_cdm_tip(sc, g, frame.timestamp_s);
  CHECK((tip - truth).norm() < 0.05);
}

TEST_CASE("radial-offset mismatch error grows with deflection") {
  const auto g = nominal_geometry();
  sim::MismatchSpec mismatch;
  mismatch.radial_offset_scale = 0.05;
  const auto bad_geom = sim::apply_mismatch(g, mismatch);
  recon::EstimatorOptions opts;
  double last_error = -1.0;
  for (double kappa : {10.0, 20.0, 30.0, 40.0, 50.0}) {
    const auto sc = sim::BendingScenario::matched(kappa, 0.3);
    const auto result = sim::simulate(sc, g, Exec::serial);
    const auto& frame = result.wavelengths.back();
    const auto tip = recon::tip_estimate(frame, bad_geom, opts);
    const double err = (tip - sim::exact_cdm_tip(sc, g, frame.timestamp_s)).norm();
    CHECK(err > last_error);
    last_error = err;
  }
  CHECK(last_error > 0.3);  // 5 percent radius error is clearly visible at 50 1/m
}

TEST_CASE("mismatch knobs perturb only the estimator geometry") {
  const auto g = nominal_geometry();
  sim::MismatchSpec mm;
  mm.radial_offset_scale = 0.05;
  mm.angular_error_rad = 0.01;
  mm.node_position_error_mm = 0.4;
  const auto out = sim::apply_mismatch(g, mm);
  CHECK(out.radial_offsets_mm[0] == doctest::Approx(0.525));
  CHECK(out.angular_gaps_rad[0] == doctest::Approx(g.angular_gaps_rad[0] + 0.01));
  CHECK(out.node_arc_positions_mm[0] == doctest::Approx(9.4));
  CHECK(out.cdm_length_mm == g.cdm_length_mm);

  auto sc = sim::BendingScenario::matched(30.0);
  sc.mismatch = mm;
  const auto result = sim::simulate(sc, g, Exec::serial);
  // streams are generated from the true geometry: straight-pose wavelengths
  // at t = 0 equal the base wavelengths regardless of mismatch
  CHECK(result.wavelengths.front().wavelengths_nm == g.base_wavelengths_nm);
}

TEST_CASE("wavelength deltas are exactly linear in curvature at fixed phase") {
  const auto g = nominal_geometry();
  const auto r1 = sim::simulate(sim::BendingScenario::matched(0.5, 0.7), g, Exec::serial);
  const auto r2 = sim::simulate(sim::BendingScenario::matched(1.0, 0.7), g, Exec::serial);
  const auto& f1 = r1.wavelengths.back();
  const auto& f2 = r2.wavelengths.back();
  for (std::size_t k = 0; k < f1.wavelengths_nm.size(); ++k) {
    const double d1 = f1.wavelengths_nm[k] - g.base_wavelengths_nm[k];
    const double d2 = f2.wavelengths_nm[k] - g.base_wavelengths_nm[k];
    if (std::abs(d1) < 1e-12) continue;  // node on the bend plane
    CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("wavelength noise raises the regression training residual") {
  const auto g = nominal_geometry();
  double mean_quiet = 0.0, mean_noisy = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    for (double noise : {0.005, 0.05}) {
      auto sc = sim::BendingScenario::paper_default(static_cast<std::uint64_t>(100 + s));
      sc.duration_s = 8.0;
      sc.wavelength_noise_nm = noise;
      sc.tracker_noise_mm = 0.0;
      const auto result = sim::simulate(sc, g, Exec::serial);
      const auto ds = sim::make_dataset(result);
      const auto model = reg::ablate(ds.pairs, g, "abc", true);
      (noise < 0.01 ? mean_quiet : mean_noisy) += model.training_residual_mm / seeds;
    }
  }
  CHECK(mean_noisy > mean_quiet);
}

TEST_CASE("trajectories beyond the curvature bound are rejected") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::matched(60.0);
  sc.curvature_bound_inv_m = 50.0;
  CHECK_THROWS_WITH_AS((void)sim::simulate(sc, g, Exec::serial),
                       doctest::Contains("curvature bound"), std::invalid_argument);
}

TEST_CASE("default scenario stays within the documented envelope") {
  const auto g = nominal_geometry();
  const auto sc = sim::BendingScenario::paper_default(1);
  sc.validate();
  double max_deflection = 0.0;
  const Eigen::Vector3d straight(0, 0, g.cdm_length_mm);
  for (int i = 0; i <= 40; ++i) {
    const double t = sc.duration_s * i / 40.0;
    max_deflection =
        std::max(max_deflection, (sim::exact_cdm_tip(sc, g, t) - straight).norm());
  }
  CHECK(max_deflection > 15.0);
  CHECK(max_deflection < 30.0);
}

TEST_CASE("injected clock offset skews the aligned pairs") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::paper_default(8);
  sc.duration_s = 10.0;
  sc.wavelength_noise_nm = 0.0;
  sc.tracker_noise_mm = 0.0;
  const auto clean = sim::make_dataset(sim::simulate(sc, g, Exec::serial));
  sc.tracker_clock_offset_s = 0.25;
  const auto skewed = sim::make_dataset(sim::simulate(sc, g, Exec::serial));
  REQUIRE(!skewed.pairs.empty());
  CHECK(skewed.pairs.size() == skewed.truth_tips_mm.size());
  // the skewed stream pairs each tip with wavelengths from 0.25 s later
  CHECK(skewed.pairs.front().timestamp_s ==
        doctest::Approx(clean.pairs.front().timestamp_s + 0.25));
  bool any_diff = false;
  for (std::size_t i = 0; i < std::min(clean.pairs.size(), skewed.pairs.size()); ++i)
    if (clean.pairs[i].wavelengths_nm != skewed.pairs[i].wavelengths_nm) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("dataset assembly pairs tracker samples with exact truth") {
  const auto g = nominal_geometry();
  auto sc = sim::BendingScenario::paper_default(3);
  sc.duration_s = 5.0;
  const auto result = sim::simulate(sc, g, Exec::serial);
  const auto ds = sim::make_dataset(result);
  REQUIRE(ds.pairs.size() == ds.truth_tips_mm.size());
  CHECK(ds.pairs.size() + ds.dropped == result.tracker.size());
  // tracker-derived tips differ from the exact truth only by the tracker noise
  double max_gap = 0.0;
  for (std::size_t i = 0; i < ds.pairs.size(); ++i)
    max_gap = std::max(max_gap, (ds.pairs[i].tip_mm - ds.truth_tips_mm[i]).norm());
  CHECK(max_gap < 6.0 * sc.tracker_noise_mm);
  CHECK(max_gap > 0.0);
}
