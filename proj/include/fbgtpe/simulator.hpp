#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fbgtpe/exec.hpp"
#include "fbgtpe/frames.hpp"
#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::sim {

// Geometry perturbations handed to the estimators. The generating model
// always uses the true geometry; these knobs stand in for manufacturing and
// calibration error.
struct MismatchSpec {
  double radial_offset_scale = 0.0;     // relative, 0.05 = 5 percent
  double angular_error_rad = 0.0;       // added to every inter-fiber gap
  double node_position_error_mm = 0.0;  // added to every node arc position
  bool profile_order_mismatch = false;  // quadratic true curvature vs the estimator's linear fit
};

// Time-parameterized true state of the bend. With u = s / sensor_length and
// w = t / duration:
//   kappa(s,t) [1/m] = w * [ kappa_scale * q1(u) + mod_scale * sin(2 pi mod_freq t) * q2(u) ]
//   phi(t)           = phi0 + phi_drift * w + phi_amp * sin(2 pi phi_freq t)
//   e0(s,t)          = w * [ strain_base * sin(2 pi strain_base_freq t)
//                            + strain_grad * u * sin(2 pi strain_grad_freq t + 0.8) ]
// q1 and q2 are quadratics in u with coefficients in ascending powers.
struct TrajectoryParams {
  double kappa_scale_inv_m = 0.0;
  std::array<double, 3> shape_primary{1.0, 0.0, 0.0};
  double mod_scale_inv_m = 0.0;
  double mod_freq_hz = 0.0;
  std::array<double, 3> shape_secondary{0.0, 0.0, 0.0};
  double phi0_rad = 0.0;
  double phi_drift_rad = 0.0;
  double phi_amp_rad = 0.0;
  double phi_freq_hz = 0.0;
  double strain_base = 0.0;
  double strain_base_freq_hz = 0.0;
  double strain_grad = 0.0;
  double strain_grad_freq_hz = 0.0;
};

struct BendingScenario {
  TrajectoryParams trajectory;
  double duration_s = 60.0;
  double fbg_rate_hz = 100.0;
  double tracker_rate_hz = 20.0;
  double tracker_phase_s = 0.0125;  // keeps tracker samples off the FBG grid
  // Clock-skew injection for robustness tests: the tracker stream reports
  // its timestamps shifted by this amount while the physical samples stay
  // put. Both streams share one clock when zero (the default).
  double tracker_clock_offset_s = 0.0;
  double wavelength_noise_nm = 0.0;
  double tracker_noise_mm = 0.0;
  MismatchSpec mismatch;
  std::uint64_t seed = 1;
  double curvature_bound_inv_m = 50.0;

  double kappa_at(double u_norm, double t_s) const;  // 1/m
  double phi_at(double t_s) const;
  double common_strain_at(double u_norm, double t_s) const;

  // Throws std::invalid_argument on bad rates/duration/noise, or when the
  // trajectory exceeds the curvature bound anywhere on a dense (u,t) grid.
  void validate() const;

  // Default large-deflection scenario: quadratic curvature profile ramping to
  // a 50 1/m peak (about 22 mm tip deflection), drifting bend plane, slowly
  // varying common-strain profile, 5 percent radial-offset mismatch,
  // 0.02 nm / 0.3 mm noise.
  static BendingScenario paper_default(std::uint64_t seed = 1);

  // Constant curvature, matched geometry, zero noise. For oracle tests.
  static BendingScenario matched(double kappa_inv_m, double phi_rad = 0.0,
                                 std::uint64_t seed = 1);
};

struct SimulationResult {
  std::vector<sensor::WavelengthFrame> wavelengths;  // fbg_rate, noisy
  std::vector<frames::TrackedPoint> tracker;         // tracker frame o, noisy
  std::vector<frames::TrackedPoint> truth;           // base frame b, exact, same timestamps
  sensor::SensorGeometry estimator_geometry;         // mismatched copy for estimators
  frames::RigidTransform T_os0, T_or0, T_or_c;       // synthetic scene
};

SimulationResult simulate(const BendingScenario& scenario,
                          const sensor::SensorGeometry& true_geom,
                          Exec exec = Exec::parallel);

sensor::SensorGeometry apply_mismatch(const sensor::SensorGeometry& geom,
                                      const MismatchSpec& mismatch);

// Exact manipulator center-line tip for the scenario state at time t,
// integrated at high internal resolution. Reference route, independent of
// the estimator pipeline.
Eigen::Vector3d exact_cdm_tip(const BendingScenario& scenario,
                              const sensor::SensorGeometry& geom, double t_s);

// Ready-to-train dataset: wavelengths interpolated at tracker timestamps,
// tracker-derived tips in the base frame, and the exact tips matched to the
// surviving samples.
struct Dataset {
  std::vector<frames::AlignedPair> pairs;
  std::vector<Eigen::Vector3d> truth_tips_mm;
  std::size_t dropped = 0;
};

Dataset make_dataset(const SimulationResult& result,
                     frames::InterpMode mode = frames::InterpMode::linear);

}  // namespace fbgtpe::sim
