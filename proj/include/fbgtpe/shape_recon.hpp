#pragma once

#include <Eigen/Core>
#include <vector>

#include "fbgtpe/exec.hpp"
#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::recon {

// Polynomial models kappa = f(s) and phi = g(s) over sensor arc length.
// Coefficients are stored in ascending powers of s (mm); kappa evaluates in
// 1/m, phi in radians.
struct CurvatureProfile {
  std::vector<double> kappa_coeffs;
  std::vector<double> phi_coeffs;
  double domain_min_mm = 0.0;
  double domain_max_mm = 0.0;
  std::vector<sensor::CrossSectionState> source_sections;

  double kappa_at(double s_mm) const;
  double phi_at(double s_mm) const;
};

// Least-squares polynomial fit of the per-section states. Bend angles are
// unwrapped before fitting; sections with an undefined bend plane contribute
// to the curvature fit only.
CurvatureProfile fit_profiles(const std::vector<sensor::CrossSectionState>& sections,
                              int model_order = 1);

// Piecewise circular-arc reconstruction. Base frame: z along the straight
// axis, zero bend angle deflects toward +x, the bend angle rotates the bend
// plane about z.
struct ReconstructedShape {
  std::vector<Eigen::Vector3d> points_mm;  // n+1 points, base first
  double segment_length_mm = 0.0;
  const Eigen::Vector3d& tip() const { return points_mm.back(); }
};

ReconstructedShape integrate_shape(const CurvatureProfile& profile,
                                   const sensor::SensorGeometry& geom, int n_segments);

struct EstimatorOptions {
  int n_segments = 1000;
  int model_order = 1;
  // Azimuth of the sensor-to-manipulator offset direction in the local
  // cross-section frame. The center shift acts along this radial direction;
  // whether it should instead follow the bend plane is not settled, so it is
  // an explicit knob.
  double shift_azimuth_rad = 0.0;
};

// Full conventional pipeline for one frame: strain conversion, per-section
// solve, profile fit, integration, center-line shift. Returns the
// manipulator tip in the base frame. Stage failures rethrow with the stage
// name prefixed.
Eigen::Vector3d tip_estimate(const sensor::WavelengthFrame& frame,
                             const sensor::SensorGeometry& geom,
                             const EstimatorOptions& opts = {});

// Same pipeline, returning the whole shifted center-line polyline.
ReconstructedShape reconstruct_centerline(const sensor::WavelengthFrame& frame,
                                          const sensor::SensorGeometry& geom,
                                          const EstimatorOptions& opts = {});

// Reference serial batch estimator.
std::vector<Eigen::Vector3d> estimate_tips_batch_serial(
    const std::vector<sensor::WavelengthFrame>& frames,
    const sensor::SensorGeometry& geom, const EstimatorOptions& opts = {});

// OpenMP batch estimator; matches the serial reference bit for bit.
std::vector<Eigen::Vector3d> estimate_tips_batch(
    const std::vector<sensor::WavelengthFrame>& frames,
    const sensor::SensorGeometry& geom, const EstimatorOptions& opts = {});

}  // namespace fbgtpe::recon
