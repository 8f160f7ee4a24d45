#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::frames {

// Proper rigid transform with millimeter translation. T_ij maps j-frame
// coordinates into frame i.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_mm = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p_mm) const {
    return rotation * p_mm + translation_mm;
  }
  RigidTransform inverse() const;

  // Validates orthonormality and det = +1; throws std::invalid_argument.
  static RigidTransform checked(const Eigen::Matrix3d& rotation,
                                const Eigen::Vector3d& translation_mm,
                                double tol = 1e-10);
};

bool is_orthonormal(const Eigen::Matrix3d& rotation, double tol = 1e-10);

// Nearest rotation matrix (polar decomposition); used when loading
// transforms whose stored rotation has drifted.
Eigen::Matrix3d reorthonormalize(const Eigen::Matrix3d& rotation);

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

struct TrackedPoint {
  double timestamp_s = 0.0;
  Eigen::Vector3d position_mm = Eigen::Vector3d::Zero();
};

// One-time registration of the straight-pose tip frame s against the
// reference body r, both observed from the tracker at the same instant.
RigidTransform register_straight_pose(const RigidTransform& T_os0,
                                      const RigidTransform& T_or0);

// Maps a tracked marker point from the tracker frame to the manipulator
// base frame through the reference body and the straight-pose registration.
// The result does not depend on where the tracker sits.
Eigen::Vector3d tracker_to_base(const TrackedPoint& p_o,
                                const RigidTransform& T_or_current,
                                const RigidTransform& T_sr0,
                                const sensor::SensorGeometry& geom);

struct AlignedPair {
  double timestamp_s = 0.0;
  std::vector<double> wavelengths_nm;
  Eigen::Vector3d tip_mm = Eigen::Vector3d::Zero();
};

enum class InterpMode { linear, nearest };

struct AlignmentResult {
  std::vector<AlignedPair> pairs;
  std::size_t dropped = 0;  // tip samples outside the wavelength stream span
};

// Interpolates the fast wavelength stream at the slow stream's timestamps.
// Both streams must be strictly increasing in time; tip samples outside the
// wavelength span are dropped and counted.
AlignmentResult align_streams(const std::vector<sensor::WavelengthFrame>& fbg,
                              const std::vector<TrackedPoint>& tips_base,
                              InterpMode mode = InterpMode::linear);

}  // namespace fbgtpe::frames
