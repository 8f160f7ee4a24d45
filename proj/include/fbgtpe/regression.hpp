#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "fbgtpe/frames.hpp"
#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::reg {

// Paired observations for training: raw wavelengths against tip positions.
// delta_reference, when non-empty, holds per-selected-node wavelengths that
// are subtracted from the inputs (delta-from-straight-pose preprocessing, an
// extension over the raw default).
struct TrainingSet {
  Eigen::MatrixXd design;   // N x (selected nodes [+ bias column of ones])
  Eigen::MatrixXd targets;  // N x 3, mm
  std::vector<int> node_selection;  // wavelength indices, ascending
  bool bias_column = true;
  std::vector<double> delta_reference;  // empty = raw inputs
};

struct RegressionModel {
  Eigen::MatrixXd parameters;  // design columns x 3
  std::vector<int> node_selection;
  bool bias_column = true;
  std::vector<double> delta_reference;  // empty = raw inputs
  double training_residual_mm = 0.0;    // RMS of per-sample Euclidean error
  double condition_estimate = 0.0;
  bool condition_warning = false;
  std::uint64_t geometry_fingerprint = 0;
};

inline constexpr double kConditionWarnThreshold = 1e12;

// Wavelength indices belonging to the named fibers, e.g. "a", "ab", "abc".
std::vector<int> nodes_for_fibers(const sensor::SensorGeometry& geom,
                                  const std::string& fibers);

// full_reference, when given, carries one wavelength per node of the full
// sensor; the selected entries become the training set's delta_reference.
TrainingSet assemble(const std::vector<frames::AlignedPair>& pairs,
                     const std::vector<int>& node_selection, bool bias_column,
                     const std::vector<double>* full_reference = nullptr);

// Variant with explicit targets (overrides the tips carried by the pairs).
TrainingSet assemble(const std::vector<frames::AlignedPair>& pairs,
                     const std::vector<Eigen::Vector3d>& targets_mm,
                     const std::vector<int>& node_selection, bool bias_column,
                     const std::vector<double>* full_reference = nullptr);

// Minimum-norm least-squares fit via a rank-revealing orthogonal
// factorization. Requires at least as many observations as design columns.
// An ill-conditioned design sets condition_warning instead of failing.
RegressionModel train(const TrainingSet& ts, std::uint64_t geometry_fingerprint = 0);

Eigen::Vector3d predict(const RegressionModel& model,
                        const std::vector<double>& wavelengths_nm);
Eigen::Vector3d predict(const RegressionModel& model,
                        const sensor::WavelengthFrame& frame);

// assemble + train restricted to a fiber subset. delta_inputs switches on
// the delta-from-straight-pose mode using the geometry's base wavelengths.
RegressionModel ablate(const std::vector<frames::AlignedPair>& pairs,
                       const sensor::SensorGeometry& geom, const std::string& fibers,
                       bool bias_column, std::uint64_t geometry_fingerprint = 0,
                       bool delta_inputs = false);

}  // namespace fbgtpe::reg
