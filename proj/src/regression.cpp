#include "fbgtpe/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fbgtpe::reg {

std::vector<int> nodes_for_fibers(const sensor::SensorGeometry& geom,
                                  const std::string& fibers) {
  if (fibers.empty()) throw std::invalid_argument("fiber selection is empty");
  std::vector<int> selection;
  for (char c : fibers) {
    const int fiber = c - 'a';
    if (fiber < 0 || fiber >= geom.fiber_count)
      throw std::invalid_argument(std::string("unknown fiber '") + c + "'");
    for (int j = 0; j < geom.nodes_per_fiber; ++j)
      selection.push_back(fiber * geom.nodes_per_fiber + j);
  }
  std::sort(selection.begin(), selection.end());
  if (std::adjacent_find(selection.begin(), selection.end()) != selection.end())
    throw std::invalid_argument("fiber selection repeats a fiber");
  return selection;
}

TrainingSet assemble(const std::vector<frames::AlignedPair>& pairs,
                     const std::vector<Eigen::Vector3d>& targets_mm,
                     const std::vector<int>& node_selection, bool bias_column,
                     const std::vector<double>* full_reference) {
  if (pairs.empty()) throw std::invalid_argument("no training pairs");
  if (targets_mm.size() != pairs.size())
    throw std::invalid_argument("targets and pairs differ in length");
  if (node_selection.empty()) throw std::invalid_argument("node selection is empty");

  const auto n = static_cast<Eigen::Index>(pairs.size());
  const auto m = static_cast<Eigen::Index>(node_selection.size());
  TrainingSet ts;
  ts.node_selection = node_selection;
  ts.bias_column = bias_column;
  if (full_reference) {
    for (int idx : node_selection) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= full_reference->size())
        throw std::invalid_argument("delta reference is missing node " + std::to_string(idx));
      ts.delta_reference.push_back((*full_reference)[static_cast<std::size_t>(idx)]);
    }
  }
  ts.design.resize(n, m + (bias_column ? 1 : 0));
  ts.targets.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& w = pairs[static_cast<std::size_t>(i)].wavelengths_nm;
    for (Eigen::Index j = 0; j < m; ++j) {
      const int idx = node_selection[static_cast<std::size_t>(j)];
      if (idx < 0 || static_cast<std::size_t>(idx) >= w.size())
        throw std::invalid_argument("node selection references node " + std::to_string(idx) +
                                    " absent from pair " + std::to_string(i));
      double v = w[static_cast<std::size_t>(idx)];
      if (!std::isfinite(v))
        throw std::invalid_argument("non-finite wavelength in pair " + std::to_string(i));
      if (!ts.delta_reference.empty()) v -= ts.delta_reference[static_cast<std::size_t>(j)];
      ts.design(i, j) = v;
    }
    if (bias_column) ts.design(i, m) = 1.0;
    ts.targets.row(i) = targets_mm[static_cast<std::size_t>(i)].transpose();
  }
  return ts;
}

TrainingSet assemble(const std::vector<frames::AlignedPair>& pairs,
                     const std::vector<int>& node_selection, bool bias_column,
                     const std::vector<double>* full_reference) {
  std::vector<Eigen::Vector3d> targets;
  targets.reserve(pairs.size());
  for (const auto& p : pairs) targets.push_back(p.tip_mm);
  return assemble(pairs, targets, node_selection, bias_column, full_reference);
}

RegressionModel train(const TrainingSet& ts, std::uint64_t geometry_fingerprint) {
  const Eigen::Index n = ts.design.rows();
  const Eigen::Index cols = ts.design.cols();
  if (n < cols)
    throw std::invalid_argument("underdetermined: " + std::to_string(n) +
                                " observations for " + std::to_string(cols) + " columns");
  if (ts.targets.rows() != n) throw std::invalid_argument("design/target row mismatch");

  RegressionModel model;
  model.node_selection = ts.node_selection;
  model.bias_column = ts.bias_column;
  model.delta_reference = ts.delta_reference;
  model.geometry_fingerprint = geometry_fingerprint;

  // Rank-revealing orthogonal factorization: minimum-norm least squares,
  // stable for raw wavelength columns that sit ~1550 nm apart from their
  // nm-scale variation.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ts.design);
  model.parameters = cod.solve(ts.targets);

  const Eigen::VectorXd sv = ts.design.bdcSvd().singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  model.condition_estimate = (smin > 0.0) ? smax / smin
                                          : std::numeric_limits<double>::infinity();
  model.condition_warning = !(model.condition_estimate < kConditionWarnThreshold);

  const Eigen::MatrixXd residual = ts.design * model.parameters - ts.targets;
  model.training_residual_mm =
      std::sqrt(residual.squaredNorm() / static_cast<double>(n));
  return model;
}

Eigen::Vector3d predict(const RegressionModel& model,
                        const std::vector<double>& wavelengths_nm) {
  const auto m = static_cast<Eigen::Index>(model.node_selection.size());
  if (model.parameters.rows() != m + (model.bias_column ? 1 : 0))
    throw std::invalid_argument("model parameters inconsistent with node selection");
  if (!model.delta_reference.empty() &&
      model.delta_reference.size() != model.node_selection.size())
    throw std::invalid_argument("model delta reference inconsistent with node selection");
  Eigen::VectorXd x(model.parameters.rows());
  for (Eigen::Index j = 0; j < m; ++j) {
    const int idx = model.node_selection[static_cast<std::size_t>(j)];
    if (idx < 0 || static_cast<std::size_t>(idx) >= wavelengths_nm.size())
      throw std::invalid_argument("frame is missing node " + std::to_string(idx) +
                                  " required by the model");
    double v = wavelengths_nm[static_cast<std::size_t>(idx)];
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite wavelength input");
    if (!model.delta_reference.empty()) v -= model.delta_reference[static_cast<std::size_t>(j)];
    x(j) = v;
  }
  if (model.bias_column) x(m) = 1.0;
  return model.parameters.transpose() * x;
}

Eigen::Vector3d predict(const RegressionModel& model, const sensor::WavelengthFrame& frame) {
  return predict(model, frame.wavelengths_nm);
}

RegressionModel ablate(const std::vector<frames::AlignedPair>& pairs,
                       const sensor::SensorGeometry& geom, const std::string& fibers,
                       bool bias_column, std::uint64_t geometry_fingerprint,
                       bool delta_inputs) {
  const std::vector<double>* reference = delta_inputs ? &geom.base_wavelengths_nm : nullptr;
  return train(assemble(pairs, nodes_for_fibers(geom, fibers), bias_column, reference),
               geometry_fingerprint);
}

}  // namespace fbgtpe::reg
