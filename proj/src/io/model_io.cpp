#include "fbgtpe/io/model_io.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

#include "fbgtpe/io/keyvalue.hpp"

namespace fbgtpe::io {

namespace {

std::string to_hex(std::uint64_t v) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, v, 16);
  return std::string(buf, res.ptr);
}

std::uint64_t from_hex(const std::string& s, const std::string& context) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument(context + ": bad hex value '" + s + "'");
  return v;
}

}  // namespace

std::string serialize_model(const reg::RegressionModel& model) {
  KeyValueFile kv;
  kv.set_ints("model", "node_selection", model.node_selection);
  kv.set_bool("model", "bias", model.bias_column);
  if (!model.delta_reference.empty())
    kv.set_doubles("model", "delta_reference_nm", model.delta_reference);
  kv.set_string("model", "geometry_fingerprint", to_hex(model.geometry_fingerprint));
  kv.set_double("model", "training_residual_mm", model.training_residual_mm);
  kv.set_double("model", "condition_estimate", model.condition_estimate);
  kv.set_bool("model", "condition_warning", model.condition_warning);
  kv.set_int("parameters", "rows", model.parameters.rows());
  kv.set_int("parameters", "cols", model.parameters.cols());
  for (Eigen::Index i = 0; i < model.parameters.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(model.parameters.cols()));
    for (Eigen::Index j = 0; j < model.parameters.cols(); ++j)
      row[static_cast<std::size_t>(j)] = model.parameters(i, j);
    kv.set_doubles("parameters", "row_" + std::to_string(i), row);
  }
  return kv.serialize();
}

void save_model(const reg::RegressionModel& model, const std::string& path) {
  write_file_atomic(path, serialize_model(model));
}

reg::RegressionModel load_model(const std::string& path) {
  const auto kv = KeyValueFile::load(path);
  reg::RegressionModel model;
  model.node_selection = kv.get_ints("model", "node_selection");
  model.bias_column = kv.get_bool("model", "bias");
  if (kv.has("model", "delta_reference_nm")) {
    model.delta_reference = kv.get_doubles("model", "delta_reference_nm");
    if (model.delta_reference.size() != model.node_selection.size())
      throw std::invalid_argument(path + ": delta reference length mismatch");
  }
  model.geometry_fingerprint =
      from_hex(kv.get_string("model", "geometry_fingerprint"), path);
  model.training_residual_mm = kv.get_double("model", "training_residual_mm");
  model.condition_estimate = kv.get_double("model", "condition_estimate");
  model.condition_warning = kv.get_bool("model", "condition_warning");

  const int rows = kv.get_int("parameters", "rows");
  const int cols = kv.get_int("parameters", "cols");
  if (rows < 1 || cols != 3)
    throw std::invalid_argument(path + ": parameter matrix must be m x 3");
  const int expected =
      static_cast<int>(model.node_selection.size()) + (model.bias_column ? 1 : 0);
  if (rows != expected)
    throw std::invalid_argument(path + ": parameter rows inconsistent with node selection");
  model.parameters.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto row = kv.get_doubles("parameters", "row_" + std::to_string(i));
    if (row.size() != static_cast<std::size_t>(cols))
      throw std::invalid_argument(path + ": row_" + std::to_string(i) + " has wrong length");
    for (int j = 0; j < cols; ++j) model.parameters(i, j) = row[static_cast<std::size_t>(j)];
  }
  return model;
}

}  // namespace fbgtpe::io
