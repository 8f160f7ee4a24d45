#pragma once

#include <string>

#include "fbgtpe/regression.hpp"

namespace fbgtpe::io {

// Trained model persistence, full decimal precision.
std::string serialize_model(const reg::RegressionModel& model);
void save_model(const reg::RegressionModel& model, const std::string& path);
reg::RegressionModel load_model(const std::string& path);

}  // namespace fbgtpe::io
