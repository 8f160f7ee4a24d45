#pragma once

#include <numbers>

#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::testing {

// Nominal triangular sensor used throughout the tests: three fibers at
// 120 degrees, three cross sections, sensor spanning the manipulator.
inline sensor::SensorGeometry nominal_geometry() {
  sensor::SensorGeometry g;
  g.fiber_count = 3;
  g.nodes_per_fiber = 3;
  g.radial_offsets_mm = {0.5, 0.5, 0.5};
  const double third = 2.0 * std::numbers::pi / 3.0;
  g.angular_gaps_rad = {third, third};
  g.node_arc_positions_mm = {9.0, 18.0, 27.0};
  g.base_wavelengths_nm = {1529, 1533, 1537, 1541, 1545, 1549, 1553, 1557, 1561};
  g.strain_optic_coefficient = 0.22;
  g.sensor_length_mm = 35.5;
  g.center_offset_mm = 2.0;
  g.cdm_length_mm = 35.5;
  return g;
}

// Same layout with unequal radii and non-uniform gaps.
inline sensor::SensorGeometry asymmetric_geometry() {
  sensor::SensorGeometry g = nominal_geometry();
  g.radial_offsets_mm = {0.45, 0.55, 0.60};
  g.angular_gaps_rad = {1.9, 2.3};
  return g;
}

}  // namespace fbgtpe::testing
