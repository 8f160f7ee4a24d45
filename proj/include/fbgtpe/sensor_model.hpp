#pragma once

#include <array>
#include <vector>

namespace fbgtpe::sensor {

// Geometry of a multi-fiber FBG shape sensor and the manipulator it
// instruments. Lengths are millimeters, angles radians; curvature crosses
// API boundaries in 1/m.
struct SensorGeometry {
  int fiber_count = 3;
  int nodes_per_fiber = 3;
  std::vector<double> radial_offsets_mm;      // per fiber, distance from sensor axis
  std::vector<double> angular_gaps_rad;       // between consecutive fibers, fiber_count-1 entries
  std::vector<double> node_arc_positions_mm;  // per cross section, strictly increasing
  std::vector<double> base_wavelengths_nm;    // per node, fiber-major, base to tip
  double strain_optic_coefficient = 0.22;
  double sensor_length_mm = 35.5;
  double center_offset_mm = 0.0;  // sensor axis to manipulator axis
  double cdm_length_mm = 35.5;

  int node_count() const { return fiber_count * nodes_per_fiber; }

  // Cumulative angular position of a fiber around the cross section
  // (fiber 0 sits at azimuth 0).
  double fiber_azimuth_rad(int fiber) const;

  // Three fibers, equal radii, uniform 120 degree spacing.
  bool is_symmetric(double tol = 1e-9) const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// One timestamped reading of all sensor nodes, fiber-major, base to tip.
struct WavelengthFrame {
  double timestamp_s = 0.0;
  std::vector<double> wavelengths_nm;
};

// Curvature, bend-plane angle, and common strain recovered at one cross
// section. Curvature is non-negative; the bend direction is carried by the
// angle, normalized to [0, 2*pi).
struct CrossSectionState {
  double curvature_inv_m = 0.0;
  double bend_angle_rad = 0.0;
  double common_strain = 0.0;
  double arc_position_mm = 0.0;
  bool bend_plane_undefined = false;  // set when curvature is (numerically) zero
};

// Per-node strain from the Bragg wavelength shift. Output order matches the
// input order. Compression gives negative strain.
std::vector<double> wavelength_to_strain(const WavelengthFrame& frame,
                                         const SensorGeometry& geom);

// Strains that a cross section in state (kappa, phi, e0) produces at the
// three fibers. Forward counterpart of solve_cross_section.
std::array<double, 3> forward_strains(double curvature_inv_m, double bend_angle_rad,
                                      double common_strain, const SensorGeometry& geom);

struct SolveOptions {
  double tolerance = 1e-10;  // residual bound, strain units
  int max_iterations = 50;
};

// Recovers (kappa, phi, e0) from the three strains of one cross section.
// Symmetric geometry uses the closed form; general geometry solves the
// linearized system and polishes with damped Gauss-Newton until the residual
// meets the tolerance.
CrossSectionState solve_cross_section(const std::array<double, 3>& strains,
                                      const SensorGeometry& geom, int section_index,
                                      const SolveOptions& opts = {});

// Strain conversion plus per-section solve for a whole frame.
std::vector<CrossSectionState> solve_sections(const WavelengthFrame& frame,
                                              const SensorGeometry& geom,
                                              const SolveOptions& opts = {});

}  // namespace fbgtpe::sensor
