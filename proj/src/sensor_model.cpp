#include "fbgtpe/sensor_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fbgtpe::sensor {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normalize_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

double SensorGeometry::fiber_azimuth_rad(int fiber) const {
  double psi = 0.0;
  for (int i = 0; i < fiber; ++i) psi += angular_gaps_rad[static_cast<std::size_t>(i)];
  return psi;
}

bool SensorGeometry::is_symmetric(double tol) const {
  if (fiber_count != 3) return false;
  const double r0 = radial_offsets_mm[0];
  for (double r : radial_offsets_mm)
    if (std::abs(r - r0) > tol * std::max(1.0, r0)) return false;
  const double third = kTwoPi / 3.0;
  for (double g : angular_gaps_rad)
    if (std::abs(g - third) > tol) return false;
  return true;
}

void SensorGeometry::validate() const {
  if (fiber_count < 1) fail("fiber_count must be >= 1");
  if (nodes_per_fiber < 1) fail("nodes_per_fiber must be >= 1");
  if (radial_offsets_mm.size() != static_cast<std::size_t>(fiber_count))
    fail("radial_offsets_mm must have one entry per fiber");
  for (double r : radial_offsets_mm)
    if (!(r > 0.0)) fail("radial_offsets_mm entries must be > 0");
  if (angular_gaps_rad.size() != static_cast<std::size_t>(fiber_count - 1))
    fail("angular_gaps_rad must have fiber_count - 1 entries");
  for (double g : angular_gaps_rad)
    if (!(g > 0.0) || !(g < kTwoPi)) fail("angular_gaps_rad entries must lie in (0, 2*pi)");
  if (node_arc_positions_mm.size() != static_cast<std::size_t>(nodes_per_fiber))
    fail("node_arc_positions_mm must have one entry per cross section");
  if (!(sensor_length_mm > 0.0)) fail("sensor_length_mm must be > 0");
  double prev = 0.0;
  for (double s : node_arc_positions_mm) {
    if (!(s > prev)) fail("node_arc_positions_mm must be strictly increasing and > 0");
    if (s > sensor_length_mm) fail("node_arc_positions_mm must not exceed sensor_length_mm");
    prev = s;
  }
  if (base_wavelengths_nm.size() != static_cast<std::size_t>(node_count()))
    fail("base_wavelengths_nm must have fiber_count * nodes_per_fiber entries");
  for (double w : base_wavelengths_nm)
    if (!(w > 0.0) || !std::isfinite(w)) fail("base_wavelengths_nm entries must be finite and > 0");
  if (!(strain_optic_coefficient > 0.0) || !(strain_optic_coefficient < 1.0))
    fail("strain_optic_coefficient out of range (0, 1)");
  if (!(cdm_length_mm > 0.0)) fail("cdm_length_mm must be > 0");
  if (!std::isfinite(center_offset_mm)) fail("center_offset_mm must be finite");
}

std::vector<double> wavelength_to_strain(const WavelengthFrame& frame,
                                         const SensorGeometry& geom) {
  const std::size_t m = static_cast<std::size_t>(geom.node_count());
  if (frame.wavelengths_nm.size() != m)
    fail("wavelength frame has " + std::to_string(frame.wavelengths_nm.size()) +
         " values, geometry expects " + std::to_string(m));
  std::vector<double> strains(m);
  const double denom_scale = 1.0 - geom.strain_optic_coefficient;
  for (std::size_t k = 0; k < m; ++k) {
    const double lambda = frame.wavelengths_nm[k];
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      fail("non-finite or non-positive wavelength at node " + std::to_string(k));
    const double base = geom.base_wavelengths_nm[k];
    strains[k] = (lambda - base) / (base * denom_scale);
  }
  return strains;
}

std::array<double, 3> forward_strains(double curvature_inv_m, double bend_angle_rad,
                                      double common_strain, const SensorGeometry& geom) {
  if (geom.fiber_count != 3)
    fail("forward_strains requires a three-fiber geometry");
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double r_m = geom.radial_offsets_mm[static_cast<std::size_t>(k)] * 1e-3;
    const double psi = geom.fiber_azimuth_rad(k);
    out[static_cast<std::size_t>(k)] =
        -curvature_inv_m * r_m * std::sin(bend_angle_rad + psi) + common_strain;
  }
  return out;
}

namespace {

double residual_norm(const std::array<double, 3>& strains, double kappa, double phi,
                     double e0, const SensorGeometry& geom) {
  const auto model = forward_strains(kappa, phi, e0, geom);
  double ss = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = strains[static_cast<std::size_t>(k)] - model[static_cast<std::size_t>(k)];
    ss += d * d;
  }
  return std::sqrt(ss);
}

// Damped Gauss-Newton on (kappa, phi, e0). Only exercised when the direct
// solve leaves residual above tolerance (e.g. perturbed inputs on a nearly
// degenerate geometry).
void polish(const std::array<double, 3>& strains, const SensorGeometry& geom,
            double& kappa, double& phi, double& e0, const SolveOptions& opts) {
  double lambda = 1e-8;
  double res = residual_norm(strains, kappa, phi, e0, geom);
  for (int it = 0; it < opts.max_iterations && res > opts.tolerance; ++it) {
    Eigen::Matrix3d J;
    Eigen::Vector3d r;
    for (int k = 0; k < 3; ++k) {
      const double r_m = geom.radial_offsets_mm[static_cast<std::size_t>(k)] * 1e-3;
      const double psi = geom.fiber_azimuth_rad(k);
      const double model = -kappa * r_m * std::sin(phi + psi) + e0;
      r(k) = strains[static_cast<std::size_t>(k)] - model;
      J(k, 0) = -r_m * std::sin(phi + psi);
      J(k, 1) = -kappa * r_m * std::cos(phi + psi);
      J(k, 2) = 1.0;
    }
    const Eigen::Matrix3d H = J.transpose() * J + lambda * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d step = H.ldlt().solve(J.transpose() * r);
    const double k_new = kappa + step(0);
    const double p_new = phi + step(1);
    const double e_new = e0 + step(2);
    const double res_new = residual_norm(strains, k_new, p_new, e_new, geom);
    if (res_new < res) {
      kappa = k_new;
      phi = p_new;
      e0 = e_new;
      res = res_new;
      lambda = std::max(lambda * 0.25, 1e-12);
    } else {
      lambda *= 8.0;
    }
  }
}

}  // namespace

CrossSectionState solve_cross_section(const std::array<double, 3>& strains,
                                      const SensorGeometry& geom, int section_index,
                                      const SolveOptions& opts) {
  if (geom.fiber_count != 3)
    fail("insufficient nodes per cross section: the conventional solve needs three fibers");
  if (section_index < 0 || section_index >= geom.nodes_per_fiber)
    fail("section_index out of range");
  for (double e : strains)
    if (!std::isfinite(e)) fail("non-finite strain input");

  CrossSectionState state;
  state.arc_position_mm = geom.node_arc_positions_mm[static_cast<std::size_t>(section_index)];

  const double mean = (strains[0] + strains[1] + strains[2]) / 3.0;
  const double spread = std::max({strains[0], strains[1], strains[2]}) -
                        std::min({strains[0], strains[1], strains[2]});
  if (spread <= 10.0 * opts.tolerance) {
    // Pure common-mode strain: curvature zero, bend plane meaningless.
    state.curvature_inv_m = 0.0;
    state.bend_angle_rad = 0.0;
    state.common_strain = mean;
    state.bend_plane_undefined = true;
    return state;
  }

  double u, v, e0;  // u = kappa*sin(phi), v = kappa*cos(phi)
  if (geom.is_symmetric()) {
    // With equal radii at 120 degrees the sines cancel: the mean is the
    // common strain and two differences give the bend components.
    const double r_m = geom.radial_offsets_mm[0] * 1e-3;
    e0 = mean;
    u = -(strains[0] - e0) / r_m;
    v = -(strains[1] - strains[2]) / (std::sqrt(3.0) * r_m);
  } else {
    // The model is linear in (u, v, e0); solve directly.
    Eigen::Matrix3d M;
    Eigen::Vector3d b;
    for (int k = 0; k < 3; ++k) {
      const double r_m = geom.radial_offsets_mm[static_cast<std::size_t>(k)] * 1e-3;
      const double psi = geom.fiber_azimuth_rad(k);
      M(k, 0) = -r_m * std::cos(psi);
      M(k, 1) = -r_m * std::sin(psi);
      M(k, 2) = 1.0;
      b(k) = strains[static_cast<std::size_t>(k)];
    }
    Eigen::ColPivHouseholderQR<Eigen::Matrix3d> qr(M);
    if (qr.rank() < 3)
      fail("degenerate geometry: fiber placement leaves the cross-section system singular");
    const Eigen::Vector3d x = qr.solve(b);
    u = x(0);
    v = x(1);
    e0 = x(2);
  }

  double kappa = std::hypot(u, v);
  double phi = kappa > 0.0 ? normalize_angle(std::atan2(u, v)) : 0.0;
  polish(strains, geom, kappa, phi, e0, opts);

  if (kappa < 0.0) {  // fold a negative polish result back into the angle
    kappa = -kappa;
    phi += std::numbers::pi;
  }
  phi = normalize_angle(phi);

  const double res = residual_norm(strains, kappa, phi, e0, geom);
  if (res > opts.tolerance)
    throw std::runtime_error("cross-section solve did not converge, residual " +
                             std::to_string(res));

  state.curvature_inv_m = kappa;
  state.bend_angle_rad = phi;
  state.common_strain = e0;
  if (kappa <= 1e-12) {
    state.curvature_inv_m = 0.0;
    state.bend_angle_rad = 0.0;
    state.bend_plane_undefined = true;
  }
  return state;
}

std::vector<CrossSectionState> solve_sections(const WavelengthFrame& frame,
                                              const SensorGeometry& geom,
                                              const SolveOptions& opts) {
  if (geom.fiber_count != 3)
    fail("insufficient nodes per cross section: the conventional solve needs three fibers");
  const auto strains = wavelength_to_strain(frame, geom);
  std::vector<CrossSectionState> sections;
  sections.reserve(static_cast<std::size_t>(geom.nodes_per_fiber));
  for (int j = 0; j < geom.nodes_per_fiber; ++j) {
    std::array<double, 3> s{};
    for (int k = 0; k < 3; ++k)
      s[static_cast<std::size_t>(k)] =
          strains[static_cast<std::size_t>(k * geom.nodes_per_fiber + j)];
    sections.push_back(solve_cross_section(s, geom, j, opts));
  }
  return sections;
}

}  // namespace fbgtpe::sensor
