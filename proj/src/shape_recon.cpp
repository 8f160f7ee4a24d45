#include "fbgtpe/shape_recon.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fbgtpe::recon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double poly_eval(const std::vector<double>& coeffs, double s) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * s + coeffs[i];
  return acc;
}

std::vector<double> poly_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                             int order) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index cols = order + 1;
  Eigen::MatrixXd V(n, cols);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      V(i, j) = p;
      p *= xs[static_cast<std::size_t>(i)];
    }
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  return std::vector<double>(c.data(), c.data() + cols);
}

// Remove 2*pi jumps so consecutive samples differ by at most pi.
void unwrap_angles(std::vector<double>& angles) {
  for (std::size_t i = 1; i < angles.size(); ++i) {
    const double d = angles[i] - angles[i - 1];
    angles[i] -= kTwoPi * std::round(d / kTwoPi);
  }
}

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d R;
  const double c = std::cos(a), s = std::sin(a);
  R << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return R;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d R;
  const double c = std::cos(a), s = std::sin(a);
  R << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return R;
}

// One constant-curvature segment. kappa in 1/mm, ds in mm. The azimuth
// rotation is undone after the in-plane arc, so a constant bend angle keeps
// the whole curve in one plane.
void advance_segment(Eigen::Matrix3d& R, Eigen::Vector3d& p, double kappa_inv_mm,
                     double phi, double ds) {
  const double dtheta = kappa_inv_mm * ds;
  Eigen::Vector3d local;
  if (std::abs(kappa_inv_mm) < 1e-9) {
    // Removable singularity: second-order series of the arc chord.
    local = Eigen::Vector3d(kappa_inv_mm * ds * ds / 2.0, 0.0, ds);
  } else {
    const double rho = 1.0 / kappa_inv_mm;
    local = Eigen::Vector3d(rho * (1.0 - std::cos(dtheta)), 0.0, rho * std::sin(dtheta));
  }
  const Eigen::Matrix3d Rz = rot_z(phi);
  p += R * (Rz * local);
  R *= Rz * rot_y(dtheta) * rot_z(-phi);
}

struct IntegrationOutput {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Matrix3d> rotations;
  double ds = 0.0;
};

IntegrationOutput integrate_frames(const CurvatureProfile& profile, double length_mm,
                                   int n_segments, bool keep_rotations) {
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  if (!(length_mm > 0.0)) throw std::invalid_argument("integration length must be > 0");

  IntegrationOutput out;
  out.ds = length_mm / n_segments;
  out.points.reserve(static_cast<std::size_t>(n_segments) + 1);
  if (keep_rotations) out.rotations.reserve(static_cast<std::size_t>(n_segments) + 1);

  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  out.points.push_back(p);
  if (keep_rotations) out.rotations.push_back(R);

  for (int i = 0; i < n_segments; ++i) {
    const double s_mid = (i + 0.5) * out.ds;
    const double kappa_inv_m = profile.kappa_at(s_mid);
    const double phi = profile.phi_at(s_mid);
    if (!std::isfinite(kappa_inv_m) || !std::isfinite(phi))
      throw std::runtime_error("profile evaluates to a non-finite value at s = " +
                               std::to_string(s_mid) + " mm");
    advance_segment(R, p, kappa_inv_m * 1e-3, phi, out.ds);
    out.points.push_back(p);
    if (keep_rotations) out.rotations.push_back(R);
  }
  return out;
}

}  // namespace

double CurvatureProfile::kappa_at(double s_mm) const { return poly_eval(kappa_coeffs, s_mm); }
double CurvatureProfile::phi_at(double s_mm) const { return poly_eval(phi_coeffs, s_mm); }

CurvatureProfile fit_profiles(const std::vector<sensor::CrossSectionState>& sections,
                              int model_order) {
  if (model_order < 0) throw std::invalid_argument("model_order must be >= 0");
  const std::size_t need = static_cast<std::size_t>(model_order) + 1;
  if (sections.size() < need)
    throw std::invalid_argument("need at least " + std::to_string(need) +
                                " sections for an order-" + std::to_string(model_order) +
                                " fit");
  std::vector<double> s, kappa;
  s.reserve(sections.size());
  kappa.reserve(sections.size());
  for (const auto& sec : sections) {
    for (double prev : s)
      if (prev == sec.arc_position_mm)
        throw std::invalid_argument("duplicate arc position " +
                                    std::to_string(sec.arc_position_mm) + " mm");
    s.push_back(sec.arc_position_mm);
    kappa.push_back(sec.curvature_inv_m);
  }

  CurvatureProfile profile;
  profile.source_sections = sections;
  profile.domain_min_mm = 0.0;
  profile.domain_max_mm = *std::max_element(s.begin(), s.end());
  profile.kappa_coeffs = poly_fit(s, kappa, model_order);

  // Sections with no defined bend plane carry no angle information.
  std::vector<double> s_phi, phi;
  for (const auto& sec : sections) {
    if (sec.bend_plane_undefined) continue;
    s_phi.push_back(sec.arc_position_mm);
    phi.push_back(sec.bend_angle_rad);
  }
  unwrap_angles(phi);
  if (s_phi.size() >= need) {
    profile.phi_coeffs = poly_fit(s_phi, phi, model_order);
  } else if (!s_phi.empty()) {
    double mean = 0.0;
    for (double v : phi) mean += v;
    profile.phi_coeffs.assign(need, 0.0);
    profile.phi_coeffs[0] = mean / static_cast<double>(phi.size());
  } else {
    profile.phi_coeffs.assign(need, 0.0);
  }
  return profile;
}

ReconstructedShape integrate_shape(const CurvatureProfile& profile,
                                   const sensor::SensorGeometry& geom, int n_segments) {
  auto out = integrate_frames(profile, geom.cdm_length_mm, n_segments, false);
  ReconstructedShape shape;
  shape.points_mm = std::move(out.points);
  shape.segment_length_mm = out.ds;
  return shape;
}

namespace {

ReconstructedShape centerline_pipeline(const sensor::WavelengthFrame& frame,
                                       const sensor::SensorGeometry& geom,
                                       const EstimatorOptions& opts) {
  std::vector<sensor::CrossSectionState> sections;
  try {
    sections = sensor::solve_sections(frame, geom);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("cross-section solve: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("cross-section solve: ") + e.what());
  }

  CurvatureProfile profile;
  try {
    profile = fit_profiles(sections, opts.model_order);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("profile fit: ") + e.what());
  }

  IntegrationOutput out;
  try {
    out = integrate_frames(profile, geom.cdm_length_mm, opts.n_segments, true);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("shape integration: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("shape integration: ") + e.what());
  }

  // Shift the sensor curve onto the manipulator center-line. The offset
  // direction is fixed in each local cross-section frame; at the base the two
  // axes coincide, so straight poses are unaffected.
  const Eigen::Vector3d dir(std::cos(opts.shift_azimuth_rad),
                            std::sin(opts.shift_azimuth_rad), 0.0);
  ReconstructedShape shape;
  shape.segment_length_mm = out.ds;
  shape.points_mm.reserve(out.points.size());
  for (std::size_t i = 0; i < out.points.size(); ++i)
    shape.points_mm.push_back(out.points[i] +
                              geom.center_offset_mm * (dir - out.rotations[i] * dir));
  return shape;
}

}  // namespace

Eigen::Vector3d tip_estimate(const sensor::WavelengthFrame& frame,
                             const sensor::SensorGeometry& geom,
                             const EstimatorOptions& opts) {
  return centerline_pipeline(frame, geom, opts).points_mm.back();
}

ReconstructedShape reconstruct_centerline(const sensor::WavelengthFrame& frame,
                                          const sensor::SensorGeometry& geom,
                                          const EstimatorOptions& opts) {
  return centerline_pipeline(frame, geom, opts);
}

std::vector<Eigen::Vector3d> estimate_tips_batch_serial(
    const std::vector<sensor::WavelengthFrame>& frames,
    const sensor::SensorGeometry& geom, const EstimatorOptions& opts) {
  std::vector<Eigen::Vector3d> tips(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) tips[i] = tip_estimate(frames[i], geom, opts);
  return tips;
}

std::vector<Eigen::Vector3d> estimate_tips_batch(
    const std::vector<sensor::WavelengthFrame>& frames,
    const sensor::SensorGeometry& geom, const EstimatorOptions& opts) {
  std::vector<Eigen::Vector3d> tips(frames.size());
  const auto n = static_cast<std::int64_t>(frames.size());
  std::exception_ptr first_error;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      tips[static_cast<std::size_t>(i)] =
          tip_estimate(frames[static_cast<std::size_t>(i)], geom, opts);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return tips;
}

}  // namespace fbgtpe::recon
