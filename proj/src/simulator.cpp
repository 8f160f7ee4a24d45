#include "fbgtpe/simulator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace fbgtpe::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kTruthSegments = 10000;

double quad_eval(const std::array<double, 3>& c, double u) {
  return c[0] + u * (c[1] + u * c[2]);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-sample draw, independent of evaluation order.
double gauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(stream ^ splitmix64(index))));
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

Eigen::Matrix3d rot_x(double a) {
  Eigen::Matrix3d R;
  const double c = std::cos(a), s = std::sin(a);
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d R;
  const double c = std::cos(a), s = std::sin(a);
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d R;
  const double c = std::cos(a), s = std::sin(a);
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

}  // namespace

double BendingScenario::kappa_at(double u_norm, double t_s) const {
  const double w = t_s / duration_s;
  const auto& tr = trajectory;
  return w * (tr.kappa_scale_inv_m * quad_eval(tr.shape_primary, u_norm) +
              tr.mod_scale_inv_m * std::sin(kTwoPi * tr.mod_freq_hz * t_s) *
                  quad_eval(tr.shape_secondary, u_norm));
}

double BendingScenario::phi_at(double t_s) const {
  const auto& tr = trajectory;
  return tr.phi0_rad + tr.phi_drift_rad * (t_s / duration_s) +
         tr.phi_amp_rad * std::sin(kTwoPi * tr.phi_freq_hz * t_s);
}

double BendingScenario::common_strain_at(double u_norm, double t_s) const {
  const double w = t_s / duration_s;
  const auto& tr = trajectory;
  return w * (tr.strain_base * std::sin(kTwoPi * tr.strain_base_freq_hz * t_s) +
              tr.strain_grad * u_norm * std::sin(kTwoPi * tr.strain_grad_freq_hz * t_s + 0.8));
}

void BendingScenario::validate() const {
  if (!(duration_s > 0.0)) throw std::invalid_argument("duration_s must be > 0");
  if (!(fbg_rate_hz > 0.0) || !(tracker_rate_hz > 0.0))
    throw std::invalid_argument("stream rates must be > 0");
  if (wavelength_noise_nm < 0.0 || tracker_noise_mm < 0.0)
    throw std::invalid_argument("noise standard deviations must be >= 0");
  if (!(curvature_bound_inv_m > 0.0))
    throw std::invalid_argument("curvature_bound_inv_m must be > 0");
  constexpr int kGrid = 201;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double u = static_cast<double>(i) / (kGrid - 1);
      const double t = duration_s * static_cast<double>(j) / (kGrid - 1);
      const double k = kappa_at(u, t);
      if (!std::isfinite(k))
        throw std::invalid_argument("trajectory curvature is non-finite");
      if (std::abs(k) > curvature_bound_inv_m * (1.0 + 1e-9))
        throw std::invalid_argument(
            "trajectory exceeds the curvature bound: |kappa| = " + std::to_string(k) +
            " 1/m at u = " + std::to_string(u) + ", t = " + std::to_string(t));
    }
  }
}

BendingScenario BendingScenario::paper_default(std::uint64_t seed) {
  BendingScenario sc;
  sc.duration_s = 60.0;
  sc.seed = seed;
  sc.wavelength_noise_nm = 0.02;
  sc.tracker_noise_mm = 0.3;
  sc.mismatch.radial_offset_scale = 0.05;
  sc.mismatch.profile_order_mismatch = true;
  auto& tr = sc.trajectory;
  tr.kappa_scale_inv_m = 46.0;
  tr.shape_primary = {0.30, 2.40, -2.20};  // peaks mid-sensor, quadratic in arc length
  tr.mod_scale_inv_m = 2.0;
  tr.mod_freq_hz = 0.13;
  tr.shape_secondary = {0.55, 0.85, -1.05};
  tr.phi0_rad = 0.30;
  tr.phi_drift_rad = 0.50;
  tr.phi_amp_rad = 0.12;
  tr.phi_freq_hz = 0.07;
  tr.strain_base = 5e-4;
  tr.strain_base_freq_hz = 0.23;
  tr.strain_grad = 1.6e-3;
  tr.strain_grad_freq_hz = 0.11;
  return sc;
}

BendingScenario BendingScenario::matched(double kappa_inv_m, double phi_rad,
                                         std::uint64_t seed) {
  BendingScenario sc;
  sc.duration_s = 10.0;
  sc.seed = seed;
  auto& tr = sc.trajectory;
  tr.kappa_scale_inv_m = kappa_inv_m;
  tr.shape_primary = {1.0, 0.0, 0.0};
  tr.phi0_rad = phi_rad;
  sc.curvature_bound_inv_m = std::max(50.0, std::abs(kappa_inv_m) * 1.001);
  return sc;
}

sensor::SensorGeometry apply_mismatch(const sensor::SensorGeometry& geom,
                                      const MismatchSpec& mismatch) {
  sensor::SensorGeometry out = geom;
  for (double& r : out.radial_offsets_mm) r *= 1.0 + mismatch.radial_offset_scale;
  for (double& g : out.angular_gaps_rad) g += mismatch.angular_error_rad;
  for (double& s : out.node_arc_positions_mm) {
    s += mismatch.node_position_error_mm;
    s = std::min(std::max(s, 1e-6), out.sensor_length_mm);
  }
  out.validate();
  return out;
}

Eigen::Vector3d exact_cdm_tip(const BendingScenario& scenario,
                              const sensor::SensorGeometry& geom, double t_s) {
  // Planar integration in the bend plane: exact circular-arc steps over a
  // fine piecewise-constant curvature grid, then the azimuth rotation and the
  // center-line shift. Independent of the estimator-side integrator.
  const double L = geom.cdm_length_mm;
  const double ds = L / kTruthSegments;
  const double phi = scenario.phi_at(t_s);
  double theta = 0.0;
  double x = 0.0, z = 0.0;
  for (int i = 0; i < kTruthSegments; ++i) {
    const double s_mid = (i + 0.5) * ds;
    const double kappa = scenario.kappa_at(s_mid / geom.sensor_length_mm, t_s) * 1e-3;  // 1/mm
    const double dtheta = kappa * ds;
    if (std::abs(kappa) < 1e-12) {
      x += std::sin(theta) * ds;
      z += std::cos(theta) * ds;
    } else {
      const double rho = 1.0 / kappa;
      x += rho * (std::cos(theta) - std::cos(theta + dtheta));
      z += rho * (std::sin(theta + dtheta) - std::sin(theta));
    }
    theta += dtheta;
  }
  const Eigen::Matrix3d Rz = rot_z(phi);
  const Eigen::Vector3d tip_sensor = Rz * Eigen::Vector3d(x, 0.0, z);
  const Eigen::Matrix3d R_tip = Rz * rot_y(theta) * rot_z(-phi);
  const Eigen::Vector3d dir(1.0, 0.0, 0.0);
  return tip_sensor + geom.center_offset_mm * (dir - R_tip * dir);
}

Dataset make_dataset(const SimulationResult& result, frames::InterpMode mode) {
  const frames::RigidTransform T_sr0 =
      frames::register_straight_pose(result.T_os0, result.T_or0);
  std::vector<frames::TrackedPoint> tips_base;
  tips_base.reserve(result.tracker.size());
  for (const auto& p : result.tracker) {
    frames::TrackedPoint q;
    q.timestamp_s = p.timestamp_s;
    q.position_mm =
        frames::tracker_to_base(p, result.T_or_c, T_sr0, result.estimator_geometry);
    tips_base.push_back(q);
  }
  auto aligned = frames::align_streams(result.wavelengths, tips_base, mode);

  Dataset ds;
  ds.pairs = std::move(aligned.pairs);
  ds.dropped = aligned.dropped;
  // Keep the truth entry of every tracker sample that survived alignment;
  // the survival test must use the tracker's reported timestamps (which may
  // carry an injected clock offset), not the truth clock.
  const double t_min = result.wavelengths.front().timestamp_s;
  const double t_max = result.wavelengths.back().timestamp_s;
  if (result.truth.size() != result.tracker.size())
    throw std::runtime_error("truth stream does not match the tracker stream");
  for (std::size_t i = 0; i < result.tracker.size(); ++i)
    if (result.tracker[i].timestamp_s >= t_min && result.tracker[i].timestamp_s <= t_max)
      ds.truth_tips_mm.push_back(result.truth[i].position_mm);
  if (ds.truth_tips_mm.size() != ds.pairs.size())
    throw std::runtime_error("truth stream does not match the aligned pairs");
  return ds;
}

SimulationResult simulate(const BendingScenario& scenario,
                          const sensor::SensorGeometry& true_geom, Exec exec) {
  scenario.validate();
  true_geom.validate();

  SimulationResult result;
  result.estimator_geometry = apply_mismatch(true_geom, scenario.mismatch);

  // Fixed synthetic scene: tracker, reference body, and straight-pose frames
  // all distinct and non-trivially oriented.
  result.T_os0 = frames::RigidTransform{rot_z(0.40) * rot_y(-0.20),
                                        Eigen::Vector3d(120.0, -40.0, 80.0)};
  result.T_or0 = frames::RigidTransform{rot_y(0.30) * rot_x(0.10),
                                        Eigen::Vector3d(-60.0, 90.0, 150.0)};
  result.T_or_c = frames::RigidTransform{rot_z(-0.70) * rot_x(0.25),
                                         Eigen::Vector3d(200.0, 30.0, -90.0)};

  const int m = true_geom.node_count();
  const double pe = true_geom.strain_optic_coefficient;
  const auto n_fbg =
      static_cast<std::int64_t>(std::floor(scenario.duration_s * scenario.fbg_rate_hz)) + 1;
  result.wavelengths.assign(static_cast<std::size_t>(n_fbg), sensor::WavelengthFrame{});

  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < n_fbg; ++i) {
    const double t = static_cast<double>(i) / scenario.fbg_rate_hz;
    auto& frame = result.wavelengths[static_cast<std::size_t>(i)];
    frame.timestamp_s = t;
    frame.wavelengths_nm.resize(static_cast<std::size_t>(m));
    const double phi = scenario.phi_at(t);
    for (int fiber = 0; fiber < true_geom.fiber_count; ++fiber) {
      const double r_m = true_geom.radial_offsets_mm[static_cast<std::size_t>(fiber)] * 1e-3;
      const double psi = true_geom.fiber_azimuth_rad(fiber);
      for (int j = 0; j < true_geom.nodes_per_fiber; ++j) {
        const int node = fiber * true_geom.nodes_per_fiber + j;
        const double u =
            true_geom.node_arc_positions_mm[static_cast<std::size_t>(j)] /
            true_geom.sensor_length_mm;
        const double kappa = scenario.kappa_at(u, t);
        const double e0 = scenario.common_strain_at(u, t);
        const double strain = -kappa * r_m * std::sin(phi + psi) + e0;
        const double base = true_geom.base_wavelengths_nm[static_cast<std::size_t>(node)];
        double lambda = base * (1.0 + (1.0 - pe) * strain);
        if (scenario.wavelength_noise_nm > 0.0)
          lambda += scenario.wavelength_noise_nm *
                    gauss(scenario.seed, 0, static_cast<std::uint64_t>(i) *
                                                static_cast<std::uint64_t>(m) +
                                                static_cast<std::uint64_t>(node));
        frame.wavelengths_nm[static_cast<std::size_t>(node)] = lambda;
      }
    }
  }

  std::vector<double> tracker_times;
  for (std::int64_t k = 0;; ++k) {
    const double t = scenario.tracker_phase_s + static_cast<double>(k) / scenario.tracker_rate_hz;
    if (t > scenario.duration_s) break;
    tracker_times.push_back(t);
  }
  const auto n_trk = static_cast<std::int64_t>(tracker_times.size());
  result.tracker.assign(tracker_times.size(), frames::TrackedPoint{});
  result.truth.assign(tracker_times.size(), frames::TrackedPoint{});

  const frames::RigidTransform T_sr0 = frames::register_straight_pose(result.T_os0, result.T_or0);
  // Marker position in the tracker frame that reproduces a given base-frame
  // tip: invert the reporting chain.
  const frames::RigidTransform base_to_tracker =
      compose(result.T_or_c, T_sr0.inverse());
  const Eigen::Vector3d tip_frame_offset(0.0, 0.0, true_geom.cdm_length_mm);

#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t k = 0; k < n_trk; ++k) {
    const double t = tracker_times[static_cast<std::size_t>(k)];
    const Eigen::Vector3d tip_b = exact_cdm_tip(scenario, true_geom, t);
    auto& truth = result.truth[static_cast<std::size_t>(k)];
    truth.timestamp_s = t;
    truth.position_mm = tip_b;

    Eigen::Vector3d p_o = base_to_tracker.apply(tip_b - tip_frame_offset);
    if (scenario.tracker_noise_mm > 0.0)
      for (int axis = 0; axis < 3; ++axis)
        p_o(axis) += scenario.tracker_noise_mm *
                     gauss(scenario.seed, 1,
                           static_cast<std::uint64_t>(k) * 3 + static_cast<std::uint64_t>(axis));
    auto& trk = result.tracker[static_cast<std::size_t>(k)];
    trk.timestamp_s = t + scenario.tracker_clock_offset_s;
    trk.position_mm = p_o;
  }

  return result;
}

}  // namespace fbgtpe::sim
