#include "fbgtpe/frames.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbgtpe::frames {

bool is_orthonormal(const Eigen::Matrix3d& rotation, double tol) {
  const double drift = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  return drift <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d reorthonormalize(const Eigen::Matrix3d& rotation) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    R = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return R;
}

RigidTransform RigidTransform::checked(const Eigen::Matrix3d& rotation,
                                       const Eigen::Vector3d& translation_mm, double tol) {
  if (!rotation.allFinite() || !translation_mm.allFinite())
    throw std::invalid_argument("rigid transform has non-finite entries");
  if (!is_orthonormal(rotation, tol))
    throw std::invalid_argument("rotation is not orthonormal with det +1");
  return RigidTransform{rotation, translation_mm};
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation_mm = -(inv.rotation * translation_mm);
  return inv;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation_mm = a.rotation * b.translation_mm + a.translation_mm;
  return out;
}

RigidTransform register_straight_pose(const RigidTransform& T_os0,
                                      const RigidTransform& T_or0) {
  RigidTransform::checked(T_os0.rotation, T_os0.translation_mm);
  RigidTransform::checked(T_or0.rotation, T_or0.translation_mm);
  return compose(T_os0.inverse(), T_or0);
}

Eigen::Vector3d tracker_to_base(const TrackedPoint& p_o, const RigidTransform& T_or_current,
                                const RigidTransform& T_sr0,
                                const sensor::SensorGeometry& geom) {
  if (!p_o.position_mm.allFinite())
    throw std::invalid_argument("tracked point has non-finite coordinates");
  RigidTransform::checked(T_or_current.rotation, T_or_current.translation_mm);
  RigidTransform::checked(T_sr0.rotation, T_sr0.translation_mm);
  RigidTransform T_bs;  // straight-pose tip frame sits at z = L_CDM in the base frame
  T_bs.translation_mm = Eigen::Vector3d(0.0, 0.0, geom.cdm_length_mm);
  const RigidTransform chain = compose(T_bs, compose(T_sr0, T_or_current.inverse()));
  return chain.apply(p_o.position_mm);
}

AlignmentResult align_streams(const std::vector<sensor::WavelengthFrame>& fbg,
                              const std::vector<TrackedPoint>& tips_base, InterpMode mode) {
  if (fbg.empty()) throw std::invalid_argument("wavelength stream is empty");
  if (tips_base.empty()) throw std::invalid_argument("tip stream is empty");
  for (std::size_t i = 1; i < fbg.size(); ++i)
    if (!(fbg[i].timestamp_s > fbg[i - 1].timestamp_s))
      throw std::invalid_argument("wavelength stream timestamps must be strictly increasing "
                                  "(violation at sample " + std::to_string(i) + ")");
  for (std::size_t i = 1; i < tips_base.size(); ++i)
    if (!(tips_base[i].timestamp_s > tips_base[i - 1].timestamp_s))
      throw std::invalid_argument("tip stream timestamps must be strictly increasing "
                                  "(violation at sample " + std::to_string(i) + ")");
  const std::size_t m = fbg.front().wavelengths_nm.size();
  for (const auto& f : fbg)
    if (f.wavelengths_nm.size() != m)
      throw std::invalid_argument("wavelength stream has inconsistent node counts");

  AlignmentResult result;
  const double t_min = fbg.front().timestamp_s;
  const double t_max = fbg.back().timestamp_s;
  std::size_t lo = 0;
  for (const auto& tip : tips_base) {
    const double t = tip.timestamp_s;
    if (t < t_min || t > t_max) {
      ++result.dropped;
      continue;
    }
    while (lo + 1 < fbg.size() && fbg[lo + 1].timestamp_s < t) ++lo;
    // fbg[lo].t < t <= fbg[lo+1].t (or t == t_min at lo = 0)
    std::size_t hi = std::min(lo + 1, fbg.size() - 1);
    AlignedPair pair;
    pair.timestamp_s = t;
    pair.tip_mm = tip.position_mm;
    pair.wavelengths_nm.resize(m);
    const double t0 = fbg[lo].timestamp_s;
    const double t1 = fbg[hi].timestamp_s;
    double w = (hi == lo) ? 0.0 : (t - t0) / (t1 - t0);
    if (mode == InterpMode::nearest) w = (w < 0.5) ? 0.0 : 1.0;
    for (std::size_t k = 0; k < m; ++k)
      pair.wavelengths_nm[k] =
          (1.0 - w) * fbg[lo].wavelengths_nm[k] + w * fbg[hi].wavelengths_nm[k];
    result.pairs.push_back(std::move(pair));
  }
  if (result.pairs.empty())
    throw std::invalid_argument("streams do not overlap in time: no pairs produced");
  return result;
}

}  // namespace fbgtpe::frames
