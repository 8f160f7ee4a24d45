#pragma once

#include <string>
#include <vector>

#include "fbgtpe/frames.hpp"
#include "fbgtpe/sensor_model.hpp"
#include "fbgtpe/shape_recon.hpp"

namespace fbgtpe::io {

// CSV stream files. Headers are mandatory and checked; timestamps must be
// strictly increasing; parse errors name the row.
//
//   wavelengths: timestamp,w1..wm
//   tracker/tips: timestamp,x,y,z
//   aligned pairs: timestamp,w1..wm,x,y,z

std::vector<sensor::WavelengthFrame> read_wavelength_csv(const std::string& path);
std::vector<frames::TrackedPoint> read_tracker_csv(const std::string& path);
std::vector<frames::AlignedPair> read_aligned_csv(const std::string& path);

void write_wavelength_csv(const std::string& path,
                          const std::vector<sensor::WavelengthFrame>& frames);
void write_tracker_csv(const std::string& path,
                       const std::vector<frames::TrackedPoint>& points);
void write_aligned_csv(const std::string& path,
                       const std::vector<frames::AlignedPair>& pairs);

// shapes: frame_index,point_index,x,y,z
void write_shapes_csv(const std::string& path,
                      const std::vector<recon::ReconstructedShape>& shapes);

// Rigid transform file: [transform] rotation (9 values, row-major) and
// translation_mm (3 values). Rotations with small drift are
// re-orthonormalized on load; anything worse is rejected.
frames::RigidTransform load_transform(const std::string& path);
void save_transform(const frames::RigidTransform& T, const std::string& path);

}  // namespace fbgtpe::io
