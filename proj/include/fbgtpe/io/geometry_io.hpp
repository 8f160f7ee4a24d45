#pragma once

#include <cstdint>
#include <string>

#include "fbgtpe/io/keyvalue.hpp"
#include "fbgtpe/sensor_model.hpp"

namespace fbgtpe::io {

// Sensor geometry config: [sensor] and [manipulator] sections, units in the
// key names. Validation runs on load; violations name the field.
sensor::SensorGeometry parse_geometry(const KeyValueFile& kv);
sensor::SensorGeometry load_geometry(const std::string& path);

std::string serialize_geometry(const sensor::SensorGeometry& geom);
void save_geometry(const sensor::SensorGeometry& geom, const std::string& path);

// Hash of the canonical serialization; persisted with trained models so a
// model cannot silently be applied to a different sensor.
std::uint64_t geometry_fingerprint(const sensor::SensorGeometry& geom);

}  // namespace fbgtpe::io
