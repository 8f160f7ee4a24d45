#include "fbgtpe/io/geometry_io.hpp"

namespace fbgtpe::io {

sensor::SensorGeometry parse_geometry(const KeyValueFile& kv) {
  sensor::SensorGeometry g;
  g.fiber_count = kv.get_int("sensor", "fiber_count");
  g.nodes_per_fiber = kv.get_int("sensor", "nodes_per_fiber");
  g.radial_offsets_mm = kv.get_doubles("sensor", "radial_offsets_mm");
  g.angular_gaps_rad = kv.get_doubles("sensor", "angular_gaps_rad");
  g.node_arc_positions_mm = kv.get_doubles("sensor", "node_arc_positions_mm");
  g.base_wavelengths_nm = kv.get_doubles("sensor", "base_wavelengths_nm");
  g.strain_optic_coefficient = kv.get_double("sensor", "strain_optic_coefficient");
  g.sensor_length_mm = kv.get_double("sensor", "sensor_length_mm");
  g.center_offset_mm = kv.get_double("manipulator", "center_offset_mm");
  g.cdm_length_mm = kv.get_double("manipulator", "cdm_length_mm");
  g.validate();
  return g;
}

sensor::SensorGeometry load_geometry(const std::string& path) {
  return parse_geometry(KeyValueFile::load(path));
}

std::string serialize_geometry(const sensor::SensorGeometry& geom) {
  KeyValueFile kv;
  kv.set_int("sensor", "fiber_count", geom.fiber_count);
  kv.set_int("sensor", "nodes_per_fiber", geom.nodes_per_fiber);
  kv.set_doubles("sensor", "radial_offsets_mm", geom.radial_offsets_mm);
  kv.set_doubles("sensor", "angular_gaps_rad", geom.angular_gaps_rad);
  kv.set_doubles("sensor", "node_arc_positions_mm", geom.node_arc_positions_mm);
  kv.set_doubles("sensor", "base_wavelengths_nm", geom.base_wavelengths_nm);
  kv.set_double("sensor", "strain_optic_coefficient", geom.strain_optic_coefficient);
  kv.set_double("sensor", "sensor_length_mm", geom.sensor_length_mm);
  kv.set_double("manipulator", "center_offset_mm", geom.center_offset_mm);
  kv.set_double("manipulator", "cdm_length_mm", geom.cdm_length_mm);
  return kv.serialize();
}

void save_geometry(const sensor::SensorGeometry& geom, const std::string& path) {
  write_file_atomic(path, serialize_geometry(geom));
}

std::uint64_t geometry_fingerprint(const sensor::SensorGeometry& geom) {
  return fnv1a64(serialize_geometry(geom));
}

}  // namespace fbgtpe::io
