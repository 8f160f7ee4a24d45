#include "fbgtpe/io/manifest.hpp"

#include <charconv>

#include <json.hpp>

#include "fbgtpe/io/keyvalue.hpp"

namespace fbgtpe::io {

std::string checksum_hex(std::string_view bytes) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, fnv1a64(bytes), 16);
  return std::string(buf, res.ptr);
}

std::string file_checksum_hex(const std::string& path) {
  return checksum_hex(read_file(path));
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  nlohmann::ordered_json j;
  j["tool_version"] = manifest.tool_version;
  j["subcommand"] = manifest.subcommand;
  j["arguments"] = manifest.arguments;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [file, checksum] : manifest.input_checksums) inputs[file] = checksum;
  j["input_checksums"] = inputs;
  j["geometry_fingerprint"] = manifest.geometry_fingerprint_hex;
  j["seeds"] = manifest.seeds;
  j["outputs"] = manifest.outputs;
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace fbgtpe::io
