#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbgtpe::io {

// Provenance record written next to every subcommand's outputs.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::vector<std::string> arguments;
  std::vector<std::pair<std::string, std::string>> input_checksums;  // path, hash
  std::string geometry_fingerprint_hex;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
};

std::string checksum_hex(std::string_view bytes);
std::string file_checksum_hex(const std::string& path);

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace fbgtpe::io
