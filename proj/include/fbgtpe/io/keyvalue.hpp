#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fbgtpe::io {

// Shortest round-trip decimal representation.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);

std::string read_file(const std::string& path);

// Write-temp-then-rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Sectioned key-value text:
//
//   # comment
//   [section]
//   key = value or whitespace-separated list
//
// Entry order is preserved, so serialization is canonical.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text,
                            const std::string& origin = "<string>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;

  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

  void set_string(const std::string& section, const std::string& key, const std::string& value);
  void set_double(const std::string& section, const std::string& key, double value);
  void set_int(const std::string& section, const std::string& key, long long value);
  void set_bool(const std::string& section, const std::string& key, bool value);
  void set_doubles(const std::string& section, const std::string& key,
                   const std::vector<double>& values);
  void set_ints(const std::string& section, const std::string& key,
                const std::vector<int>& values);

  std::string serialize() const;
  void save(const std::string& path) const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string key;
    std::string value;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };

  const std::string* find(const std::string& section, const std::string& key) const;
  const std::string& require(const std::string& section, const std::string& key) const;
  Section& section_ref(const std::string& name);

  std::vector<Section> sections_;
  std::string origin_ = "<string>";
};

}  // namespace fbgtpe::io
