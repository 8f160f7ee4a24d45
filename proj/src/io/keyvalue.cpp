#include "fbgtpe/io/keyvalue.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fbgtpe::io {

namespace {

std::string trim(std::string_view s) {
  const auto front = s.find_first_not_of(" \t\r");
  if (front == std::string_view::npos) return {};
  const auto back = s.find_last_not_of(" \t\r");
  return std::string(s.substr(front, back - front + 1));
}

double parse_double(const std::string& token, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE)
    throw std::invalid_argument(context + ": cannot parse '" + token + "' as a number");
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename failed for " + path + ": " + ec.message());
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  Section* current = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                    ": malformed section header");
      kv.sections_.push_back({trim(body.substr(1, body.size() - 2)), {}});
      current = &kv.sections_.back();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    if (!current)
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": entry outside any [section]");
    current->entries.push_back({trim(body.substr(0, eq)), trim(body.substr(eq + 1))});
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  return parse(read_file(path), path);
}

const std::string* KeyValueFile::find(const std::string& section,
                                      const std::string& key) const {
  for (const auto& sec : sections_) {
    if (sec.name != section) continue;
    for (const auto& e : sec.entries)
      if (e.key == key) return &e.value;
  }
  return nullptr;
}

const std::string& KeyValueFile::require(const std::string& section,
                                         const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v)
    throw std::invalid_argument(origin_ + ": missing " + section + "." + key);
  return *v;
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string KeyValueFile::get_string(const std::string& section, const std::string& key) const {
  return require(section, key);
}

double KeyValueFile::get_double(const std::string& section, const std::string& key) const {
  return parse_double(require(section, key), origin_ + ": " + section + "." + key);
}

int KeyValueFile::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument(origin_ + ": " + section + "." + key + " must be an integer");
  return i;
}

bool KeyValueFile::get_bool(const std::string& section, const std::string& key) const {
  const std::string& v = require(section, key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(origin_ + ": " + section + "." + key +
                              " must be true/false");
}

std::uint64_t KeyValueFile::get_u64(const std::string& section, const std::string& key) const {
  const std::string& v = require(section, key);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::invalid_argument(origin_ + ": " + section + "." + key +
                                " must be an unsigned integer");
  return out;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& section,
                                              const std::string& key) const {
  const auto tokens = split_ws(require(section, key));
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    out.push_back(parse_double(t, origin_ + ": " + section + "." + key));
  return out;
}

std::vector<int> KeyValueFile::get_ints(const std::string& section,
                                        const std::string& key) const {
  const auto values = get_doubles(section, key);
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw std::invalid_argument(origin_ + ": " + section + "." + key +
                                  " must contain integers");
    out.push_back(i);
  }
  return out;
}

double KeyValueFile::get_double_or(const std::string& section, const std::string& key,
                                   double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

bool KeyValueFile::get_bool_or(const std::string& section, const std::string& key,
                               bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

KeyValueFile::Section& KeyValueFile::section_ref(const std::string& name) {
  for (auto& sec : sections_)
    if (sec.name == name) return sec;
  sections_.push_back({name, {}});
  return sections_.back();
}

void KeyValueFile::set_string(const std::string& section, const std::string& key,
                              const std::string& value) {
  auto& sec = section_ref(section);
  for (auto& e : sec.entries) {
    if (e.key == key) {
      e.value = value;
      return;
    }
  }
  sec.entries.push_back({key, value});
}

void KeyValueFile::set_double(const std::string& section, const std::string& key,
                              double value) {
  set_string(section, key, format_double(value));
}

void KeyValueFile::set_int(const std::string& section, const std::string& key,
                           long long value) {
  set_string(section, key, std::to_string(value));
}

void KeyValueFile::set_bool(const std::string& section, const std::string& key, bool value) {
  set_string(section, key, value ? "true" : "false");
}

void KeyValueFile::set_doubles(const std::string& section, const std::string& key,
                               const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += format_double(values[i]);
  }
  set_string(section, key, joined);
}

void KeyValueFile::set_ints(const std::string& section, const std::string& key,
                            const std::vector<int>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += std::to_string(values[i]);
  }
  set_string(section, key, joined);
}

std::string KeyValueFile::serialize() const {
  std::string out;
  for (std::size_t s = 0; s < sections_.size(); ++s) {
    if (s) out += '\n';
    out += '[' + sections_[s].name + "]\n";
    for (const auto& e : sections_[s].entries) out += e.key + " = " + e.value + '\n';
  }
  return out;
}

void KeyValueFile::save(const std::string& path) const {
  write_file_atomic(path, serialize());
}

}  // namespace fbgtpe::io
