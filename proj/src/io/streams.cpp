#include "fbgtpe/io/streams.hpp"

#include <cerrno>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fbgtpe/io/keyvalue.hpp"

namespace fbgtpe::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& token, const std::string& path, std::size_t row) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE)
    throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                ": cannot parse '" + token + "'");
  return v;
}

struct CsvReader {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvReader read_csv(const std::string& path) {
  CsvReader csv;
  csv.path = path;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (csv.header.empty()) {
      csv.header = split_csv_line(line);
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != csv.header.size())
      throw std::invalid_argument(path + ": row " + std::to_string(row) + ": expected " +
                                  std::to_string(csv.header.size()) + " columns, got " +
                                  std::to_string(fields.size()));
    std::vector<double> values;
    values.reserve(fields.size());
    for (const auto& f : fields) values.push_back(parse_field(f, path, row));
    csv.rows.push_back(std::move(values));
  }
  if (csv.header.empty()) throw std::invalid_argument(path + ": empty stream file");
  return csv;
}

void check_monotonic(const CsvReader& csv) {
  for (std::size_t i = 1; i < csv.rows.size(); ++i)
    if (!(csv.rows[i][0] > csv.rows[i - 1][0]))
      throw std::invalid_argument(csv.path + ": row " + std::to_string(i + 2) +
                                  ": timestamps must be strictly increasing");
}

void expect_header(const CsvReader& csv, const std::vector<std::string>& expected) {
  if (csv.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ',';
      want += expected[i];
    }
    throw std::invalid_argument(csv.path + ": unexpected header (want '" + want + "')");
  }
}

std::vector<std::string> wavelength_header(std::size_t m) {
  std::vector<std::string> h{"timestamp"};
  for (std::size_t k = 1; k <= m; ++k) h.push_back("w" + std::to_string(k));
  return h;
}

std::string join_row(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

std::vector<sensor::WavelengthFrame> read_wavelength_csv(const std::string& path) {
  const auto csv = read_csv(path);
  if (csv.header.size() < 2 || csv.header[0] != "timestamp" ||
      csv.header != wavelength_header(csv.header.size() - 1))
    throw std::invalid_argument(path + ": expected header timestamp,w1..wm");
  check_monotonic(csv);
  std::vector<sensor::WavelengthFrame> frames;
  frames.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    sensor::WavelengthFrame f;
    f.timestamp_s = row[0];
    f.wavelengths_nm.assign(row.begin() + 1, row.end());
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<frames::TrackedPoint> read_tracker_csv(const std::string& path) {
  const auto csv = read_csv(path);
  expect_header(csv, {"timestamp", "x", "y", "z"});
  check_monotonic(csv);
  std::vector<frames::TrackedPoint> points;
  points.reserve(csv.rows.size());
  for (const auto& row : csv.rows)
    points.push_back({row[0], Eigen::Vector3d(row[1], row[2], row[3])});
  return points;
}

std::vector<frames::AlignedPair> read_aligned_csv(const std::string& path) {
  const auto csv = read_csv(path);
  if (csv.header.size() < 5)
    throw std::invalid_argument(path + ": expected header timestamp,w1..wm,x,y,z");
  const std::size_t m = csv.header.size() - 4;
  auto expected = wavelength_header(m);
  expected.insert(expected.end(), {"x", "y", "z"});
  expect_header(csv, expected);
  check_monotonic(csv);
  std::vector<frames::AlignedPair> pairs;
  pairs.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    frames::AlignedPair p;
    p.timestamp_s = row[0];
    p.wavelengths_nm.assign(row.begin() + 1, row.begin() + 1 + static_cast<long>(m));
    p.tip_mm = Eigen::Vector3d(row[m + 1], row[m + 2], row[m + 3]);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_wavelength_csv(const std::string& path,
                          const std::vector<sensor::WavelengthFrame>& frames) {
  std::string out;
  const std::size_t m = frames.empty() ? 0 : frames.front().wavelengths_nm.size();
  const auto header = wavelength_header(m);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& f : frames) {
    std::vector<double> row{f.timestamp_s};
    row.insert(row.end(), f.wavelengths_nm.begin(), f.wavelengths_nm.end());
    out += join_row(row);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_tracker_csv(const std::string& path,
                       const std::vector<frames::TrackedPoint>& points) {
  std::string out = "timestamp,x,y,z\n";
  for (const auto& p : points) {
    out += join_row({p.timestamp_s, p.position_mm.x(), p.position_mm.y(), p.position_mm.z()});
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_aligned_csv(const std::string& path,
                       const std::vector<frames::AlignedPair>& pairs) {
  std::string out;
  const std::size_t m = pairs.empty() ? 0 : pairs.front().wavelengths_nm.size();
  auto header = wavelength_header(m);
  header.insert(header.end(), {"x", "y", "z"});
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& p : pairs) {
    std::vector<double> row{p.timestamp_s};
    row.insert(row.end(), p.wavelengths_nm.begin(), p.wavelengths_nm.end());
    row.insert(row.end(), {p.tip_mm.x(), p.tip_mm.y(), p.tip_mm.z()});
    out += join_row(row);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_shapes_csv(const std::string& path,
                      const std::vector<recon::ReconstructedShape>& shapes) {
  std::string out = "frame_index,point_index,x,y,z\n";
  for (std::size_t f = 0; f < shapes.size(); ++f) {
    for (std::size_t i = 0; i < shapes[f].points_mm.size(); ++i) {
      const auto& p = shapes[f].points_mm[i];
      out += std::to_string(f) + ',' + std::to_string(i) + ',' + format_double(p.x()) +
             ',' + format_double(p.y()) + ',' + format_double(p.z()) + '\n';
    }
  }
  write_file_atomic(path, out);
}

frames::RigidTransform load_transform(const std::string& path) {
  const auto kv = KeyValueFile::load(path);
  const auto r = kv.get_doubles("transform", "rotation");
  const auto t = kv.get_doubles("transform", "translation_mm");
  if (r.size() != 9)
    throw std::invalid_argument(path + ": transform.rotation must have 9 values");
  if (t.size() != 3)
    throw std::invalid_argument(path + ": transform.translation_mm must have 3 values");
  Eigen::Matrix3d R;
  R << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
  const Eigen::Vector3d trans(t[0], t[1], t[2]);
  if (frames::is_orthonormal(R, 1e-8))
    return frames::RigidTransform{R, trans};
  // Small storage drift is repaired; anything worse is not a rotation.
  const Eigen::Matrix3d fixed = frames::reorthonormalize(R);
  if ((fixed - R).cwiseAbs().maxCoeff() > 1e-5)
    throw std::invalid_argument(path + ": rotation is not orthonormal");
  return frames::RigidTransform{fixed, trans};
}

void save_transform(const frames::RigidTransform& T, const std::string& path) {
  KeyValueFile kv;
  std::vector<double> r(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[static_cast<std::size_t>(i * 3 + j)] = T.rotation(i, j);
  kv.set_doubles("transform", "rotation", r);
  kv.set_doubles("transform", "translation_mm",
                 {T.translation_mm.x(), T.translation_mm.y(), T.translation_mm.z()});
  write_file_atomic(path, kv.serialize());
}

}  // namespace fbgtpe::io
