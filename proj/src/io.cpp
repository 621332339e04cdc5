#include "mixseg3d/io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mixseg3d {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::kIo, "failed reading " + path.string());
  return bytes;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> encode_scan(const Cloud& cloud) {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(cloud.size()) * kScanRecordBytes);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const float rec[4] = {static_cast<float>(cloud.coords(i, 0)), static_cast<float>(cloud.coords(i, 1)),
                          static_cast<float>(cloud.coords(i, 2)), static_cast<float>(cloud.intensity(i))};
    for (float v : rec) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kData, "point " + std::to_string(i) + " is not representable as finite float32");
      }
      put_f32(out, v);
    }
  }
  return out;
}

Cloud decode_scan(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() % kScanRecordBytes != 0) {
    const std::size_t offset = bytes.size() - bytes.size() % kScanRecordBytes;
    throw Error(ErrorKind::kFormat, origin + ": truncated scan record at byte offset " + std::to_string(offset) +
                                        " (file size " + std::to_string(bytes.size()) + " is not a multiple of 16)");
  }
  const auto n = static_cast<Eigen::Index>(bytes.size() / kScanRecordBytes);
  Cloud cloud(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint8_t* rec = bytes.data() + static_cast<std::size_t>(i) * kScanRecordBytes;
    for (int k = 0; k < 4; ++k) {
      const float v = get_f32(rec + 4 * k);
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kData, origin + ": non-finite value in point " + std::to_string(i) + " at byte offset " +
                                          std::to_string(static_cast<std::size_t>(i) * kScanRecordBytes + 4 * k));
      }
      if (k < 3) {
        cloud.coords(i, k) = v;
      } else {
        if (v < 0.0f) throw Error(ErrorKind::kData, origin + ": negative intensity in point " + std::to_string(i));
        cloud.intensity(i) = v;
      }
    }
  }
  return cloud;
}

Cloud read_scan(const fs::path& path) { return decode_scan(read_file(path), path.string()); }

void write_scan(const Cloud& cloud, const fs::path& path) { write_file(path, encode_scan(cloud)); }

std::size_t scan_point_count(const fs::path& path) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot stat " + path.string() + ": " + ec.message());
  if (size % kScanRecordBytes != 0) {
    throw Error(ErrorKind::kFormat, path.string() + ": truncated scan record at byte offset " +
                                        std::to_string(size - size % kScanRecordBytes));
  }
  return size / kScanRecordBytes;
}

std::vector<std::uint8_t> encode_labels(std::span<const ClassId> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(labels.size() * kLabelRecordBytes);
  for (ClassId l : labels) put_u32(out, l);
  return out;
}

std::vector<ClassId> read_labels(const fs::path& path, std::optional<std::size_t> expected_n, int classes) {
  const auto bytes = read_file(path);
  if (bytes.size() % kLabelRecordBytes != 0) {
    throw Error(ErrorKind::kFormat, path.string() + ": truncated label record at byte offset " +
                                        std::to_string(bytes.size() - bytes.size() % kLabelRecordBytes));
  }
  const std::size_t n = bytes.size() / kLabelRecordBytes;
  if (expected_n && *expected_n != n) {
    throw Error(ErrorKind::kPairing, path.string() + ": label count " + std::to_string(n) +
                                         " does not match point count " + std::to_string(*expected_n));
  }
  std::vector<ClassId> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = get_u32(bytes.data() + i * kLabelRecordBytes);
    if (labels[i] != kIgnore && labels[i] >= static_cast<ClassId>(classes)) {
      throw Error(ErrorKind::kData, path.string() + ": unknown class id " + std::to_string(labels[i]) + " at label " +
                                        std::to_string(i));
    }
  }
  return labels;
}

void write_labels(std::span<const ClassId> labels, const fs::path& path) { write_file(path, encode_labels(labels)); }

void write_scores(const ScoreMap& scores, const fs::path& path) {
  std::vector<std::uint8_t> out{'M', 'S', 'S', '1'};
  out.reserve(12 + static_cast<std::size_t>(scores.size()) * 4);
  put_u32(out, static_cast<std::uint32_t>(scores.rows()));
  put_u32(out, static_cast<std::uint32_t>(scores.cols()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index c = 0; c < scores.cols(); ++c) put_f32(out, static_cast<float>(scores(i, c)));
  }
  write_file(path, out);
}

ScoreMap read_scores(const fs::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 12 || bytes[0] != 'M' || bytes[1] != 'S' || bytes[2] != 'S' || bytes[3] != '1') {
    throw Error(ErrorKind::kFormat, path.string() + ": not a score file");
  }
  const std::size_t rows = get_u32(bytes.data() + 4);
  const std::size_t cols = get_u32(bytes.data() + 8);
  if (bytes.size() != 12 + rows * cols * 4) {
    throw Error(ErrorKind::kFormat, path.string() + ": score payload size does not match its header");
  }
  ScoreMap scores(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const std::uint8_t* p = bytes.data() + 12;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c, p += 4) scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = get_f32(p);
  }
  return scores;
}

Cloud read_labeled_scan(const fs::path& scan_path, const fs::path& label_path, int classes) {
  Cloud cloud = read_scan(scan_path);
  cloud.labels = read_labels(label_path, static_cast<std::size_t>(cloud.size()), classes);
  return cloud;
}

std::optional<ClassId> ClassMap::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<ClassId>(i);
  }
  return std::nullopt;
}

ClassMap ClassMap::standard() {
  return ClassMap{{"Car", "Truck", "Bus", "Other Vehicle", "Motorcyclist", "Bicyclist", "Pedestrian", "Sign",
                   "Traffic Light", "Pole", "Construction Cone", "Bicycle", "Motorcycle", "Building", "Vegetation",
                   "Tree Trunk", "Curb", "Road", "Lane Marker", "Other Ground", "Walkable", "Sidewalk"},
                  kIgnore};
}

ClassMap ClassMap::parse(const std::string& text, const std::string& origin) {
  ClassMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::kFormat, origin + ":" + std::to_string(line_no) + ": expected index<TAB>name");
    }
    const std::string index_text = trim(line.substr(0, tab));
    const std::string name = trim(line.substr(tab + 1));
    std::size_t used = 0;
    unsigned long index = 0;
    try {
      index = std::stoul(index_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != index_text.size() || name.empty()) {
      throw Error(ErrorKind::kFormat, origin + ":" + std::to_string(line_no) + ": malformed class map line");
    }
    if (index == map.names.size()) {
      map.names.push_back(name);
    } else if (index > map.names.size() && name == "IGNORE") {
      map.ignore = static_cast<ClassId>(index);
    } else {
      throw Error(ErrorKind::kFormat, origin + ":" + std::to_string(line_no) + ": expected class index " +
                                          std::to_string(map.names.size()) + ", got " + index_text);
    }
  }
  if (map.names.empty()) throw Error(ErrorKind::kFormat, origin + ": class map lists no classes");
  if (map.ignore < map.names.size()) throw Error(ErrorKind::kFormat, origin + ": ignore id collides with a class");
  return map;
}

ClassMap ClassMap::load(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse(std::string(bytes.begin(), bytes.end()), path.string());
}

std::string ClassMap::serialize() const {
  std::string out = "# index\tname; the dataset's 'Undefined' class maps to IGNORE\n";
  for (std::size_t i = 0; i < names.size(); ++i) out += std::to_string(i) + "\t" + names[i] + "\n";
  out += std::to_string(ignore) + "\tIGNORE\n";
  return out;
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  const auto bytes = read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::istringstream fields(stripped);
    std::string scan, labels, extra;
    if (!(fields >> scan >> labels) || (fields >> extra)) {
      throw Error(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) + ": expected '<scan> <labels>'");
    }
    ManifestEntry e;
    e.scan = fs::path(scan).is_absolute() ? fs::path(scan) : base / scan;
    e.labels = fs::path(labels).is_absolute() ? fs::path(labels) : base / labels;
    for (const auto& p : {e.scan, e.labels}) {
      if (!fs::is_regular_file(p)) {
        throw Error(ErrorKind::kIo, path.string() + ":" + std::to_string(line_no) + ": missing file " + p.string());
      }
    }
    e.points = scan_point_count(e.scan);
    const auto label_size = fs::file_size(e.labels);
    if (label_size % kLabelRecordBytes != 0 || label_size / kLabelRecordBytes != e.points) {
      throw Error(ErrorKind::kPairing, path.string() + ":" + std::to_string(line_no) + ": " + e.scan.string() + " has " +
                                           std::to_string(e.points) + " points but " + e.labels.string() + " has " +
                                           std::to_string(label_size / kLabelRecordBytes) + " labels");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const fs::path& path, std::span<const ManifestEntry> entries) {
  std::string text;
  const fs::path base = path.parent_path();
  for (const auto& e : entries) {
    text += fs::proximate(e.scan, base).generic_string() + " " + fs::proximate(e.labels, base).generic_string() + "\n";
  }
  write_text(path, text);
}

}  // namespace mixseg3d
