#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixseg3d/common.hpp"
#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/tta.hpp"

namespace mixseg3d {

namespace fs = std::filesystem;

// Scan files: N records of 4 little-endian float32 (x, y, z, intensity).
// Label files: N little-endian uint32 class ids, 255 = IGNORE.
// Score files: "MSS1" magic, uint32 N, uint32 C, then N*C little-endian float32, row-major.

inline constexpr std::size_t kScanRecordBytes = 16;
inline constexpr std::size_t kLabelRecordBytes = 4;

std::vector<std::uint8_t> encode_scan(const Cloud& cloud);
Cloud decode_scan(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

Cloud read_scan(const fs::path& path);
void write_scan(const Cloud& cloud, const fs::path& path);

/// Number of points in a scan file, from its size alone.
std::size_t scan_point_count(const fs::path& path);

std::vector<std::uint8_t> encode_labels(std::span<const ClassId> labels);

/// Reads labels; when `expected_n` is given, a count mismatch is a pairing error.
/// Ids at or above `classes` other than IGNORE are data errors.
std::vector<ClassId> read_labels(const fs::path& path, std::optional<std::size_t> expected_n = std::nullopt,
                                 int classes = kNumClasses);
void write_labels(std::span<const ClassId> labels, const fs::path& path);

void write_scores(const ScoreMap& scores, const fs::path& path);
ScoreMap read_scores(const fs::path& path);

/// Scan plus its labels, validated for pairing.
Cloud read_labeled_scan(const fs::path& scan_path, const fs::path& label_path, int classes = kNumClasses);

std::vector<std::uint8_t> read_file(const fs::path& path);
void write_file(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_text(const fs::path& path, const std::string& text);

/// Class names indexed by id, plus the ignore sentinel.
struct ClassMap {
  std::vector<std::string> names;
  ClassId ignore = kIgnore;

  int size() const { return static_cast<int>(names.size()); }
  bool valid(ClassId id) const { return id == ignore || id < names.size(); }
  /// Id for a name (exact match), or nullopt.
  std::optional<ClassId> find(const std::string& name) const;

  /// The 22-class taxonomy, Car ... Sidewalk.
  static ClassMap standard();
  /// Parses `index<TAB>name` lines. Indices must be 0..C-1 in order, plus an optional ignore line.
  static ClassMap parse(const std::string& text, const std::string& origin = "<memory>");
  static ClassMap load(const fs::path& path);
  std::string serialize() const;
};

/// One (scan, label) pair of a dataset manifest.
struct ManifestEntry {
  fs::path scan;
  fs::path labels;
  std::size_t points = 0;
};

/// Reads a manifest of `scan<whitespace>labels` lines (relative paths resolve against the
/// manifest's directory; '#' starts a comment) and eagerly checks that every file exists and
/// that scan and label counts agree.
std::vector<ManifestEntry> load_manifest(const fs::path& path);
void write_manifest(const fs::path& path, std::span<const ManifestEntry> entries);

}  // namespace mixseg3d
