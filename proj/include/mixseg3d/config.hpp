#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mixseg3d/common.hpp"
#include "mixseg3d/geometry.hpp"
#include "mixseg3d/lasermix.hpp"
#include "mixseg3d/polarmix.hpp"

namespace mixseg3d {

/// Run configuration. Angles are in degrees here (file units) and converted to
/// radians by the *_options() accessors.
struct RunConfig {
  double p1 = 0.8;  // LaserMix trigger probability
  double p2 = 1.0;  // PolarMix trigger probability

  std::vector<int> bin_choices{3, 4, 5, 6};
  std::optional<std::array<double, 2>> inclination_range_deg;

  std::array<double, 2> sector_width_deg{30.0, 180.0};
  std::vector<ClassId> instance_classes = default_instance_classes();
  int paste_count = 2;

  /// Random global augmentation applied to each scan before mixing.
  bool augment = false;
  std::array<double, 2> augment_scale{0.95, 1.05};
  double augment_flip_probability = 0.5;
  std::array<double, 3> augment_shift_m{0.2, 0.2, 0.2};

  int tta_views = 8;
  std::uint64_t tta_seed = 0;
  bool tta_random = false;

  double voxel_size = 0.25;  // meters, stand-in predictor
  std::optional<std::string> classmap;

  /// Throws kValidation for out-of-range values.
  void validate() const;

  LaserMixOptions lasermix_options() const;
  PolarMixOptions polarmix_options() const;
  AugmentationRanges augmentation_ranges() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses a JSON config; missing keys keep their defaults and an empty document is
/// the default config. Syntax errors are kFormat with a line number; unknown keys
/// and out-of-range values are kValidation.
RunConfig parse_config(const std::string& text, const std::string& origin = "<memory>");
RunConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace mixseg3d
