#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <unordered_map>
#include <vector>

#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/tta.hpp"

namespace mixseg3d {

struct VoxelKey {
  std::int32_t x = 0, y = 0, z = 0;
  auto operator<=>(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(k.x);
    h = h * 0x100000001B3ULL ^ static_cast<std::uint32_t>(k.y);
    h = h * 0x100000001B3ULL ^ static_cast<std::uint32_t>(k.z);
    return static_cast<std::size_t>(h * 0x9E3779B97F4A7C15ULL);
  }
};

/// Stand-in segmentation model: per-voxel class histograms.
///
/// A point in a known voxel scores as that voxel's normalized histogram. Otherwise the
/// known voxel with the nearest center inside a cube of `search_radius` voxels is used
/// (ties to the smallest key), and failing that the global class prior.
class VoxelMajorityModel final : public Predictor {
 public:
  using Histogram = std::vector<std::uint64_t>;

  explicit VoxelMajorityModel(double voxel_size, int classes = kNumClasses, int search_radius = 2);

  /// Adds a labeled cloud's points to the histograms; IGNORE points are skipped.
  void fit(const Cloud& cloud);

  ScoreMap predict(const Cloud& cloud) const override;
  int class_count() const override { return classes_; }

  VoxelKey key_of(double x, double y, double z) const;
  const Histogram* find(const VoxelKey& key) const;

  double voxel_size() const { return voxel_size_; }
  int search_radius() const { return search_radius_; }
  std::size_t voxel_count() const { return table_.size(); }
  const Histogram& prior() const { return prior_; }
  bool empty() const { return table_.empty(); }

  std::vector<std::uint8_t> serialize() const;
  static VoxelMajorityModel deserialize(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
  void save(const std::filesystem::path& path) const;
  static VoxelMajorityModel load(const std::filesystem::path& path);

 private:
  void normalized_row(const Histogram& h, ScoreMap& out, Eigen::Index row) const;

  double voxel_size_;
  int classes_;
  int search_radius_;
  std::unordered_map<VoxelKey, Histogram, VoxelKeyHash> table_;
  Histogram prior_;
};

}  // namespace mixseg3d
