#pragma once

#include <cstdint>

#include "mixseg3d/point_cloud.hpp"

namespace mixseg3d {

/// Layout of a synthetic street scene: a road flanked by sidewalks, building
/// boxes behind them, parked cars, pedestrians and trees. The sensor sits at the
/// origin `sensor_height` meters above the ground.
struct SceneSpec {
  std::uint64_t seed = 0;
  std::int64_t points = 100000;
  double extent = 40.0;         // half-length of the street along x, meters
  double road_half_width = 4.0;
  double sidewalk_width = 3.0;
  double sensor_height = 1.8;
  int buildings = 6;
  int cars = 8;
  int pedestrians = 6;
  int trees = 8;

  void validate() const;
};

/// Deterministic labeled scene with exactly `spec.points` points using the Road,
/// Sidewalk, Building, Vegetation, Car and Pedestrian classes.
Cloud generate_scene(const SceneSpec& spec);

}  // namespace mixseg3d
