#include "mixseg3d/scene.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "mixseg3d/geometry.hpp"
#include "mixseg3d/io.hpp"
#include "mixseg3d/rng.hpp"

namespace mixseg3d {
namespace {

struct Box {
  Eigen::Vector3d lo, hi;
};

struct Sphere {
  Eigen::Vector3d center;
  double radius;
};

struct Cylinder {
  Eigen::Vector3d base;
  double radius, height;
};

struct Emitter {
  std::vector<Eigen::Vector3d> samples;
  std::vector<ClassId> labels;
  std::vector<double> intensity;

  void add(const Eigen::Vector3d& p, ClassId label, double reflect) {
    samples.push_back(p);
    labels.push_back(label);
    intensity.push_back(reflect);
  }
};

ClassId class_id(const char* name) { return *ClassMap::standard().find(name); }

/// Point on the sides or top of a box, faces weighted by area.
Eigen::Vector3d on_box(const Box& b, Rng& rng) {
  const Eigen::Vector3d d = b.hi - b.lo;
  const std::array<double, 5> area{d.y() * d.z(), d.y() * d.z(), d.x() * d.z(), d.x() * d.z(), d.x() * d.y()};
  double pick = rng.uniform(0.0, area[0] + area[1] + area[2] + area[3] + area[4]);
  int face = 0;
  while (face < 4 && pick >= area[static_cast<std::size_t>(face)]) pick -= area[static_cast<std::size_t>(face++)];
  Eigen::Vector3d p(rng.uniform(b.lo.x(), b.hi.x()), rng.uniform(b.lo.y(), b.hi.y()), rng.uniform(b.lo.z(), b.hi.z()));
  switch (face) {
    case 0: p.x() = b.lo.x(); break;
    case 1: p.x() = b.hi.x(); break;
    case 2: p.y() = b.lo.y(); break;
    case 3: p.y() = b.hi.y(); break;
    default: p.z() = b.hi.z(); break;
  }
  return p;
}

Eigen::Vector3d on_sphere(const Sphere& s, Rng& rng) {
  // Uniform on the sphere via z and longitude.
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, kTwoPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return s.center + s.radius * Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z);
}

Eigen::Vector3d on_cylinder(const Cylinder& c, Rng& rng) {
  const double phi = rng.uniform(0.0, kTwoPi);
  return c.base + Eigen::Vector3d(c.radius * std::cos(phi), c.radius * std::sin(phi), rng.uniform(0.0, c.height));
}

}  // namespace

void SceneSpec::validate() const {
  if (points < 0) throw Error(ErrorKind::kValidation, "scene point budget must be >= 0");
  if (!(extent >= 10.0)) throw Error(ErrorKind::kValidation, "scene extent must be >= 10 m");
  if (!(road_half_width >= 3.0 && sidewalk_width >= 1.5)) {
    throw Error(ErrorKind::kValidation, "road half width must be >= 3 m and sidewalk width >= 1.5 m");
  }
  if (!(extent > 0.0 && road_half_width > 0.0 && sidewalk_width > 0.0 && sensor_height > 0.0)) {
    throw Error(ErrorKind::kValidation, "scene dimensions must be positive");
  }
  if (buildings < 1 || cars < 1 || pedestrians < 1 || trees < 1) {
    throw Error(ErrorKind::kValidation, "scene needs at least one building, car, pedestrian and tree");
  }
}

Cloud generate_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double ground = -spec.sensor_height;
  const double walk_lo = spec.road_half_width;
  const double walk_hi = spec.road_half_width + spec.sidewalk_width;
  auto random_side = [&] { return rng.bernoulli(0.5) ? 1.0 : -1.0; };

  std::vector<Box> buildings;
  for (int i = 0; i < spec.buildings; ++i) {
    const double s = random_side();
    const double x0 = rng.uniform(-spec.extent, spec.extent - 8.0);
    const double depth = rng.uniform(6.0, 12.0);
    const double y0 = walk_hi + rng.uniform(0.5, 3.0);
    const double h = rng.uniform(5.0, 15.0);
    const Eigen::Vector3d a(x0, s * y0, ground), b(x0 + rng.uniform(5.0, 12.0), s * (y0 + depth), ground + h);
    buildings.push_back({a.cwiseMin(b), a.cwiseMax(b)});
  }
  std::vector<Box> cars;
  for (int i = 0; i < spec.cars; ++i) {
    const double s = random_side();
    const double x0 = rng.uniform(-spec.extent + 3.0, spec.extent - 5.0);
    const double y_in = rng.uniform(0.8, spec.road_half_width - 2.2);
    const Eigen::Vector3d a(x0, s * y_in, ground), b(x0 + rng.uniform(3.8, 4.8), s * (y_in + 1.8), ground + rng.uniform(1.4, 1.7));
    cars.push_back({a.cwiseMin(b), a.cwiseMax(b)});
  }
  std::vector<Cylinder> pedestrians;
  for (int i = 0; i < spec.pedestrians; ++i) {
    const double s = random_side();
    pedestrians.push_back({Eigen::Vector3d(rng.uniform(-spec.extent + 2.0, spec.extent - 2.0),
                                           s * rng.uniform(walk_lo + 0.5, walk_hi - 0.5), ground),
                           0.25, rng.uniform(1.5, 1.9)});
  }
  std::vector<Sphere> trees;
  for (int i = 0; i < spec.trees; ++i) {
    const double s = random_side();
    const double r = rng.uniform(1.5, 3.0);
    trees.push_back({Eigen::Vector3d(rng.uniform(-spec.extent, spec.extent), s * (walk_hi - 0.5), ground + 3.0 + r), r});
  }

  // Fixed class fractions of the budget; the road absorbs rounding.
  const ClassId road = class_id("Road"), sidewalk = class_id("Sidewalk"), building = class_id("Building"),
                vegetation = class_id("Vegetation"), car = class_id("Car"), pedestrian = class_id("Pedestrian");
  const auto n = spec.points;
  auto share = [&](double f) { return static_cast<std::int64_t>(static_cast<double>(n) * f); };
  const std::int64_t n_sidewalk = share(0.12), n_building = share(0.22), n_vegetation = share(0.13), n_car = share(0.15),
                     n_pedestrian = share(0.05);
  const std::int64_t n_road = n - n_sidewalk - n_building - n_vegetation - n_car - n_pedestrian;

  Emitter e;
  e.samples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n_road; ++i) {
    e.add({rng.uniform(-spec.extent, spec.extent), rng.uniform(-spec.road_half_width, spec.road_half_width), ground}, road,
          rng.uniform(0.05, 0.2));
  }
  for (std::int64_t i = 0; i < n_sidewalk; ++i) {
    e.add({rng.uniform(-spec.extent, spec.extent), random_side() * rng.uniform(walk_lo, walk_hi), ground + 0.15}, sidewalk,
          rng.uniform(0.2, 0.35));
  }
  for (std::int64_t i = 0; i < n_building; ++i) {
    e.add(on_box(buildings[rng.below(buildings.size())], rng), building, rng.uniform(0.3, 0.6));
  }
  for (std::int64_t i = 0; i < n_vegetation; ++i) {
    e.add(on_sphere(trees[rng.below(trees.size())], rng), vegetation, rng.uniform(0.1, 0.4));
  }
  for (std::int64_t i = 0; i < n_car; ++i) {
    e.add(on_box(cars[rng.below(cars.size())], rng), car, rng.uniform(0.5, 0.9));
  }
  for (std::int64_t i = 0; i < n_pedestrian; ++i) {
    e.add(on_cylinder(pedestrians[rng.below(pedestrians.size())], rng), pedestrian, rng.uniform(0.2, 0.5));
  }

  Cloud cloud(static_cast<Eigen::Index>(n), true);
  for (std::size_t i = 0; i < e.samples.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    cloud.coords.row(row) = e.samples[i].transpose();
    cloud.intensity(row) = e.intensity[i];
    (*cloud.labels)[i] = e.labels[i];
  }
  return cloud;
}

}  // namespace mixseg3d
