#pragma once

#include <algorithm>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mixseg3d/geometry.hpp"
#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/rng.hpp"

namespace mixseg3d {

/// Resolved randomness of one azimuth swap + instance paste.
struct PolarMixPlan {
  double sector_start = 0.0;   // radians in [0, 2π)
  double sector_width = 0.0;   // radians in (0, 2π]; sector may wrap through 0
  std::vector<ClassId> instance_classes;
  std::vector<double> paste_angles;

  void validate() const {
    if (!std::isfinite(sector_start) || sector_start < 0.0 || sector_start >= kTwoPi) {
      throw Error(ErrorKind::kInvalidArgument, "sector start must lie in [0, 2pi)");
    }
    if (!std::isfinite(sector_width) || !(sector_width > 0.0) || sector_width > kTwoPi) {
      throw Error(ErrorKind::kInvalidArgument, "sector width must lie in (0, 2pi], got " + std::to_string(sector_width));
    }
    for (std::size_t i = 0; i < paste_angles.size(); ++i) {
      if (!std::isfinite(paste_angles[i])) throw Error(ErrorKind::kInvalidArgument, "paste angles must be finite");
      for (std::size_t j = 0; j < i; ++j) {
        if (paste_angles[i] == paste_angles[j]) throw Error(ErrorKind::kInvalidArgument, "paste angles must be distinct");
      }
    }
  }

  /// Half-open membership in [start, start + width) modulo 2π.
  bool in_sector(double alpha) const {
    double d = alpha - sector_start;
    if (d < 0.0) d += kTwoPi;
    if (d >= kTwoPi) d -= kTwoPi;
    return d < sector_width;
  }

  bool is_instance(ClassId c) const {
    return std::find(instance_classes.begin(), instance_classes.end(), c) != instance_classes.end();
  }

  friend bool operator==(const PolarMixPlan&, const PolarMixPlan&) = default;
};

/// Movable "thing" classes in taxonomy order: Car, Truck, Bus, Other Vehicle,
/// Motorcyclist, Bicyclist, Pedestrian, Construction Cone, Bicycle, Motorcycle.
inline std::vector<ClassId> default_instance_classes() { return {0, 1, 2, 3, 4, 5, 6, 10, 11, 12}; }

struct PolarMixOptions {
  double width_min = std::numbers::pi / 6.0;
  double width_max = std::numbers::pi;
  std::vector<ClassId> instance_classes = default_instance_classes();
  int paste_count = 2;
};

inline PolarMixPlan make_polarmix_plan(Rng& rng, const PolarMixOptions& options = {}) {
  if (!(options.width_min > 0.0) || options.width_max < options.width_min || options.width_max > kTwoPi) {
    throw Error(ErrorKind::kInvalidArgument, "sector width bounds must satisfy 0 < min <= max <= 2pi");
  }
  if (options.paste_count < 0) throw Error(ErrorKind::kInvalidArgument, "paste count must be >= 0");
  PolarMixPlan plan;
  plan.sector_start = rng.uniform(0.0, kTwoPi);
  plan.sector_width = rng.uniform(options.width_min, options.width_max);
  plan.instance_classes = options.instance_classes;
  while (static_cast<int>(plan.paste_angles.size()) < options.paste_count) {
    const double angle = rng.uniform(0.0, kTwoPi);
    if (std::find(plan.paste_angles.begin(), plan.paste_angles.end(), angle) == plan.paste_angles.end()) {
      plan.paste_angles.push_back(angle);
    }
  }
  return plan;
}

/// a's points outside the sector followed by b's points inside it.
template <typename Scalar>
PointCloud<Scalar> scene_swap(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b, const PolarMixPlan& plan) {
  plan.validate();
  require_same_labeling(a, b);
  IndexList a_keep, b_take;
  a_keep.reserve(static_cast<std::size_t>(a.size()));
  b_take.reserve(static_cast<std::size_t>(b.size()));
  const auto alpha_a = azimuth(a.coords);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!plan.in_sector(static_cast<double>(alpha_a(i)))) a_keep.push_back(i);
  }
  const auto alpha_b = azimuth(b.coords);
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (plan.in_sector(static_cast<double>(alpha_b(i)))) b_take.push_back(i);
  }
  return concat(gather(a, std::span<const Eigen::Index>(a_keep)), gather(b, std::span<const Eigen::Index>(b_take)));
}

/// `a` plus one yaw-rotated copy of b's instance-class points per paste angle.
template <typename Scalar>
PointCloud<Scalar> instance_paste(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b, const PolarMixPlan& plan) {
  plan.validate();
  if (plan.paste_angles.empty()) return a;
  if (!b.labeled()) throw Error(ErrorKind::kValidation, "instance paste requires a labeled source cloud");
  if (!a.empty() && !a.labeled()) throw Error(ErrorKind::kValidation, "instance paste requires a labeled target cloud");
  IndexList picked;
  for (std::size_t i = 0; i < b.labels->size(); ++i) {
    if (plan.is_instance((*b.labels)[i])) picked.push_back(static_cast<Eigen::Index>(i));
  }
  if (picked.empty()) return a;
  const PointCloud<Scalar> instances = gather(b, std::span<const Eigen::Index>(picked));
  PointCloud<Scalar> out = a;
  for (double angle : plan.paste_angles) {
    out = concat(out, apply_augmentation(instances, RigidAugmentation<Scalar>::rotation(Scalar(angle))));
  }
  return out;
}

/// scene_swap followed by instance_paste from b.
template <typename Scalar>
PointCloud<Scalar> polar_mix(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b, const PolarMixPlan& plan) {
  return instance_paste(scene_swap(a, b, plan), b, plan);
}

}  // namespace mixseg3d
