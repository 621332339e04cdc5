#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mixseg3d/common.hpp"
#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/rng.hpp"

namespace mixseg3d {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2π).
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar two_pi = Scalar(kTwoPi);
  a = std::fmod(a, two_pi);
  if (a < Scalar(0)) a += two_pi;
  if (a >= two_pi) a = Scalar(0);
  return a + Scalar(0);  // -0 -> +0
}

/// Angle of each point's ray above the horizontal plane, in [-π/2, π/2].
template <typename Derived>
ScalarArray<typename Derived::Scalar> inclination(const Eigen::MatrixBase<Derived>& coords) {
  using Scalar = typename Derived::Scalar;
  ScalarArray<Scalar> out(coords.rows());
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const Scalar x = coords(i, 0), y = coords(i, 1), z = coords(i, 2);
    out(i) = std::atan2(z, std::sqrt(x * x + y * y));
  }
  return out;
}

/// Horizontal angle of each point around the z axis, in [0, 2π). Points on the
/// z axis map to 0.
template <typename Derived>
ScalarArray<typename Derived::Scalar> azimuth(const Eigen::MatrixBase<Derived>& coords) {
  using Scalar = typename Derived::Scalar;
  ScalarArray<Scalar> out(coords.rows());
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const Scalar x = coords(i, 0), y = coords(i, 1);
    out(i) = (x == Scalar(0) && y == Scalar(0)) ? Scalar(0) : wrap_angle(std::atan2(y, x));
  }
  return out;
}

/// Flip, uniform scale, yaw rotation and shift, always applied in that order.
///
/// flip_x mirrors across the x-z plane (negates y); flip_y mirrors across the
/// y-z plane (negates x).
template <typename Scalar_ = double>
struct RigidAugmentation {
  using Scalar = Scalar_;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

  Scalar yaw = Scalar(0);
  Scalar scale = Scalar(1);
  bool flip_x = false;
  bool flip_y = false;
  Vector3 shift = Vector3::Zero();

  static RigidAugmentation identity() { return {}; }

  static RigidAugmentation rotation(Scalar yaw) {
    RigidAugmentation aug;
    aug.yaw = wrap_angle(yaw);
    return aug;
  }

  bool is_identity() const {
    return yaw == Scalar(0) && scale == Scalar(1) && !flip_x && !flip_y && shift.isZero(Scalar(0));
  }

  void validate() const {
    if (!std::isfinite(scale) || !(scale > Scalar(0))) {
      throw Error(ErrorKind::kInvalidAugmentation, "scale must be finite and > 0, got " + std::to_string(scale));
    }
    if (!std::isfinite(yaw) || !shift.allFinite()) {
      throw Error(ErrorKind::kInvalidAugmentation, "yaw and shift must be finite");
    }
  }

  Matrix3 flip_matrix() const {
    return Vector3(flip_y ? Scalar(-1) : Scalar(1), flip_x ? Scalar(-1) : Scalar(1), Scalar(1)).asDiagonal();
  }

  Matrix3 rotation_matrix() const {
    return Eigen::AngleAxis<Scalar>(yaw, Vector3::UnitZ()).toRotationMatrix();
  }

  /// rotate * scale * flip
  Matrix3 linear() const { return rotation_matrix() * scale * flip_matrix(); }

  friend bool operator==(const RigidAugmentation& a, const RigidAugmentation& b) {
    return a.yaw == b.yaw && a.scale == b.scale && a.flip_x == b.flip_x && a.flip_y == b.flip_y && a.shift == b.shift;
  }
};

/// Transforms coordinates; point order, intensity and labels are unchanged.
template <typename Scalar>
PointCloud<Scalar> apply_augmentation(const PointCloud<Scalar>& cloud, const RigidAugmentation<Scalar>& aug) {
  aug.validate();
  if (aug.is_identity()) return cloud;
  PointCloud<Scalar> out = cloud;
  const auto linear = aug.linear();
  out.coords = (cloud.coords * linear.transpose()).rowwise() + aug.shift.transpose();
  return out;
}

/// Exact inverse within the same flip -> scale -> rotate -> shift family.
///
/// A single mirror reverses the sense of rotation (F R(a) = R(-a) F), so the
/// inverse keeps the flips, inverts the scale, and negates the yaw only when the
/// flip count is even.
template <typename Scalar>
RigidAugmentation<Scalar> invert_augmentation(const RigidAugmentation<Scalar>& aug) {
  aug.validate();
  RigidAugmentation<Scalar> inv;
  inv.flip_x = aug.flip_x;
  inv.flip_y = aug.flip_y;
  inv.scale = Scalar(1) / aug.scale;
  const bool single_mirror = aug.flip_x != aug.flip_y;
  inv.yaw = wrap_angle(single_mirror ? aug.yaw : -aug.yaw);
  inv.shift = -(inv.linear() * aug.shift);
  return inv;
}

/// Sampling ranges for random global augmentations.
struct AugmentationRanges {
  double scale_min = 0.95;
  double scale_max = 1.05;
  double flip_probability = 0.5;
  Eigen::Vector3d shift_max{0.2, 0.2, 0.2};  // meters, symmetric per axis
};

template <typename Scalar = double>
RigidAugmentation<Scalar> random_augmentation(Rng& rng, const AugmentationRanges& ranges = {}) {
  RigidAugmentation<Scalar> aug;
  aug.yaw = Scalar(rng.uniform(0.0, kTwoPi));
  aug.scale = Scalar(rng.uniform(ranges.scale_min, ranges.scale_max));
  aug.flip_x = rng.bernoulli(ranges.flip_probability);
  aug.flip_y = rng.bernoulli(ranges.flip_probability);
  for (int k = 0; k < 3; ++k) aug.shift(k) = Scalar(rng.uniform(-ranges.shift_max(k), ranges.shift_max(k)));
  return aug;
}

}  // namespace mixseg3d
