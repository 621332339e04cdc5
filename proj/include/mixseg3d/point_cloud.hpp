#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixseg3d/common.hpp"

namespace mixseg3d {

template <typename Scalar>
using Coords = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

template <typename Scalar>
using ScalarArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using IndexList = std::vector<Eigen::Index>;

/// A LiDAR scan: coordinates in meters (x forward, y left, z up, sensor at the
/// origin), per-point intensity and optional per-point class labels.
template <typename Scalar_ = double>
struct PointCloud {
  using Scalar = Scalar_;

  Coords<Scalar> coords;
  ScalarArray<Scalar> intensity;
  std::optional<std::vector<ClassId>> labels;

  PointCloud() : coords(0, 3), intensity(0) {}

  explicit PointCloud(Eigen::Index n, bool labeled = false) : coords(n, 3), intensity(n) {
    coords.setZero();
    intensity.setZero();
    if (labeled) labels.emplace(static_cast<std::size_t>(n), ClassId{0});
  }

  Eigen::Index size() const { return coords.rows(); }
  bool empty() const { return coords.rows() == 0; }
  bool labeled() const { return labels.has_value(); }

  /// Throws kValidation when shapes disagree or any value is non-finite.
  void validate() const {
    if (intensity.size() != coords.rows()) {
      throw Error(ErrorKind::kValidation, "intensity count " + std::to_string(intensity.size()) +
                                              " != point count " + std::to_string(coords.rows()));
    }
    if (labels && static_cast<Eigen::Index>(labels->size()) != coords.rows()) {
      throw Error(ErrorKind::kValidation, "label count " + std::to_string(labels->size()) +
                                              " != point count " + std::to_string(coords.rows()));
    }
    if (!coords.allFinite() || !intensity.allFinite()) {
      throw Error(ErrorKind::kValidation, "point cloud contains non-finite values");
    }
    if ((intensity < Scalar(0)).any()) {
      throw Error(ErrorKind::kValidation, "point cloud contains negative intensity");
    }
  }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.coords.rows() == b.coords.rows() && a.coords == b.coords && a.intensity.matrix() == b.intensity.matrix() &&
           a.labels == b.labels;
  }

  template <typename Other>
  PointCloud<Other> cast() const {
    PointCloud<Other> out;
    out.coords = coords.template cast<Other>();
    out.intensity = intensity.template cast<Other>();
    out.labels = labels;
    return out;
  }
};

using Cloud = PointCloud<double>;
using Cloudf = PointCloud<float>;

/// Rows of `cloud` at `indices`, in the given order.
template <typename Scalar>
PointCloud<Scalar> gather(const PointCloud<Scalar>& cloud, std::span<const Eigen::Index> indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  PointCloud<Scalar> out;
  out.coords.resize(n, 3);
  out.intensity.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = indices[static_cast<std::size_t>(i)];
    out.coords.row(i) = cloud.coords.row(src);
    out.intensity(i) = cloud.intensity(src);
  }
  if (cloud.labels) {
    std::vector<ClassId> labels(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) labels[i] = (*cloud.labels)[static_cast<std::size_t>(indices[i])];
    out.labels = std::move(labels);
  }
  return out;
}

/// `a` followed by `b`. Unless one side is empty, both or neither must be labeled.
template <typename Scalar>
PointCloud<Scalar> concat(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.labeled() != b.labeled()) {
    throw Error(ErrorKind::kValidation, "cannot concatenate a labeled cloud with an unlabeled one");
  }
  PointCloud<Scalar> out;
  out.coords.resize(a.size() + b.size(), 3);
  out.coords.topRows(a.size()) = a.coords;
  out.coords.bottomRows(b.size()) = b.coords;
  out.intensity.resize(a.size() + b.size());
  out.intensity.head(a.size()) = a.intensity;
  out.intensity.tail(b.size()) = b.intensity;
  if (a.labels) {
    std::vector<ClassId> labels;
    labels.reserve(a.labels->size() + b.labels->size());
    labels.insert(labels.end(), a.labels->begin(), a.labels->end());
    labels.insert(labels.end(), b.labels->begin(), b.labels->end());
    out.labels = std::move(labels);
  }
  return out;
}

/// Throws kValidation unless `a` and `b` are both labeled or both unlabeled. Empty clouds match either.
template <typename Scalar>
void require_same_labeling(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b) {
  if (!a.empty() && !b.empty() && a.labeled() != b.labeled()) {
    throw Error(ErrorKind::kValidation, "mixed clouds must both be labeled or both unlabeled");
  }
}

}  // namespace mixseg3d
