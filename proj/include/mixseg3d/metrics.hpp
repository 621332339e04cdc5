#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mixseg3d/common.hpp"

namespace mixseg3d {

/// C x C tally; rows are ground truth, columns are predictions.
class ConfusionMatrix {
 public:
  using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  explicit ConfusionMatrix(int classes = kNumClasses, ClassId ignore = kIgnore);

  /// Adds one count per point; ground-truth IGNORE points are skipped.
  void accumulate(std::span<const ClassId> gt, std::span<const ClassId> pred);

  /// Element-wise sum; the class counts must agree.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  int classes() const { return static_cast<int>(counts_.rows()); }
  ClassId ignore() const { return ignore_; }
  const Counts& counts() const { return counts_; }
  std::int64_t total() const { return counts_.sum(); }

  static ConfusionMatrix from_counts(const Counts& counts, ClassId ignore = kIgnore);

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.counts_.rows() == b.counts_.rows() && a.counts_ == b.counts_;
  }

 private:
  Counts counts_;
  ClassId ignore_;
};

inline ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }

using ClassIou = std::vector<std::optional<double>>;

/// TP / (TP + FP + FN) per class; absent when the denominator is zero.
ClassIou iou_per_class(const ConfusionMatrix& matrix);

/// Mean over present classes. Throws kUndefinedMetric when none are present.
double mean_iou(const ClassIou& ious);

}  // namespace mixseg3d
