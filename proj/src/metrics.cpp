#include "mixseg3d/metrics.hpp"

#include <string>

namespace mixseg3d {

ConfusionMatrix::ConfusionMatrix(int classes, ClassId ignore) : counts_(Counts::Zero(classes, classes)), ignore_(ignore) {
  if (classes < 1) throw Error(ErrorKind::kInvalidArgument, "confusion matrix needs at least one class");
  if (ignore < static_cast<ClassId>(classes)) {
    throw Error(ErrorKind::kInvalidArgument, "ignore label must lie outside [0, classes)");
  }
}

void ConfusionMatrix::accumulate(std::span<const ClassId> gt, std::span<const ClassId> pred) {
  if (gt.size() != pred.size()) {
    throw Error(ErrorKind::kPairing, "ground truth has " + std::to_string(gt.size()) + " labels but prediction has " +
                                         std::to_string(pred.size()));
  }
  const auto c = static_cast<ClassId>(classes());
  // Validate first so a failed call leaves the matrix untouched.
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (pred[i] >= c) {
      throw Error(ErrorKind::kInvalidLabel, "prediction " + std::to_string(pred[i]) + " at point " + std::to_string(i) +
                                                " is outside [0, " + std::to_string(c) + ")");
    }
    if (gt[i] >= c && gt[i] != ignore_) {
      throw Error(ErrorKind::kInvalidLabel, "ground truth " + std::to_string(gt[i]) + " at point " +
                                                std::to_string(i) + " is neither a class nor the ignore label");
    }
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == ignore_) continue;
    ++counts_(gt[i], pred[i]);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes() != classes()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot merge confusion matrices with different class counts");
  }
  counts_ += other.counts_;
  return *this;
}

ConfusionMatrix ConfusionMatrix::from_counts(const Counts& counts, ClassId ignore) {
  if (counts.rows() != counts.cols()) throw Error(ErrorKind::kInvalidArgument, "confusion counts must be square");
  if ((counts.array() < 0).any()) throw Error(ErrorKind::kInvalidArgument, "confusion counts must be non-negative");
  ConfusionMatrix m(static_cast<int>(counts.rows()), ignore);
  m.counts_ = counts;
  return m;
}

ClassIou iou_per_class(const ConfusionMatrix& matrix) {
  const auto& m = matrix.counts();
  ClassIou out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index c = 0; c < m.rows(); ++c) {
    const std::int64_t tp = m(c, c);
    const std::int64_t fn = m.row(c).sum() - tp;
    const std::int64_t fp = m.col(c).sum() - tp;
    const std::int64_t denom = tp + fp + fn;
    if (denom > 0) out[static_cast<std::size_t>(c)] = static_cast<double>(tp) / static_cast<double>(denom);
  }
  return out;
}

double mean_iou(const ClassIou& ious) {
  double sum = 0.0;
  int present = 0;
  for (const auto& v : ious) {
    if (!v) continue;
    sum += *v;
    ++present;
  }
  if (present == 0) throw Error(ErrorKind::kUndefinedMetric, "mIoU is undefined: no class is present");
  return sum / present;
}

}  // namespace mixseg3d
