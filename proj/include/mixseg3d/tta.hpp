#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mixseg3d/geometry.hpp"
#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/rng.hpp"

namespace mixseg3d {

/// N x C per-point class scores; each row sums to 1.
using ScoreMap = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kScoreRowTolerance = 1e-5;

/// Per-point classifier. predict() must be a pure function of the cloud.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual ScoreMap predict(const Cloud& cloud) const = 0;
  virtual int class_count() const = 0;

  /// False when predict() must not be called from several threads at once.
  virtual bool concurrent_safe() const { return true; }
};

/// Forwards to another predictor and counts inference calls.
class CountingPredictor final : public Predictor {
 public:
  explicit CountingPredictor(const Predictor& inner) : inner_(inner) {}

  ScoreMap predict(const Cloud& cloud) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.predict(cloud);
  }
  int class_count() const override { return inner_.class_count(); }
  bool concurrent_safe() const override { return inner_.concurrent_safe(); }

  std::size_t calls() const { return calls_.load(); }

 private:
  const Predictor& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

/// Deterministic view grid for k in {1, 2, 4, 8, 16}.
///
/// k=1 identity; k=2 yaw {0, π}; k=4 yaw quarter turns; k=8 quarter turns x
/// {no flip, flip_x}; k=16 the k=8 grid at scales {0.95, 1.05}. Scale 1 and zero
/// shift unless stated; the identity view comes first for k <= 8.
std::vector<RigidAugmentation<double>> canonical_views(int k);

/// k seeded random views (yaw, flips, scale in [0.95, 1.05], shift in [-0.2, 0.2] m per axis).
/// The first view is the identity.
std::vector<RigidAugmentation<double>> random_views(int k, std::uint64_t seed);

/// Throws kPredictorContract unless `scores` is rows x classes, non-negative and row-normalized.
void check_score_map(const ScoreMap& scores, Eigen::Index rows, int classes);

/// Mean of the predictor's scores over augmented copies of `cloud`, renormalized per row.
///
/// Views are evaluated on up to `jobs` threads (serial when the predictor is not
/// concurrent-safe); the reduction always runs in view order. A single view returns
/// the predictor's output unchanged.
ScoreMap tta_predict(const Predictor& predictor, const Cloud& cloud, std::span<const RigidAugmentation<double>> views,
                     int jobs = 1);

/// Per-row argmax; ties go to the lowest class index.
std::vector<ClassId> argmax_labels(const ScoreMap& scores);

}  // namespace mixseg3d
