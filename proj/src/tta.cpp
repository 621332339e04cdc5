#include "mixseg3d/tta.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

namespace mixseg3d {

std::vector<RigidAugmentation<double>> canonical_views(int k) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  auto grid = [&](int yaw_count, bool with_flip, double scale) {
    std::vector<RigidAugmentation<double>> views;
    const double step = kTwoPi / yaw_count;
    for (int i = 0; i < yaw_count; ++i) {
      for (int flip = 0; flip < (with_flip ? 2 : 1); ++flip) {
        RigidAugmentation<double> view;
        view.yaw = (yaw_count == 4) ? half_pi * i : step * i;
        view.flip_x = flip == 1;
        view.scale = scale;
        views.push_back(view);
      }
    }
    return views;
  };
  switch (k) {
    case 1: return {RigidAugmentation<double>::identity()};
    case 2: return grid(2, false, 1.0);
    case 4: return grid(4, false, 1.0);
    case 8: return grid(4, true, 1.0);
    case 16: {
      auto views = grid(4, true, 0.95);
      auto upper = grid(4, true, 1.05);
      views.insert(views.end(), upper.begin(), upper.end());
      return views;
    }
    default:
      throw Error(ErrorKind::kInvalidArgument, "unsupported TTA view count " + std::to_string(k) +
                                                   " (expected 1, 2, 4, 8 or 16)");
  }
}

std::vector<RigidAugmentation<double>> random_views(int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "view count must be positive");
  Rng rng(seed);
  std::vector<RigidAugmentation<double>> views{RigidAugmentation<double>::identity()};
  while (static_cast<int>(views.size()) < k) views.push_back(random_augmentation<double>(rng));
  return views;
}

void check_score_map(const ScoreMap& scores, Eigen::Index rows, int classes) {
  if (scores.rows() != rows) {
    throw Error(ErrorKind::kPredictorContract, "predictor returned " + std::to_string(scores.rows()) +
                                                   " score rows for " + std::to_string(rows) + " points");
  }
  if (scores.cols() != classes) {
    throw Error(ErrorKind::kPredictorContract, "predictor returned " + std::to_string(scores.cols()) +
                                                   " score columns, expected " + std::to_string(classes));
  }
  if (rows == 0) return;
  if (!scores.allFinite() || (scores.array() < 0.0).any()) {
    throw Error(ErrorKind::kPredictorContract, "predictor returned negative or non-finite scores");
  }
  const double worst = (scores.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (worst > kScoreRowTolerance) {
    throw Error(ErrorKind::kPredictorContract, "predictor score rows are not normalized (max deviation " +
                                                   std::to_string(worst) + ")");
  }
}

ScoreMap tta_predict(const Predictor& predictor, const Cloud& cloud, std::span<const RigidAugmentation<double>> views,
                     int jobs) {
  if (views.empty()) throw Error(ErrorKind::kInvalidArgument, "TTA needs at least one view");
  const int classes = predictor.class_count();
  std::vector<ScoreMap> per_view(views.size());
  auto run_view = [&](std::size_t v) {
    per_view[v] = predictor.predict(apply_augmentation(cloud, views[v]));
  };

  const std::size_t workers =
      predictor.concurrent_safe() ? std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, views.size()) : 1;
  if (workers == 1) {
    for (std::size_t v = 0; v < views.size(); ++v) run_view(v);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t v = w; v < views.size(); v += workers) run_view(v);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const auto& scores : per_view) check_score_map(scores, cloud.size(), classes);
  if (per_view.size() == 1) return std::move(per_view.front());

  ScoreMap mean = per_view.front();
  for (std::size_t v = 1; v < per_view.size(); ++v) mean += per_view[v];
  mean /= static_cast<double>(per_view.size());
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    const double total = mean.row(i).sum();
    if (total > 0.0) mean.row(i) /= total;
  }
  return mean;
}

std::vector<ClassId> argmax_labels(const ScoreMap& scores) {
  std::vector<ClassId> labels(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<ClassId>(best);
  }
  return labels;
}

}  // namespace mixseg3d
