#pragma once

#include <algorithm>
#include <limits>
#include <tuple>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixseg3d/geometry.hpp"
#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/rng.hpp"

namespace mixseg3d {

/// Resolved randomness of one inclination-partition mix.
struct LaserMixPlan {
  std::vector<double> bin_edges;  // B + 1 strictly increasing radians; bins are [lo, hi)
  int parity_offset = 0;          // bins with index % 2 == parity_offset come from the first scan

  int bin_count() const { return static_cast<int>(bin_edges.size()) - 1; }

  void validate() const {
    if (bin_edges.size() < 2) throw Error(ErrorKind::kInvalidArgument, "LaserMix plan needs at least 2 bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
      if (!(bin_edges[i] > bin_edges[i - 1])) {
        throw Error(ErrorKind::kInvalidArgument, "LaserMix bin edges must be strictly increasing");
      }
    }
    if (parity_offset != 0 && parity_offset != 1) {
      throw Error(ErrorKind::kInvalidArgument, "LaserMix parity offset must be 0 or 1");
    }
  }

  /// Index of the half-open bin holding `theta`, or -1 when outside the plan.
  int bin_of(double theta) const {
    if (!(theta >= bin_edges.front()) || !(theta < bin_edges.back())) return -1;
    const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), theta);
    return static_cast<int>(it - bin_edges.begin()) - 1;
  }

  friend bool operator==(const LaserMixPlan&, const LaserMixPlan&) = default;
};

struct LaserMixOptions {
  std::vector<int> bin_choices{3, 4, 5, 6};
  /// Fixed inclination range (radians) replacing the data-derived one, e.g. a sensor's vertical FOV.
  std::optional<std::pair<double, double>> range;
};

/// Nudge applied to the top edge so the highest-inclination point falls inside the last bin.
inline constexpr double kLaserMixEdgeEpsilon = 1e-9;

/// Evenly spaced edges from lo to hi inclusive.
inline std::vector<double> uniform_edges(double lo, double hi, int bins) {
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  const double step = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + step * i;
  edges.back() = hi;
  return edges;
}

template <typename Scalar>
LaserMixPlan make_lasermix_plan(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b, Rng& rng,
                                const LaserMixOptions& options = {}) {
  if (options.bin_choices.empty()) throw Error(ErrorKind::kInvalidArgument, "bin_choices must not be empty");
  for (int c : options.bin_choices) {
    if (c < 1) throw Error(ErrorKind::kInvalidArgument, "bin choices must be positive, got " + std::to_string(c));
  }
  double lo = 0.0, hi = 0.0;
  if (options.range) {
    std::tie(lo, hi) = *options.range;
    if (!(hi > lo)) throw Error(ErrorKind::kInvalidArgument, "inclination range must satisfy lo < hi");
  } else {
    if (a.empty() && b.empty()) throw Error(ErrorKind::kDegenerateInput, "cannot plan LaserMix for two empty clouds");
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (const auto* cloud : {&a, &b}) {
      if (cloud->empty()) continue;
      const auto theta = inclination(cloud->coords);
      lo = std::min(lo, static_cast<double>(theta.minCoeff()));
      hi = std::max(hi, static_cast<double>(theta.maxCoeff()));
    }
    hi += kLaserMixEdgeEpsilon;
  }
  const int bins = options.bin_choices[rng.below(options.bin_choices.size())];
  LaserMixPlan plan;
  plan.bin_edges = uniform_edges(lo, hi, bins);
  plan.parity_offset = static_cast<int>(rng.below(2));
  return plan;
}

namespace detail {

/// Splits the point indices of `cloud` into (bins with parity == offset, the rest).
template <typename Scalar>
std::pair<IndexList, IndexList> split_by_parity(const PointCloud<Scalar>& cloud, const LaserMixPlan& plan,
                                                const char* name) {
  const auto theta = inclination(cloud.coords);
  std::pair<IndexList, IndexList> out;
  out.first.reserve(static_cast<std::size_t>(cloud.size()));
  out.second.reserve(static_cast<std::size_t>(cloud.size()));
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const int bin = plan.bin_of(static_cast<double>(theta(i)));
    if (bin < 0) {
      throw Error(ErrorKind::kPlanMismatch, std::string("point ") + std::to_string(i) + " of " + name +
                                                " has inclination " + std::to_string(theta(i)) +
                                                " outside the plan's bin edges");
    }
    ((bin % 2) == plan.parity_offset ? out.first : out.second).push_back(i);
  }
  return out;
}

}  // namespace detail

/// Assembles two scans from alternating inclination bins.
///
/// first  = a's points in bins with parity == offset, then b's points in the other bins
/// second = b's points in bins with parity == offset, then a's points in the other bins
template <typename Scalar>
std::pair<PointCloud<Scalar>, PointCloud<Scalar>> laser_mix(const PointCloud<Scalar>& a, const PointCloud<Scalar>& b,
                                                            const LaserMixPlan& plan) {
  plan.validate();
  require_same_labeling(a, b);
  const auto [a_keep, a_give] = detail::split_by_parity(a, plan, "first cloud");
  const auto [b_keep, b_give] = detail::split_by_parity(b, plan, "second cloud");
  return {concat(gather(a, std::span<const Eigen::Index>(a_keep)), gather(b, std::span<const Eigen::Index>(b_give))),
          concat(gather(b, std::span<const Eigen::Index>(b_keep)), gather(a, std::span<const Eigen::Index>(a_give)))};
}

}  // namespace mixseg3d
