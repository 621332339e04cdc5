#pragma once

// Test-only reference computations. They deliberately avoid the library's code
// paths (no Eigen transforms, no shared helpers) so they can check them.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Core>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Elevation via arcsine of z over the range.
inline double inclination(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  return r == 0.0 ? 0.0 : std::asin(z / r);
}

/// Azimuth via arccosine of x over the horizontal range, mirrored by the sign of y.
inline double azimuth(double x, double y) {
  const double h = std::sqrt(x * x + y * y);
  if (h == 0.0) return 0.0;
  const double a = std::acos(std::max(-1.0, std::min(1.0, x / h)));
  return y >= 0.0 ? a : 2.0 * kPi - a;
}

/// flip -> scale -> rotate -> shift, one scalar step at a time.
inline std::array<double, 3> transform(std::array<double, 3> p, double yaw, double scale, bool flip_x, bool flip_y,
                                       std::array<double, 3> shift) {
  if (flip_x) p[1] = -p[1];
  if (flip_y) p[0] = -p[0];
  for (auto& v : p) v *= scale;
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double x = c * p[0] - s * p[1];
  const double y = s * p[0] + c * p[1];
  return {x + shift[0], y + shift[1], p[2] + shift[2]};
}

/// Bin index by linear scan of half-open [edges[i], edges[i+1]); -1 when outside.
inline int bin_of(double theta, const std::vector<double>& edges) {
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (theta >= edges[i] && theta < edges[i + 1]) return static_cast<int>(i);
  }
  return -1;
}

inline bool in_sector(double alpha, double start, double width) {
  const double end = start + width;
  if (end <= 2.0 * kPi) return alpha >= start && alpha < end;
  return alpha >= start || alpha < end - 2.0 * kPi;
}

/// Nested-loop tally: counts[g][p] for every non-ignored point.
inline std::vector<std::vector<std::int64_t>> tally(const std::vector<std::uint32_t>& gt,
                                                    const std::vector<std::uint32_t>& pred, int classes,
                                                    std::uint32_t ignore) {
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(classes),
                                                std::vector<std::int64_t>(static_cast<std::size_t>(classes), 0));
  for (int g = 0; g < classes; ++g) {
    for (int p = 0; p < classes; ++p) {
      for (std::size_t i = 0; i < gt.size(); ++i) {
        if (gt[i] != ignore && gt[i] == static_cast<std::uint32_t>(g) && pred[i] == static_cast<std::uint32_t>(p)) {
          ++counts[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
        }
      }
    }
  }
  return counts;
}

/// IoU from per-point set membership counts: |gt==c and pred==c| / |gt==c or pred==c|.
inline std::vector<std::optional<double>> iou(const std::vector<std::uint32_t>& gt,
                                              const std::vector<std::uint32_t>& pred, int classes,
                                              std::uint32_t ignore) {
  std::vector<std::optional<double>> out(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    std::int64_t inter = 0, uni = 0;
    const auto cc = static_cast<std::uint32_t>(c);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i] == ignore) continue;
      inter += (gt[i] == cc && pred[i] == cc);
      uni += (gt[i] == cc || pred[i] == cc);
    }
    if (uni > 0) out[static_cast<std::size_t>(c)] = static_cast<double>(inter) / static_cast<double>(uni);
  }
  return out;
}

inline std::optional<double> mean(const std::vector<std::optional<double>>& v) {
  double s = 0.0;
  int n = 0;
  for (const auto& x : v) {
    if (x) {
      s += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / n;
}

/// Little-endian bytes of an IEEE-754 binary32 value, built from its fields.
inline std::array<std::uint8_t, 4> float_bytes(float v) {
  std::uint32_t bits = 0;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof v);
  return {static_cast<std::uint8_t>(bits & 0xFF), static_cast<std::uint8_t>((bits >> 8) & 0xFF),
          static_cast<std::uint8_t>((bits >> 16) & 0xFF), static_cast<std::uint8_t>((bits >> 24) & 0xFF)};
}

/// Multiset of (x, y, z, intensity, label) rows, for order-free cloud comparison.
template <typename Cloud>
std::map<std::tuple<double, double, double, double, std::uint32_t>, int> multiset(const Cloud& c) {
  std::map<std::tuple<double, double, double, double, std::uint32_t>, int> m;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const std::uint32_t label = c.labels ? (*c.labels)[static_cast<std::size_t>(i)] : 0xFFFFFFFFu;
    ++m[{static_cast<double>(c.coords(i, 0)), static_cast<double>(c.coords(i, 1)), static_cast<double>(c.coords(i, 2)),
         static_cast<double>(c.intensity(i)), label}];
  }
  return m;
}

}  // namespace oracle
