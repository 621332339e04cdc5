#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixseg3d/config.hpp"
#include "mixseg3d/geometry.hpp"
#include "mixseg3d/lasermix.hpp"
#include "mixseg3d/point_cloud.hpp"
#include "mixseg3d/polarmix.hpp"

namespace mixseg3d {

enum class Strategy { kLaserMix, kPolarMix, kBoth };

Strategy parse_strategy(const std::string& name);
const char* to_string(Strategy s);

/// Everything random about one mix, enough to replay it without a random source.
struct MixRecord {
  Strategy strategy = Strategy::kBoth;
  std::uint64_t seed = 0;
  bool lasermix_triggered = false;
  bool polarmix_triggered = false;
  /// Per-scan global augmentations applied before mixing (present when enabled).
  std::optional<RigidAugmentation<double>> augment_a, augment_lasermix_partner, augment_polarmix_partner;
  std::optional<LaserMixPlan> lasermix;
  std::optional<PolarMixPlan> polarmix;
  /// Input files, informational; replay may override them.
  std::string scan_a, labels_a, lasermix_partner_scan, lasermix_partner_labels, polarmix_partner_scan,
      polarmix_partner_labels;

  friend bool operator==(const MixRecord&, const MixRecord&) = default;
};

struct MixResult {
  Cloud cloud;
  MixRecord record;
};

/// Trigger draws, optional per-scan augmentation, then LaserMix (probability p1)
/// followed by PolarMix (probability p2) on LaserMix's first output.
///
/// Both triggers are drawn first from `Rng(seed)`; strategies other than kBoth
/// ignore the other trigger. `lasermix_partner` and `polarmix_partner` may be the
/// same cloud.
MixResult mix(const Cloud& a, const Cloud& lasermix_partner, const Cloud& polarmix_partner, Strategy strategy,
              const RunConfig& config, std::uint64_t seed);

/// Re-executes a recorded mix. Bit-identical to the original run on the same inputs.
Cloud replay(const Cloud& a, const Cloud& lasermix_partner, const Cloud& polarmix_partner, const MixRecord& record);

/// Uniform partner index in [0, n) excluding `self`; returns `self` when n == 1.
std::size_t choose_partner(Rng& rng, std::size_t n, std::size_t self);

std::string serialize_record(const MixRecord& record);
MixRecord parse_record(const std::string& text, const std::string& origin = "<memory>");

}  // namespace mixseg3d
