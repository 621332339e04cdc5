#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixseg3d/config.hpp"
#include "mixseg3d/pipeline.hpp"

namespace mixseg3d {

/// One row of the backbone x augmentation x TTA grid. The backbone column is
/// replaced by the stand-in model's voxel size.
struct AblationRow {
  std::string backbone;  // name of the network this row stands in for
  double voxel_size = 0.0;
  std::optional<Strategy> augmentation;
  int tta_views = 1;              // 1 = no TTA
  double reference_miou = 0.0;    // published value for the original network, reporting only
  double miou = 0.0;              // percent, measured on the synthetic validation scenes
};

/// The published grid with voxel sizes standing in for backbone depth.
std::vector<AblationRow> ablation_grid();

struct AblationSpec {
  std::uint64_t seed = 0;
  int train_scenes = 4;
  int val_scenes = 2;
  std::int64_t points = 20000;
  RunConfig config;  // p1/p2 are forced to 1 for the augmentation rows
};

/// Fits a stand-in model per row on synthetic training scenes (plus one mixed copy per
/// scene for augmented rows) and fills `miou` from the validation scenes.
std::vector<AblationRow> run_ablation(const AblationSpec& spec, std::vector<AblationRow> rows = ablation_grid());

std::string format_ablation(const std::vector<AblationRow>& rows);

}  // namespace mixseg3d
