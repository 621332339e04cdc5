#include "mixseg3d/ablation.hpp"

#include <cstdio>
#include <map>

#include "mixseg3d/metrics.hpp"
#include "mixseg3d/scene.hpp"
#include "mixseg3d/tta.hpp"
#include "mixseg3d/voxel_model.hpp"

namespace mixseg3d {

std::vector<AblationRow> ablation_grid() {
  const auto both = Strategy::kBoth;
  return {
      {"MinkUNet-18", 0.50, std::nullopt, 1, 68.02},
      {"MinkUNet-34", 0.35, std::nullopt, 1, 70.18},
      {"MinkUNet-50", 0.25, std::nullopt, 1, 70.34},
      {"MinkUNet-101", 0.15, std::nullopt, 1, 70.98},
      {"MinkUNet-101", 0.15, Strategy::kLaserMix, 1, 71.37},
      {"MinkUNet-101", 0.15, Strategy::kPolarMix, 1, 71.31},
      {"MinkUNet-101", 0.15, both, 1, 72.06},
      {"MinkUNet-101", 0.15, both, 3, 72.41},
      {"MinkUNet-101", 0.15, both, 6, 72.67},
      {"MinkUNet-101", 0.15, both, 8, 74.03},
      {"MinkUNet-101", 0.15, both, 10, 73.67},
  };
}

std::vector<AblationRow> run_ablation(const AblationSpec& spec, std::vector<AblationRow> rows) {
  if (spec.train_scenes < 2 || spec.val_scenes < 1) {
    throw Error(ErrorKind::kValidation, "ablation needs >= 2 training scenes and >= 1 validation scene");
  }
  auto scenes = [&](int count, std::uint64_t stream) {
    std::vector<Cloud> out;
    for (int i = 0; i < count; ++i) {
      SceneSpec s;
      s.points = spec.points;
      s.seed = derive_seed(derive_seed(spec.seed, stream), static_cast<std::uint64_t>(i));
      out.push_back(generate_scene(s));
    }
    return out;
  };
  const auto train = scenes(spec.train_scenes, 1);
  const auto val = scenes(spec.val_scenes, 2);

  RunConfig cfg = spec.config;
  cfg.p1 = 1.0;
  cfg.p2 = 1.0;
  const auto n = train.size();
  std::map<int, std::vector<Cloud>> mixed;  // keyed by strategy
  auto mixed_set = [&](Strategy strategy) -> const std::vector<Cloud>& {
    auto& slot = mixed[static_cast<int>(strategy)];
    if (slot.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto seed = derive_seed(spec.seed + 7, i);
        Rng partner_rng(derive_seed(seed, 0));
        const auto lp = choose_partner(partner_rng, n, i);
        const auto pp = choose_partner(partner_rng, n, i);
        slot.push_back(mix(train[i], train[lp], train[pp], strategy, cfg, seed).cloud);
      }
    }
    return slot;
  };

  for (auto& row : rows) {
    VoxelMajorityModel model(row.voxel_size);
    for (const auto& c : train) model.fit(c);
    if (row.augmentation) {
      for (const auto& c : mixed_set(*row.augmentation)) model.fit(c);
    }
    const auto views = (row.tta_views == 1 || row.tta_views == 2 || row.tta_views == 4 || row.tta_views == 8 ||
                        row.tta_views == 16)
                           ? canonical_views(row.tta_views)
                           : random_views(row.tta_views, spec.seed);
    ConfusionMatrix matrix;
    for (const auto& c : val) {
      const auto pred = argmax_labels(tta_predict(model, c, views));
      matrix.accumulate(*c.labels, pred);
    }
    row.miou = mean_iou(iou_per_class(matrix)) * 100.0;
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-14s %7s %-20s %5s %10s %10s\n", "backbone", "voxel", "aug", "tta", "reference",
                "stand-in");
  out += line;
  for (const auto& r : rows) {
    const std::string aug = !r.augmentation                       ? "None"
                            : *r.augmentation == Strategy::kLaserMix ? "LaserMix"
                            : *r.augmentation == Strategy::kPolarMix ? "PolarMix"
                                                                     : "LaserMix + PolarMix";
    const std::string tta = r.tta_views == 1 ? "None" : std::to_string(r.tta_views);
    std::snprintf(line, sizeof line, "%-14s %7.2f %-20s %5s %10.2f %10.2f\n", r.backbone.c_str(), r.voxel_size,
                  aug.c_str(), tta.c_str(), r.reference_miou, r.miou);
    out += line;
  }
  return out;
}

}  // namespace mixseg3d
