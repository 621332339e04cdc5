#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mixseg3d/io.hpp"
#include "mixseg3d/metrics.hpp"

namespace mixseg3d {

struct EvalReport {
  std::vector<std::string> class_names;
  ClassIou per_class_iou;  // ratios in [0, 1]
  double miou = 0.0;
  std::int64_t points = 0;
  std::vector<std::string> files;
};

EvalReport make_report(const ConfusionMatrix& matrix, const ClassMap& classmap, std::vector<std::string> files = {});

/// Ratio as a percentage with two decimals, e.g. 0.69827 -> "69.83".
std::string format_percent(double ratio);

/// Keys: class_names, per_class_iou (percent, null when absent), miou, points, files.
std::string report_json(const EvalReport& report);
std::string report_text(const EvalReport& report);

/// Accumulates every `*.label` file in `gt_dir` against the same-named file in
/// `pred_dir`. Files present on only one side are a pairing error naming them.
ConfusionMatrix evaluate_directories(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir,
                                     const ClassMap& classmap, std::vector<std::string>* files = nullptr);

}  // namespace mixseg3d
