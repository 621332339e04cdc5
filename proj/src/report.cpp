#include "mixseg3d/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json.hpp"

namespace mixseg3d {

EvalReport make_report(const ConfusionMatrix& matrix, const ClassMap& classmap, std::vector<std::string> files) {
  if (matrix.classes() != classmap.size()) {
    throw Error(ErrorKind::kValidation, "class map lists " + std::to_string(classmap.size()) +
                                            " classes but the confusion matrix has " + std::to_string(matrix.classes()));
  }
  EvalReport r;
  r.class_names = classmap.names;
  r.per_class_iou = iou_per_class(matrix);
  r.miou = mean_iou(r.per_class_iou);
  r.points = matrix.total();
  r.files = std::move(files);
  return r;
}

std::string format_percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ratio * 100.0);
  return buf;
}

std::string report_json(const EvalReport& r) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["class_names"] = r.class_names;
  ordered_json ious = ordered_json::array();
  for (const auto& v : r.per_class_iou) ious.push_back(v ? ordered_json(std::stod(format_percent(*v))) : ordered_json());
  doc["per_class_iou"] = ious;
  doc["miou"] = std::stod(format_percent(r.miou));
  doc["points"] = r.points;
  doc["files"] = r.files;
  return doc.dump(2) + "\n";
}

std::string report_text(const EvalReport& r) {
  std::size_t width = 5;
  for (const auto& n : r.class_names) width = std::max(width, n.size());
  std::string out;
  char line[128];
  for (std::size_t c = 0; c < r.class_names.size(); ++c) {
    const auto& v = r.per_class_iou[c];
    std::snprintf(line, sizeof line, "%-*s %7s\n", static_cast<int>(width), r.class_names[c].c_str(),
                  v ? format_percent(*v).c_str() : "-");
    out += line;
  }
  std::snprintf(line, sizeof line, "%-*s %7s\n", static_cast<int>(width), "mIoU", format_percent(r.miou).c_str());
  out += line;
  return out;
}

ConfusionMatrix evaluate_directories(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir,
                                     const ClassMap& classmap, std::vector<std::string>* files) {
  auto list = [](const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::kIo, "not a directory: " + dir.string());
    std::set<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".label") names.insert(entry.path().filename().string());
    }
    return names;
  };
  const auto gt = list(gt_dir);
  const auto pred = list(pred_dir);
  std::vector<std::string> unpaired;
  for (const auto& n : gt) {
    if (!pred.contains(n)) unpaired.push_back(pred_dir.string() + "/" + n + " (missing prediction)");
  }
  for (const auto& n : pred) {
    if (!gt.contains(n)) unpaired.push_back(gt_dir.string() + "/" + n + " (missing ground truth)");
  }
  if (!unpaired.empty()) {
    std::string msg = "unpaired label files:";
    for (const auto& u : unpaired) msg += "\n  " + u;
    throw Error(ErrorKind::kPairing, msg);
  }
  if (gt.empty()) throw Error(ErrorKind::kDegenerateInput, "no .label files in " + gt_dir.string());

  ConfusionMatrix matrix(classmap.size(), classmap.ignore);
  for (const auto& name : gt) {
    const auto g = read_labels(gt_dir / name, std::nullopt, classmap.size());
    const auto p = read_labels(pred_dir / name, g.size(), classmap.size());
    matrix.accumulate(g, p);
    if (files) files->push_back(name);
  }
  return matrix;
}

}  // namespace mixseg3d
