#include "mixseg3d/config.hpp"

#include <algorithm>
#include <numbers>
#include <set>

#include "json.hpp"
#include "mixseg3d/io.hpp"

namespace mixseg3d {
namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

void fail(const std::string& origin, const std::string& msg) {
  throw Error(ErrorKind::kValidation, origin + ": " + msg);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& origin,
                const std::string& scope) {
  if (!obj.is_object()) fail(origin, "'" + scope + "' must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) fail(origin, "unknown key '" + scope + item.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst, const std::string& origin, const std::string& scope) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(origin, "bad value for '" + scope + key + "': " + e.what());
  }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

void RunConfig::validate() const {
  const std::string origin = "config";
  if (!(p1 >= 0.0 && p1 <= 1.0)) fail(origin, "p1 must lie in [0, 1], got " + std::to_string(p1));
  if (!(p2 >= 0.0 && p2 <= 1.0)) fail(origin, "p2 must lie in [0, 1], got " + std::to_string(p2));
  if (bin_choices.empty()) fail(origin, "lasermix.bin_choices must not be empty");
  for (int b : bin_choices) {
    if (b < 1) fail(origin, "lasermix.bin_choices must be positive");
  }
  if (inclination_range_deg && !((*inclination_range_deg)[0] < (*inclination_range_deg)[1])) {
    fail(origin, "lasermix.inclination_range_deg must be [lo, hi] with lo < hi");
  }
  if (!(sector_width_deg[0] > 0.0 && sector_width_deg[0] <= sector_width_deg[1] && sector_width_deg[1] <= 360.0)) {
    fail(origin, "polarmix.sector_width_deg must satisfy 0 < min <= max <= 360");
  }
  if (paste_count < 0) fail(origin, "polarmix.paste_count must be >= 0");
  if (!(augment_scale[0] > 0.0 && augment_scale[0] <= augment_scale[1])) {
    fail(origin, "augment.scale must satisfy 0 < min <= max");
  }
  if (!(augment_flip_probability >= 0.0 && augment_flip_probability <= 1.0)) {
    fail(origin, "augment.flip_probability must lie in [0, 1]");
  }
  for (double s : augment_shift_m) {
    if (!(s >= 0.0)) fail(origin, "augment.shift_m entries must be >= 0");
  }
  if (tta_views != 1 && tta_views != 2 && tta_views != 4 && tta_views != 8 && tta_views != 16 && !tta_random) {
    fail(origin, "tta.views must be one of 1, 2, 4, 8, 16");
  }
  if (tta_views < 1) fail(origin, "tta.views must be positive");
  if (!(voxel_size > 0.0)) fail(origin, "voxel_size must be > 0");
}

LaserMixOptions RunConfig::lasermix_options() const {
  LaserMixOptions o;
  o.bin_choices = bin_choices;
  if (inclination_range_deg) {
    o.range = std::pair{(*inclination_range_deg)[0] * kDegToRad, (*inclination_range_deg)[1] * kDegToRad};
  }
  return o;
}

PolarMixOptions RunConfig::polarmix_options() const {
  PolarMixOptions o;
  o.width_min = sector_width_deg[0] * kDegToRad;
  o.width_max = std::min(sector_width_deg[1] * kDegToRad, kTwoPi);
  o.instance_classes = instance_classes;
  o.paste_count = paste_count;
  return o;
}

AugmentationRanges RunConfig::augmentation_ranges() const {
  AugmentationRanges r;
  r.scale_min = augment_scale[0];
  r.scale_max = augment_scale[1];
  r.flip_probability = augment_flip_probability;
  r.shift_max = Eigen::Vector3d(augment_shift_m[0], augment_shift_m[1], augment_shift_m[2]);
  return r;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return cfg;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, origin + ":" + std::to_string(line_of(text, e.byte)) + ": parse error: " + e.what());
  }
  check_keys(doc, {"p1", "p2", "lasermix", "polarmix", "augment", "tta", "voxel_size", "classmap"}, origin, "");
  read(doc, "p1", cfg.p1, origin, "");
  read(doc, "p2", cfg.p2, origin, "");
  read(doc, "voxel_size", cfg.voxel_size, origin, "");
  if (doc.contains("classmap") && !doc["classmap"].is_null()) {
    std::string path;
    read(doc, "classmap", path, origin, "");
    cfg.classmap = path;
  }
  if (doc.contains("lasermix")) {
    const auto& lm = doc["lasermix"];
    check_keys(lm, {"bin_choices", "inclination_range_deg"}, origin, "lasermix.");
    read(lm, "bin_choices", cfg.bin_choices, origin, "lasermix.");
    if (lm.contains("inclination_range_deg") && !lm["inclination_range_deg"].is_null()) {
      std::array<double, 2> range{};
      read(lm, "inclination_range_deg", range, origin, "lasermix.");
      cfg.inclination_range_deg = range;
    }
  }
  if (doc.contains("polarmix")) {
    const auto& pm = doc["polarmix"];
    check_keys(pm, {"sector_width_deg", "instance_classes", "paste_count"}, origin, "polarmix.");
    read(pm, "sector_width_deg", cfg.sector_width_deg, origin, "polarmix.");
    read(pm, "instance_classes", cfg.instance_classes, origin, "polarmix.");
    read(pm, "paste_count", cfg.paste_count, origin, "polarmix.");
  }
  if (doc.contains("augment")) {
    const auto& au = doc["augment"];
    check_keys(au, {"enabled", "scale", "flip_probability", "shift_m"}, origin, "augment.");
    read(au, "enabled", cfg.augment, origin, "augment.");
    read(au, "scale", cfg.augment_scale, origin, "augment.");
    read(au, "flip_probability", cfg.augment_flip_probability, origin, "augment.");
    read(au, "shift_m", cfg.augment_shift_m, origin, "augment.");
  }
  if (doc.contains("tta")) {
    const auto& t = doc["tta"];
    check_keys(t, {"views", "seed", "random"}, origin, "tta.");
    read(t, "views", cfg.tta_views, origin, "tta.");
    read(t, "seed", cfg.tta_seed, origin, "tta.");
    read(t, "random", cfg.tta_random, origin, "tta.");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()), path.string());
}

std::string serialize_config(const RunConfig& cfg) {
  json doc;
  doc["p1"] = cfg.p1;
  doc["p2"] = cfg.p2;
  doc["lasermix"] = {{"bin_choices", cfg.bin_choices},
                     {"inclination_range_deg", cfg.inclination_range_deg ? json(*cfg.inclination_range_deg) : json()}};
  doc["polarmix"] = {{"sector_width_deg", cfg.sector_width_deg},
                     {"instance_classes", cfg.instance_classes},
                     {"paste_count", cfg.paste_count}};
  doc["augment"] = {{"enabled", cfg.augment},
                    {"scale", cfg.augment_scale},
                    {"flip_probability", cfg.augment_flip_probability},
                    {"shift_m", cfg.augment_shift_m}};
  doc["tta"] = {{"views", cfg.tta_views}, {"seed", cfg.tta_seed}, {"random", cfg.tta_random}};
  doc["voxel_size"] = cfg.voxel_size;
  doc["classmap"] = cfg.classmap ? json(*cfg.classmap) : json();
  return doc.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  write_text(path, serialize_config(config));
}

}  // namespace mixseg3d
