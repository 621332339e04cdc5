#include "mixseg3d/pipeline.hpp"

#include "json.hpp"

namespace mixseg3d {
namespace {

using nlohmann::json;

json to_json(const RigidAugmentation<double>& a) {
  return {{"yaw", a.yaw},       {"scale", a.scale},
          {"flip_x", a.flip_x}, {"flip_y", a.flip_y},
          {"shift", {a.shift.x(), a.shift.y(), a.shift.z()}}};
}

RigidAugmentation<double> augmentation_from(const json& j) {
  RigidAugmentation<double> a;
  a.yaw = j.at("yaw").get<double>();
  a.scale = j.at("scale").get<double>();
  a.flip_x = j.at("flip_x").get<bool>();
  a.flip_y = j.at("flip_y").get<bool>();
  const auto s = j.at("shift").get<std::vector<double>>();
  if (s.size() != 3) throw Error(ErrorKind::kFormat, "augmentation shift must have 3 components");
  a.shift = Eigen::Vector3d(s[0], s[1], s[2]);
  return a;
}

json optional_json(const std::optional<RigidAugmentation<double>>& a) { return a ? to_json(*a) : json(); }

std::optional<RigidAugmentation<double>> optional_augmentation(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return augmentation_from(j.at(key));
}

Cloud maybe_augment(const Cloud& cloud, const std::optional<RigidAugmentation<double>>& aug) {
  return aug ? apply_augmentation(cloud, *aug) : cloud;
}

bool uses_lasermix(Strategy s) { return s != Strategy::kPolarMix; }
bool uses_polarmix(Strategy s) { return s != Strategy::kLaserMix; }

/// Shared by mix() and replay(). With `rng`, missing randomness is drawn and recorded.
Cloud execute(const Cloud& a, const Cloud& lm_partner, const Cloud& pm_partner, MixRecord& rec, Rng* rng,
              const RunConfig* config) {
  const bool augment = rng ? config->augment : false;
  if (rng && augment) {
    const auto ranges = config->augmentation_ranges();
    rec.augment_a = random_augmentation<double>(*rng, ranges);
    if (rec.lasermix_triggered) rec.augment_lasermix_partner = random_augmentation<double>(*rng, ranges);
    if (rec.polarmix_triggered) rec.augment_polarmix_partner = random_augmentation<double>(*rng, ranges);
  }
  Cloud current = maybe_augment(a, rec.augment_a);
  if (rec.lasermix_triggered) {
    const Cloud partner = maybe_augment(lm_partner, rec.augment_lasermix_partner);
    if (rng) rec.lasermix = make_lasermix_plan(current, partner, *rng, config->lasermix_options());
    if (!rec.lasermix) throw Error(ErrorKind::kFormat, "record marks LaserMix as triggered but has no plan");
    current = laser_mix(current, partner, *rec.lasermix).first;
  }
  if (rec.polarmix_triggered) {
    const Cloud partner = maybe_augment(pm_partner, rec.augment_polarmix_partner);
    if (rng) rec.polarmix = make_polarmix_plan(*rng, config->polarmix_options());
    if (!rec.polarmix) throw Error(ErrorKind::kFormat, "record marks PolarMix as triggered but has no plan");
    current = polar_mix(current, partner, *rec.polarmix);
  }
  return current;
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
  if (name == "lasermix") return Strategy::kLaserMix;
  if (name == "polarmix") return Strategy::kPolarMix;
  if (name == "both") return Strategy::kBoth;
  throw Error(ErrorKind::kValidation, "unknown strategy '" + name + "' (expected lasermix, polarmix or both)");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kLaserMix: return "lasermix";
    case Strategy::kPolarMix: return "polarmix";
    case Strategy::kBoth: return "both";
  }
  return "both";
}

MixResult mix(const Cloud& a, const Cloud& lasermix_partner, const Cloud& polarmix_partner, Strategy strategy,
              const RunConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  MixResult result;
  MixRecord& rec = result.record;
  rec.strategy = strategy;
  rec.seed = seed;
  const bool fire1 = rng.bernoulli(config.p1);
  const bool fire2 = rng.bernoulli(config.p2);
  rec.lasermix_triggered = uses_lasermix(strategy) && fire1;
  rec.polarmix_triggered = uses_polarmix(strategy) && fire2;
  result.cloud = execute(a, lasermix_partner, polarmix_partner, rec, &rng, &config);
  return result;
}

Cloud replay(const Cloud& a, const Cloud& lasermix_partner, const Cloud& polarmix_partner, const MixRecord& record) {
  MixRecord rec = record;
  return execute(a, lasermix_partner, polarmix_partner, rec, nullptr, nullptr);
}

std::size_t choose_partner(Rng& rng, std::size_t n, std::size_t self) {
  if (n == 0) throw Error(ErrorKind::kDegenerateInput, "cannot choose a mixing partner from an empty set");
  if (n == 1) return self;
  const auto pick = static_cast<std::size_t>(rng.below(n - 1));
  return pick >= self ? pick + 1 : pick;
}

std::string serialize_record(const MixRecord& r) {
  json doc;
  doc["strategy"] = to_string(r.strategy);
  doc["seed"] = r.seed;
  doc["inputs"] = {{"scan_a", r.scan_a},
                   {"labels_a", r.labels_a},
                   {"lasermix_partner_scan", r.lasermix_partner_scan},
                   {"lasermix_partner_labels", r.lasermix_partner_labels},
                   {"polarmix_partner_scan", r.polarmix_partner_scan},
                   {"polarmix_partner_labels", r.polarmix_partner_labels}};
  doc["augment"] = {{"a", optional_json(r.augment_a)},
                    {"lasermix_partner", optional_json(r.augment_lasermix_partner)},
                    {"polarmix_partner", optional_json(r.augment_polarmix_partner)},
                    {"scope", "per-scan"}};
  json lm = {{"triggered", r.lasermix_triggered}};
  if (r.lasermix) {
    lm["bin_edges"] = r.lasermix->bin_edges;
    lm["parity_offset"] = r.lasermix->parity_offset;
  }
  doc["lasermix"] = lm;
  json pm = {{"triggered", r.polarmix_triggered}};
  if (r.polarmix) {
    pm["sector_start"] = r.polarmix->sector_start;
    pm["sector_width"] = r.polarmix->sector_width;
    pm["instance_classes"] = r.polarmix->instance_classes;
    pm["paste_angles"] = r.polarmix->paste_angles;
  }
  doc["polarmix"] = pm;
  return doc.dump(2) + "\n";
}

MixRecord parse_record(const std::string& text, const std::string& origin) {
  try {
    const json doc = json::parse(text);
    MixRecord r;
    r.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    r.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("inputs")) {
      const auto& in = doc["inputs"];
      r.scan_a = in.value("scan_a", "");
      r.labels_a = in.value("labels_a", "");
      r.lasermix_partner_scan = in.value("lasermix_partner_scan", "");
      r.lasermix_partner_labels = in.value("lasermix_partner_labels", "");
      r.polarmix_partner_scan = in.value("polarmix_partner_scan", "");
      r.polarmix_partner_labels = in.value("polarmix_partner_labels", "");
    }
    if (doc.contains("augment")) {
      const auto& au = doc["augment"];
      r.augment_a = optional_augmentation(au, "a");
      r.augment_lasermix_partner = optional_augmentation(au, "lasermix_partner");
      r.augment_polarmix_partner = optional_augmentation(au, "polarmix_partner");
    }
    const auto& lm = doc.at("lasermix");
    r.lasermix_triggered = lm.at("triggered").get<bool>();
    if (lm.contains("bin_edges")) {
      LaserMixPlan plan;
      plan.bin_edges = lm.at("bin_edges").get<std::vector<double>>();
      plan.parity_offset = lm.at("parity_offset").get<int>();
      plan.validate();
      r.lasermix = std::move(plan);
    }
    const auto& pm = doc.at("polarmix");
    r.polarmix_triggered = pm.at("triggered").get<bool>();
    if (pm.contains("sector_start")) {
      PolarMixPlan plan;
      plan.sector_start = pm.at("sector_start").get<double>();
      plan.sector_width = pm.at("sector_width").get<double>();
      plan.instance_classes = pm.at("instance_classes").get<std::vector<ClassId>>();
      plan.paste_angles = pm.at("paste_angles").get<std::vector<double>>();
      plan.validate();
      r.polarmix = std::move(plan);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, origin + ": malformed mix record: " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, origin + ": invalid mix record: " + e.what());
  }
}

}  // namespace mixseg3d
