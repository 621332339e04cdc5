#include "mixseg3d/voxel_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mixseg3d/io.hpp"

namespace mixseg3d {
namespace {

constexpr std::uint32_t kModelVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  std::uint64_t uint(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) {
      throw Error(ErrorKind::kFormat, origin_ + ": truncated model at byte offset " + std::to_string(pos_));
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

VoxelMajorityModel::VoxelMajorityModel(double voxel_size, int classes, int search_radius)
    : voxel_size_(voxel_size), classes_(classes), search_radius_(search_radius), prior_(static_cast<std::size_t>(classes), 0) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw Error(ErrorKind::kValidation, "voxel size must be finite and > 0, got " + std::to_string(voxel_size));
  }
  if (classes < 1) throw Error(ErrorKind::kValidation, "model needs at least one class");
  if (search_radius < 0) throw Error(ErrorKind::kValidation, "search radius must be >= 0");
}

VoxelKey VoxelMajorityModel::key_of(double x, double y, double z) const {
  auto q = [&](double v) {
    const double cell = std::floor(v / voxel_size_);
    if (!(cell >= std::numeric_limits<std::int32_t>::min() / 2 && cell <= std::numeric_limits<std::int32_t>::max() / 2)) {
      throw Error(ErrorKind::kData, "coordinate " + std::to_string(v) + " is outside the voxel grid");
    }
    return static_cast<std::int32_t>(cell);
  };
  return {q(x), q(y), q(z)};
}

const VoxelMajorityModel::Histogram* VoxelMajorityModel::find(const VoxelKey& key) const {
  const auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

void VoxelMajorityModel::fit(const Cloud& cloud) {
  if (!cloud.labeled()) throw Error(ErrorKind::kValidation, "fitting requires a labeled cloud");
  const auto& labels = *cloud.labels;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const ClassId label = labels[static_cast<std::size_t>(i)];
    if (label == kIgnore) continue;
    if (label >= static_cast<ClassId>(classes_)) {
      throw Error(ErrorKind::kInvalidLabel, "label " + std::to_string(label) + " outside the model's classes");
    }
    auto& hist = table_[key_of(cloud.coords(i, 0), cloud.coords(i, 1), cloud.coords(i, 2))];
    if (hist.empty()) hist.assign(static_cast<std::size_t>(classes_), 0);
    ++hist[label];
    ++prior_[label];
  }
}

void VoxelMajorityModel::normalized_row(const Histogram& h, ScoreMap& out, Eigen::Index row) const {
  const auto total = static_cast<double>(std::accumulate(h.begin(), h.end(), std::uint64_t{0}));
  for (int c = 0; c < classes_; ++c) out(row, c) = static_cast<double>(h[static_cast<std::size_t>(c)]) / total;
}

ScoreMap VoxelMajorityModel::predict(const Cloud& cloud) const {
  if (table_.empty()) throw Error(ErrorKind::kDegenerateInput, "model has not been fitted on any labeled point");
  ScoreMap scores(cloud.size(), classes_);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const double x = cloud.coords(i, 0), y = cloud.coords(i, 1), z = cloud.coords(i, 2);
    const VoxelKey key = key_of(x, y, z);
    if (const Histogram* h = find(key)) {
      normalized_row(*h, scores, i);
      continue;
    }
    const Histogram* best = nullptr;
    VoxelKey best_key;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int dx = -search_radius_; dx <= search_radius_; ++dx) {
      for (int dy = -search_radius_; dy <= search_radius_; ++dy) {
        for (int dz = -search_radius_; dz <= search_radius_; ++dz) {
          const VoxelKey k{key.x + dx, key.y + dy, key.z + dz};
          const Histogram* h = find(k);
          if (!h) continue;
          const double cx = (k.x + 0.5) * voxel_size_ - x;
          const double cy = (k.y + 0.5) * voxel_size_ - y;
          const double cz = (k.z + 0.5) * voxel_size_ - z;
          const double d2 = cx * cx + cy * cy + cz * cz;
          if (d2 < best_d2 || (d2 == best_d2 && k < best_key)) {
            best = h;
            best_key = k;
            best_d2 = d2;
          }
        }
      }
    }
    normalized_row(best ? *best : prior_, scores, i);
  }
  return scores;
}

std::vector<std::uint8_t> VoxelMajorityModel::serialize() const {
  std::vector<std::pair<VoxelKey, const Histogram*>> sorted;
  sorted.reserve(table_.size());
  for (const auto& [k, h] : table_) sorted.emplace_back(k, &h);
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  Writer w;
  for (char c : {'M', 'S', 'V', 'M'}) w.bytes.push_back(static_cast<std::uint8_t>(c));
  w.u32(kModelVersion);
  w.f64(voxel_size_);
  w.u32(static_cast<std::uint32_t>(classes_));
  w.u32(static_cast<std::uint32_t>(search_radius_));
  for (auto c : prior_) w.u64(c);
  w.u64(sorted.size());
  for (const auto& [k, h] : sorted) {
    w.i32(k.x);
    w.i32(k.y);
    w.i32(k.z);
    const auto nnz = std::count_if(h->begin(), h->end(), [](std::uint64_t c) { return c > 0; });
    w.u32(static_cast<std::uint32_t>(nnz));
    for (std::size_t c = 0; c < h->size(); ++c) {
      if ((*h)[c] == 0) continue;
      w.u32(static_cast<std::uint32_t>(c));
      w.u64((*h)[c]);
    }
  }
  return std::move(w.bytes);
}

VoxelMajorityModel VoxelMajorityModel::deserialize(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 4 || bytes[0] != 'M' || bytes[1] != 'S' || bytes[2] != 'V' || bytes[3] != 'M') {
    throw Error(ErrorKind::kFormat, origin + ": not a voxel model file");
  }
  Reader r(bytes.subspan(4), origin);
  if (const auto version = r.u32(); version != kModelVersion) {
    throw Error(ErrorKind::kFormat, origin + ": unsupported model version " + std::to_string(version));
  }
  const double voxel = r.f64();
  const auto classes = static_cast<int>(r.u32());
  const auto radius = static_cast<int>(r.u32());
  VoxelMajorityModel model(voxel, classes, radius);
  for (auto& c : model.prior_) c = r.u64();
  const auto voxels = r.u64();
  for (std::uint64_t v = 0; v < voxels; ++v) {
    VoxelKey k;
    k.x = r.i32();
    k.y = r.i32();
    k.z = r.i32();
    Histogram h(static_cast<std::size_t>(classes), 0);
    const auto nnz = r.u32();
    for (std::uint32_t j = 0; j < nnz; ++j) {
      const auto c = r.u32();
      if (c >= static_cast<std::uint32_t>(classes)) throw Error(ErrorKind::kFormat, origin + ": class id out of range");
      h[c] = r.u64();
    }
    model.table_.emplace(k, std::move(h));
  }
  if (!r.done()) throw Error(ErrorKind::kFormat, origin + ": trailing bytes after model payload");
  return model;
}

void VoxelMajorityModel::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

VoxelMajorityModel VoxelMajorityModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path), path.string());
}

}  // namespace mixseg3d
