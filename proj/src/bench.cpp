#include "mixseg3d/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "mixseg3d/lasermix.hpp"
#include "mixseg3d/polarmix.hpp"
#include "mixseg3d/scene.hpp"

namespace mixseg3d {

TimingStats summarize(std::string name, std::vector<double> samples_ms) {
  if (samples_ms.empty()) throw Error(ErrorKind::kInvalidArgument, "no timing samples");
  std::sort(samples_ms.begin(), samples_ms.end());
  const std::size_t n = samples_ms.size();
  TimingStats s;
  s.name = std::move(name);
  s.samples = n;
  s.median_ms = (n % 2 == 1) ? samples_ms[n / 2] : 0.5 * (samples_ms[n / 2 - 1] + samples_ms[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95_ms = samples_ms[std::max<std::size_t>(rank, 1) - 1];
  s.min_ms = samples_ms.front();
  s.max_ms = samples_ms.back();
  return s;
}

std::vector<TimingStats> run_mix_bench(std::int64_t points, int repeats, std::uint64_t seed) {
  if (points <= 0) throw Error(ErrorKind::kValidation, "benchmark point count must be > 0");
  if (repeats <= 0) throw Error(ErrorKind::kValidation, "benchmark repeats must be > 0");
  SceneSpec spec;
  spec.points = points;
  spec.seed = seed;
  const Cloud a = generate_scene(spec);
  spec.seed = seed + 1;
  const Cloud b = generate_scene(spec);

  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  std::vector<double> laser, polar;
  volatile std::size_t sink = 0;
  Rng rng(seed);
  for (int r = 0; r < repeats; ++r) {
    auto t0 = clock::now();
    const auto plan = make_lasermix_plan(a, b, rng);
    const auto mixed = laser_mix(a, b, plan);
    laser.push_back(ms_since(t0));
    sink = sink + static_cast<std::size_t>(mixed.first.size());

    t0 = clock::now();
    const auto pplan = make_polarmix_plan(rng);
    const auto pmixed = polar_mix(a, b, pplan);
    polar.push_back(ms_since(t0));
    sink = sink + static_cast<std::size_t>(pmixed.size());
  }
  return {summarize("laser_mix", std::move(laser)), summarize("polar_mix", std::move(polar))};
}

std::string format_bench(const std::vector<TimingStats>& stats, std::int64_t points) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "points per scan: %lld\n", static_cast<long long>(points));
  out += line;
  std::snprintf(line, sizeof line, "%-10s %8s %10s %10s %10s %10s\n", "op", "samples", "median_ms", "p95_ms", "min_ms",
                "max_ms");
  out += line;
  for (const auto& s : stats) {
    std::snprintf(line, sizeof line, "%-10s %8zu %10.3f %10.3f %10.3f %10.3f\n", s.name.c_str(), s.samples, s.median_ms,
                  s.p95_ms, s.min_ms, s.max_ms);
    out += line;
  }
  return out;
}

}  // namespace mixseg3d
