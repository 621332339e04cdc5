#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixseg3d {

struct TimingStats {
  std::string name;
  std::size_t samples = 0;
  double median_ms = 0.0;
  double p95_ms = 0.0;  // nearest rank
  double min_ms = 0.0;
  double max_ms = 0.0;
};

TimingStats summarize(std::string name, std::vector<double> samples_ms);

/// Times plan + mix for LaserMix and PolarMix on two synthetic scenes of `points` points each.
std::vector<TimingStats> run_mix_bench(std::int64_t points, int repeats, std::uint64_t seed);

std::string format_bench(const std::vector<TimingStats>& stats, std::int64_t points);

}  // namespace mixseg3d
