#include "goalrec/observations.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace goalrec {

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint32_t draw, std::uint32_t attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), draw,
                    attempt};
  return std::mt19937_64(seq);
}

// floor(pct / 100 * 2^64); a word below the threshold keeps the action.
std::uint64_t keep_threshold(int pct) {
  unsigned __int128 scaled = static_cast<unsigned __int128>(pct) << 64;
  return static_cast<std::uint64_t>(scaled / 100);
}

ObservationSequence from_indices(std::span<const ActionLabel> plan, std::vector<std::size_t> indices, int pct,
                                 std::uint64_t seed) {
  ObservationSequence obs;
  obs.observability_pct = pct;
  obs.seed = seed;
  for (std::size_t i : indices) obs.labels.push_back(plan[i]);
  obs.source_indices = std::move(indices);
  return obs;
}

}  // namespace

bool is_valid_observability(int pct) {
  return std::find(std::begin(kObservabilityLevels), std::end(kObservabilityLevels), pct) !=
         std::end(kObservabilityLevels);
}

ObservationSequence full_observation(std::span<const ActionLabel> plan) {
  std::vector<std::size_t> all(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) all[i] = i;
  return from_indices(plan, std::move(all), 100, 0);
}

ObservationSequence sample_observations(std::span<const ActionLabel> plan, int pct, std::uint64_t seed,
                                        std::uint64_t stream, std::uint32_t draw) {
  if (!is_valid_observability(pct)) throw std::invalid_argument("observability must be one of 10/30/50/70/100");
  if (plan.empty()) throw std::invalid_argument("cannot sample observations from an empty plan");
  if (pct == 100) {
    auto obs = full_observation(plan);
    obs.seed = seed;
    return obs;
  }
  const std::uint64_t threshold = keep_threshold(pct);
  for (std::uint32_t attempt = 0; attempt < static_cast<std::uint32_t>(kMaxResamples); ++attempt) {
    auto rng = substream(seed, stream, draw, attempt);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (rng() < threshold) kept.push_back(i);
    }
    if (!kept.empty()) return from_indices(plan, std::move(kept), pct, seed);
  }
  return from_indices(plan, {0}, pct, seed);
}

std::vector<ObservationSequence> generate_benchmark_obs(std::span<const ActionLabel> plan, int pct,
                                                        std::uint64_t seed, std::uint64_t stream) {
  std::vector<ObservationSequence> out;
  if (pct == 100) {
    out.push_back(sample_observations(plan, pct, seed, stream, 0));
    return out;
  }
  std::set<std::vector<std::size_t>> seen;
  for (std::uint32_t draw = 0; draw < static_cast<std::uint32_t>(kBenchmarkDraws); ++draw) {
    auto obs = sample_observations(plan, pct, seed, stream, draw);
    if (seen.insert(obs.source_indices).second) out.push_back(std::move(obs));
  }
  return out;
}

std::optional<std::vector<std::size_t>> match_subsequence(std::span<const ActionLabel> plan,
                                                          std::span<const ActionLabel> labels) {
  std::vector<std::size_t> indices;
  std::size_t pos = 0;
  for (const auto& l : labels) {
    while (pos < plan.size() && plan[pos] != l) ++pos;
    if (pos == plan.size()) return std::nullopt;
    indices.push_back(pos++);
  }
  return indices;
}

}  // namespace goalrec
