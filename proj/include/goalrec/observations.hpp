#pragma once

// Observation sampling for benchmark generation.
//
// Each plan action is retained independently with probability pct/100.
// Randomness is drawn from std::mt19937_64 seeded through std::seed_seq with
// (seed, stream, draw, attempt) words; both are fully specified by the C++
// standard, so bundles regenerate bit-identically on any conforming platform.
// `stream` identifies the problem (one substream per plan), `draw` the
// benchmark repetition and `attempt` the resample after an empty draw.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "goalrec/grounding.hpp"

namespace goalrec {

inline constexpr int kObservabilityLevels[] = {10, 30, 50, 70, 100};
inline constexpr int kMaxResamples = 32;
inline constexpr int kBenchmarkDraws = 3;

bool is_valid_observability(int pct);

struct ObservationSequence {
  std::vector<ActionLabel> labels;
  /// Strictly increasing plan positions; empty when the source plan is unknown.
  std::vector<std::size_t> source_indices;
  int observability_pct = 100;
  std::uint64_t seed = 0;

  bool operator==(const ObservationSequence&) const = default;
};

ObservationSequence full_observation(std::span<const ActionLabel> plan);

/// Bernoulli retention of each action. pct=100 returns the full plan without
/// consuming randomness. Empty draws are resampled on fresh substreams up to
/// kMaxResamples times, after which the first plan action is kept alone.
ObservationSequence sample_observations(std::span<const ActionLabel> plan, int pct, std::uint64_t seed,
                                        std::uint64_t stream = 0, std::uint32_t draw = 0);

/// kBenchmarkDraws samples with duplicate index sets removed (first
/// occurrence kept). pct=100 yields exactly one sequence.
std::vector<ObservationSequence> generate_benchmark_obs(std::span<const ActionLabel> plan, int pct,
                                                        std::uint64_t seed, std::uint64_t stream = 0);

/// Recovers plan positions for `labels` by greedy leftmost matching; nullopt
/// when `labels` is not a subsequence of `plan`.
std::optional<std::vector<std::size_t>> match_subsequence(std::span<const ActionLabel> plan,
                                                          std::span<const ActionLabel> labels);

}  // namespace goalrec
