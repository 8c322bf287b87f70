#pragma once

// Synthetic blocks-world benchmark: random initial towers, tower-shaped goal
// hypotheses and optimal plans for the true goal.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goalrec/recognition.hpp"

namespace goalrec {

/// The bundled four-operator blocks-world domain.
std::string_view blocks_world_domain_text();

/// Uniform integer in [0, bound) by rejection, identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Breadth-first search; nullopt when the goal is unreachable within
/// `max_states` expanded states.
std::optional<Plan> bfs_plan(const State& init, std::span<const GroundAction> actions, const FactSet& goal,
                             std::size_t max_states = 1'000'000);

struct SuiteOptions {
  std::size_t problems = 50;
  int min_blocks = 3;
  int max_blocks = 6;
  int min_hypotheses = 10;
  int max_hypotheses = 25;
  std::uint64_t seed = 0;
};

/// Full-observability bundles carrying their optimal plan. The true goal never
/// holds initially and has at least one landmark.
std::vector<RecognitionBundle> generate_blocks_suite(const SuiteOptions& options);

/// One bundle per distinct observation draw at `pct`, ids suffixed by draw.
std::vector<RecognitionBundle> at_observability(const RecognitionBundle& full, int pct, std::uint64_t seed,
                                                std::uint64_t stream);

/// Writes <root>/blocks-world/<pct>/<problem>[-d<k>]/ for every level.
/// Returns the number of bundles written.
std::size_t write_suite(const std::filesystem::path& root, const std::vector<RecognitionBundle>& problems,
                        const std::vector<int>& levels, std::uint64_t seed);

}  // namespace goalrec
