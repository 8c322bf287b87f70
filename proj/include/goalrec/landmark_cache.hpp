#pragma once

// On-disk landmark cache, one file per problem keyed by a content hash of the
// canonical domain, template and hypothesis list.
//
// File format (UTF-8, LF):
//   # goalrec-landmarks v1
//   # extract-seconds <seconds>        (optional)
//   <goal-index> <reachable|unreachable> <count> <label> <label> ...
// Labels are rendered canonically, e.g. `(STACK A B)`, sorted. Files are
// written to a temporary name and renamed into place, so concurrent writers
// never expose a partial file.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goalrec/landmarks.hpp"

namespace goalrec {

std::string landmark_cache_key(const Domain& domain, const ProblemTemplate& tmpl,
                               std::span<const GoalHypothesis> hypotheses);

std::string serialize_landmarks(std::span<const LandmarkSet> sets, std::optional<double> extract_seconds = {});
std::vector<LandmarkSet> parse_landmarks(std::string_view text, double* extract_seconds = nullptr);

/// Writes `content` next to `path` and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct CachedLandmarks {
  std::vector<LandmarkSet> sets;
  bool cache_hit = false;
  /// Time of the original extraction, also on a cache hit.
  double extract_seconds = 0.0;
  std::filesystem::path file;
};

/// Loads landmarks from `cache_dir` or computes and stores them. An empty
/// `cache_dir` disables the cache.
CachedLandmarks cached_landmarks(const std::filesystem::path& cache_dir, const Domain& domain,
                                 const ProblemTemplate& tmpl, std::span<const GoalHypothesis> hypotheses);

}  // namespace goalrec
