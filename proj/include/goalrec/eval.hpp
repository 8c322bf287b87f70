#pragma once

// Benchmark bundles on disk, per-problem metrics, aggregation and reports.
//
// A bundle is a directory holding domain.pddl, template.pddl, hyps.dat,
// real_hyp.dat, obs.dat and optionally plan.dat. Under a benchmark root the
// layout is <root>/<domain>/<pct>/<problem>/; the first path component names
// the domain and the component equal to an observability level gives pct.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "goalrec/chat_client.hpp"
#include "goalrec/recognition.hpp"

namespace goalrec {

inline constexpr const char* kAllDomains = "ALL-DOMAINS";

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and binds every file; throws BundleError naming the directory.
/// `root`, when given, determines the bundle id and domain label.
RecognitionBundle load_bundle(const std::filesystem::path& dir, const std::filesystem::path& root = {});

/// Writes the bundle files (plan.dat only when the bundle has a plan).
void write_bundle(const std::filesystem::path& dir, const RecognitionBundle& bundle);

/// Directories under `root` containing hyps.dat, sorted by relative path.
/// An empty `domains` list selects every domain.
std::vector<std::filesystem::path> discover_bundles(const std::filesystem::path& root,
                                                    const std::vector<std::string>& domains,
                                                    const std::vector<int>& levels);

struct BundleCheck {
  std::string name;
  bool ok = true;
  std::string detail;
};

/// Plan validity, observation/plan consistency, hypothesis typing and true
/// goal membership. Load failures are reported as a failed check.
std::vector<BundleCheck> validate_bundle_dir(const std::filesystem::path& dir);

struct PerProblemMetrics {
  std::string bundle_id;
  std::string recognizer_id;
  std::string domain;
  int observability_pct = 100;
  std::size_t num_goals = 0;
  std::size_t num_obs = 0;
  bool correct = false;
  std::size_t spread = 0;
  double precision = 0.0;
  double time = 0.0;
  double extract_time = 0.0;
  std::optional<TokenUsage> usage;
  std::optional<double> cost;
  std::string parse_status;
  std::string error;

  bool operator==(const PerProblemMetrics&) const = default;
};

/// correct iff the true goal is predicted; precision = correct / spread, 0 at
/// spread 0.
PerProblemMetrics score_problem(const RecognitionResult& result, const RecognitionBundle& bundle);

struct MetricsRow {
  std::string recognizer_id;
  std::string domain;
  int observability_pct = 100;
  std::size_t problems = 0;
  double mean_goals = 0.0;
  double mean_obs = 0.0;
  double mean_spread = 0.0;
  /// Percentages.
  double accuracy = 0.0;
  double precision = 0.0;
  double mean_time = 0.0;
  double mean_extract_time = 0.0;
  /// Averaged over the problems that carry usage / cost.
  std::optional<double> mean_pt;
  std::optional<double> mean_ct;
  std::optional<double> mean_tt;
  std::optional<double> mean_cost;
};

/// One row per (recogniser, domain, pct), then per (recogniser, pct) an
/// ALL-DOMAINS row averaged over problems.
std::vector<MetricsRow> aggregate(std::span<const PerProblemMetrics> rows);

enum class ReportFormat { csv, markdown, json };
ReportFormat parse_report_format(std::string_view name);
std::string emit_report(std::span<const MetricsRow> rows, ReportFormat format);

std::string per_problem_csv(std::span<const PerProblemMetrics> rows);
std::vector<PerProblemMetrics> parse_per_problem_csv(std::string_view text);

nlohmann::json result_to_json(const RecognitionResult& result, const RecognitionBundle& bundle);

struct RunConfig {
  std::filesystem::path bench_root;
  /// Empty selects all domains.
  std::vector<std::string> domains;
  std::vector<int> observability{10, 30, 50, 70, 100};
  /// "lm", "llm:<provider>" or "all".
  std::vector<std::string> recognizers{"lm"};
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out_dir = "results";
  std::string run_id;
  std::filesystem::path providers_file;
  std::filesystem::path replay_dir;
  std::filesystem::path record_dir;
  /// Landmark cache; empty uses <out_dir>/landmark-cache.
  std::filesystem::path cache_dir;
};

struct RunSummary {
  std::filesystem::path run_dir;
  std::vector<PerProblemMetrics> per_problem;
  std::vector<MetricsRow> rows;
  std::vector<std::string> load_errors;

  bool ok() const { return load_errors.empty(); }
};

/// Builds the chat client for a provider; the default uses HTTP, or replay
/// when the config names a replay directory.
using ClientFactory = std::function<std::unique_ptr<ChatClient>(const ProviderConfig&)>;

/// Runs every selected recogniser on every discovered bundle and writes
/// per_problem.csv, summary.csv, summary.md and manifest.json under
/// <out_dir>/<run_id>/. Throws std::invalid_argument on a bad config.
RunSummary run_eval(const RunConfig& config, const ClientFactory& make_client = {});

std::string default_run_id(const RunConfig& config);

}  // namespace goalrec
