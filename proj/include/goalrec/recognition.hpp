#pragma once

// Recognition problem and result types shared by every recogniser.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "goalrec/observations.hpp"
#include "goalrec/pddl.hpp"
#include "goalrec/rational.hpp"

namespace goalrec {

/// One recognition problem: domain, initial state (via the template),
/// candidate goals and observed actions. The true goal is hidden from
/// recognisers and only consulted when scoring.
struct RecognitionBundle {
  std::string id;
  std::string domain_label;
  Domain domain;
  ProblemTemplate problem_template;
  /// Source text shown to language models.
  std::string domain_text;
  std::string template_text;
  std::vector<GoalHypothesis> hypotheses;
  ObservationSequence observations;
  std::optional<std::size_t> true_goal_index;
  int observability_pct = 100;
  /// Full plan of the observed agent, when the bundle ships one.
  std::optional<Plan> plan;
};

/// Throws BindError unless hypotheses are nonempty and the true goal index,
/// when present, is in range.
void check_bundle(const RecognitionBundle& bundle);

struct GoalScore {
  std::size_t hypothesis = 0;
  double score = 0.0;
  /// Landmark recogniser only: matched / total landmarks.
  std::size_t matched = 0;
  std::size_t total = 0;
  bool exact = false;

  /// matched/total, or 0 when total is 0.
  Rational exact_score() const { return total == 0 ? Rational(0, 1) : Rational(matched, total); }
};

struct TokenUsage {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  std::uint64_t total() const { return prompt_tokens + completion_tokens; }
  bool operator==(const TokenUsage&) const = default;
};

enum class ParseStatus { ok, partial, garbage };
const char* to_string(ParseStatus status);

struct RecognitionResult {
  std::string recognizer_id;
  std::vector<GoalScore> scores;
  /// Sorted hypothesis indices.
  std::vector<std::size_t> predicted;
  std::optional<std::string> reasoning;
  double wall_time = 0.0;
  /// Offline preparation time (landmark extraction), reported separately.
  double prepare_time = 0.0;
  std::optional<TokenUsage> usage;
  std::optional<double> cost;
  std::optional<ParseStatus> parse_status;
  std::optional<std::string> error;
  /// Non-fatal diagnostics, e.g. renormalised scores or unmatched lines.
  std::vector<std::string> notes;

  std::size_t spread() const { return predicted.size(); }
};

}  // namespace goalrec
