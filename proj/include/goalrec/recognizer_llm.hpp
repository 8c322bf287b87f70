#pragma once

// Zero-shot language-model recogniser: a fixed four-part prompt in, a rigid
// line-oriented answer out.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goalrec/chat_client.hpp"
#include "goalrec/recognition.hpp"

namespace goalrec {

/// Score lines within this distance of the maximum count as tied.
inline constexpr double kScoreTieEpsilon = 1e-9;
inline constexpr double kScoreSumTolerance = 0.05;

/// The raw template with `{problem.domain}`, `{problem.template}`,
/// `{goals_text}` and `{obs_text}` placeholders.
std::string_view prompt_template();

struct PromptBundle {
  std::string domain_text;
  std::string template_text;
  std::vector<std::string> hypothesis_lines;
  std::vector<std::string> observation_lines;
  std::string text;
};

PromptBundle build_prompt(const RecognitionBundle& bundle);

struct ParsedResponse {
  /// One slot per bundle hypothesis.
  std::vector<std::optional<double>> scores;
  /// Sorted hypothesis indices listed under "Most Likely Goals:".
  std::vector<std::size_t> most_likely;
  bool most_likely_block = false;
  std::string reasoning;
  ParseStatus status = ParseStatus::garbage;
  /// Lines naming no bundle hypothesis, or carrying an unreadable score.
  std::vector<std::string> unmatched;
  /// Set by validate_scores when the sum check failed.
  bool scores_flagged = false;
  std::optional<double> score_sum;
};

/// Total: any input yields a result; failure is encoded in `status`.
ParsedResponse parse_response(std::string_view text, std::span<const GoalHypothesis> hypotheses);

/// Leaves scores summing to 1 ± kScoreSumTolerance untouched, otherwise
/// rescales a positive sum to 1 and sets `scores_flagged`.
ParsedResponse validate_scores(ParsedResponse response);

/// The listed goals, or the argmax of the scores when no bullet matched.
std::vector<std::size_t> predicted_set(const ParsedResponse& response);

/// Writes `response` in the answer format the prompt requests.
std::string render_response(const ParsedResponse& response, std::span<const GoalHypothesis> hypotheses);

std::string llm_recognizer_id(const std::string& provider_name);

/// Never throws for transport failures: they yield a garbage result with
/// `error` set.
RecognitionResult recognize_llm(const RecognitionBundle& bundle, const ProviderConfig& provider, ChatClient& client);

}  // namespace goalrec
