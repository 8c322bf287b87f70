#include "goalrec/recognizer_lm.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace goalrec {

GoalScore lm_score(const LandmarkSet& landmarks, const ObservationSequence& obs) {
  std::set<ActionLabel> observed(obs.labels.begin(), obs.labels.end());
  GoalScore s;
  s.hypothesis = landmarks.goal_index;
  s.exact = true;
  s.total = landmarks.actions.size();
  s.matched = static_cast<std::size_t>(std::count_if(landmarks.actions.begin(), landmarks.actions.end(),
                                                     [&](const ActionLabel& l) { return observed.count(l) > 0; }));
  s.score = s.exact_score().to_double();
  return s;
}

RecognitionResult recognize_lm(const RecognitionBundle& bundle, std::span<const LandmarkSet> landmarks) {
  check_bundle(bundle);
  if (landmarks.size() != bundle.hypotheses.size()) {
    throw std::invalid_argument("landmark sets are not aligned with the hypotheses");
  }
  auto start = std::chrono::steady_clock::now();
  RecognitionResult result;
  result.recognizer_id = kLandmarkRecognizerId;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    GoalScore s = lm_score(landmarks[i], bundle.observations);
    s.hypothesis = i;
    result.scores.push_back(s);
  }
  Rational best(0, 1);
  for (const auto& s : result.scores) best = std::max(best, s.exact_score());
  for (const auto& s : result.scores) {
    if (s.exact_score() == best) result.predicted.push_back(s.hypothesis);
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<LandmarkSet> compute_landmarks(const Domain& domain, const ProblemTemplate& tmpl,
                                           std::span<const GoalHypothesis> hypotheses) {
  auto actions = ground(domain, tmpl);
  LandmarkExtractor extractor(tmpl.init, actions);
  std::vector<LandmarkSet> out;
  out.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    out.push_back(extractor.extract(hypotheses[i].fact_set(), i));
  }
  return out;
}

std::vector<LandmarkSet> compute_landmarks(const RecognitionBundle& bundle) {
  return compute_landmarks(bundle.domain, bundle.problem_template, bundle.hypotheses);
}

}  // namespace goalrec
