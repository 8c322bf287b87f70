#pragma once

#include <span>

#include "goalrec/landmarks.hpp"
#include "goalrec/recognition.hpp"

namespace goalrec {

inline constexpr const char* kLandmarkRecognizerId = "lm";

/// matched = |landmarks ∩ observed labels|, total = |landmarks|. An empty
/// landmark set scores 0.
GoalScore lm_score(const LandmarkSet& landmarks, const ObservationSequence& obs);

/// Scores every hypothesis and predicts all indices attaining the maximum
/// exact score; ties are kept. `landmarks[i]` must belong to hypothesis i.
RecognitionResult recognize_lm(const RecognitionBundle& bundle, std::span<const LandmarkSet> landmarks);

/// Landmarks for every hypothesis of `bundle` (grounds the template once).
std::vector<LandmarkSet> compute_landmarks(const RecognitionBundle& bundle);
std::vector<LandmarkSet> compute_landmarks(const Domain& domain, const ProblemTemplate& tmpl,
                                           std::span<const GoalHypothesis> hypotheses);

}  // namespace goalrec
