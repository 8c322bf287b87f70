#include "goalrec/recognition.hpp"

namespace goalrec {

void check_bundle(const RecognitionBundle& bundle) {
  if (bundle.hypotheses.empty()) throw BindError("bundle has no goal hypotheses");
  if (bundle.true_goal_index && *bundle.true_goal_index >= bundle.hypotheses.size()) {
    throw BindError("true goal index out of range");
  }
}

const char* to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::partial: return "partial";
    case ParseStatus::garbage: return "garbage";
  }
  return "garbage";
}

}  // namespace goalrec
