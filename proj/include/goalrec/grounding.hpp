#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "goalrec/pddl.hpp"

namespace goalrec {

using State = FactSet;
using Plan = std::vector<ActionLabel>;

struct GroundAction {
  ActionLabel label;
  // Sorted and duplicate-free.
  std::vector<Fact> pre;
  std::vector<Fact> add;
  std::vector<Fact> del;

  bool operator==(const GroundAction&) const = default;
};

class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const ActionLabel& action, std::vector<Fact> missing);

  const std::vector<Fact>& missing() const { return missing_; }

 private:
  std::vector<Fact> missing_;
};

/// Every type-consistent binding of every schema, in schema order and then
/// lexicographic argument order. Bindings violating an equality constraint,
/// or whose add and delete effects intersect, are not instantiated.
std::vector<GroundAction> ground(const Domain& domain, const std::vector<TypedName>& objects);
std::vector<GroundAction> ground(const Domain& domain, const ProblemTemplate& problem);
std::vector<GroundAction> ground(const Domain& domain, const Problem& problem);

bool applicable(const State& state, const GroundAction& action);

/// (state \ del) ∪ add. Throws PreconditionError listing the absent facts.
State apply(const State& state, const GroundAction& action);

/// Label -> position lookup over a grounding.
class ActionIndex {
 public:
  explicit ActionIndex(std::span<const GroundAction> actions);

  const GroundAction* find(const ActionLabel& label) const;
  /// Throws BindError for labels absent from the grounding.
  const GroundAction& at(const ActionLabel& label) const;

 private:
  std::span<const GroundAction> actions_;
  std::map<std::string, std::size_t> by_label_;
};

struct PlanValidation {
  bool valid = true;
  /// Index of the first failing step when invalid.
  std::size_t failed_step = 0;
  std::vector<Fact> missing;
  std::string error;
  State final_state;

  explicit operator bool() const { return valid; }
};

/// Replays `plan` from `init`. The goal is not required to hold at the end.
PlanValidation validate_plan(const State& init, std::span<const GroundAction> actions, const Plan& plan);
PlanValidation validate_plan(const Domain& domain, const Problem& problem, const Plan& plan);

}  // namespace goalrec
