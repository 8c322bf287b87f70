#pragma once

// Delete-relaxed reachability and action landmarks.
//
// An action is a landmark for a goal when every delete-relaxed plan reaching
// the goal contains it. Since every real plan is also a relaxed plan, these
// landmarks are sound for the unrelaxed problem: any plan achieving the goal
// executes all of them.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "goalrec/grounding.hpp"

namespace goalrec {

struct LandmarkSet {
  std::size_t goal_index = 0;
  /// Sorted by label.
  std::vector<ActionLabel> actions;
  bool unreachable = false;

  bool operator==(const LandmarkSet&) const = default;
};

struct RelaxedFixpoint {
  State reached;
  /// Number of rounds in which at least one new fact appeared.
  std::size_t layers = 0;
};

RelaxedFixpoint relaxed_fixpoint(const State& init, std::span<const GroundAction> actions);

/// goal ⊆ least fixpoint of applying add effects while ignoring deletes.
bool relaxed_reachable(const State& init, std::span<const GroundAction> actions, const FactSet& goal);

/// Per-action removal test: `a` is reported iff the goal is relaxed-reachable
/// with every action but unreachable without `a`.
LandmarkSet extract_action_landmarks(const State& init, std::span<const GroundAction> actions,
                                     const FactSet& goal);

/// Interns the facts of one problem so several goals can be tested against
/// the same initial state and grounding without rebuilding indices.
class LandmarkExtractor {
 public:
  LandmarkExtractor(const State& init, std::span<const GroundAction> actions);

  bool reachable(const FactSet& goal) const;
  LandmarkSet extract(const FactSet& goal, std::size_t goal_index = 0) const;

  std::size_t fact_count() const { return fact_names_.size(); }

 private:
  std::optional<std::vector<int>> goal_ids(const FactSet& goal) const;
  // Reached-flag per fact; `excluded` (if any) is treated as absent.
  std::vector<char> fixpoint(std::optional<std::size_t> excluded, std::vector<int>* first_achiever) const;
  bool covers(const std::vector<char>& reached, const std::vector<int>& goal) const;

  std::span<const GroundAction> actions_;
  std::vector<Fact> fact_names_;
  std::map<Fact, int> fact_ids_;
  std::vector<int> init_ids_;
  std::vector<std::vector<int>> pre_;
  std::vector<std::vector<int>> add_;
  std::vector<std::vector<std::size_t>> consumers_;
  std::vector<std::size_t> no_pre_;
};

}  // namespace goalrec
