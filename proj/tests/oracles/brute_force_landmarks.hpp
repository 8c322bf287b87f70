#pragma once

// Reference landmark computation by exhaustive search over action subsets.
// Independent of the production extractor: a naive set-based fixpoint and
// no indexing.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "goalrec/grounding.hpp"

namespace goalrec::oracle {

inline constexpr std::size_t kMaxBruteForceActions = 16;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Delete-relaxed closure of `init` under `actions`, one action at a time.
FactSet naive_relaxed_closure(const FactSet& init, const std::vector<const GroundAction*>& actions);

/// Intersection of all action subsets whose relaxed closure contains `goal`,
/// i.e. the actions every relaxed plan uses. nullopt when no subset reaches
/// the goal. Throws BudgetExceeded above kMaxBruteForceActions actions.
std::optional<std::vector<ActionLabel>> brute_force_landmarks(const State& init,
                                                              std::span<const GroundAction> actions,
                                                              const FactSet& goal);

}  // namespace goalrec::oracle
