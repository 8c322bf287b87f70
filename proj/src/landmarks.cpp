#include "goalrec/landmarks.hpp"

#include <algorithm>
#include <deque>

namespace goalrec {

RelaxedFixpoint relaxed_fixpoint(const State& init, std::span<const GroundAction> actions) {
  RelaxedFixpoint fp;
  fp.reached = init;
  std::vector<char> fired(actions.size(), 0);
  for (;;) {
    std::vector<const GroundAction*> layer;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (!fired[i] && applicable(fp.reached, actions[i])) {
        fired[i] = 1;
        layer.push_back(&actions[i]);
      }
    }
    std::size_t before = fp.reached.size();
    for (const auto* a : layer) fp.reached.insert(a->add.begin(), a->add.end());
    if (fp.reached.size() == before) break;
    ++fp.layers;
  }
  return fp;
}

bool relaxed_reachable(const State& init, std::span<const GroundAction> actions, const FactSet& goal) {
  return LandmarkExtractor(init, actions).reachable(goal);
}

LandmarkSet extract_action_landmarks(const State& init, std::span<const GroundAction> actions,
                                     const FactSet& goal) {
  return LandmarkExtractor(init, actions).extract(goal);
}

LandmarkExtractor::LandmarkExtractor(const State& init, std::span<const GroundAction> actions)
    : actions_(actions) {
  auto intern = [this](const Fact& f) {
    auto [it, inserted] = fact_ids_.emplace(f, static_cast<int>(fact_names_.size()));
    if (inserted) fact_names_.push_back(f);
    return it->second;
  };
  for (const auto& f : init) init_ids_.push_back(intern(f));
  pre_.resize(actions.size());
  add_.resize(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (const auto& f : actions[i].pre) pre_[i].push_back(intern(f));
    for (const auto& f : actions[i].add) add_[i].push_back(intern(f));
    if (pre_[i].empty()) no_pre_.push_back(i);
  }
  consumers_.resize(fact_names_.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (int f : pre_[i]) consumers_[f].push_back(i);
  }
}

std::optional<std::vector<int>> LandmarkExtractor::goal_ids(const FactSet& goal) const {
  std::vector<int> ids;
  for (const auto& f : goal) {
    auto it = fact_ids_.find(f);
    // A fact outside init and every add list can never be reached.
    if (it == fact_ids_.end()) return std::nullopt;
    ids.push_back(it->second);
  }
  return ids;
}

std::vector<char> LandmarkExtractor::fixpoint(std::optional<std::size_t> excluded,
                                              std::vector<int>* first_achiever) const {
  std::vector<char> reached(fact_names_.size(), 0);
  std::vector<std::size_t> unsatisfied(actions_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) unsatisfied[i] = pre_[i].size();
  if (first_achiever) first_achiever->assign(fact_names_.size(), -1);

  std::deque<int> queue;
  auto reach = [&](int f, int by) {
    if (reached[f]) return;
    reached[f] = 1;
    if (first_achiever) (*first_achiever)[f] = by;
    queue.push_back(f);
  };
  auto fire = [&](std::size_t a) {
    if (excluded && *excluded == a) return;
    for (int f : add_[a]) reach(f, static_cast<int>(a));
  };
  for (int f : init_ids_) reach(f, -1);
  for (std::size_t a : no_pre_) fire(a);
  while (!queue.empty()) {
    int f = queue.front();
    queue.pop_front();
    for (std::size_t a : consumers_[f]) {
      if (--unsatisfied[a] == 0) fire(a);
    }
  }
  return reached;
}

bool LandmarkExtractor::covers(const std::vector<char>& reached, const std::vector<int>& goal) const {
  return std::all_of(goal.begin(), goal.end(), [&](int f) { return reached[f] != 0; });
}

bool LandmarkExtractor::reachable(const FactSet& goal) const {
  auto ids = goal_ids(goal);
  if (!ids) return false;
  return covers(fixpoint(std::nullopt, nullptr), *ids);
}

LandmarkSet LandmarkExtractor::extract(const FactSet& goal, std::size_t goal_index) const {
  LandmarkSet result;
  result.goal_index = goal_index;
  auto ids = goal_ids(goal);
  std::vector<int> achiever;
  if (!ids || !covers(fixpoint(std::nullopt, &achiever), *ids)) {
    result.unreachable = true;
    return result;
  }

  // Backchaining over first achievers yields one relaxed plan. A landmark lies
  // in every relaxed plan, so only this plan's actions need the removal test.
  std::vector<char> in_plan(actions_.size(), 0);
  std::vector<char> visited(fact_names_.size(), 0);
  std::vector<int> open = *ids;
  while (!open.empty()) {
    int f = open.back();
    open.pop_back();
    if (visited[f]) continue;
    visited[f] = 1;
    int a = achiever[f];
    if (a < 0 || in_plan[a]) continue;
    in_plan[a] = 1;
    for (int p : pre_[a]) open.push_back(p);
  }

  for (std::size_t a = 0; a < actions_.size(); ++a) {
    if (in_plan[a] && !covers(fixpoint(a, nullptr), *ids)) result.actions.push_back(actions_[a].label);
  }
  std::sort(result.actions.begin(), result.actions.end());
  return result;
}

}  // namespace goalrec
