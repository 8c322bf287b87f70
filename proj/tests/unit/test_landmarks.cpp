#include "doctest.h"

#include <random>

#include "brute_force_landmarks.hpp"
#include "goalrec/landmarks.hpp"
#include "goalrec/suite.hpp"
#include "random_tasks.hpp"
#include "test_paths.hpp"

using namespace goalrec;
using goalrec::testing::domain_text;

namespace {

GroundAction act(const std::string& name, std::vector<Fact> pre, std::vector<Fact> add, std::vector<Fact> del = {}) {
  GroundAction a;
  a.label = ActionLabel{name, {}};
  a.pre = std::move(pre);
  a.add = std::move(add);
  a.del = std::move(del);
  return a;
}

Fact p(const std::string& n) { return Fact{n, {}}; }

std::vector<std::string> names(const LandmarkSet& s) {
  std::vector<std::string> out;
  for (const auto& a : s.actions) out.push_back(a.name);
  return out;
}

}  // namespace

TEST_SUITE("landmarks") {
  TEST_CASE("a chain makes every step a landmark") {
    std::vector<GroundAction> actions{act("A", {p("S")}, {p("X")}), act("B", {p("X")}, {p("Y")}),
                                      act("C", {p("Y")}, {p("G")})};
    auto lm = extract_action_landmarks({p("S")}, actions, {p("G")});
    CHECK_FALSE(lm.unreachable);
    CHECK(names(lm) == std::vector<std::string>{"A", "B", "C"});
  }

  TEST_CASE("alternative achievers are not landmarks") {
    std::vector<GroundAction> actions{act("A", {p("S")}, {p("X")}), act("B", {p("S")}, {p("X")}),
                                      act("C", {p("X")}, {p("G")})};
    auto lm = extract_action_landmarks({p("S")}, actions, {p("G")});
    CHECK(names(lm) == std::vector<std::string>{"C"});
  }

  TEST_CASE("deletes are ignored by the relaxation") {
    std::vector<GroundAction> actions{act("A", {p("S")}, {p("X")}, {p("S")}), act("B", {p("S")}, {p("Y")})};
    CHECK(relaxed_reachable({p("S")}, actions, {p("X"), p("Y")}));
    auto lm = extract_action_landmarks({p("S")}, actions, {p("X"), p("Y")});
    CHECK(names(lm) == std::vector<std::string>{"A", "B"});
  }

  TEST_CASE("unreachable goals and goals holding initially") {
    std::vector<GroundAction> actions{act("A", {p("S")}, {p("X")})};
    auto none = extract_action_landmarks({p("S")}, actions, {p("G")});
    CHECK(none.unreachable);
    CHECK(none.actions.empty());
    auto trivial = extract_action_landmarks({p("S")}, actions, {p("S")});
    CHECK_FALSE(trivial.unreachable);
    CHECK(trivial.actions.empty());
  }

  TEST_CASE("blocks world: stacking a on b needs pick-up and stack") {
    Domain d = parse_domain(domain_text("blocks-world"));
    auto t = parse_problem_template(R"((define (problem two) (:domain blocks)
      (:objects a b - block)
      (:init (clear a) (clear b) (ontable a) (ontable b) (handempty))
      (:goal (and <HYPOTHESIS>))))",
                                    d);
    auto actions = ground(d, t);
    auto lm = extract_action_landmarks(t.init, actions, {Fact{"ON", {"A", "B"}}});
    std::vector<std::string> labels;
    for (const auto& a : lm.actions) labels.push_back(a.str());
    CHECK(labels == std::vector<std::string>{"(PICK-UP A)", "(STACK A B)"});
  }

  TEST_CASE("extractor agrees with the free function") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      auto task = goalrec::testing::random_task(rng);
      LandmarkExtractor ex(task.init, task.actions);
      auto a = ex.extract(task.goal, 3);
      auto b = extract_action_landmarks(task.init, task.actions, task.goal);
      CHECK(a.actions == b.actions);
      CHECK(a.unreachable == b.unreachable);
      CHECK(a.goal_index == 3);
      CHECK(ex.reachable(task.goal) == relaxed_reachable(task.init, task.actions, task.goal));
    }
  }

  TEST_CASE("matches the brute-force oracle on random small tasks") {
    std::mt19937_64 rng(2024);
    int reachable = 0;
    for (int i = 0; i < 300; ++i) {
      auto task = goalrec::testing::random_task(rng, 12);
      auto lm = extract_action_landmarks(task.init, task.actions, task.goal);
      auto oracle = goalrec::oracle::brute_force_landmarks(task.init, task.actions, task.goal);
      REQUIRE(lm.unreachable == !oracle.has_value());
      if (oracle) {
        ++reachable;
        CHECK(lm.actions == *oracle);
      }
    }
    CHECK(reachable > 50);
  }

  TEST_CASE("oracle refuses oversized inputs") {
    std::vector<GroundAction> many;
    for (int i = 0; i < 20; ++i) many.push_back(act("A" + std::to_string(i), {}, {p("X")}));
    CHECK_THROWS_AS(goalrec::oracle::brute_force_landmarks({}, many, {p("X")}), goalrec::oracle::BudgetExceeded);
  }

  TEST_CASE("relaxed fixpoint terminates within |facts| layers") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
      auto task = goalrec::testing::random_task(rng, 12, 10);
      auto fp = relaxed_fixpoint(task.init, task.actions);
      CHECK(fp.layers <= 10);
      CHECK(std::includes(fp.reached.begin(), fp.reached.end(), task.init.begin(), task.init.end()));
      auto closure = goalrec::oracle::naive_relaxed_closure(
          task.init, [&] {
            std::vector<const GroundAction*> ptrs;
            for (const auto& a : task.actions) ptrs.push_back(&a);
            return ptrs;
          }());
      CHECK(fp.reached == closure);
    }
  }

  TEST_CASE("every landmark occurs in an actual plan") {
    auto suite = generate_blocks_suite({.problems = 8, .seed = 11});
    for (const auto& b : suite) {
      auto actions = ground(b.domain, b.problem_template);
      LandmarkExtractor ex(b.problem_template.init, actions);
      auto lm = ex.extract(b.hypotheses[*b.true_goal_index].fact_set());
      REQUIRE(b.plan);
      for (const auto& l : lm.actions) {
        CHECK(std::find(b.plan->begin(), b.plan->end(), l) != b.plan->end());
      }
    }
  }
}
