#pragma once

// Typed-STRIPS PDDL subset: domains, problem templates with a goal
// placeholder, concrete problems, and the line formats used by recognition
// bundles (comma-separated hypotheses, one ground action per line).
//
// Identifiers are case-insensitive and stored in canonical uppercase form.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace goalrec {

inline constexpr std::string_view kGoalPlaceholder = "<HYPOTHESIS>";
inline constexpr std::string_view kRootType = "OBJECT";

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Raised when a parsed value does not fit the domain it is bound to
/// (unknown object, arity or type mismatch).
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_valid_name(std::string_view name);

/// Uppercases `name` after validating it. Throws ParseError on an empty name
/// or a character outside letters, digits, `-` and `_`.
std::string canonical_name(std::string_view name);

struct Fact {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Fact&) const = default;
  bool operator==(const Fact&) const = default;

  /// `(PRED ARG1 ARG2)`
  std::string str() const;
};

using FactSet = std::set<Fact>;

struct ActionLabel {
  std::string name;
  std::vector<std::string> args;

  auto operator<=>(const ActionLabel&) const = default;
  bool operator==(const ActionLabel&) const = default;

  std::string str() const;
};

struct TypedName {
  std::string name;
  std::string type;

  auto operator<=>(const TypedName&) const = default;
  bool operator==(const TypedName&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;

  bool operator==(const PredicateDecl&) const = default;
};

/// Lifted atom. Terms are either variables (`?X`) or constant names.
struct Atom {
  std::string predicate;
  std::vector<std::string> terms;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

/// `(= a b)` or `(not (= a b))` over parameters/constants.
struct EqualityConstraint {
  std::string lhs;
  std::string rhs;
  bool negated = false;

  bool operator==(const EqualityConstraint&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<EqualityConstraint> equalities;
  std::vector<Atom> pre;
  std::vector<Atom> add;
  std::vector<Atom> del;

  bool operator==(const ActionSchema&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  /// child -> parent; every declared type except OBJECT appears as a key.
  std::map<std::string, std::string> type_parent;
  std::vector<TypedName> constants;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  bool operator==(const Domain&) const = default;

  bool has_requirement(std::string_view req) const;
  bool typed() const { return has_requirement(":TYPING"); }
  bool has_type(std::string_view type) const;
  /// Reflexive-transitive subtype test.
  bool is_subtype(std::string_view type, std::string_view ancestor) const;
  const PredicateDecl* find_predicate(std::string_view name) const;
  const ActionSchema* find_action(std::string_view name) const;
};

struct ProblemTemplate {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  FactSet init;

  bool operator==(const ProblemTemplate&) const = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  FactSet init;
  FactSet goal;

  bool operator==(const Problem&) const = default;
};

/// A candidate goal: a conjunction of facts. Facts keep their first-seen file
/// order for rendering; duplicates are dropped and equality is set equality.
struct GoalHypothesis {
  std::vector<Fact> facts;
  std::size_t source_index = 0;

  FactSet fact_set() const { return {facts.begin(), facts.end()}; }
  bool operator==(const GoalHypothesis& other) const { return fact_set() == other.fact_set(); }
};

Domain parse_domain(std::string_view text);
ProblemTemplate parse_problem_template(std::string_view text, const Domain& domain);
Problem parse_problem(std::string_view text, const Domain& domain);

/// Objects of the template plus the domain's constants.
std::vector<TypedName> all_objects(const Domain& domain, const std::vector<TypedName>& objects);

/// Throws BindError unless `fact` names a declared predicate with matching
/// arity and every argument is a known object of a compatible type.
void check_fact(const Domain& domain, const std::vector<TypedName>& objects, const Fact& fact);

Problem instantiate_goal(const ProblemTemplate& tmpl, const GoalHypothesis& goal,
                         const Domain& domain);

GoalHypothesis parse_fact_line(std::string_view line, std::size_t source_index = 0);
std::vector<GoalHypothesis> parse_hypotheses(std::string_view text);
ActionLabel parse_action_line(std::string_view line);
std::vector<ActionLabel> parse_action_lines(std::string_view text);

/// Parses a single parenthesised fact such as `(ON A B)`.
Fact parse_fact(std::string_view text);

std::string render(const Domain& domain);
std::string render(const ProblemTemplate& tmpl);
std::string render(const Problem& problem);
std::string render(const Fact& fact);
std::string render(const ActionLabel& label);
/// `(F1),(F2),...` in stored order.
std::string render(const GoalHypothesis& goal);

}  // namespace goalrec
