#include "goalrec/grounding.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace goalrec {

namespace {

std::string join_facts(const std::vector<Fact>& facts) {
  std::string out;
  for (const auto& f : facts) out += (out.empty() ? "" : " ") + f.str();
  return out;
}

void sort_unique(std::vector<Fact>& facts) {
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
}

class SchemaGrounder {
 public:
  SchemaGrounder(const Domain& domain, const ActionSchema& schema, const std::vector<TypedName>& objects)
      : schema_(schema) {
    for (const auto& p : schema.params) {
      std::vector<std::string> ext;
      for (const auto& o : objects) {
        if (domain.is_subtype(o.type, p.type)) ext.push_back(o.name);
      }
      std::sort(ext.begin(), ext.end());
      ext.erase(std::unique(ext.begin(), ext.end()), ext.end());
      extensions_.push_back(std::move(ext));
    }
  }

  void run(std::vector<GroundAction>& out) {
    binding_.assign(schema_.params.size(), nullptr);
    enumerate(0, out);
  }

 private:
  const std::string& resolve(const std::string& term) const {
    if (!term.empty() && term[0] == '?') {
      for (std::size_t i = 0; i < schema_.params.size(); ++i) {
        if (schema_.params[i].name == term) return *binding_[i];
      }
    }
    return term;
  }

  std::vector<Fact> instantiate(const std::vector<Atom>& atoms) const {
    std::vector<Fact> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
      Fact f{a.predicate, {}};
      for (const auto& t : a.terms) f.args.push_back(resolve(t));
      out.push_back(std::move(f));
    }
    sort_unique(out);
    return out;
  }

  void emit(std::vector<GroundAction>& out) const {
    for (const auto& eq : schema_.equalities) {
      if ((resolve(eq.lhs) == resolve(eq.rhs)) == eq.negated) return;
    }
    GroundAction g;
    g.label.name = schema_.name;
    for (const auto* arg : binding_) g.label.args.push_back(*arg);
    g.pre = instantiate(schema_.pre);
    g.add = instantiate(schema_.add);
    g.del = instantiate(schema_.del);
    std::vector<Fact> both;
    std::set_intersection(g.add.begin(), g.add.end(), g.del.begin(), g.del.end(), std::back_inserter(both));
    if (!both.empty()) return;
    out.push_back(std::move(g));
  }

  void enumerate(std::size_t depth, std::vector<GroundAction>& out) {
    if (depth == binding_.size()) {
      emit(out);
      return;
    }
    for (const auto& name : extensions_[depth]) {
      binding_[depth] = &name;
      enumerate(depth + 1, out);
    }
  }

  const ActionSchema& schema_;
  std::vector<std::vector<std::string>> extensions_;
  std::vector<const std::string*> binding_;
};

}  // namespace

PreconditionError::PreconditionError(const ActionLabel& action, std::vector<Fact> missing)
    : std::runtime_error(fmt::format("{} is not applicable: missing {}", action.str(), join_facts(missing))),
      missing_(std::move(missing)) {}

std::vector<GroundAction> ground(const Domain& domain, const std::vector<TypedName>& objects) {
  std::vector<GroundAction> out;
  auto universe = all_objects(domain, objects);
  for (const auto& schema : domain.actions) {
    SchemaGrounder(domain, schema, universe).run(out);
  }
  return out;
}

std::vector<GroundAction> ground(const Domain& domain, const ProblemTemplate& problem) {
  return ground(domain, problem.objects);
}

std::vector<GroundAction> ground(const Domain& domain, const Problem& problem) {
  return ground(domain, problem.objects);
}

bool applicable(const State& state, const GroundAction& action) {
  return std::all_of(action.pre.begin(), action.pre.end(), [&](const Fact& f) { return state.count(f) > 0; });
}

State apply(const State& state, const GroundAction& action) {
  std::vector<Fact> missing;
  for (const auto& f : action.pre) {
    if (!state.count(f)) missing.push_back(f);
  }
  if (!missing.empty()) throw PreconditionError(action.label, std::move(missing));
  State next = state;
  for (const auto& f : action.del) next.erase(f);
  next.insert(action.add.begin(), action.add.end());
  return next;
}

ActionIndex::ActionIndex(std::span<const GroundAction> actions) : actions_(actions) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    auto [it, inserted] = by_label_.emplace(actions[i].label.str(), i);
    if (!inserted) throw BindError("duplicate ground action " + actions[i].label.str());
  }
}

const GroundAction* ActionIndex::find(const ActionLabel& label) const {
  auto it = by_label_.find(label.str());
  return it == by_label_.end() ? nullptr : &actions_[it->second];
}

const GroundAction& ActionIndex::at(const ActionLabel& label) const {
  const GroundAction* a = find(label);
  if (!a) throw BindError("unknown ground action " + label.str());
  return *a;
}

PlanValidation validate_plan(const State& init, std::span<const GroundAction> actions, const Plan& plan) {
  ActionIndex index(actions);
  PlanValidation result;
  result.final_state = init;
  for (std::size_t step = 0; step < plan.size(); ++step) {
    const GroundAction* action = index.find(plan[step]);
    if (!action) {
      result.valid = false;
      result.failed_step = step;
      result.error = "unknown ground action " + plan[step].str();
      return result;
    }
    try {
      result.final_state = goalrec::apply(result.final_state, *action);
    } catch (const PreconditionError& err) {
      result.valid = false;
      result.failed_step = step;
      result.missing = err.missing();
      result.error = err.what();
      return result;
    }
  }
  return result;
}

PlanValidation validate_plan(const Domain& domain, const Problem& problem, const Plan& plan) {
  auto actions = ground(domain, problem);
  return validate_plan(problem.init, actions, plan);
}

}  // namespace goalrec
