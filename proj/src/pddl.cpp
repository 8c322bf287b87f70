#include "goalrec/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>

#include "text_util.hpp"

namespace goalrec {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", line, column, what) : what),
      line_(line),
      column_(column) {}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

std::string canonical_name(std::string_view name) {
  if (!is_valid_name(name)) {
    throw ParseError(fmt::format("invalid identifier '{}'", name));
  }
  return detail::to_upper(name);
}

std::string Fact::str() const {
  std::string out = "(" + predicate;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

std::string ActionLabel::str() const {
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

bool Domain::has_requirement(std::string_view req) const {
  return std::find(requirements.begin(), requirements.end(), detail::to_upper(req)) != requirements.end();
}

bool Domain::has_type(std::string_view type) const {
  std::string t = detail::to_upper(type);
  return t == kRootType || type_parent.count(t) > 0;
}

bool Domain::is_subtype(std::string_view type, std::string_view ancestor) const {
  if (ancestor == kRootType) return true;
  std::string current(type);
  for (std::size_t steps = 0; steps <= type_parent.size(); ++steps) {
    if (current == ancestor) return true;
    auto it = type_parent.find(current);
    if (it == type_parent.end()) return false;
    current = it->second;
  }
  return false;
}

const PredicateDecl* Domain::find_predicate(std::string_view name) const {
  for (const auto& p : predicates) {
    if (detail::iequals(p.name, name)) return &p;
  }
  return nullptr;
}

const ActionSchema* Domain::find_action(std::string_view name) const {
  for (const auto& a : actions) {
    if (detail::iequals(a.name, name)) return &a;
  }
  return nullptr;
}

namespace {

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
  bool is_atom = false;
  std::string text;
  std::vector<SExpr> children;
  std::size_t line = 0;
  std::size_t column = 0;

  bool is_list() const { return !is_atom; }
  bool head_is(std::string_view keyword) const {
    return !is_atom && !children.empty() && children[0].is_atom &&
           detail::iequals(children[0].text, keyword);
  }
};

[[noreturn]] void fail(const SExpr& at, const std::string& what) {
  throw ParseError(what, at.line, at.column);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_document() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty input");
    SExpr root = read();
    skip_space();
    if (pos_ < text_.size()) throw ParseError("trailing content after expression", line_, col_);
    return root;
  }

 private:
  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    SExpr node;
    node.line = line_;
    node.column = col_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    if (c == '(') {
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced '('", node.line, node.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        node.children.push_back(read());
      }
      return node;
    }
    node.is_atom = true;
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      advance();
    }
    node.text = std::string(text_.substr(start, pos_ - start));
    return node;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string name_at(const SExpr& e) {
  if (!e.is_atom) fail(e, "expected a name");
  try {
    return canonical_name(e.text);
  } catch (const ParseError& err) {
    fail(e, err.what());
  }
}

std::string variable_at(const SExpr& e) {
  if (!e.is_atom || e.text.size() < 2 || e.text[0] != '?') fail(e, "expected a variable");
  try {
    return "?" + canonical_name(std::string_view(e.text).substr(1));
  } catch (const ParseError& err) {
    fail(e, err.what());
  }
}

bool is_placeholder(const SExpr& e) {
  return e.is_atom && detail::iequals(e.text, kGoalPlaceholder);
}

struct TypedEntry {
  TypedName entry;
  bool explicit_type = false;
  const SExpr* at = nullptr;
};

// `a b - t1 c - t2 d`; trailing names default to OBJECT.
std::vector<TypedEntry> parse_typed_list(const SExpr& list, std::size_t first, bool variables) {
  std::vector<TypedEntry> out;
  std::vector<TypedEntry> pending;
  const auto& items = list.children;
  for (std::size_t i = first; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (item.is_atom && item.text == "-") {
      if (i + 1 >= items.size()) fail(item, "missing type after '-'");
      const SExpr& type_expr = items[i + 1];
      if (!type_expr.is_atom) {
        if (type_expr.head_is("either")) fail(type_expr, "'either' types are not supported");
        fail(type_expr, "expected a type name");
      }
      if (pending.empty()) fail(item, "type designation without names");
      std::string type = name_at(type_expr);
      for (auto& p : pending) {
        p.entry.type = type;
        p.explicit_type = true;
        out.push_back(std::move(p));
      }
      pending.clear();
      ++i;
      continue;
    }
    TypedEntry e;
    e.entry.name = variables ? variable_at(item) : name_at(item);
    e.entry.type = std::string(kRootType);
    e.at = &item;
    pending.push_back(std::move(e));
  }
  for (auto& p : pending) out.push_back(std::move(p));
  return out;
}

class DomainBuilder {
 public:
  Domain build(const SExpr& root) {
    if (!root.head_is("define")) fail(root, "expected (define ...)");
    if (root.children.size() < 2 || !root.children[1].head_is("domain") ||
        root.children[1].children.size() != 2) {
      fail(root, "expected (domain <name>)");
    }
    domain_.name = name_at(root.children[1].children[1]);

    const SExpr* requirements = nullptr;
    const SExpr* types = nullptr;
    const SExpr* constants = nullptr;
    const SExpr* predicates = nullptr;
    std::vector<const SExpr*> actions;
    for (std::size_t i = 2; i < root.children.size(); ++i) {
      const SExpr& section = root.children[i];
      if (section.is_atom || section.children.empty() || !section.children[0].is_atom) {
        fail(section, "expected a domain section");
      }
      std::string key = detail::to_upper(section.children[0].text);
      auto once = [&](const SExpr*& slot) {
        if (slot) fail(section, "duplicate section " + key);
        slot = &section;
      };
      if (key == ":REQUIREMENTS") once(requirements);
      else if (key == ":TYPES") once(types);
      else if (key == ":CONSTANTS") once(constants);
      else if (key == ":PREDICATES") once(predicates);
      else if (key == ":ACTION") actions.push_back(&section);
      else fail(section, "unsupported domain section " + key);
    }

    parse_requirements(requirements);
    if (types) parse_types(*types);
    if (constants) parse_constants(*constants);
    if (predicates) parse_predicates(*predicates);
    for (const SExpr* a : actions) parse_action(*a);
    return std::move(domain_);
  }

 private:
  void parse_requirements(const SExpr* section) {
    if (!section) {
      domain_.requirements = {":STRIPS"};
      return;
    }
    for (std::size_t i = 1; i < section->children.size(); ++i) {
      const SExpr& r = section->children[i];
      if (!r.is_atom) fail(r, "expected a requirement keyword");
      std::string req = detail::to_upper(r.text);
      if (req != ":STRIPS" && req != ":TYPING" && req != ":EQUALITY") {
        fail(r, "unsupported requirement " + r.text);
      }
      if (!domain_.has_requirement(req)) domain_.requirements.push_back(req);
    }
  }

  void require_type(const std::string& type, const SExpr& at) const {
    if (!domain_.has_type(type)) fail(at, "undeclared type " + type);
  }

  void parse_types(const SExpr& section) {
    if (!domain_.typed()) fail(section, ":types used without the :typing requirement");
    auto entries = parse_typed_list(section, 1, false);
    for (const auto& e : entries) {
      if (e.entry.name == kRootType) {
        if (e.explicit_type && e.entry.type != kRootType) fail(*e.at, "OBJECT cannot have a parent");
        continue;
      }
      if (domain_.type_parent.count(e.entry.name)) fail(*e.at, "duplicate type " + e.entry.name);
      domain_.type_parent[e.entry.name] = e.entry.type;
    }
    for (const auto& e : entries) {
      if (e.entry.name != kRootType) require_type(e.entry.type, *e.at);
    }
    for (const auto& [child, parent] : domain_.type_parent) {
      std::string current = parent;
      for (std::size_t steps = 0; current != kRootType; ++steps) {
        if (current == child || steps > domain_.type_parent.size()) {
          fail(section, "cyclic type hierarchy at " + child);
        }
        current = domain_.type_parent.at(current);
      }
    }
  }

  std::vector<TypedName> typed_names(const SExpr& list, std::size_t first, bool variables) {
    auto entries = parse_typed_list(list, first, variables);
    std::vector<TypedName> out;
    for (const auto& e : entries) {
      if (e.explicit_type && !domain_.typed()) fail(*e.at, "typed list without the :typing requirement");
      require_type(e.entry.type, *e.at);
      out.push_back(e.entry);
    }
    return out;
  }

  void parse_constants(const SExpr& section) {
    domain_.constants = typed_names(section, 1, false);
    std::set<std::string> seen;
    for (const auto& c : domain_.constants) {
      if (!seen.insert(c.name).second) fail(section, "duplicate constant " + c.name);
    }
  }

  void parse_predicates(const SExpr& section) {
    for (std::size_t i = 1; i < section.children.size(); ++i) {
      const SExpr& decl = section.children[i];
      if (decl.is_atom || decl.children.empty()) fail(decl, "expected a predicate declaration");
      PredicateDecl p;
      p.name = name_at(decl.children[0]);
      if (domain_.find_predicate(p.name)) fail(decl, "duplicate predicate " + p.name);
      p.params = typed_names(decl, 1, true);
      domain_.predicates.push_back(std::move(p));
    }
  }

  // Returns the type of a term inside `schema`, failing on unknown names.
  std::string term_type(const ActionSchema& schema, const SExpr& term) const {
    if (!term.is_atom) fail(term, "expected a term");
    if (!term.text.empty() && term.text[0] == '?') {
      std::string var = variable_at(term);
      for (const auto& p : schema.params) {
        if (p.name == var) return p.type;
      }
      fail(term, "variable " + var + " is not a parameter of " + schema.name);
    }
    std::string name = name_at(term);
    for (const auto& c : domain_.constants) {
      if (c.name == name) return c.type;
    }
    fail(term, "unknown constant " + name);
  }

  std::string term_name(const SExpr& term) const {
    return (!term.text.empty() && term.text[0] == '?') ? variable_at(term) : name_at(term);
  }

  Atom parse_atom(const ActionSchema& schema, const SExpr& expr) const {
    if (expr.is_atom || expr.children.empty() || !expr.children[0].is_atom) {
      fail(expr, "expected an atom");
    }
    Atom atom;
    atom.predicate = name_at(expr.children[0]);
    const PredicateDecl* decl = domain_.find_predicate(atom.predicate);
    if (!decl) fail(expr, "undeclared predicate " + atom.predicate);
    if (decl->params.size() + 1 != expr.children.size()) {
      fail(expr, fmt::format("arity mismatch for {}: expected {}, got {}", atom.predicate,
                             decl->params.size(), expr.children.size() - 1));
    }
    for (std::size_t i = 1; i < expr.children.size(); ++i) {
      const SExpr& term = expr.children[i];
      std::string type = term_type(schema, term);
      if (!domain_.is_subtype(type, decl->params[i - 1].type)) {
        fail(term, fmt::format("type mismatch in {}: {} is not a {}", atom.predicate, type,
                               decl->params[i - 1].type));
      }
      atom.terms.push_back(term_name(term));
    }
    return atom;
  }

  EqualityConstraint parse_equality(const ActionSchema& schema, const SExpr& expr, bool negated) const {
    if (!domain_.has_requirement(":EQUALITY")) fail(expr, "'=' used without the :equality requirement");
    if (expr.children.size() != 3) fail(expr, "'=' takes two terms");
    term_type(schema, expr.children[1]);
    term_type(schema, expr.children[2]);
    return {term_name(expr.children[1]), term_name(expr.children[2]), negated};
  }

  static void reject_connective(const SExpr& expr) {
    for (std::string_view kw : {"or", "imply", "exists", "forall", "when", "increase", "decrease",
                                "assign", "scale-up", "scale-down"}) {
      if (expr.head_is(kw)) fail(expr, fmt::format("unsupported construct '{}'", kw));
    }
  }

  void parse_precondition(ActionSchema& schema, const SExpr& expr) const {
    if (expr.is_atom) fail(expr, "expected a precondition formula");
    if (expr.children.empty()) return;
    reject_connective(expr);
    if (expr.head_is("and")) {
      for (std::size_t i = 1; i < expr.children.size(); ++i) parse_precondition(schema, expr.children[i]);
    } else if (expr.head_is("=")) {
      schema.equalities.push_back(parse_equality(schema, expr, false));
    } else if (expr.head_is("not")) {
      if (expr.children.size() == 2 && expr.children[1].head_is("=")) {
        schema.equalities.push_back(parse_equality(schema, expr.children[1], true));
      } else {
        fail(expr, "negative preconditions are not supported");
      }
    } else {
      Atom a = parse_atom(schema, expr);
      if (std::find(schema.pre.begin(), schema.pre.end(), a) == schema.pre.end()) schema.pre.push_back(a);
    }
  }

  void parse_effect(ActionSchema& schema, const SExpr& expr) const {
    if (expr.is_atom) fail(expr, "expected an effect formula");
    if (expr.children.empty()) return;
    reject_connective(expr);
    if (expr.head_is("and")) {
      for (std::size_t i = 1; i < expr.children.size(); ++i) parse_effect(schema, expr.children[i]);
    } else if (expr.head_is("not")) {
      if (expr.children.size() != 2) fail(expr, "'not' takes one atom");
      Atom a = parse_atom(schema, expr.children[1]);
      if (std::find(schema.del.begin(), schema.del.end(), a) == schema.del.end()) schema.del.push_back(a);
    } else {
      Atom a = parse_atom(schema, expr);
      if (std::find(schema.add.begin(), schema.add.end(), a) == schema.add.end()) schema.add.push_back(a);
    }
  }

  void parse_action(const SExpr& section) {
    if (section.children.size() < 2) fail(section, "action without a name");
    ActionSchema schema;
    schema.name = name_at(section.children[1]);
    if (domain_.find_action(schema.name)) fail(section, "duplicate action " + schema.name);
    const SExpr* pre = nullptr;
    const SExpr* eff = nullptr;
    for (std::size_t i = 2; i < section.children.size(); i += 2) {
      const SExpr& key = section.children[i];
      if (!key.is_atom || i + 1 >= section.children.size()) fail(key, "malformed action body");
      std::string k = detail::to_upper(key.text);
      const SExpr& value = section.children[i + 1];
      if (k == ":PARAMETERS") {
        if (value.is_atom) fail(value, "expected a parameter list");
        schema.params = typed_names(value, 0, true);
        std::set<std::string> seen;
        for (const auto& p : schema.params) {
          if (!seen.insert(p.name).second) fail(value, "duplicate parameter " + p.name);
        }
      } else if (k == ":PRECONDITION") {
        pre = &value;
      } else if (k == ":EFFECT") {
        eff = &value;
      } else {
        fail(key, "unsupported action key " + key.text);
      }
    }
    if (pre) parse_precondition(schema, *pre);
    if (eff) parse_effect(schema, *eff);
    domain_.actions.push_back(std::move(schema));
  }

  Domain domain_;
};

struct ProblemParts {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  FactSet init;
  const SExpr* goal = nullptr;
};

Fact ground_fact_at(const SExpr& expr) {
  if (expr.is_atom || expr.children.empty()) fail(expr, "expected a ground fact");
  Fact f;
  f.predicate = name_at(expr.children[0]);
  for (std::size_t i = 1; i < expr.children.size(); ++i) {
    const SExpr& arg = expr.children[i];
    if (!arg.is_atom || (!arg.text.empty() && arg.text[0] == '?')) fail(arg, "expected an object name");
    f.args.push_back(name_at(arg));
  }
  return f;
}

void check_fact_at(const Domain& domain, const std::vector<TypedName>& objects, const SExpr& expr,
                   const Fact& fact) {
  try {
    check_fact(domain, objects, fact);
  } catch (const BindError& err) {
    fail(expr, err.what());
  }
}

ProblemParts parse_problem_parts(const SExpr& root, const Domain& domain) {
  if (!root.head_is("define")) fail(root, "expected (define ...)");
  if (root.children.size() < 2 || !root.children[1].head_is("problem") ||
      root.children[1].children.size() != 2) {
    fail(root, "expected (problem <name>)");
  }
  ProblemParts parts;
  parts.name = name_at(root.children[1].children[1]);
  const SExpr* init = nullptr;
  for (std::size_t i = 2; i < root.children.size(); ++i) {
    const SExpr& section = root.children[i];
    if (section.is_atom || section.children.empty() || !section.children[0].is_atom) {
      fail(section, "expected a problem section");
    }
    std::string key = detail::to_upper(section.children[0].text);
    if (key == ":DOMAIN") {
      if (section.children.size() != 2) fail(section, "expected (:domain <name>)");
      parts.domain_name = name_at(section.children[1]);
      if (parts.domain_name != domain.name) {
        fail(section, fmt::format("problem is for domain {}, not {}", parts.domain_name, domain.name));
      }
    } else if (key == ":REQUIREMENTS") {
      // Accepted for compatibility; the domain's requirements govern.
    } else if (key == ":OBJECTS") {
      auto entries = parse_typed_list(section, 1, false);
      std::set<std::string> seen;
      for (const auto& e : entries) {
        if (domain.typed() && !e.explicit_type) fail(*e.at, "untyped object " + e.entry.name);
        if (!domain.typed() && e.explicit_type && e.entry.type != kRootType) {
          fail(*e.at, "typed object in an untyped domain");
        }
        if (!domain.has_type(e.entry.type)) fail(*e.at, "undeclared type " + e.entry.type);
        if (!seen.insert(e.entry.name).second) fail(*e.at, "duplicate object " + e.entry.name);
        parts.objects.push_back(e.entry);
      }
    } else if (key == ":INIT") {
      init = &section;
    } else if (key == ":GOAL") {
      if (section.children.size() != 2) fail(section, "expected (:goal <formula>)");
      parts.goal = &section.children[1];
    } else {
      fail(section, "unsupported problem section " + key);
    }
  }
  if (parts.domain_name.empty()) fail(root, "missing (:domain ...)");
  if (init) {
    auto objects = all_objects(domain, parts.objects);
    for (std::size_t i = 1; i < init->children.size(); ++i) {
      const SExpr& f = init->children[i];
      if (f.head_is("not") || f.head_is("=")) fail(f, "only positive atoms are allowed in :init");
      Fact fact = ground_fact_at(f);
      check_fact_at(domain, objects, f, fact);
      parts.init.insert(std::move(fact));
    }
  }
  if (!parts.goal) fail(root, "missing (:goal ...)");
  return parts;
}

std::size_t count_placeholders(const SExpr& e) {
  if (e.is_atom) return is_placeholder(e) ? 1 : 0;
  std::size_t n = 0;
  for (const auto& c : e.children) n += count_placeholders(c);
  return n;
}

std::string render_typed(const std::vector<TypedName>& names, bool typed) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ' ';
    out += names[i].name;
    if (typed) out += " - " + names[i].type;
  }
  return out;
}

std::string render_atom(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const auto& t : a.terms) out += " " + t;
  return out + ")";
}

std::string render_objects_and_init(const std::string& name, const std::string& domain_name,
                                    const std::vector<TypedName>& objects, const FactSet& init,
                                    bool typed) {
  std::string out = fmt::format("(define (problem {})\n  (:domain {})\n", name, domain_name);
  out += "  (:objects " + render_typed(objects, typed) + ")\n";
  out += "  (:init";
  for (const auto& f : init) out += "\n    " + f.str();
  out += ")\n";
  return out;
}

}  // namespace

Domain parse_domain(std::string_view text) {
  SExpr root = Reader(text).read_document();
  return DomainBuilder().build(root);
}

std::vector<TypedName> all_objects(const Domain& domain, const std::vector<TypedName>& objects) {
  std::vector<TypedName> out = objects;
  for (const auto& c : domain.constants) {
    if (std::none_of(out.begin(), out.end(), [&](const TypedName& o) { return o.name == c.name; })) {
      out.push_back(c);
    }
  }
  return out;
}

void check_fact(const Domain& domain, const std::vector<TypedName>& objects, const Fact& fact) {
  const PredicateDecl* decl = domain.find_predicate(fact.predicate);
  if (!decl) throw BindError("undeclared predicate " + fact.predicate);
  if (decl->params.size() != fact.args.size()) {
    throw BindError(fmt::format("arity mismatch in {}: expected {}", fact.str(), decl->params.size()));
  }
  for (std::size_t i = 0; i < fact.args.size(); ++i) {
    auto it = std::find_if(objects.begin(), objects.end(),
                           [&](const TypedName& o) { return o.name == fact.args[i]; });
    if (it == objects.end()) throw BindError(fmt::format("unknown object {} in {}", fact.args[i], fact.str()));
    if (!domain.is_subtype(it->type, decl->params[i].type)) {
      throw BindError(fmt::format("type mismatch in {}: {} is a {}, expected {}", fact.str(),
                                  it->name, it->type, decl->params[i].type));
    }
  }
}

ProblemTemplate parse_problem_template(std::string_view text, const Domain& domain) {
  SExpr root = Reader(text).read_document();
  std::size_t placeholders = count_placeholders(root);
  if (placeholders == 0) throw ParseError(fmt::format("missing goal placeholder {}", kGoalPlaceholder));
  if (placeholders > 1) throw ParseError(fmt::format("more than one goal placeholder {}", kGoalPlaceholder));
  ProblemParts parts = parse_problem_parts(root, domain);
  const SExpr& goal = *parts.goal;
  bool ok = is_placeholder(goal) ||
            (goal.head_is("and") && goal.children.size() == 2 && is_placeholder(goal.children[1]));
  if (!ok) fail(goal, fmt::format("goal must be {} or (and {})", kGoalPlaceholder, kGoalPlaceholder));
  return ProblemTemplate{parts.name, parts.domain_name, parts.objects, parts.init};
}

Problem parse_problem(std::string_view text, const Domain& domain) {
  SExpr root = Reader(text).read_document();
  ProblemParts parts = parse_problem_parts(root, domain);
  if (count_placeholders(root) > 0) throw ParseError("goal placeholder in a concrete problem");
  Problem p{parts.name, parts.domain_name, parts.objects, parts.init, {}};
  auto objects = all_objects(domain, p.objects);
  const SExpr& goal = *parts.goal;
  std::vector<const SExpr*> atoms;
  if (goal.head_is("and")) {
    for (std::size_t i = 1; i < goal.children.size(); ++i) atoms.push_back(&goal.children[i]);
  } else {
    atoms.push_back(&goal);
  }
  for (const SExpr* a : atoms) {
    if (a->head_is("not") || a->head_is("or") || a->head_is("and")) fail(*a, "goal must be a conjunction of atoms");
    Fact f = ground_fact_at(*a);
    check_fact_at(domain, objects, *a, f);
    p.goal.insert(std::move(f));
  }
  return p;
}

Problem instantiate_goal(const ProblemTemplate& tmpl, const GoalHypothesis& goal, const Domain& domain) {
  if (goal.facts.empty()) throw BindError("cannot instantiate an empty goal hypothesis");
  auto objects = all_objects(domain, tmpl.objects);
  for (const auto& f : goal.facts) check_fact(domain, objects, f);
  return Problem{tmpl.name, tmpl.domain_name, tmpl.objects, tmpl.init, goal.fact_set()};
}

Fact parse_fact(std::string_view text) {
  std::string_view t = detail::trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')') {
    throw ParseError(fmt::format("malformed fact '{}'", text));
  }
  std::string_view inner = t.substr(1, t.size() - 2);
  if (inner.find_first_of("()") != std::string_view::npos) {
    throw ParseError(fmt::format("malformed fact '{}'", text));
  }
  auto words = detail::split_ws(inner);
  if (words.empty()) throw ParseError(fmt::format("empty fact '{}'", text));
  Fact f;
  f.predicate = canonical_name(words[0]);
  for (std::size_t i = 1; i < words.size(); ++i) f.args.push_back(canonical_name(words[i]));
  return f;
}

GoalHypothesis parse_fact_line(std::string_view line, std::size_t source_index) {
  std::string_view t = detail::trim(line);
  if (t.empty()) throw ParseError("empty hypothesis line");
  GoalHypothesis g;
  g.source_index = source_index;
  std::size_t depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    Fact f = parse_fact(t.substr(start, end - start));
    if (std::find(g.facts.begin(), g.facts.end(), f) == g.facts.end()) g.facts.push_back(std::move(f));
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    char c = t[i];
    if (c == '(') ++depth;
    else if (c == ')') {
      if (depth == 0) throw ParseError(fmt::format("unbalanced ')' in '{}'", t));
      --depth;
    } else if (c == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  if (depth != 0) throw ParseError(fmt::format("unbalanced '(' in '{}'", t));
  flush(t.size());
  return g;
}

std::vector<GoalHypothesis> parse_hypotheses(std::string_view text) {
  std::vector<GoalHypothesis> out;
  for (std::string_view line : detail::split_lines(text)) {
    if (detail::trim(line).empty()) continue;
    out.push_back(parse_fact_line(line, out.size()));
  }
  return out;
}

ActionLabel parse_action_line(std::string_view line) {
  Fact f = parse_fact(line);
  return ActionLabel{std::move(f.predicate), std::move(f.args)};
}

std::vector<ActionLabel> parse_action_lines(std::string_view text) {
  std::vector<ActionLabel> out;
  for (std::string_view line : detail::split_lines(text)) {
    if (detail::trim(line).empty()) continue;
    out.push_back(parse_action_line(line));
  }
  return out;
}

std::string render(const Domain& d) {
  const bool typed = d.typed();
  std::string out = fmt::format("(define (domain {})\n", d.name);
  out += "  (:requirements";
  for (const auto& r : d.requirements) out += " " + detail::to_lower(r);
  out += ")\n";
  if (typed && !d.type_parent.empty()) {
    out += "  (:types";
    for (const auto& [child, parent] : d.type_parent) out += fmt::format(" {} - {}", child, parent);
    out += ")\n";
  }
  if (!d.constants.empty()) out += "  (:constants " + render_typed(d.constants, typed) + ")\n";
  out += "  (:predicates";
  for (const auto& p : d.predicates) {
    out += "\n    (" + p.name;
    if (!p.params.empty()) out += " " + render_typed(p.params, typed);
    out += ")";
  }
  out += ")";
  for (const auto& a : d.actions) {
    out += fmt::format("\n  (:action {}\n    :parameters ({})\n    :precondition (and", a.name,
                       render_typed(a.params, typed));
    for (const auto& e : a.equalities) {
      out += e.negated ? fmt::format(" (not (= {} {}))", e.lhs, e.rhs) : fmt::format(" (= {} {})", e.lhs, e.rhs);
    }
    for (const auto& p : a.pre) out += " " + render_atom(p);
    out += ")\n    :effect (and";
    for (const auto& p : a.add) out += " " + render_atom(p);
    for (const auto& p : a.del) out += " (not " + render_atom(p) + ")";
    out += "))";
  }
  return out + ")\n";
}

// Objects are always rendered with an explicit type; `- OBJECT` is accepted
// by untyped domains.
std::string render(const ProblemTemplate& t) {
  return render_objects_and_init(t.name, t.domain_name, t.objects, t.init, true) +
         fmt::format("  (:goal (and {})))\n", kGoalPlaceholder);
}

std::string render(const Problem& p) {
  std::string out = render_objects_and_init(p.name, p.domain_name, p.objects, p.init, true);
  out += "  (:goal (and";
  for (const auto& f : p.goal) out += " " + f.str();
  return out + ")))\n";
}

std::string render(const Fact& fact) { return fact.str(); }
std::string render(const ActionLabel& label) { return label.str(); }

std::string render(const GoalHypothesis& goal) {
  std::string out;
  for (std::size_t i = 0; i < goal.facts.size(); ++i) {
    if (i) out += ',';
    out += goal.facts[i].str();
  }
  return out;
}

}  // namespace goalrec
