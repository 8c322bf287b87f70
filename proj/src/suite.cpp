#include "goalrec/suite.hpp"

#include <algorithm>
#include <deque>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "goalrec/eval.hpp"
#include "goalrec/landmarks.hpp"

namespace goalrec {

namespace {

constexpr std::uint32_t kSuiteTag = 0x5b10c45u;
constexpr const char* kSuiteDomain = "blocks-world";

std::mt19937_64 problem_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), attempt, kSuiteTag};
  return std::mt19937_64(seq);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

Fact fact(std::string pred, std::vector<std::string> args) { return Fact{std::move(pred), std::move(args)}; }

// Tower listed top to bottom.
GoalHypothesis tower_goal(const std::vector<std::string>& tower) {
  GoalHypothesis h;
  h.facts.push_back(fact("CLEAR", {tower.front()}));
  h.facts.push_back(fact("ONTABLE", {tower.back()}));
  for (std::size_t i = 0; i + 1 < tower.size(); ++i) h.facts.push_back(fact("ON", {tower[i], tower[i + 1]}));
  return h;
}

void towers_from(std::vector<std::string>& prefix, std::vector<char>& used, const std::vector<std::string>& blocks,
                 std::size_t max_len, std::vector<std::vector<std::string>>& out) {
  if (prefix.size() >= 2) out.push_back(prefix);
  if (prefix.size() == max_len) return;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    prefix.push_back(blocks[i]);
    towers_from(prefix, used, blocks, max_len, out);
    prefix.pop_back();
    used[i] = 0;
  }
}

std::optional<RecognitionBundle> try_problem(const Domain& domain, const SuiteOptions& o, std::size_t index,
                                             std::uint32_t attempt) {
  auto rng = problem_rng(o.seed, index, attempt);
  auto span_draw = [&](int lo, int hi) { return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1))); };
  int n = span_draw(o.min_blocks, o.max_blocks);
  std::vector<std::string> blocks;
  for (int b = 0; b < n; ++b) blocks.push_back(std::string(1, static_cast<char>('A' + b)));

  ProblemTemplate tmpl;
  tmpl.name = fmt::format("BLOCKS-P{:03}", index);
  tmpl.domain_name = domain.name;
  for (const auto& b : blocks) tmpl.objects.push_back({b, "BLOCK"});
  std::vector<std::string> order = blocks;
  shuffle(order, rng);
  // Each block either starts a new tower or goes on top of the previous one.
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool on_previous = i > 0 && uniform_below(rng, 2) == 1;
    if (on_previous) tmpl.init.insert(fact("ON", {order[i], order[i - 1]}));
    else tmpl.init.insert(fact("ONTABLE", {order[i]}));
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool covered = false;
    for (const auto& f : tmpl.init) {
      if (f.predicate == "ON" && f.args[1] == order[i]) covered = true;
    }
    if (!covered) tmpl.init.insert(fact("CLEAR", {order[i]}));
  }
  tmpl.init.insert(fact("HANDEMPTY", {}));

  std::vector<std::vector<std::string>> towers;
  std::vector<std::string> prefix;
  std::vector<char> used(blocks.size(), 0);
  towers_from(prefix, used, blocks, std::min<std::size_t>(4, blocks.size()), towers);
  shuffle(towers, rng);
  std::size_t h = static_cast<std::size_t>(span_draw(o.min_hypotheses, o.max_hypotheses));
  h = std::min(h, towers.size());
  std::vector<GoalHypothesis> hyps;
  for (std::size_t i = 0; i < h; ++i) {
    hyps.push_back(tower_goal(towers[i]));
    hyps.back().source_index = i;
  }

  auto actions = ground(domain, tmpl);
  LandmarkExtractor extractor(tmpl.init, actions);
  std::vector<std::size_t> candidates(hyps.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
  shuffle(candidates, rng);
  for (std::size_t c : candidates) {
    FactSet goal = hyps[c].fact_set();
    if (std::includes(tmpl.init.begin(), tmpl.init.end(), goal.begin(), goal.end())) continue;
    auto lm = extractor.extract(goal, c);
    if (lm.unreachable || lm.actions.empty()) continue;
    auto plan = bfs_plan(tmpl.init, actions, goal);
    if (!plan || plan->empty()) continue;

    RecognitionBundle b;
    b.id = fmt::format("{}/100/p{:03}", kSuiteDomain, index);
    b.domain_label = kSuiteDomain;
    b.domain = domain;
    b.domain_text = std::string(blocks_world_domain_text());
    b.problem_template = tmpl;
    b.template_text = render(tmpl);
    b.hypotheses = hyps;
    b.true_goal_index = c;
    b.observations = full_observation(*plan);
    b.observability_pct = 100;
    b.plan = std::move(*plan);
    return b;
  }
  return std::nullopt;
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
  // Largest multiple of bound that fits, so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::optional<Plan> bfs_plan(const State& init, std::span<const GroundAction> actions, const FactSet& goal,
                             std::size_t max_states) {
  std::map<Fact, int> ids;
  auto id = [&](const Fact& f) { return ids.emplace(f, static_cast<int>(ids.size())).first->second; };
  for (const auto& f : init) id(f);
  for (const auto& f : goal) id(f);
  struct Compiled {
    std::vector<int> pre, add, del;
  };
  std::vector<Compiled> ops;
  for (const auto& a : actions) {
    Compiled c;
    for (const auto& f : a.pre) c.pre.push_back(id(f));
    for (const auto& f : a.add) c.add.push_back(id(f));
    for (const auto& f : a.del) c.del.push_back(id(f));
    ops.push_back(std::move(c));
  }
  std::string start(ids.size(), '0');
  for (const auto& f : init) start[ids.at(f)] = '1';
  std::vector<int> goal_ids;
  for (const auto& f : goal) goal_ids.push_back(ids.at(f));
  auto satisfied = [&](const std::string& s) {
    return std::all_of(goal_ids.begin(), goal_ids.end(), [&](int g) { return s[g] == '1'; });
  };

  // state -> (parent state, action index)
  std::unordered_map<std::string, std::pair<std::string, std::size_t>> parent;
  parent.emplace(start, std::pair{std::string(), actions.size()});
  std::deque<std::string> frontier{start};
  std::size_t expanded = 0;
  while (!frontier.empty()) {
    std::string s = std::move(frontier.front());
    frontier.pop_front();
    if (satisfied(s)) {
      Plan plan;
      for (std::string cur = s; parent.at(cur).second != actions.size(); cur = parent.at(cur).first) {
        plan.push_back(actions[parent.at(cur).second].label);
      }
      std::reverse(plan.begin(), plan.end());
      return plan;
    }
    if (++expanded > max_states) return std::nullopt;
    for (std::size_t a = 0; a < ops.size(); ++a) {
      const auto& op = ops[a];
      if (!std::all_of(op.pre.begin(), op.pre.end(), [&](int p) { return s[p] == '1'; })) continue;
      std::string next = s;
      for (int d : op.del) next[d] = '0';
      for (int p : op.add) next[p] = '1';
      if (parent.emplace(next, std::pair{s, a}).second) frontier.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

std::vector<RecognitionBundle> generate_blocks_suite(const SuiteOptions& o) {
  if (o.min_blocks < 2 || o.max_blocks > 26 || o.min_blocks > o.max_blocks) {
    throw std::invalid_argument("block counts must satisfy 2 <= min <= max <= 26");
  }
  if (o.min_hypotheses < 1 || o.min_hypotheses > o.max_hypotheses) {
    throw std::invalid_argument("hypothesis counts must satisfy 1 <= min <= max");
  }
  Domain domain = parse_domain(blocks_world_domain_text());
  std::vector<RecognitionBundle> out;
  for (std::size_t i = 0; i < o.problems; ++i) {
    std::optional<RecognitionBundle> b;
    for (std::uint32_t attempt = 0; !b; ++attempt) {
      if (attempt == 1000) throw std::runtime_error(fmt::format("could not generate problem {}", i));
      b = try_problem(domain, o, i, attempt);
    }
    out.push_back(std::move(*b));
  }
  return out;
}

std::vector<RecognitionBundle> at_observability(const RecognitionBundle& full, int pct, std::uint64_t seed,
                                                std::uint64_t stream) {
  if (!full.plan) throw std::invalid_argument("bundle " + full.id + " has no plan");
  std::string name = full.id.substr(full.id.rfind('/') + 1);
  std::vector<RecognitionBundle> out;
  auto draws = generate_benchmark_obs(*full.plan, pct, seed, stream);
  for (std::size_t k = 0; k < draws.size(); ++k) {
    RecognitionBundle b = full;
    b.observations = std::move(draws[k]);
    b.observability_pct = pct;
    b.id = pct == 100 ? fmt::format("{}/{}/{}", full.domain_label, pct, name)
                      : fmt::format("{}/{}/{}-d{}", full.domain_label, pct, name, k);
    out.push_back(std::move(b));
  }
  return out;
}

std::size_t write_suite(const std::filesystem::path& root, const std::vector<RecognitionBundle>& problems,
                        const std::vector<int>& levels, std::uint64_t seed) {
  std::size_t written = 0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    for (int pct : levels) {
      for (const auto& b : at_observability(problems[i], pct, seed, i)) {
        write_bundle(root / b.id, b);
        ++written;
      }
    }
  }
  return written;
}

}  // namespace goalrec
