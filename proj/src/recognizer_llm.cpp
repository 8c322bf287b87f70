#include "goalrec/recognizer_llm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <set>

#include "text_util.hpp"

namespace goalrec {

namespace {

using detail::trim;

std::string rstrip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && detail::iequals(s.substr(0, prefix.size()), prefix);
}

using FactKey = std::set<std::string>;

std::string fact_key(std::string_view inner) {
  std::string out;
  for (auto tok : detail::split_ws(inner)) {
    if (!out.empty()) out += ' ';
    out += detail::to_upper(tok);
  }
  return out;
}

// Facts are read from parenthesised groups; text without parentheses is
// treated as comma-separated facts.
FactKey extract_facts(std::string_view text) {
  FactKey key;
  bool parens = false;
  std::size_t i = 0;
  while ((i = text.find('(', i)) != std::string_view::npos) {
    std::size_t close = text.find(')', i + 1);
    if (close == std::string_view::npos) break;
    std::string_view inner = text.substr(i + 1, close - i - 1);
    std::size_t nested = inner.rfind('(');
    if (nested != std::string_view::npos) inner = inner.substr(nested + 1);
    parens = true;
    if (auto k = fact_key(inner); !k.empty()) key.insert(std::move(k));
    i = close + 1;
  }
  if (!parens) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t comma = text.find(',', start);
      if (comma == std::string_view::npos) comma = text.size();
      if (auto k = fact_key(text.substr(start, comma - start)); !k.empty()) key.insert(std::move(k));
      start = comma + 1;
    }
  }
  return key;
}

FactKey hypothesis_key(const GoalHypothesis& h) {
  FactKey key;
  for (const auto& f : h.facts) {
    std::string k = f.predicate;
    for (const auto& a : f.args) k += " " + a;
    key.insert(std::move(k));
  }
  return key;
}

std::optional<double> parse_score(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v) || v < 0) return std::nullopt;
  return v;
}

// Splits "<hyp> | Score: <num>" at the last score separator.
std::optional<std::pair<std::string_view, std::string_view>> split_score(std::string_view rest) {
  for (std::size_t bar = rest.rfind('|'); bar != std::string_view::npos; bar = bar == 0 ? std::string_view::npos : rest.rfind('|', bar - 1)) {
    std::string_view tail = trim(rest.substr(bar + 1));
    if (starts_with_ci(tail, "score")) {
      std::string_view after = trim(tail.substr(5));
      if (!after.empty() && after.front() == ':') return std::pair{rest.substr(0, bar), after.substr(1)};
    }
  }
  return std::nullopt;
}

std::string substitute(std::string_view tmpl, const std::vector<std::pair<std::string_view, std::string_view>>& slots) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& [name, value] : slots) {
    std::size_t at = tmpl.find(name, pos);
    if (at == std::string_view::npos) throw std::logic_error(fmt::format("prompt template lacks {}", name));
    out.append(tmpl.substr(pos, at - pos));
    out.append(value);
    pos = at + name.size();
  }
  out.append(tmpl.substr(pos));
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + lines[i];
  return out;
}

}  // namespace

PromptBundle build_prompt(const RecognitionBundle& bundle) {
  PromptBundle p;
  p.domain_text = rstrip(bundle.domain_text.empty() ? render(bundle.domain) : bundle.domain_text);
  p.template_text = rstrip(bundle.template_text.empty() ? render(bundle.problem_template) : bundle.template_text);
  for (const auto& h : bundle.hypotheses) p.hypothesis_lines.push_back(render(h));
  for (const auto& a : bundle.observations.labels) p.observation_lines.push_back(render(a));
  std::string goals = join_lines(p.hypothesis_lines);
  std::string obs = join_lines(p.observation_lines);
  p.text = substitute(prompt_template(), {{"{problem.domain}", p.domain_text},
                                          {"{problem.template}", p.template_text},
                                          {"{goals_text}", goals},
                                          {"{obs_text}", obs}});
  return p;
}

ParsedResponse parse_response(std::string_view text, std::span<const GoalHypothesis> hypotheses) {
  ParsedResponse r;
  r.scores.assign(hypotheses.size(), std::nullopt);
  std::vector<FactKey> keys;
  for (const auto& h : hypotheses) keys.push_back(hypothesis_key(h));
  auto match = [&](std::string_view s) -> std::optional<std::size_t> {
    FactKey k = extract_facts(s);
    if (k.empty()) return std::nullopt;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] == k) return i;
    }
    return std::nullopt;
  };

  std::set<std::size_t> listed;
  std::vector<std::string_view> reasoning;
  bool in_block = false, in_reasoning = false, bullets_seen = false;
  for (std::string_view raw : detail::split_lines(text)) {
    if (in_reasoning) {
      reasoning.push_back(raw);
      continue;
    }
    std::string_view t = trim(raw);
    if (starts_with_ci(t, "reasoning:")) {
      in_reasoning = true;
      in_block = false;
      reasoning.push_back(t.substr(10));
      continue;
    }
    if (starts_with_ci(t, "most likely goals:")) {
      r.most_likely_block = true;
      in_block = true;
      t = trim(t.substr(18));
      if (t.empty()) continue;
    }
    if (in_block) {
      if (t.empty()) {
        if (bullets_seen) in_block = false;
        continue;
      }
      if (t == "...") continue;
      if (t.front() == '-' || t.front() == '*') {
        bullets_seen = true;
        std::string_view item = trim(t.substr(1));
        if (item == "...") continue;
        if (auto i = match(item)) listed.insert(*i);
        else r.unmatched.emplace_back(t);
        continue;
      }
      if (!starts_with_ci(t, "hyp:")) {
        // A bare goal directly under the header.
        if (auto i = match(t)) {
          bullets_seen = true;
          listed.insert(*i);
          continue;
        }
      }
      in_block = false;
    }
    if (starts_with_ci(t, "hyp:")) {
      auto parts = split_score(t.substr(4));
      std::optional<std::size_t> idx = parts ? match(parts->first) : std::nullopt;
      std::optional<double> score = parts ? parse_score(parts->second) : std::nullopt;
      if (idx && score && !r.scores[*idx]) r.scores[*idx] = score;
      else r.unmatched.emplace_back(t);
    }
  }
  r.most_likely.assign(listed.begin(), listed.end());
  r.reasoning = std::string(trim(join_lines(std::vector<std::string>(reasoning.begin(), reasoning.end()))));

  bool any_score = std::any_of(r.scores.begin(), r.scores.end(), [](const auto& s) { return s.has_value(); });
  bool all_scores = std::all_of(r.scores.begin(), r.scores.end(), [](const auto& s) { return s.has_value(); });
  if (!any_score && r.most_likely.empty()) {
    r.status = ParseStatus::garbage;
  } else if (all_scores && r.most_likely_block && !r.most_likely.empty() && r.unmatched.empty()) {
    r.status = ParseStatus::ok;
  } else {
    r.status = ParseStatus::partial;
  }
  return r;
}

ParsedResponse validate_scores(ParsedResponse r) {
  double sum = 0;
  bool any = false, all = true;
  for (const auto& s : r.scores) {
    if (s) {
      sum += *s;
      any = true;
    } else {
      all = false;
    }
  }
  if (!any) return r;
  r.score_sum = sum;
  if (all && std::fabs(sum - 1.0) <= kScoreSumTolerance) return r;
  r.scores_flagged = true;
  if (sum > 0) {
    for (auto& s : r.scores) {
      if (s) *s /= sum;
    }
  }
  return r;
}

std::vector<std::size_t> predicted_set(const ParsedResponse& r) {
  if (!r.most_likely.empty()) return r.most_likely;
  std::optional<double> best;
  for (const auto& s : r.scores) {
    if (s && (!best || *s > *best)) best = s;
  }
  std::vector<std::size_t> out;
  if (!best) return out;
  for (std::size_t i = 0; i < r.scores.size(); ++i) {
    if (r.scores[i] && *best - *r.scores[i] <= kScoreTieEpsilon) out.push_back(i);
  }
  return out;
}

std::string render_response(const ParsedResponse& r, std::span<const GoalHypothesis> hypotheses) {
  std::string out = "Hyps:\n";
  for (std::size_t i = 0; i < r.scores.size() && i < hypotheses.size(); ++i) {
    if (r.scores[i]) out += fmt::format("Hyp: {} | Score: {}\n", render(hypotheses[i]), *r.scores[i]);
  }
  out += "\nMost Likely Goals:\n";
  for (std::size_t i : r.most_likely) out += "- " + render(hypotheses[i]) + "\n";
  out += "\nReasoning:\n" + r.reasoning;
  return out;
}

std::string llm_recognizer_id(const std::string& provider_name) { return "llm:" + provider_name; }

RecognitionResult recognize_llm(const RecognitionBundle& bundle, const ProviderConfig& provider, ChatClient& client) {
  check_bundle(bundle);
  RecognitionResult result;
  result.recognizer_id = llm_recognizer_id(provider.name);
  ChatRequest request{provider.model, {{"user", build_prompt(bundle).text}}, provider.temperature};
  ChatResponse response;
  try {
    response = client.complete(request);
  } catch (const std::exception& e) {
    result.parse_status = ParseStatus::garbage;
    result.error = e.what();
    return result;
  }
  ParsedResponse parsed = validate_scores(parse_response(response.content, bundle.hypotheses));
  for (std::size_t i = 0; i < parsed.scores.size(); ++i) {
    if (parsed.scores[i]) {
      GoalScore s;
      s.hypothesis = i;
      s.score = *parsed.scores[i];
      result.scores.push_back(s);
    }
  }
  result.predicted = predicted_set(parsed);
  if (!parsed.reasoning.empty()) result.reasoning = parsed.reasoning;
  result.parse_status = parsed.status;
  if (parsed.scores_flagged) result.notes.push_back(fmt::format("scores renormalised from sum {:.6f}", *parsed.score_sum));
  for (const auto& line : parsed.unmatched) result.notes.push_back("unmatched: " + line);
  result.wall_time = response.latency_s;
  result.usage = response.usage;
  result.cost = (static_cast<double>(response.usage.prompt_tokens) * provider.price_input_per_mtok +
                 static_cast<double>(response.usage.completion_tokens) * provider.price_output_per_mtok) /
                1e6;
  return result;
}

}  // namespace goalrec
