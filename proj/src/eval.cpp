#include "goalrec/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fmt/format.h>
#include <map>
#include <thread>
#include <tuple>

#include "csv.hpp"
#include "goalrec/hashing.hpp"
#include "goalrec/landmark_cache.hpp"
#include "goalrec/recognizer_llm.hpp"
#include "goalrec/recognizer_lm.hpp"
#include "text_util.hpp"

namespace goalrec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kBundleFiles[] = {"domain.pddl", "template.pddl", "hyps.dat", "real_hyp.dat", "obs.dat",
                                        "plan.dat"};

std::optional<int> level_of(const std::string& component) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(component.data(), component.data() + component.size(), v);
  if (ec != std::errc() || ptr != component.data() + component.size() || !is_valid_observability(v)) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string> components(const fs::path& p) {
  std::vector<std::string> out;
  for (const auto& c : p) {
    if (!c.empty() && c != ".") out.push_back(c.string());
  }
  return out;
}

std::string lines_text(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string fmt_opt(const std::optional<double>& v, int decimals) {
  return v ? fmt::format("{:.{}f}", *v, decimals) : std::string();
}

double parse_double(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("bad number in CSV: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("bad integer in CSV: " + s);
  return v;
}

const std::vector<std::string> kPerProblemColumns = {
    "bundle", "recognizer", "domain", "obs_pct", "goals", "obs",         "correct", "spread", "precision",
    "time",   "extract_time", "pt",   "ct",      "tt",    "cost",        "parse_status", "error"};

const std::vector<std::string> kSummaryColumns = {"recognizer", "domain",    "obs_pct", "problems", "goals",
                                                  "obs",        "spread",    "accuracy", "precision", "time",
                                                  "extract_time", "pt",      "ct",       "tt",        "cost"};

MetricsRow make_row(const std::string& recognizer, const std::string& domain, int pct,
                    const std::vector<const PerProblemMetrics*>& cell) {
  MetricsRow row;
  row.recognizer_id = recognizer;
  row.domain = domain;
  row.observability_pct = pct;
  row.problems = cell.size();
  double goals = 0, obs = 0, spread = 0, correct = 0, precision = 0, time = 0, extract = 0;
  double pt = 0, ct = 0, cost = 0;
  std::size_t with_usage = 0, with_cost = 0;
  for (const auto* m : cell) {
    goals += static_cast<double>(m->num_goals);
    obs += static_cast<double>(m->num_obs);
    spread += static_cast<double>(m->spread);
    correct += m->correct ? 1.0 : 0.0;
    precision += m->precision;
    time += m->time;
    extract += m->extract_time;
    if (m->usage) {
      pt += static_cast<double>(m->usage->prompt_tokens);
      ct += static_cast<double>(m->usage->completion_tokens);
      ++with_usage;
    }
    if (m->cost) {
      cost += *m->cost;
      ++with_cost;
    }
  }
  double n = static_cast<double>(cell.size());
  row.mean_goals = goals / n;
  row.mean_obs = obs / n;
  row.mean_spread = spread / n;
  row.accuracy = 100.0 * correct / n;
  row.precision = 100.0 * precision / n;
  row.mean_time = time / n;
  row.mean_extract_time = extract / n;
  if (with_usage) {
    double u = static_cast<double>(with_usage);
    row.mean_pt = pt / u;
    row.mean_ct = ct / u;
    row.mean_tt = (pt + ct) / u;
  }
  if (with_cost) row.mean_cost = cost / static_cast<double>(with_cost);
  return row;
}

std::vector<std::string> summary_fields(const MetricsRow& r) {
  return {r.recognizer_id,
          r.domain,
          std::to_string(r.observability_pct),
          std::to_string(r.problems),
          fmt::format("{:.1f}", r.mean_goals),
          fmt::format("{:.1f}", r.mean_obs),
          fmt::format("{:.1f}", r.mean_spread),
          fmt::format("{:.2f}", r.accuracy),
          fmt::format("{:.2f}", r.precision),
          fmt::format("{:.3f}", r.mean_time),
          fmt::format("{:.3f}", r.mean_extract_time),
          fmt_opt(r.mean_pt, 1),
          fmt_opt(r.mean_ct, 1),
          fmt_opt(r.mean_tt, 1),
          fmt_opt(r.mean_cost, 4)};
}

struct ProviderClients {
  std::unique_ptr<ChatClient> base;
  std::unique_ptr<RecordingClient> recording;
  std::unique_ptr<ConcurrencyLimitedClient> limited;
};

}  // namespace

RecognitionBundle load_bundle(const fs::path& dir, const fs::path& root) {
  auto need = [&](const char* name) {
    fs::path f = dir / name;
    if (!fs::is_regular_file(f)) throw BundleError(fmt::format("{}: missing {}", dir.string(), name));
    return read_file(f);
  };
  RecognitionBundle b;
  std::string stage;
  try {
    std::vector<std::string> rel = components(root.empty() ? dir.filename() : fs::relative(dir, root));
    b.id = root.empty() ? dir.filename().string() : fs::relative(dir, root).generic_string();
    for (const auto& c : root.empty() ? components(dir) : rel) {
      if (auto pct = level_of(c)) b.observability_pct = *pct;
    }

    stage = "domain.pddl";
    b.domain_text = need("domain.pddl");
    b.domain = parse_domain(b.domain_text);
    b.domain_label = !root.empty() && rel.size() > 1 ? rel.front() : detail::to_lower(b.domain.name);

    stage = "template.pddl";
    b.template_text = need("template.pddl");
    b.problem_template = parse_problem_template(b.template_text, b.domain);
    auto objects = all_objects(b.domain, b.problem_template.objects);

    stage = "hyps.dat";
    b.hypotheses = parse_hypotheses(need("hyps.dat"));
    if (b.hypotheses.empty()) throw BundleError(dir.string() + ": hyps.dat lists no hypotheses");
    for (const auto& h : b.hypotheses) {
      for (const auto& f : h.facts) check_fact(b.domain, objects, f);
    }

    stage = "real_hyp.dat";
    std::string real_text = need("real_hyp.dat");
    std::optional<GoalHypothesis> real;
    for (auto line : detail::split_lines(real_text)) {
      if (!detail::trim(line).empty()) {
        real = parse_fact_line(line);
        break;
      }
    }
    if (!real) throw BundleError(dir.string() + ": real_hyp.dat is empty");
    auto it = std::find(b.hypotheses.begin(), b.hypotheses.end(), *real);
    if (it == b.hypotheses.end()) {
      throw BundleError(fmt::format("{}: real hypothesis {} is not among the candidates", dir.string(), render(*real)));
    }
    b.true_goal_index = static_cast<std::size_t>(it - b.hypotheses.begin());

    stage = "obs.dat";
    auto actions = ground(b.domain, b.problem_template);
    ActionIndex index(actions);
    b.observations.labels = parse_action_lines(need("obs.dat"));
    b.observations.observability_pct = b.observability_pct;
    for (const auto& l : b.observations.labels) index.at(l);

    if (fs::is_regular_file(dir / "plan.dat")) {
      stage = "plan.dat";
      Plan plan = parse_action_lines(read_file(dir / "plan.dat"));
      for (const auto& l : plan) index.at(l);
      if (auto idx = match_subsequence(plan, b.observations.labels)) b.observations.source_indices = *idx;
      b.plan = std::move(plan);
    }
  } catch (const BundleError&) {
    throw;
  } catch (const std::exception& e) {
    throw BundleError(fmt::format("{}: {}: {}", dir.string(), stage, e.what()));
  }
  return b;
}

void write_bundle(const fs::path& dir, const RecognitionBundle& b) {
  check_bundle(b);
  if (!b.true_goal_index) throw std::invalid_argument("bundle " + b.id + " has no true goal");
  fs::create_directories(dir);
  auto ensure_newline = [](std::string s) {
    if (!s.empty() && s.back() != '\n') s += '\n';
    return s;
  };
  write_file_atomic(dir / "domain.pddl", ensure_newline(b.domain_text.empty() ? render(b.domain) : b.domain_text));
  write_file_atomic(dir / "template.pddl",
                    ensure_newline(b.template_text.empty() ? render(b.problem_template) : b.template_text));
  std::vector<std::string> hyps, obs;
  for (const auto& h : b.hypotheses) hyps.push_back(render(h));
  for (const auto& a : b.observations.labels) obs.push_back(render(a));
  write_file_atomic(dir / "hyps.dat", lines_text(hyps));
  write_file_atomic(dir / "real_hyp.dat", render(b.hypotheses[*b.true_goal_index]) + "\n");
  write_file_atomic(dir / "obs.dat", lines_text(obs));
  if (b.plan) {
    std::vector<std::string> plan;
    for (const auto& a : *b.plan) plan.push_back(render(a));
    write_file_atomic(dir / "plan.dat", lines_text(plan));
  }
}

std::vector<fs::path> discover_bundles(const fs::path& root, const std::vector<std::string>& domains,
                                       const std::vector<int>& levels) {
  if (!fs::is_directory(root)) throw std::invalid_argument("benchmark root not found: " + root.string());
  std::vector<std::pair<std::string, fs::path>> found;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_directory()) continue;
    if (it->path().filename().string().starts_with(".")) {
      it.disable_recursion_pending();
      continue;
    }
    if (!fs::is_regular_file(it->path() / "hyps.dat")) continue;
    auto rel = fs::relative(it->path(), root);
    auto parts = components(rel);
    if (!domains.empty() &&
        std::none_of(domains.begin(), domains.end(), [&](const std::string& d) { return detail::iequals(d, parts.front()); })) {
      continue;
    }
    std::optional<int> pct;
    for (const auto& c : parts) {
      if (auto p = level_of(c)) pct = p;
    }
    if (std::find(levels.begin(), levels.end(), pct.value_or(100)) == levels.end()) continue;
    found.emplace_back(rel.generic_string(), it->path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

std::vector<BundleCheck> validate_bundle_dir(const fs::path& dir) {
  std::vector<BundleCheck> checks;
  RecognitionBundle b;
  try {
    b = load_bundle(dir);
  } catch (const std::exception& e) {
    checks.push_back({"load", false, e.what()});
    return checks;
  }
  checks.push_back({"load", true, fmt::format("{} hypotheses, {} observations", b.hypotheses.size(),
                                              b.observations.labels.size())});
  checks.push_back({"hypotheses-typed", true, "every hypothesis fact is well typed"});
  checks.push_back({"true-goal-member", true, fmt::format("true goal is hypothesis {}", *b.true_goal_index)});
  checks.push_back({"observations-bound", true, "every observation is a ground action"});
  if (!b.plan) {
    checks.push_back({"plan", true, "no plan.dat; skipped"});
    return checks;
  }
  auto actions = ground(b.domain, b.problem_template);
  auto validation = validate_plan(b.problem_template.init, actions, *b.plan);
  if (!validation.valid) {
    checks.push_back({"plan", false, fmt::format("step {}: {}", validation.failed_step, validation.error)});
  } else {
    std::vector<std::string> unmet;
    for (const auto& f : b.hypotheses[*b.true_goal_index].facts) {
      if (!validation.final_state.count(f)) unmet.push_back(f.str());
    }
    if (unmet.empty()) {
      checks.push_back({"plan", true, fmt::format("{} steps reach the true goal", b.plan->size())});
    } else {
      std::string missing;
      for (const auto& u : unmet) missing += " " + u;
      checks.push_back({"plan", false, "plan does not achieve" + missing});
    }
  }
  bool subsequence = match_subsequence(*b.plan, b.observations.labels).has_value();
  checks.push_back({"observations-in-plan", subsequence,
                    subsequence ? "observations are an ordered subsequence of the plan"
                                : "observations are not an ordered subsequence of the plan"});
  return checks;
}

PerProblemMetrics score_problem(const RecognitionResult& result, const RecognitionBundle& bundle) {
  PerProblemMetrics m;
  m.bundle_id = bundle.id;
  m.recognizer_id = result.recognizer_id;
  m.domain = bundle.domain_label;
  m.observability_pct = bundle.observability_pct;
  m.num_goals = bundle.hypotheses.size();
  m.num_obs = bundle.observations.labels.size();
  m.spread = result.predicted.size();
  m.correct = bundle.true_goal_index &&
              std::find(result.predicted.begin(), result.predicted.end(), *bundle.true_goal_index) !=
                  result.predicted.end();
  m.precision = m.correct ? 1.0 / static_cast<double>(m.spread) : 0.0;
  m.time = result.wall_time;
  m.extract_time = result.prepare_time;
  m.usage = result.usage;
  m.cost = result.cost;
  if (result.parse_status) m.parse_status = to_string(*result.parse_status);
  if (result.error) m.error = *result.error;
  return m;
}

std::vector<MetricsRow> aggregate(std::span<const PerProblemMetrics> rows) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<const PerProblemMetrics*>> cells;
  std::map<std::pair<std::string, int>, std::vector<const PerProblemMetrics*>> all;
  for (const auto& m : rows) {
    cells[{m.recognizer_id, m.domain, m.observability_pct}].push_back(&m);
    all[{m.recognizer_id, m.observability_pct}].push_back(&m);
  }
  std::vector<MetricsRow> out;
  auto cell = cells.begin();
  auto total = all.begin();
  while (total != all.end()) {
    const std::string& recognizer = total->first.first;
    for (; cell != cells.end() && std::get<0>(cell->first) == recognizer; ++cell) {
      out.push_back(make_row(recognizer, std::get<1>(cell->first), std::get<2>(cell->first), cell->second));
    }
    for (; total != all.end() && total->first.first == recognizer; ++total) {
      out.push_back(make_row(recognizer, kAllDomains, total->first.second, total->second));
    }
  }
  return out;
}

ReportFormat parse_report_format(std::string_view name) {
  if (detail::iequals(name, "csv")) return ReportFormat::csv;
  if (detail::iequals(name, "markdown") || detail::iequals(name, "md")) return ReportFormat::markdown;
  if (detail::iequals(name, "json")) return ReportFormat::json;
  throw std::invalid_argument(fmt::format("unknown report format '{}'", name));
}

std::string emit_report(std::span<const MetricsRow> rows, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: {
      std::string out = detail::csv_row(kSummaryColumns);
      for (const auto& r : rows) out += detail::csv_row(summary_fields(r));
      return out;
    }
    case ReportFormat::markdown: {
      std::string out =
          "| Recognizer | Domain | Obs % | Problems | Goals | Obs | Spread | Acc % | Prec % | Time (s) | Extract (s) "
          "| PT | CT | TT | Cost |\n"
          "|---|---|--:|--:|--:|--:|--:|--:|--:|--:|--:|--:|--:|--:|--:|\n";
      for (const auto& r : rows) {
        out += "|";
        for (auto& f : summary_fields(r)) out += " " + (f.empty() ? std::string("-") : f) + " |";
        out += "\n";
      }
      return out;
    }
    case ReportFormat::json: {
      json arr = json::array();
      for (const auto& r : rows) {
        json o{{"recognizer", r.recognizer_id}, {"domain", r.domain},       {"obs_pct", r.observability_pct},
               {"problems", r.problems},        {"goals", r.mean_goals},     {"obs", r.mean_obs},
               {"spread", r.mean_spread},       {"accuracy", r.accuracy},    {"precision", r.precision},
               {"time", r.mean_time},           {"extract_time", r.mean_extract_time}};
        auto put = [&](const char* k, const std::optional<double>& v) { o[k] = v ? json(*v) : json(nullptr); };
        put("pt", r.mean_pt);
        put("ct", r.mean_ct);
        put("tt", r.mean_tt);
        put("cost", r.mean_cost);
        arr.push_back(std::move(o));
      }
      return arr.dump(2) + "\n";
    }
  }
  return {};
}

std::string per_problem_csv(std::span<const PerProblemMetrics> rows) {
  std::string out = detail::csv_row(kPerProblemColumns);
  for (const auto& m : rows) {
    out += detail::csv_row({m.bundle_id,
                            m.recognizer_id,
                            m.domain,
                            std::to_string(m.observability_pct),
                            std::to_string(m.num_goals),
                            std::to_string(m.num_obs),
                            m.correct ? "1" : "0",
                            std::to_string(m.spread),
                            fmt::format("{}", m.precision),
                            fmt::format("{}", m.time),
                            fmt::format("{}", m.extract_time),
                            m.usage ? std::to_string(m.usage->prompt_tokens) : "",
                            m.usage ? std::to_string(m.usage->completion_tokens) : "",
                            m.usage ? std::to_string(m.usage->total()) : "",
                            m.cost ? fmt::format("{}", *m.cost) : "",
                            m.parse_status,
                            m.error});
  }
  return out;
}

std::vector<PerProblemMetrics> parse_per_problem_csv(std::string_view text) {
  auto table = detail::parse_csv(text);
  if (table.empty() || table.front() != kPerProblemColumns) throw std::runtime_error("not a per-problem CSV");
  std::vector<PerProblemMetrics> out;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& f = table[i];
    if (f.size() != kPerProblemColumns.size()) throw std::runtime_error(fmt::format("CSV row {} has {} fields", i + 1, f.size()));
    PerProblemMetrics m;
    m.bundle_id = f[0];
    m.recognizer_id = f[1];
    m.domain = f[2];
    m.observability_pct = static_cast<int>(parse_u64(f[3]));
    m.num_goals = parse_u64(f[4]);
    m.num_obs = parse_u64(f[5]);
    m.correct = f[6] == "1";
    m.spread = parse_u64(f[7]);
    m.precision = parse_double(f[8]);
    m.time = parse_double(f[9]);
    m.extract_time = parse_double(f[10]);
    if (!f[11].empty()) {
      TokenUsage u{parse_u64(f[11]), parse_u64(f[12])};
      if (!f[13].empty() && parse_u64(f[13]) != u.total()) {
        throw std::runtime_error(fmt::format("CSV row {}: tt differs from pt + ct", i + 1));
      }
      m.usage = u;
    }
    if (!f[14].empty()) m.cost = parse_double(f[14]);
    m.parse_status = f[15];
    m.error = f[16];
    out.push_back(std::move(m));
  }
  return out;
}

json result_to_json(const RecognitionResult& r, const RecognitionBundle& b) {
  json scores = json::array();
  for (const auto& s : r.scores) {
    json o{{"hypothesis", s.hypothesis}, {"goal", render(b.hypotheses.at(s.hypothesis))}, {"score", s.score}};
    if (s.exact) {
      o["matched"] = s.matched;
      o["total"] = s.total;
    }
    scores.push_back(std::move(o));
  }
  json predicted_goals = json::array();
  for (auto i : r.predicted) predicted_goals.push_back(render(b.hypotheses.at(i)));
  json doc{{"bundle", b.id},
           {"recognizer", r.recognizer_id},
           {"predicted", r.predicted},
           {"predicted_goals", predicted_goals},
           {"spread", r.spread()},
           {"scores", scores},
           {"wall_time", r.wall_time},
           {"prepare_time", r.prepare_time}};
  if (b.true_goal_index) {
    doc["true_goal"] = *b.true_goal_index;
    doc["correct"] = std::find(r.predicted.begin(), r.predicted.end(), *b.true_goal_index) != r.predicted.end();
  }
  if (r.reasoning) doc["reasoning"] = *r.reasoning;
  if (r.usage) {
    doc["usage"] = {{"prompt_tokens", r.usage->prompt_tokens},
                    {"completion_tokens", r.usage->completion_tokens},
                    {"total_tokens", r.usage->total()}};
  }
  if (r.cost) doc["cost"] = *r.cost;
  if (r.parse_status) doc["parse_status"] = to_string(*r.parse_status);
  if (r.error) doc["error"] = *r.error;
  if (!r.notes.empty()) doc["notes"] = r.notes;
  return doc;
}

std::string default_run_id(const RunConfig& config) {
  std::string id;
  for (const auto& r : config.recognizers) {
    std::string part = r;
    std::replace(part.begin(), part.end(), ':', '-');
    id += (id.empty() ? "" : "+") + part;
  }
  return fmt::format("{}-s{}", id, config.seed);
}

RunSummary run_eval(const RunConfig& config, const ClientFactory& make_client) {
  if (config.observability.empty()) throw std::invalid_argument("no observability levels selected");
  for (int pct : config.observability) {
    if (!is_valid_observability(pct)) throw std::invalid_argument(fmt::format("invalid observability level {}", pct));
  }
  if (config.recognizers.empty()) throw std::invalid_argument("no recognizer selected");
  if (config.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");

  std::map<std::string, ProviderConfig> providers;
  if (!config.providers_file.empty()) providers = load_providers(config.providers_file);
  std::vector<std::string> recognizers;
  auto add = [&](const std::string& r) {
    if (std::find(recognizers.begin(), recognizers.end(), r) == recognizers.end()) recognizers.push_back(r);
  };
  for (const auto& r : config.recognizers) {
    if (r == "all") {
      add(kLandmarkRecognizerId);
      for (const auto& [name, _] : providers) add(llm_recognizer_id(name));
    } else if (r == kLandmarkRecognizerId) {
      add(r);
    } else if (r.starts_with("llm:")) {
      std::string name = r.substr(4);
      if (!providers.count(name)) {
        throw std::invalid_argument(fmt::format("recognizer {} needs provider '{}' in --providers", r, name));
      }
      add(r);
    } else {
      throw std::invalid_argument(fmt::format("unknown recognizer '{}' (expected lm, llm:<provider> or all)", r));
    }
  }

  auto bundles = discover_bundles(config.bench_root, config.domains, config.observability);
  if (bundles.empty()) throw std::invalid_argument("no bundles match under " + config.bench_root.string());

  RunSummary summary;
  std::string run_id = config.run_id.empty() ? default_run_id(config) : config.run_id;
  summary.run_dir = config.out_dir / run_id;
  fs::create_directories(summary.run_dir / "transcripts");
  fs::path cache_dir = config.cache_dir.empty() ? config.out_dir / "landmark-cache" : config.cache_dir;

  std::map<std::string, ProviderClients> clients;
  for (const auto& r : recognizers) {
    if (!r.starts_with("llm:")) continue;
    const ProviderConfig& cfg = providers.at(r.substr(4));
    ProviderClients c;
    if (make_client) c.base = make_client(cfg);
    else if (!config.replay_dir.empty()) c.base = std::make_unique<ReplayClient>(config.replay_dir);
    else c.base = std::make_unique<HttpChatClient>(cfg);
    std::vector<fs::path> dirs{summary.run_dir / "transcripts"};
    if (!config.record_dir.empty()) dirs.push_back(config.record_dir);
    c.recording = std::make_unique<RecordingClient>(*c.base, dirs);
    c.limited = std::make_unique<ConcurrencyLimitedClient>(*c.recording, cfg.concurrency);
    clients.emplace(r, std::move(c));
  }

  std::vector<std::vector<PerProblemMetrics>> slots(bundles.size());
  std::vector<std::string> errors(bundles.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < bundles.size(); i = next++) {
      try {
        RecognitionBundle b = load_bundle(bundles[i], config.bench_root);
        for (const auto& r : recognizers) {
          RecognitionResult result;
          if (r == kLandmarkRecognizerId) {
            auto cached = cached_landmarks(cache_dir, b.domain, b.problem_template, b.hypotheses);
            result = recognize_lm(b, cached.sets);
            result.prepare_time = cached.extract_seconds;
          } else {
            result = recognize_llm(b, providers.at(r.substr(4)), *clients.at(r).limited);
          }
          slots[i].push_back(score_problem(result, b));
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), bundles.size());
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (!errors[i].empty()) summary.load_errors.push_back(errors[i]);
    for (auto& m : slots[i]) summary.per_problem.push_back(std::move(m));
  }
  // Rows are grouped by recogniser in selection order, then by bundle.
  std::stable_sort(summary.per_problem.begin(), summary.per_problem.end(), [&](const auto& a, const auto& b) {
    auto rank = [&](const std::string& id) { return std::find(recognizers.begin(), recognizers.end(), id) - recognizers.begin(); };
    return rank(a.recognizer_id) < rank(b.recognizer_id);
  });
  summary.rows = aggregate(summary.per_problem);

  json manifest_bundles = json::array();
  for (const auto& dir : bundles) {
    json files = json::object();
    for (const char* name : kBundleFiles) {
      if (fs::is_regular_file(dir / name)) files[name] = git_blob_id(read_file(dir / name));
    }
    manifest_bundles.push_back({{"id", fs::relative(dir, config.bench_root).generic_string()}, {"files", files}});
  }
  json used_providers = json::object();
  for (const auto& r : recognizers) {
    if (r.starts_with("llm:")) used_providers[r.substr(4)] = provider_to_json(providers.at(r.substr(4)));
  }
  json manifest{{"run_id", run_id},
                {"seed", config.seed},
                {"recognizers", recognizers},
                {"observability", config.observability},
                {"domains", config.domains},
                {"providers", used_providers},
                {"mode", config.replay_dir.empty() ? "live" : "replay"},
                {"bundles", manifest_bundles},
                {"load_errors", summary.load_errors}};

  write_file_atomic(summary.run_dir / "per_problem.csv", per_problem_csv(summary.per_problem));
  write_file_atomic(summary.run_dir / "summary.csv", emit_report(summary.rows, ReportFormat::csv));
  write_file_atomic(summary.run_dir / "summary.md", emit_report(summary.rows, ReportFormat::markdown));
  write_file_atomic(summary.run_dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace goalrec
