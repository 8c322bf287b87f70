// goalrec: command-line entry point. Machine-readable output goes to stdout,
// diagnostics to stderr.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

#include "goalrec/eval.hpp"
#include "goalrec/landmark_cache.hpp"
#include "goalrec/recognizer_llm.hpp"
#include "goalrec/recognizer_lm.hpp"
#include "goalrec/suite.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace goalrec;

namespace {

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string first_nonempty_line(const std::string& text) {
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
    start = end + 1;
  }
  throw std::invalid_argument("real hypothesis file is empty");
}

void log(const std::string& msg) { fmt::print(stderr, "goalrec: {}\n", msg); }

std::vector<std::string> parse_domains(const std::string& spec) {
  if (spec.empty()) throw std::invalid_argument("--domains is empty; pass 'all' or a comma-separated list");
  if (spec == "all") return {};
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t comma = spec.find(',', start);
    if (comma == std::string::npos) comma = spec.size();
    std::string d = spec.substr(start, comma - start);
    if (d.empty()) throw std::invalid_argument("--domains contains an empty entry");
    out.push_back(d);
    start = comma + 1;
  }
  return out;
}

void check_levels(const std::vector<int>& levels) {
  if (levels.empty()) throw std::invalid_argument("--obs selects no observability level");
  for (int pct : levels) {
    if (!is_valid_observability(pct)) {
      throw std::invalid_argument(fmt::format("--obs {} is not one of 10,30,50,70,100", pct));
    }
  }
}

struct LlmOptions {
  std::string providers;
  std::string replay;
  std::string record;
};

std::unique_ptr<ChatClient> base_client(const ProviderConfig& cfg, const LlmOptions& o) {
  if (!o.replay.empty()) return std::make_unique<ReplayClient>(o.replay);
  return std::make_unique<HttpChatClient>(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal recognition over PDDL: landmark and language-model recognisers"};
  app.require_subcommand(1);

  // parse
  std::string parse_file, parse_domain_file;
  auto* parse = app.add_subcommand("parse", "Parse a domain (or a problem/template with --domain) and print it canonically");
  parse->add_option("file", parse_file, "PDDL file")->required()->check(CLI::ExistingFile);
  parse->add_option("--domain", parse_domain_file, "Domain for a problem or template file")->check(CLI::ExistingFile);

  // ground
  std::string ground_domain, ground_problem;
  auto* ground_cmd = app.add_subcommand("ground", "List the ground actions of a problem or template");
  ground_cmd->add_option("--domain", ground_domain)->required()->check(CLI::ExistingFile);
  ground_cmd->add_option("--problem", ground_problem, "Problem or template file")->required()->check(CLI::ExistingFile);

  // landmarks
  std::string lm_domain, lm_template, lm_hyps, lm_cache = ".goalrec-cache";
  auto* lm_cmd = app.add_subcommand("landmarks", "Extract action landmarks for every hypothesis and cache them");
  lm_cmd->add_option("--domain", lm_domain)->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--template", lm_template)->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--hyps", lm_hyps)->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--cache", lm_cache, "Cache directory")->capture_default_str();

  // gen-obs
  std::string go_domain, go_template, go_real, go_plan, go_out;
  std::vector<int> go_levels{10, 30, 50, 70, 100};
  std::uint64_t go_seed = 0, go_stream = 0;
  auto* gen_obs = app.add_subcommand("gen-obs", "Sample observation files from a plan");
  gen_obs->add_option("--domain", go_domain)->required()->check(CLI::ExistingFile);
  gen_obs->add_option("--template", go_template)->required()->check(CLI::ExistingFile);
  gen_obs->add_option("--real-hyp", go_real)->required()->check(CLI::ExistingFile);
  gen_obs->add_option("--plan", go_plan)->required()->check(CLI::ExistingFile);
  gen_obs->add_option("--obs", go_levels, "Observability levels")->delimiter(',')->capture_default_str();
  gen_obs->add_option("--seed", go_seed)->capture_default_str();
  gen_obs->add_option("--stream", go_stream, "Problem substream")->capture_default_str();
  gen_obs->add_option("--out", go_out, "Output directory; writes <out>/<pct>/d<k>/obs.dat")->required();

  // recognize
  std::string rec_bundle, rec_recognizer = "lm", rec_cache;
  LlmOptions rec_llm;
  auto* recognize = app.add_subcommand("recognize", "Run one recogniser on one bundle and print the result");
  recognize->add_option("bundle", rec_bundle)->required()->check(CLI::ExistingDirectory);
  recognize->add_option("--recognizer", rec_recognizer, "lm or llm:<provider>")->capture_default_str();
  recognize->add_option("--providers", rec_llm.providers, "Provider config (JSON)")->check(CLI::ExistingFile);
  recognize->add_option("--replay", rec_llm.replay, "Transcript directory to replay")->check(CLI::ExistingDirectory);
  recognize->add_option("--record", rec_llm.record, "Directory to record transcripts into");
  recognize->add_option("--cache", rec_cache, "Landmark cache directory");

  // eval
  RunConfig run;
  std::string eval_domains = "all", eval_root, eval_out = "results", eval_providers, eval_replay, eval_record, eval_cache;
  std::vector<std::string> eval_recognizers{"lm"};
  auto* eval = app.add_subcommand("eval", "Evaluate recognisers over a benchmark tree");
  eval->add_option("--bench-root", eval_root)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--domains", eval_domains, "Comma-separated domains or 'all'")->capture_default_str();
  eval->add_option("--obs", run.observability, "Observability levels")->delimiter(',')->capture_default_str();
  eval->add_option("--recognizer", eval_recognizers, "lm, llm:<provider> or all")->delimiter(',')->capture_default_str();
  eval->add_option("--seed", run.seed)->capture_default_str();
  eval->add_option("--jobs", run.jobs)->capture_default_str();
  eval->add_option("--out", eval_out, "Results directory")->capture_default_str();
  eval->add_option("--run-id", run.run_id, "Defaults to <recognizers>-s<seed>");
  eval->add_option("--providers", eval_providers, "Provider config (JSON)")->check(CLI::ExistingFile);
  eval->add_option("--replay", eval_replay, "Transcript directory to replay")->check(CLI::ExistingDirectory);
  eval->add_option("--record", eval_record, "Extra directory to record transcripts into");
  eval->add_option("--cache", eval_cache, "Landmark cache directory (default <out>/landmark-cache)");

  // validate
  std::vector<std::string> val_bundles;
  auto* validate = app.add_subcommand("validate", "Check bundles: plan validity, typing, true-goal membership");
  validate->add_option("bundles", val_bundles)->required()->check(CLI::ExistingDirectory);

  // report
  std::string rep_file, rep_format = "markdown";
  auto* report = app.add_subcommand("report", "Aggregate a per_problem.csv into a summary table");
  report->add_option("per_problem", rep_file)->required()->check(CLI::ExistingFile);
  report->add_option("--format", rep_format, "csv, markdown or json")->capture_default_str();

  // gen-suite
  SuiteOptions suite;
  std::string suite_out;
  std::vector<int> suite_levels{10, 30, 50, 70, 100};
  auto* gen_suite = app.add_subcommand("gen-suite", "Generate a synthetic blocks-world benchmark tree");
  gen_suite->add_option("--out", suite_out)->required();
  gen_suite->add_option("--problems", suite.problems)->capture_default_str();
  gen_suite->add_option("--seed", suite.seed)->capture_default_str();
  gen_suite->add_option("--min-blocks", suite.min_blocks)->capture_default_str();
  gen_suite->add_option("--max-blocks", suite.max_blocks)->capture_default_str();
  gen_suite->add_option("--min-hyps", suite.min_hypotheses)->capture_default_str();
  gen_suite->add_option("--max-hyps", suite.max_hypotheses)->capture_default_str();
  gen_suite->add_option("--obs", suite_levels)->delimiter(',')->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse->parsed()) {
      std::string text = read_file(parse_file);
      if (parse_domain_file.empty()) {
        Domain d = parse_domain(text);
        json actions = json::array();
        for (const auto& a : d.actions) actions.push_back(a.name);
        print_json({{"kind", "domain"}, {"name", d.name}, {"actions", actions},
                    {"predicates", d.predicates.size()}, {"canonical", render(d)}});
      } else {
        Domain d = parse_domain(read_file(parse_domain_file));
        if (text.find(kGoalPlaceholder) != std::string::npos) {
          ProblemTemplate t = parse_problem_template(text, d);
          print_json({{"kind", "template"}, {"name", t.name}, {"objects", t.objects.size()},
                      {"init", t.init.size()}, {"canonical", render(t)}});
        } else {
          Problem p = parse_problem(text, d);
          print_json({{"kind", "problem"}, {"name", p.name}, {"objects", p.objects.size()},
                      {"init", p.init.size()}, {"goal", p.goal.size()}, {"canonical", render(p)}});
        }
      }
    } else if (ground_cmd->parsed()) {
      Domain d = parse_domain(read_file(ground_domain));
      std::string text = read_file(ground_problem);
      std::vector<GroundAction> actions = text.find(kGoalPlaceholder) != std::string::npos
                                              ? ground(d, parse_problem_template(text, d))
                                              : ground(d, parse_problem(text, d));
      json labels = json::array();
      for (const auto& a : actions) labels.push_back(a.label.str());
      print_json({{"count", actions.size()}, {"actions", labels}});
    } else if (lm_cmd->parsed()) {
      Domain d = parse_domain(read_file(lm_domain));
      ProblemTemplate t = parse_problem_template(read_file(lm_template), d);
      auto hyps = parse_hypotheses(read_file(lm_hyps));
      auto cached = cached_landmarks(lm_cache, d, t, hyps);
      log(fmt::format("{} {}", cached.cache_hit ? "cache hit" : "extracted into", cached.file.string()));
      for (const auto& s : cached.sets) {
        fmt::print("hypothesis {}: {}\n", s.goal_index, render(hyps.at(s.goal_index)));
        if (s.unreachable) {
          fmt::print("  unreachable under the delete relaxation\n");
          continue;
        }
        fmt::print("  {} landmark{}:", s.actions.size(), s.actions.size() == 1 ? "" : "s");
        for (const auto& a : s.actions) fmt::print(" {}", a.str());
        fmt::print("\n");
      }
    } else if (gen_obs->parsed()) {
      check_levels(go_levels);
      Domain d = parse_domain(read_file(go_domain));
      ProblemTemplate t = parse_problem_template(read_file(go_template), d);
      GoalHypothesis real = parse_fact_line(first_nonempty_line(read_file(go_real)));
      Plan plan = parse_action_lines(read_file(go_plan));
      auto actions = ground(d, t);
      auto check = validate_plan(t.init, actions, plan);
      if (!check.valid) throw std::invalid_argument("plan is invalid: " + check.error);
      for (const auto& f : real.facts) {
        if (!check.final_state.count(f)) throw std::invalid_argument("plan does not achieve " + f.str());
      }
      json files = json::array();
      for (int pct : go_levels) {
        auto draws = generate_benchmark_obs(plan, pct, go_seed, go_stream);
        for (std::size_t k = 0; k < draws.size(); ++k) {
          fs::path file = fs::path(go_out) / std::to_string(pct) / fmt::format("d{}", k) / "obs.dat";
          std::string body;
          for (const auto& l : draws[k].labels) body += render(l) + "\n";
          write_file_atomic(file, body);
          files.push_back({{"pct", pct}, {"file", file.generic_string()}, {"indices", draws[k].source_indices}});
        }
      }
      print_json({{"seed", go_seed}, {"stream", go_stream}, {"files", files}});
    } else if (recognize->parsed()) {
      RecognitionBundle b = load_bundle(rec_bundle);
      RecognitionResult r;
      if (rec_recognizer == kLandmarkRecognizerId) {
        auto cached = cached_landmarks(rec_cache, b.domain, b.problem_template, b.hypotheses);
        r = recognize_lm(b, cached.sets);
        r.prepare_time = cached.extract_seconds;
      } else if (rec_recognizer.starts_with("llm:")) {
        if (rec_llm.providers.empty()) throw std::invalid_argument("--providers is required for " + rec_recognizer);
        auto providers = load_providers(rec_llm.providers);
        auto it = providers.find(rec_recognizer.substr(4));
        if (it == providers.end()) throw std::invalid_argument("unknown provider in " + rec_recognizer);
        auto base = base_client(it->second, rec_llm);
        std::vector<fs::path> dirs;
        if (!rec_llm.record.empty()) dirs.push_back(rec_llm.record);
        RecordingClient client(*base, dirs);
        r = recognize_llm(b, it->second, client);
        if (r.error) log("request failed: " + *r.error);
      } else {
        throw std::invalid_argument("unknown recognizer '" + rec_recognizer + "'");
      }
      print_json(result_to_json(r, b));
    } else if (eval->parsed()) {
      run.bench_root = eval_root;
      run.domains = parse_domains(eval_domains);
      check_levels(run.observability);
      run.recognizers = eval_recognizers;
      run.out_dir = eval_out;
      run.providers_file = eval_providers;
      run.replay_dir = eval_replay;
      run.record_dir = eval_record;
      run.cache_dir = eval_cache;
      RunSummary s = run_eval(run);
      for (const auto& e : s.load_errors) log("bundle failed: " + e);
      log(fmt::format("{} problem results written to {}", s.per_problem.size(), s.run_dir.string()));
      print_json({{"run_dir", s.run_dir.generic_string()},
                  {"results", s.per_problem.size()},
                  {"load_errors", s.load_errors},
                  {"summary", json::parse(emit_report(s.rows, ReportFormat::json))}});
      return s.ok() ? 0 : 1;
    } else if (validate->parsed()) {
      json out = json::array();
      bool all_ok = true;
      for (const auto& dir : val_bundles) {
        json checks = json::array();
        bool ok = true;
        for (const auto& c : validate_bundle_dir(dir)) {
          checks.push_back({{"check", c.name}, {"ok", c.ok}, {"detail", c.detail}});
          ok = ok && c.ok;
        }
        all_ok = all_ok && ok;
        out.push_back({{"bundle", dir}, {"ok", ok}, {"checks", checks}});
      }
      print_json(out);
      return all_ok ? 0 : 1;
    } else if (report->parsed()) {
      auto rows = parse_per_problem_csv(read_file(rep_file));
      std::cout << emit_report(aggregate(rows), parse_report_format(rep_format));
    } else if (gen_suite->parsed()) {
      check_levels(suite_levels);
      auto problems = generate_blocks_suite(suite);
      std::size_t n = write_suite(suite_out, problems, suite_levels, suite.seed);
      print_json({{"root", suite_out}, {"problems", problems.size()}, {"bundles", n}, {"seed", suite.seed}});
    }
  } catch (const std::exception& e) {
    log(e.what());
    return 1;
  }
  return 0;
}
