#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "goalrec/eval.hpp"
#include "goalrec/landmark_cache.hpp"
#include "goalrec/recognizer_llm.hpp"
#include "goalrec/recognizer_lm.hpp"
#include "goalrec/suite.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace goalrec;

namespace {

// Structured results cross the boundary as JSON text; the Python package
// decodes them into plain dicts and lists.

std::string recognize_lm_json(const fs::path& bundle_dir, const fs::path& cache_dir) {
  auto bundle = load_bundle(bundle_dir);
  auto lm = cached_landmarks(cache_dir, bundle.domain, bundle.problem_template, bundle.hypotheses);
  auto result = recognize_lm(bundle, lm.sets);
  result.prepare_time = lm.extract_seconds;
  return result_to_json(result, bundle).dump();
}

std::vector<std::vector<std::string>> landmarks_of(const fs::path& bundle_dir) {
  std::vector<std::vector<std::string>> out;
  for (const auto& set : compute_landmarks(load_bundle(bundle_dir))) {
    auto& labels = out.emplace_back();
    for (const auto& a : set.actions) labels.push_back(render(a));
  }
  return out;
}

std::string parse_response_json(const std::string& text, const fs::path& bundle_dir) {
  auto bundle = load_bundle(bundle_dir);
  auto parsed = validate_scores(parse_response(text, bundle.hypotheses));
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : parsed.scores) scores.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
  nlohmann::json doc{{"status", to_string(parsed.status)},
                     {"scores", scores},
                     {"most_likely", parsed.most_likely},
                     {"predicted", predicted_set(parsed)},
                     {"reasoning", parsed.reasoning},
                     {"unmatched", parsed.unmatched},
                     {"scores_flagged", parsed.scores_flagged}};
  return doc.dump();
}

std::vector<std::size_t> sample_indices(const std::vector<std::string>& plan_lines, int pct, std::uint64_t seed,
                                        std::uint64_t stream, std::uint32_t draw) {
  Plan plan;
  for (const auto& line : plan_lines) plan.push_back(parse_action_line(line));
  return sample_observations(plan, pct, seed, stream, draw).source_indices;
}

std::vector<std::string> ground_labels(const std::string& domain_text, const std::string& template_text) {
  Domain d = parse_domain(domain_text);
  std::vector<std::string> out;
  for (const auto& a : ground(d, parse_problem_template(template_text, d))) out.push_back(render(a.label));
  return out;
}

std::size_t generate_suite(const fs::path& out, std::size_t problems, std::uint64_t seed,
                           const std::vector<int>& levels) {
  SuiteOptions o;
  o.problems = problems;
  o.seed = seed;
  return write_suite(out, generate_blocks_suite(o), levels, seed);
}

fs::path evaluate(const fs::path& bench_root, const fs::path& out_dir, const std::vector<int>& observability,
                  const std::vector<std::string>& recognizers, const std::string& run_id, int jobs) {
  RunConfig config;
  config.bench_root = bench_root;
  config.out_dir = out_dir;
  config.observability = observability;
  config.recognizers = recognizers;
  config.run_id = run_id;
  config.jobs = jobs;
  auto summary = run_eval(config);
  if (!summary.ok()) throw BundleError(summary.load_errors.front());
  return summary.run_dir;
}

}  // namespace

PYBIND11_MODULE(_goalrec, m) {
  m.doc() = "Goal recognition over PDDL benchmarks";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BindError>(m, "BindError", PyExc_ValueError);
  py::register_exception<BundleError>(m, "BundleError", PyExc_ValueError);

  m.def("canonical_domain", [](const std::string& text) { return render(parse_domain(text)); }, py::arg("text"));
  m.def("ground", &ground_labels, py::arg("domain_text"), py::arg("template_text"));
  m.def("landmarks", &landmarks_of, py::arg("bundle_dir"));
  m.def("recognize_lm_json", &recognize_lm_json, py::arg("bundle_dir"), py::arg("cache_dir") = fs::path());
  m.def("build_prompt", [](const fs::path& dir) { return build_prompt(load_bundle(dir)).text; }, py::arg("bundle_dir"));
  m.def("parse_response_json", &parse_response_json, py::arg("text"), py::arg("bundle_dir"));
  m.def("sample_observations", &sample_indices, py::arg("plan"), py::arg("pct"), py::arg("seed"),
        py::arg("stream") = 0, py::arg("draw") = 0);
  m.def("generate_suite", &generate_suite, py::arg("out"), py::arg("problems"), py::arg("seed"),
        py::arg("levels"));
  m.def("evaluate", &evaluate, py::arg("bench_root"), py::arg("out_dir"), py::arg("observability"),
        py::arg("recognizers"), py::arg("run_id"), py::arg("jobs") = 1);
  m.def("render_report", [](const fs::path& per_problem, const std::string& format) {
    auto rows = parse_per_problem_csv(read_file(per_problem));
    return emit_report(aggregate(rows), parse_report_format(format));
  }, py::arg("per_problem_csv"), py::arg("format") = "csv");
}
