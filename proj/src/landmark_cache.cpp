#include "goalrec/landmark_cache.hpp"

#include <atomic>
#include <chrono>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <thread>

#include "goalrec/hashing.hpp"
#include "goalrec/recognizer_lm.hpp"
#include "text_util.hpp"

namespace goalrec {

namespace {

constexpr std::string_view kHeader = "# goalrec-landmarks v1";
constexpr std::string_view kSecondsTag = "# extract-seconds";

// Splits "(A B) (C D)" into top-level parenthesised groups.
std::vector<std::string_view> paren_groups(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '(') {
      ++i;
      continue;
    }
    std::size_t close = s.find(')', i);
    if (close == std::string_view::npos) throw ParseError("unterminated label in landmark cache");
    out.push_back(s.substr(i, close - i + 1));
    i = close + 1;
  }
  return out;
}

}  // namespace

std::string landmark_cache_key(const Domain& domain, const ProblemTemplate& tmpl,
                               std::span<const GoalHypothesis> hypotheses) {
  std::string canonical = render(domain) + "\n" + render(tmpl) + "\n";
  for (const auto& h : hypotheses) {
    // Hypotheses are keyed as sets, in file order.
    for (const auto& f : h.fact_set()) canonical += f.str();
    canonical += "\n";
  }
  return sha256_hex(canonical);
}

std::string serialize_landmarks(std::span<const LandmarkSet> sets, std::optional<double> extract_seconds) {
  std::string out(kHeader);
  out += '\n';
  if (extract_seconds) out += fmt::format("{} {}\n", kSecondsTag, *extract_seconds);
  for (const auto& s : sets) {
    out += fmt::format("{} {} {}", s.goal_index, s.unreachable ? "unreachable" : "reachable", s.actions.size());
    for (const auto& a : s.actions) out += " " + a.str();
    out += '\n';
  }
  return out;
}

std::vector<LandmarkSet> parse_landmarks(std::string_view text, double* extract_seconds) {
  auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != kHeader) throw ParseError("not a landmark cache file");
  std::vector<LandmarkSet> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    std::string_view line = detail::trim(lines[n]);
    if (line.empty()) continue;
    if (line.starts_with(kSecondsTag)) {
      if (extract_seconds) *extract_seconds = std::stod(std::string(line.substr(kSecondsTag.size())));
      continue;
    }
    if (line.front() == '#') continue;
    std::size_t paren = line.find('(');
    auto head = detail::split_ws(line.substr(0, paren == std::string_view::npos ? line.size() : paren));
    if (head.size() != 3) throw ParseError("malformed landmark record", n + 1);
    LandmarkSet s;
    s.goal_index = std::stoul(std::string(head[0]));
    if (head[1] == "unreachable") s.unreachable = true;
    else if (head[1] != "reachable") throw ParseError("malformed landmark flag", n + 1);
    std::size_t count = std::stoul(std::string(head[2]));
    if (paren != std::string_view::npos) {
      for (auto g : paren_groups(line.substr(paren))) s.actions.push_back(parse_action_line(g));
    }
    if (s.actions.size() != count) throw ParseError("landmark count mismatch", n + 1);
    out.push_back(std::move(s));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += fmt::format(".tmp.{}.{}", std::hash<std::thread::id>{}(std::this_thread::get_id()), counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CachedLandmarks cached_landmarks(const std::filesystem::path& cache_dir, const Domain& domain,
                                 const ProblemTemplate& tmpl, std::span<const GoalHypothesis> hypotheses) {
  CachedLandmarks result;
  if (!cache_dir.empty()) {
    result.file = cache_dir / (landmark_cache_key(domain, tmpl, hypotheses) + ".lm");
    if (std::filesystem::exists(result.file)) {
      try {
        double seconds = 0.0;
        auto sets = parse_landmarks(read_file(result.file), &seconds);
        if (sets.size() == hypotheses.size()) {
          result.sets = std::move(sets);
          result.extract_seconds = seconds;
          result.cache_hit = true;
          return result;
        }
      } catch (const std::exception&) {
        // Unreadable entries are recomputed and overwritten.
      }
    }
  }
  auto start = std::chrono::steady_clock::now();
  result.sets = compute_landmarks(domain, tmpl, hypotheses);
  result.extract_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!result.file.empty()) write_file_atomic(result.file, serialize_landmarks(result.sets, result.extract_seconds));
  return result;
}

}  // namespace goalrec
