#include "doctest.h"

#include <fstream>

#include "goalrec/eval.hpp"
#include "goalrec/landmark_cache.hpp"
#include "goalrec/recognizer_lm.hpp"
#include "test_paths.hpp"

using namespace goalrec;
using goalrec::testing::scratch_dir;
using goalrec::testing::test_data;

TEST_SUITE("landmark_cache") {
  TEST_CASE("serialisation round-trips") {
    std::vector<LandmarkSet> sets(3);
    sets[0].goal_index = 0;
    sets[0].actions = {ActionLabel{"PICK-UP", {"A"}}, ActionLabel{"STACK", {"A", "B"}}};
    sets[1].goal_index = 1;
    sets[1].unreachable = true;
    sets[2].goal_index = 2;
    double seconds = -1.0;
    auto text = serialize_landmarks(sets, 0.25);
    CHECK(text.rfind("# goalrec-landmarks v1\n", 0) == 0);
    CHECK(parse_landmarks(text, &seconds) == sets);
    CHECK(seconds == 0.25);
    CHECK(parse_landmarks(serialize_landmarks(sets)) == sets);
  }

  TEST_CASE("malformed files are rejected") {
    CHECK_THROWS_AS(parse_landmarks("garbage\n"), ParseError);
    CHECK_THROWS_AS(parse_landmarks("# goalrec-landmarks v1\n0 reachable 2 (A)\n"), ParseError);
    CHECK_THROWS_AS(parse_landmarks("# goalrec-landmarks v1\n0 maybe 0\n"), ParseError);
  }

  TEST_CASE("keys depend on content only") {
    auto b = load_bundle(test_data() / "uniform21");
    auto key = landmark_cache_key(b.domain, b.problem_template, b.hypotheses);
    CHECK(key.size() == 64);
    CHECK(key == landmark_cache_key(b.domain, b.problem_template, b.hypotheses));
    auto fewer = b.hypotheses;
    fewer.pop_back();
    CHECK(key != landmark_cache_key(b.domain, b.problem_template, fewer));
  }

  TEST_CASE("second lookup hits and returns identical sets") {
    auto dir = scratch_dir("landmark-cache");
    auto b = load_bundle(test_data() / "uniform21");
    auto first = cached_landmarks(dir, b.domain, b.problem_template, b.hypotheses);
    CHECK_FALSE(first.cache_hit);
    CHECK(std::filesystem::exists(first.file));
    auto second = cached_landmarks(dir, b.domain, b.problem_template, b.hypotheses);
    CHECK(second.cache_hit);
    CHECK(second.sets == first.sets);
    CHECK(second.extract_seconds == first.extract_seconds);
    CHECK(first.sets == compute_landmarks(b));
  }

  TEST_CASE("corrupt entries are recomputed") {
    auto dir = scratch_dir("landmark-cache-corrupt");
    auto b = load_bundle(test_data() / "uniform21");
    auto first = cached_landmarks(dir, b.domain, b.problem_template, b.hypotheses);
    std::ofstream(first.file, std::ios::trunc) << "not a cache\n";
    auto again = cached_landmarks(dir, b.domain, b.problem_template, b.hypotheses);
    CHECK_FALSE(again.cache_hit);
    CHECK(again.sets == first.sets);
    CHECK(cached_landmarks(dir, b.domain, b.problem_template, b.hypotheses).cache_hit);
  }

  TEST_CASE("empty cache directory disables caching") {
    auto b = load_bundle(test_data() / "uniform21");
    auto r = cached_landmarks({}, b.domain, b.problem_template, b.hypotheses);
    CHECK_FALSE(r.cache_hit);
    CHECK(r.file.empty());
  }

  TEST_CASE("atomic writes leave no temporary files") {
    auto dir = scratch_dir("atomic");
    write_file_atomic(dir / "x.txt", "one");
    write_file_atomic(dir / "x.txt", "two");
    CHECK(read_file(dir / "x.txt") == "two");
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 1);
  }
}
