import json
import os
from pathlib import Path

import pytest

import goalrec

DATA = Path(os.environ.get("GOALREC_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


def test_ground_two_blocks():
    domain = (DATA / "uniform21" / "domain.pddl").read_text()
    template = """(define (problem two) (:domain blocks)
      (:objects a b - block)
      (:init (ontable a) (ontable b) (clear a) (clear b) (handempty))
      (:goal (and <HYPOTHESIS>)))"""
    labels = goalrec.ground(domain, template)
    assert len(labels) == 8
    assert "(STACK A B)" in labels


def test_canonical_domain_is_a_fixpoint():
    text = (DATA / "uniform21" / "domain.pddl").read_text()
    once = goalrec.canonical_domain(text)
    assert goalrec.canonical_domain(once) == once


def test_recognize_lm_returns_the_maximum():
    result = goalrec.recognize_lm(DATA / "uniform21")
    assert result["recognizer"] == "lm"
    assert result["spread"] == len(result["predicted"]) > 0
    best = max(s["score"] for s in result["scores"])
    assert all(result["scores"][i]["score"] == best for i in result["predicted"])


def test_prompt_matches_golden():
    golden = (DATA / "prompt_fixture.golden.txt").read_text()
    assert goalrec.build_prompt(DATA / "prompt_fixture") == golden


def test_parse_response_fixtures():
    ok = goalrec.parse_response((DATA / "responses" / "wellformed_single.txt").read_text(), DATA / "prompt_fixture")
    assert ok["status"] == "ok" and ok["predicted"] == [0]
    garbage = goalrec.parse_response("[:answer A]", DATA / "prompt_fixture")
    assert garbage["status"] == "garbage" and garbage["predicted"] == []


def test_sampling_is_deterministic_subsequence():
    plan = [f"(step s{i})" for i in range(20)]
    first = goalrec.sample_observations(plan, 30, seed=0)
    assert first == [2, 3, 15, 18]
    assert first == goalrec.sample_observations(plan, 30, seed=0)
    assert goalrec.sample_observations(plan, 100, seed=4) == list(range(20))


def test_errors_map_to_value_error():
    with pytest.raises(ValueError):
        goalrec.canonical_domain("(define (domain")
    with pytest.raises(ValueError):
        goalrec.recognize_lm(DATA / "no-such-bundle")


def test_suite_eval_and_report(tmp_path):
    written = goalrec.generate_suite(tmp_path / "bench", problems=3, seed=1, levels=[50, 100])
    assert written >= 6
    run_dir = goalrec.evaluate(tmp_path / "bench", tmp_path / "out", [50, 100], ["lm"], "py", jobs=2)
    report = json.loads(goalrec.render_report(Path(run_dir) / "per_problem.csv", "json"))
    full = [r for r in report if r["domain"] == "ALL-DOMAINS" and r["obs_pct"] == 100]
    assert full and full[0]["accuracy"] == 100.0
