"""Goal recognition over PDDL benchmarks: landmark and language-model recognisers."""

import json
from os import PathLike
from typing import Any

from . import _goalrec
from ._goalrec import (
    BindError,
    BundleError,
    ParseError,
    build_prompt,
    canonical_domain,
    evaluate,
    generate_suite,
    ground,
    landmarks,
    render_report,
    sample_observations,
)

__all__ = [
    "BindError",
    "BundleError",
    "ParseError",
    "build_prompt",
    "canonical_domain",
    "evaluate",
    "generate_suite",
    "ground",
    "landmarks",
    "parse_response",
    "recognize_lm",
    "render_report",
    "sample_observations",
]


def recognize_lm(bundle_dir: str | PathLike, cache_dir: str | PathLike = "") -> dict[str, Any]:
    """Landmark recogniser result for one bundle directory."""
    return json.loads(_goalrec.recognize_lm_json(bundle_dir, cache_dir))


def parse_response(text: str, bundle_dir: str | PathLike) -> dict[str, Any]:
    """Parses a model answer against the bundle's hypotheses."""
    return json.loads(_goalrec.parse_response_json(text, bundle_dir))

