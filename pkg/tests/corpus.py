"""Divisors used across the test-suite, with cached pipeline runs."""

import os
import time
from functools import lru_cache

from freediv.report import AnalysisConfig, analyze

CORPUS = {
    "nc2": ("x,y", "x*y"),
    "x": ("x", "x"),
    "cusp": ("x,y", "x^2 - y^3"),
    "nc3": ("x1,x2,x3", "x1*x2*x3"),
    "three_lines": ("x,y", "x*y*(x + y)"),
    "nonqh": ("x,y", "x^5 + y^5 + x^2*y^2"),
    "four_lines": ("x1,x2,x3", "x1*x2*(x1 + x2)*(x1 + x2*x3)"),
    "d4": ("x1,x2,x3", "(x1*x3 + x2)*(x1^4 - x2^4)"),
    "five_lines": ("x1,x2,x3,x4", "x1*x2*(x1 + x2)*(x1 + x2*x3)*(x1 + x2*x4)"),
    "d7": ("x1,x2,x3", "(x1*x3 + x2)*(x1^7 - x2^7)"),
}

# cheap enough for every run
QUICK = ["nc2", "x", "cusp", "nc3", "three_lines", "nonqh", "four_lines", "d4"]
TWO_DIM = ["nc2", "cusp", "three_lines", "nonqh"]


# divisors outside QUICK get the per-stage budget of the nightly job
EXTENDED_BUDGET = float(os.environ.get("FREEDIV_EXTENDED_BUDGET_SECS", 8 * 3600))

# wall time of the first (uncached) pipeline run per divisor
ELAPSED: dict[str, float] = {}


@lru_cache(maxsize=None)
def report(name: str) -> dict:
    variables, poly = CORPUS[name]
    start = time.monotonic()
    seconds = 600 if name in QUICK else EXTENDED_BUDGET
    doc = analyze(AnalysisConfig(poly, variables, budget_seconds=seconds))
    ELAPSED[name] = time.monotonic() - start
    return doc


def diag(name: str, stage: str) -> dict:
    return report(name)["diagnostics"][stage]


def flag(name: str, stage: str):
    """``True``/``False`` for proved/disproved, ``None`` otherwise."""
    status = diag(name, stage)["status"]
    return {"proved": True, "disproved": False}.get(status)
