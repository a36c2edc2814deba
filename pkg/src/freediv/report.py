"""Staged analysis pipeline, result cache and report documents."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from . import lindiag as ld
from .exactpoly import ParseError, Polynomial, SignatureError, canonical_text, polynomial_ring
from .groebner import Budget, Timeout, budget
from .logderiv import (
    Divisor,
    InvariantError,
    NonReducedError,
    euler_homogeneous_test,
    euler_normalize,
    locally_free,
    log_derivations,
    saito_test,
    theta_fs,
    NotApplicable,
)
from .weyl import operator_to_json

log = logging.getLogger(__name__)

SCHEMA = 1

PROVED, DISPROVED, NOT_APPLICABLE, TIMEOUT, SKIPPED = (
    "proved", "disproved", "not-applicable", "timeout", "skipped")

# stage -> prerequisites, in execution order
STAGES: dict[str, tuple[str, ...]] = {
    "free": (),
    "euler_homogeneous": (),
    "koszul": ("free",),
    "gk": ("free",),
    "rees": ("free",),
    "clt": ("rees",),
    "gcl": ("rees",),
    "ann": ("free",),
    "dlt": ("ann",),
    "tower": ("ann",),
    "gdl": ("ann",),
    "gr_ann": ("ann", "rees"),
    "bernstein": ("ann",),
    "pre_spencer": ("gk",),
    "spencer": ("pre_spencer",),
    "ann_f_inverse": ("ann", "bernstein"),
    "lct": ("pre_spencer", "ann_f_inverse"),
    "functional_equation": ("ann", "bernstein"),
    "ann_f_generated_by": ("ann",),
}


class InvalidInput(ValueError):
    pass


@dataclass
class AnalysisConfig:
    poly: str
    variables: Sequence[str]
    stages: Sequence[str] | None = None
    budget_seconds: float | None = 600.0
    budget_steps: int | None = None
    output: str | None = None
    fmt: str = "json"
    timings: bool = False

    def __post_init__(self):
        if isinstance(self.variables, str):
            self.variables = [v.strip() for v in self.variables.split(",") if v.strip()]
        self.variables = list(self.variables)
        if not self.variables:
            raise InvalidInput("the variable list is empty")
        if len(set(self.variables)) != len(self.variables):
            raise InvalidInput("duplicate variable names")
        if self.stages is not None:
            unknown = [s for s in self.stages if s not in STAGES]
            if unknown:
                raise InvalidInput(f"unknown stages: {', '.join(unknown)}")
        for b in (self.budget_seconds, self.budget_steps):
            if b is not None and b <= 0:
                raise InvalidInput("budgets must be positive")
        if self.fmt not in ("json", "text"):
            raise InvalidInput(f"unknown format {self.fmt!r}")

    def selected(self) -> list[str]:
        chosen = set(self.stages) if self.stages is not None else set(STAGES)
        return [s for s in STAGES if s in chosen]


@dataclass
class Entry:
    status: str
    payload: dict = field(default_factory=dict)
    seconds: float = 0.0
    cached: bool = False
    # set when the outcome depends on a budget, which keeps it out of the cache
    volatile: bool = False

    def to_json(self) -> dict:
        return {"status": self.status, "payload": self.payload}


# ---------------------------------------------------------------------------
# cache


def cache_dir() -> Path:
    env = os.environ.get("FREEDIV_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "freediv"


class Cache:
    """Content-addressed JSON store keyed by version, input and stage."""

    def __init__(self, root: Path | str | None = None, version: str = __version__):
        self.root = Path(root) if root is not None else cache_dir()
        self.version = version

    def key(self, poly_text: str, variables: Sequence[str], stage: str) -> str:
        blob = json.dumps({"version": self.version, "poly": poly_text, "vars": list(variables),
                           "stage": stage, "order": "default"}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / self.version / key[:2] / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            if data.get("key") != key or "entry" not in data:
                raise ValueError("mismatched cache record")
            return data["entry"]
        except (OSError, ValueError) as exc:
            log.warning("ignoring corrupt cache entry %s: %s", path, exc)
            return None

    def put(self, key: str, entry: dict) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"key": key, "entry": entry}, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


# ---------------------------------------------------------------------------
# serialization helpers


def ptext(p: Polynomial) -> str:
    return canonical_text(p)


def ideal_json(gens) -> list[str]:
    return [ptext(g) for g in gens]


def derivation_json(delta) -> dict:
    return {"coefficients": [ptext(a) for a in delta.coeffs], "weight": ptext(delta.weight)}


def op_json(P) -> list:
    return operator_to_json(P)["terms"]


def algebra_json(W) -> dict:
    """The operator ring once per payload; term lists index its variables."""
    data = operator_to_json(W.zero())
    del data["terms"]
    data["variables"] = list(W.names)
    return data


# ---------------------------------------------------------------------------
# pipeline


class _Context:
    """Lazily computed intermediate objects shared by the stages."""

    def __init__(self, d: Divisor):
        self.d = d
        self._store: dict[str, Any] = {}

    def get(self, name: str, build: Callable[[], Any]):
        if name not in self._store:
            self._store[name] = build()
        return self._store[name]

    # building blocks -----------------------------------------------------------

    def basis(self):
        def build():
            gens = log_derivations(self.d)
            B = saito_test(self.d, gens)
            return gens, B
        return self.get("basis", build)

    def saito_basis(self):
        _, B = self.basis()
        if B is None:
            raise NotApplicable("Der(log D) is locally free but no global basis was certified")
        return B

    def theta(self):
        def build():
            return theta_fs(self.d, self.saito_basis())
        return self.get("theta", build)

    def kernel(self):
        return self.get("kernel", lambda: ld.rees_kernel(self.d, self.theta()))

    def gk(self):
        return self.get("gk", lambda: ld.gk_test(self.d, self.theta()))

    def ann(self):
        return self.get("ann", lambda: ld.annihilator(self.d, self.theta()))

    def b(self):
        return self.get("b", lambda: ld.bernstein(self.d, self.ann()))

    def tower(self):
        def build():
            try:
                return ld.ann_tower(self.d, self.ann())
            except ld.NonPrincipalStep as exc:
                return exc
        return self.get("tower", build)

    def pre_spencer(self):
        def build():
            return ld.pre_spencer_test(self.d, list(self.saito_basis()), self.theta(), self.gk().holds)
        return self.get("pre_spencer", build)

    def ann_inverse(self):
        return self.get("ann_inverse", lambda: ld.ann_f_inverse_check(self.d, self.b(), self.ann()))


def _flag(value: bool, **payload) -> Entry:
    return Entry(PROVED if value else DISPROVED, {"value": bool(value), **payload})


def _stage_free(ctx: _Context) -> Entry:
    gens, B = ctx.basis()
    payload = {"generators": [derivation_json(g) for g in gens]}
    if B is None:
        if locally_free(ctx.d, gens):
            # free in the local sense; stages needing a global basis become not-applicable
            payload["reason"] = "cofactor ideal is (1) but no global basis was certified"
            return Entry(PROVED, {"value": True, "basis": None, **payload})
        payload["reason"] = "cofactor ideal of the n-subsets is proper: not locally free"
        return Entry(DISPROVED, {"value": False, **payload})
    payload.update({
        "value": True,
        "unit": str(B.unit),
        "determinant": ptext(B.det),
        "basis": [derivation_json(g) for g in B],
        "weights": [ptext(w) for w in B.weights],
        "constant_weights": all(g.constant_weight is not None for g in B),
    })
    try:
        E = euler_normalize(ctx.d, B)
        payload["euler_normalized"] = [derivation_json(g) for g in E]
    except NotApplicable as exc:
        payload["euler_normalized"] = None
        payload["euler_normalization_note"] = str(exc)
    return Entry(PROVED, payload)


def _stage_euler(ctx: _Context) -> Entry:
    return _flag(euler_homogeneous_test(ctx.d), scope="global")


def _regularity(res) -> dict:
    return {"height": res.height, "failure_locus": ideal_json(res.locus.gens)}


def _stage_koszul(ctx: _Context) -> Entry:
    res = ld.koszul_test(ctx.d, list(ctx.saito_basis()))
    return _flag(res.holds, **_regularity(res))


def _stage_gk(ctx: _Context) -> Entry:
    res = ctx.gk()
    return _flag(res.holds, **_regularity(res))


def _stage_rees(ctx: _Context) -> Entry:
    k = ctx.kernel()
    return Entry(PROVED, {
        "kernel": ideal_json(k.full.gens),
        "degree_one": ideal_json(k.delta),
        "extra": [{"generator": ptext(t), "xi_degree": deg} for t, deg in k.extras],
    })


def _stage_clt(ctx: _Context) -> Entry:
    return _flag(ld.clt_test(ctx.kernel()))


def _stage_gcl(ctx: _Context) -> Entry:
    N = ld.gcl_exponent(ctx.kernel())
    if N is None:
        return Entry(DISPROVED, {"value": False, "N": None})
    return Entry(PROVED, {"value": True, "N": N})


def _stage_ann(ctx: _Context) -> Entry:
    data = ctx.ann()
    return Entry(PROVED, {
        "algebra": algebra_json(data.ann.ring),
        "generators": [op_json(g) for g in data.basis],
        "text": [str(g) for g in data.basis],
        "max_total_order": data.max_order,
    })


def _stage_dlt(ctx: _Context) -> Entry:
    return _flag(ld.dlt_test(ctx.ann()))


def _stage_tower(ctx: _Context) -> Entry:
    tw = ctx.tower()
    if isinstance(tw, ld.NonPrincipalStep):
        return Entry(DISPROVED, {"value": False, "aborted": str(tw)})
    return Entry(PROVED, {
        "value": True,
        "factors": [str(c) for c in tw.factors],
        "terminal_level": tw.terminal,
        "levels": [lv.k for lv in tw.levels],
    })


def _stage_gdl(ctx: _Context) -> Entry:
    data = ctx.ann()
    tw = ctx.tower()
    if isinstance(tw, ld.NonPrincipalStep):
        tw = None
    try:
        beta = ld.gdl_witness(ctx.d, data, tw)
    except ld.NonPrincipalStep as exc:
        return Entry(DISPROVED, {"value": False, "reason": str(exc)})
    return Entry(PROVED, {"value": True, "beta": str(beta), "beta_factored": ld.factored_text(beta)})


def _stage_gr_ann(ctx: _Context) -> Entry:
    return _flag(ld.gr_ann_check(ctx.d, ctx.ann(), ctx.kernel()))


def _stage_bernstein(ctx: _Context) -> Entry:
    b = ctx.b()
    return Entry(PROVED, {
        "b": str(b),
        "factored": ld.factored_text(b),
        "roots": [[str(r), m] for r, m in ld.rational_roots(b)],
    })


def _stage_pre_spencer(ctx: _Context) -> Entry:
    res = ctx.pre_spencer()
    return _flag(res.holds, method=res.method)


def _stage_spencer(ctx: _Context) -> Entry:
    pre = ctx.pre_spencer().holds
    return _flag(ld.spencer_test(ctx.d, list(ctx.saito_basis()), pre))


def _stage_ann_inverse(ctx: _Context) -> Entry:
    res = ctx.ann_inverse()
    if res.holds is None:
        return Entry(NOT_APPLICABLE, {"value": None, "status": res.status})
    return _flag(res.holds, status=res.status)


def _stage_lct(ctx: _Context) -> Entry:
    value = ld.lct_test(ctx.pre_spencer().holds, ctx.ann_inverse().holds)
    if value is None:
        return Entry(NOT_APPLICABLE, {"value": None, "status": "inconclusive"})
    return _flag(value)


def _stage_functional_equation(ctx: _Context) -> Entry:
    b = ctx.b()
    fe = ld.functional_equation(ctx.d, b, ctx.ann())
    payload = {
        "order": fe.order,
        "strategy": fe.strategy,
        "membership": "ann^(1)" if fe.in_ann1 else "ann",
        "P": op_json(fe.P),
        "P_text": str(fe.P),
        "algebra": algebra_json(fe.P.ring),
    }
    payload["regular_order_possible"] = ld.regular_equation_possible(ctx.kernel(), ctx.d, b.total_degree())
    return Entry(PROVED, payload)


def _stage_generated_by(ctx: _Context) -> Entry:
    res = ld.ann_f_generated_by(ctx.d, ctx.ann())
    return _flag(res.holds, checked=[{"operator": str(T), "holds": ok} for T, ok in res.details])


RUNNERS: dict[str, Callable[[_Context], Entry]] = {
    "free": _stage_free,
    "euler_homogeneous": _stage_euler,
    "koszul": _stage_koszul,
    "gk": _stage_gk,
    "rees": _stage_rees,
    "clt": _stage_clt,
    "gcl": _stage_gcl,
    "ann": _stage_ann,
    "dlt": _stage_dlt,
    "tower": _stage_tower,
    "gdl": _stage_gdl,
    "gr_ann": _stage_gr_ann,
    "bernstein": _stage_bernstein,
    "pre_spencer": _stage_pre_spencer,
    "spencer": _stage_spencer,
    "ann_f_inverse": _stage_ann_inverse,
    "lct": _stage_lct,
    "functional_equation": _stage_functional_equation,
    "ann_f_generated_by": _stage_generated_by,
}


def parse_input(text: str, variables: Sequence[str]) -> Polynomial:
    try:
        ring = polynomial_ring(list(variables))
        return ring.parse(text)
    except (ParseError, SignatureError, ValueError) as exc:
        raise InvalidInput(str(exc)) from exc


def analyze(config: AnalysisConfig, cache: Cache | None = None) -> dict:
    """Run the selected stages and return the report document.

    Raises ``InvalidInput`` and ``NonReducedError`` for bad input and
    ``InvariantError`` when an internal check fails.
    """
    f = parse_input(config.poly, config.variables)
    if f.is_constant():
        raise InvalidInput("the polynomial is constant")
    d = Divisor(f)
    text = ptext(d.f)
    ctx = _Context(d)
    selected = config.selected()
    entries: dict[str, Entry] = {}
    for stage in STAGES:
        if stage not in selected:
            entries[stage] = Entry(SKIPPED, {})
            continue
        blocked = [p for p in STAGES[stage] if entries[p].status != PROVED
                   and not (entries[p].status == DISPROVED and p in _VALUE_PREREQS)]
        if blocked:
            volatile = any(entries[p].status == TIMEOUT or entries[p].volatile for p in blocked)
            entries[stage] = Entry(NOT_APPLICABLE, {"blocked_by": blocked}, volatile=volatile)
            continue
        key = cache.key(text, d.x, stage) if cache is not None else None
        hit = cache.get(key) if cache is not None else None
        if hit is not None:
            entries[stage] = Entry(hit["status"], hit["payload"], cached=True)
            continue
        start = time.monotonic()
        try:
            with budget(config.budget_seconds, config.budget_steps):
                entry = RUNNERS[stage](ctx)
        except Timeout as exc:
            entry = Entry(TIMEOUT, {"reason": str(exc)}, volatile=True)
        except NotApplicable as exc:
            entry = Entry(NOT_APPLICABLE, {"reason": str(exc)})
        entry.seconds = time.monotonic() - start
        entries[stage] = entry
        if cache is not None and not entry.volatile:
            cache.put(key, entry.to_json())
    doc = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "input": {"polynomial": text, "variables": list(d.x)},
        "diagnostics": {name: e.to_json() for name, e in entries.items()},
    }
    if config.timings:
        doc["run"] = {
            "seconds": {name: round(e.seconds, 3) for name, e in entries.items()},
            "cache_hits": sorted(name for name, e in entries.items() if e.cached),
        }
    return doc


# a disproved prerequisite still carries the value the dependent needs
_VALUE_PREREQS = {"gk", "pre_spencer", "ann_f_inverse"}


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def render_text(doc: dict) -> str:
    lines = [f"f = {doc['input']['polynomial']}  over Q[{', '.join(doc['input']['variables'])}]"]
    for name, entry in doc["diagnostics"].items():
        p = entry["payload"]
        detail = ""
        if "value" in p and p["value"] is not None:
            detail = "yes" if p["value"] else "no"
        for k in ("N", "beta_factored", "factored", "order", "membership", "method", "unit", "status"):
            if k in p and p[k] is not None:
                detail += f" {k}={p[k]}"
        if name == "free" and "weights" in p:
            detail += f" weights=({', '.join(p['weights'])})"
        if name == "tower" and "factors" in p:
            detail += f" factors={', '.join(p['factors']) or '-'} terminal={p['terminal_level']}"
        if name in ("koszul", "gk") and "failure_locus" in p:
            detail += f" locus=({', '.join(p['failure_locus'])})"
        lines.append(f"{name:20s} {entry['status']:15s} {detail.strip()}".rstrip())
    return "\n".join(lines) + "\n"
