"""Buchberger engine and commutative ideal operations.

The engine works on raw term maps ``{packed monomial: mpq}`` and only talks to
the ring through ``mul_mono_terms``, so the same code computes commutative
bases, module bases (component index packed into the monomial, POT order) and
left bases in Weyl-type algebras.
"""

from __future__ import annotations

import contextlib
import contextvars
import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from .exactpoly import (
    ONE,
    MonomialOrder,
    PolyRing,
    Polynomial,
    RingSignature,
    SignatureError,
)

log = logging.getLogger(__name__)


class Timeout(RuntimeError):
    """A computation exceeded its time or step budget."""


@dataclass
class Budget:
    seconds: float | None = None
    steps: int | None = None
    started: float = field(default_factory=time.monotonic)
    used: int = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.steps is not None and self.used > self.steps:
            raise Timeout(f"step budget of {self.steps} exhausted")
        if self.seconds is not None and (self.used & 63) == 0:
            if time.monotonic() - self.started > self.seconds:
                raise Timeout(f"time budget of {self.seconds}s exhausted")

    def check(self) -> None:
        if self.seconds is not None and time.monotonic() - self.started > self.seconds:
            raise Timeout(f"time budget of {self.seconds}s exhausted")


_BUDGETS: contextvars.ContextVar[tuple[Budget, ...]] = contextvars.ContextVar("budgets", default=())


@contextlib.contextmanager
def budget(seconds: float | None = None, steps: int | None = None):
    """Scope a time/step budget; nested scopes are all enforced."""
    b = Budget(seconds, steps)
    token = _BUDGETS.set(_BUDGETS.get() + (b,))
    try:
        yield b
    finally:
        _BUDGETS.reset(token)


def _tick(n: int = 1) -> None:
    for b in _BUDGETS.get():
        b.tick(n)


def _check() -> None:
    for b in _BUDGETS.get():
        b.check()


def _scoped(fn):
    """Give a function an optional ``budget=`` keyword (seconds or Budget)."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, budget=None, **kwargs):
        if budget is None:
            return fn(*args, **kwargs)
        if isinstance(budget, Budget):
            with globals()["budget"](budget.seconds, budget.steps):
                return fn(*args, **kwargs)
        with globals()["budget"](seconds=budget):
            return fn(*args, **kwargs)

    return wrapper


# ---------------------------------------------------------------------------
# engine


class _Basis:
    __slots__ = ("ring", "polys", "lms", "keys", "sugar", "active")

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.polys: list[dict] = []
        self.lms: list[int] = []
        self.keys: list[tuple[int, int, int]] = []  # (rpart, comp, index) of active reducers
        self.sugar: list[int] = []
        self.active: list[bool] = []

    def reducer(self, m: int) -> int:
        ring = self.ring
        g = ring.guard
        mr = (m & ring.rmask) | g
        mc = m >> ring.cshift
        for r, c, i in self.keys:
            if c == mc and (mr - r) & g == g:
                return i
        return -1

    def rebuild_keys(self):
        ring = self.ring
        ks = [(self.lms[i] & ring.rmask, self.lms[i] >> ring.cshift, i)
              for i in range(len(self.polys)) if self.active[i]]
        # prefer short reducers
        ks.sort(key=lambda k: len(self.polys[k[2]]))
        self.keys = ks


def _lm(p: dict) -> int:
    return max(p)


def _monic(p: dict) -> dict:
    c = p[max(p)]
    if c == 1:
        return p
    inv = ONE / c
    return {m: a * inv for m, a in p.items()}


def _reduce(ring: PolyRing, p: dict, basis: _Basis, full: bool = True) -> dict:
    """Normal form of ``p`` modulo the active elements of ``basis``."""
    if not p:
        return {}
    p = dict(p)
    heap = [-m for m in p]
    heapq.heapify(heap)
    result: dict[int, mpq] = {}
    polys = basis.polys
    lms = basis.lms
    mul = ring.mul_mono_terms
    push = heapq.heappush
    pop = heapq.heappop
    while heap:
        m = -pop(heap)
        c = p.pop(m, None)
        if c is None:
            continue
        i = basis.reducer(m)
        if i < 0:
            result[m] = c
            if not full:
                # top-reduced: keep the rest as it is
                for mm, cc in p.items():
                    result[mm] = cc
                return result
            continue
        _tick()
        g = polys[i]
        prod = mul(m - lms[i], -c, g)
        get = p.get
        for mm, cc in prod.items():
            if mm == m:
                continue
            v = get(mm)
            if v is None:
                p[mm] = cc
                push(heap, -mm)
            else:
                v += cc
                if v:
                    p[mm] = v
                else:
                    del p[mm]
    return result


def _add_terms(p: dict, q: dict, c=None) -> dict:
    out = dict(p)
    for m, a in q.items():
        if c is not None:
            a = c * a
        v = out.get(m)
        if v is None:
            out[m] = a
        else:
            v += a
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def buchberger(ring: PolyRing, gens: Iterable[dict], *, product_criterion: bool | None = None,
               reduced: bool = True, autoreduce: bool = False) -> list[dict]:
    """Reduced (left) Gröbner basis of the term maps ``gens`` in ``ring``.

    Pairs are selected by sugar, pruned with the Gebauer-Möller chain
    criterion, and with the product criterion when it is valid (commutative
    ideals only).  With ``autoreduce`` the tails of the basis are kept
    reduced as new elements arrive, which curbs coefficient growth in the
    intermediate basis at the price of extra reductions.
    """
    if product_criterion is None:
        product_criterion = ring.commutative
    basis = _Basis(ring)
    live: dict[tuple[int, int], int] = {}
    heap: list = []
    counter = itertools.count()
    mdeg = ring.mdeg

    def add(h: dict, sugar: int):
        k = len(basis.polys)
        lmh = _lm(h)
        basis.polys.append(h)
        basis.lms.append(lmh)
        basis.sugar.append(sugar)
        basis.active.append(True)
        # Gebauer-Möller update
        comp = lmh >> ring.cshift
        cand = []
        for i in range(k):
            if not basis.active[i] or (basis.lms[i] >> ring.cshift) != comp:
                continue
            cand.append((i, ring.lcm(basis.lms[i], lmh)))
        kept = []
        while cand:
            i, L = cand.pop(0)
            cop = product_criterion and ring.coprime(basis.lms[i], lmh)
            if cop or not any(ring.divides(L2, L) for _, L2, *_ in itertools.chain(cand, kept)):
                kept.append((i, L, cop))
        for (a, b), L in list(live.items()):
            if ring.divides(lmh, L):
                La = ring.lcm(basis.lms[a], lmh)
                Lb = ring.lcm(basis.lms[b], lmh)
                if La != L and Lb != L:
                    del live[(a, b)]
        for i, L, cop in kept:
            if cop:
                continue
            s = max(basis.sugar[i] + mdeg(L - basis.lms[i]), sugar + mdeg(L - lmh))
            live[(i, k)] = L
            heapq.heappush(heap, (s, L, next(counter), i, k))
        for i in range(k):
            if basis.active[i] and ring.divides(lmh, basis.lms[i]):
                basis.active[i] = False
        basis.rebuild_keys()
        if autoreduce:
            # keep the tails of the other reducers reduced by the new leading monomial
            for i in range(k):
                if not basis.active[i]:
                    continue
                g = basis.polys[i]
                lg = basis.lms[i]
                if any(m != lg and (m >> ring.cshift) == comp and ring.divides(lmh, m) for m in g):
                    tail = dict(g)
                    c = tail.pop(lg)
                    r = _reduce(ring, tail, basis)
                    r[lg] = c
                    basis.polys[i] = r

    start = sorted((dict(g) for g in gens if g), key=_lm)
    for g in start:
        sug = max(mdeg(m) for m in g)
        h = _reduce(ring, g, basis)
        if h:
            add(_monic(h), sug)
    done = 0
    while heap:
        s, L, _, i, j = heapq.heappop(heap)
        if live.pop((i, j), None) is None:
            continue
        _check()
        done += 1
        if done % 500 == 0:
            log.debug("%d pairs reduced, basis %d, pending %d, sugar %d", done, len(basis.polys), len(live), s)
        fi, fj = basis.polys[i], basis.polys[j]
        sp = _add_terms(ring.mul_mono_terms(L - basis.lms[i], ONE, fi),
                        ring.mul_mono_terms(L - basis.lms[j], -ONE, fj))
        sp.pop(L, None)
        h = _reduce(ring, sp, basis)
        if h:
            add(_monic(h), s)
    G = [basis.polys[i] for i in range(len(basis.polys)) if basis.active[i]]
    return interreduce(ring, G) if reduced else G


def interreduce(ring: PolyRing, G: list[dict]) -> list[dict]:
    """Minimal, tail-reduced, monic basis from a Gröbner basis ``G``."""
    G = [g for g in G if g]
    G.sort(key=_lm)
    minimal: list[dict] = []
    for g in G:
        lg = _lm(g)
        if any(ring.divides(_lm(h), lg) for h in minimal):
            continue
        minimal = [h for h in minimal if not ring.divides(lg, _lm(h))]
        minimal.append(g)
    out = []
    for k, g in enumerate(minimal):
        others = _Basis(ring)
        for j, h in enumerate(minimal):
            if j != k:
                others.polys.append(h)
                others.lms.append(_lm(h))
                others.active.append(True)
                others.sugar.append(0)
        others.rebuild_keys()
        lg = _lm(g)
        tail = dict(g)
        c = tail.pop(lg)
        r = _reduce(ring, tail, others)
        r[lg] = c
        out.append(_monic(r))
    out.sort(key=_lm)
    return out


def make_basis(ring: PolyRing, G: Sequence[dict]) -> _Basis:
    b = _Basis(ring)
    for g in G:
        b.polys.append(g)
        b.lms.append(_lm(g))
        b.active.append(True)
        b.sugar.append(0)
    b.rebuild_keys()
    return b


def reduce_terms(ring: PolyRing, p: dict, G: Sequence[dict] | _Basis) -> dict:
    if not isinstance(G, _Basis):
        G = make_basis(ring, G)
    return _reduce(ring, p, G)


def s_polynomial_terms(ring: PolyRing, f: dict, g: dict) -> dict | None:
    """Left S-polynomial of monic term maps, or None when components differ."""
    lf, lg = _lm(f), _lm(g)
    if ring.comp(lf) != ring.comp(lg):
        return None
    L = ring.lcm(lf, lg)
    sp = _add_terms(ring.mul_mono_terms(L - lf, ONE / f[lf], f),
                    ring.mul_mono_terms(L - lg, -ONE / g[lg], g))
    sp.pop(L, None)
    return sp


# ---------------------------------------------------------------------------
# polynomial-level API


def _common_ring(polys: Sequence[Polynomial]) -> PolyRing:
    if not polys:
        raise ValueError("empty generator list")
    ring = polys[0].ring
    for p in polys:
        if p.ring != ring:
            raise SignatureError("generators live in different rings")
    return ring


@_scoped
def groebner_basis(gens: Sequence[Polynomial], order: MonomialOrder | None = None) -> list[Polynomial]:
    """Reduced Gröbner basis; the result lives in the ring re-ordered by ``order``."""
    ring = _common_ring(gens)
    if order is not None and order != ring.order:
        target = ring.with_order(order)
        gens = [g.to_ring(target) for g in gens]
        ring = target
    G = buchberger(ring, [g.terms for g in gens])
    return [ring._make(g) for g in G]


@_scoped
def normal_form(p: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder | None = None) -> Polynomial:
    ring = p.ring
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        p = p.to_ring(ring)
    G = [g.to_ring(ring) if g.ring != ring else g for g in basis]
    G = [_monic(g.terms) for g in G if g]
    return ring._make(reduce_terms(ring, p.terms, G))


def is_groebner(basis: Sequence[Polynomial]) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    basis = [b for b in basis if b]
    if not basis:
        return True
    ring = basis[0].ring
    G = [_monic(b.terms) for b in basis]
    B = make_basis(ring, G)
    for f, g in itertools.combinations(G, 2):
        sp = s_polynomial_terms(ring, f, g)
        if sp and _reduce(ring, sp, B):
            return False
    return True


# ---------------------------------------------------------------------------
# ideals


def subring(ring: PolyRing, drop: Iterable[str], order: MonomialOrder | None = None) -> PolyRing:
    drop = set(drop)
    blocks = tuple((b, tuple(v for v in vs if v not in drop)) for b, vs in ring.signature.blocks)
    blocks = tuple((b, vs) for b, vs in blocks if vs)
    return PolyRing(RingSignature(blocks), order or ring.order)


def extend_ring(ring: PolyRing, block: str, names: Sequence[str], order: MonomialOrder | None = None) -> PolyRing:
    sig = RingSignature(ring.signature.blocks + ((block, tuple(names)),))
    return PolyRing(sig, order or ring.order)


def fresh_name(ring: PolyRing, base: str = "u") -> str:
    k = 0
    while f"{base}{k}" in ring.names:
        k += 1
    return f"{base}{k}"


class Ideal:
    """Ideal of a commutative polynomial ring with a cached reduced basis."""

    def __init__(self, gens: Sequence[Polynomial], ring: PolyRing | None = None):
        gens = [g for g in gens if g]
        if ring is None:
            ring = _common_ring(gens)
        self.ring = ring
        for g in gens:
            if g.ring != ring:
                raise SignatureError("generator outside the ideal's ring")
        self.gens = gens
        self._gb: list[Polynomial] | None = None
        self._basis: _Basis | None = None

    def groebner(self) -> list[Polynomial]:
        if self._gb is None:
            G = buchberger(self.ring, [g.terms for g in self.gens]) if self.gens else []
            self._gb = [self.ring._make(g) for g in G]
        return self._gb

    def _reducer(self) -> _Basis:
        if self._basis is None:
            self._basis = make_basis(self.ring, [g.terms for g in self.groebner()])
        return self._basis

    def reduce(self, p: Polynomial) -> Polynomial:
        return self.ring._make(_reduce(self.ring, p.terms, self._reducer()))

    def contains(self, p: Polynomial) -> bool:
        return not self.reduce(p)

    __contains__ = contains

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.groebner())

    def is_zero(self) -> bool:
        return not self.gens

    def issubset(self, other: Ideal) -> bool:
        return all(other.contains(g) for g in self.gens)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.issubset(other) and other.issubset(self)

    __hash__ = None

    def __add__(self, other: Ideal) -> Ideal:
        return Ideal(self.gens + other.gens, self.ring)

    def __mul__(self, other: Ideal) -> Ideal:
        return Ideal([a * b for a in self.gens for b in other.gens], self.ring)

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.gens))})"

    def dimension(self) -> int:
        return dimension(self)

    def eliminate(self, names: Iterable[str]) -> Ideal:
        return eliminate(self, names)

    def quotient(self, g: Polynomial | Ideal) -> Ideal:
        return ideal_quotient(self, g)

    def saturation(self, g: Polynomial) -> tuple[Ideal, int]:
        return saturation(self, g)

    def intersect(self, other: Ideal) -> Ideal:
        return intersect(self, other)

    def to_ring(self, ring: PolyRing) -> Ideal:
        return Ideal([g.to_ring(ring) for g in self.gens], ring)


@_scoped
def eliminate(I: Ideal, names: Iterable[str]) -> Ideal:
    """Generators of ``I`` intersected with the subring without ``names``."""
    names = list(names)
    ring = I.ring
    for v in names:
        ring.index(v)
    rest = [v for v in ring.names if v not in names]
    elim = ring.with_order(MonomialOrder.block(names, rest))
    G = buchberger(elim, [g.to_ring(elim).terms for g in I.gens]) if I.gens else []
    idx = [elim.index(v) for v in names]
    sub = subring(ring, names)
    out = []
    for g in G:
        e = elim.unpack(max(g))
        if any(e[i] for i in idx):
            continue
        out.append(elim._make(g).to_ring(sub))
    J = Ideal(out, sub)
    return J


@_scoped
def intersect(I: Ideal, J: Ideal) -> Ideal:
    ring = I.ring
    u = fresh_name(ring)
    big = extend_ring(ring, "aux", [u])
    U = big.gen(u)
    gens = [U * g.to_ring(big) for g in I.gens] + [(1 - U) * g.to_ring(big) for g in J.gens]
    K = eliminate(Ideal(gens, big), [u])
    return Ideal([g.to_ring(ring) for g in K.gens], ring)


def divide_exact(p: Polynomial, q: Polynomial) -> Polynomial:
    """Quotient of an exact division in a commutative ring."""
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    ring = p.ring
    lq = q.lm()
    cq = q.terms[lq]
    rem = dict(p.terms)
    quot: dict[int, mpq] = {}
    qt = {m: a for m, a in q.terms.items()}
    while rem:
        m = max(rem)
        if not ring.divides(lq, m):
            raise ValueError(f"{q} does not divide {p}")
        u = m - lq
        c = rem[m] / cq
        quot[u] = c
        rem = _add_terms(rem, ring.mul_mono_terms(u, -c, qt))
        _tick()
    return ring._make(quot)


@_scoped
def ideal_quotient(I: Ideal, g: Polynomial | Ideal) -> Ideal:
    """``I : g`` (or ``I : J`` for an ideal ``J``)."""
    if isinstance(g, Ideal):
        if not g.gens:
            return Ideal([I.ring.one()], I.ring)
        result = None
        for h in g.gens:
            Q = ideal_quotient(I, h)
            result = Q if result is None else intersect(result, Q)
        return result
    if not g:
        raise ValueError("quotient by zero")
    if g.is_constant():
        return Ideal(list(I.gens), I.ring)
    K = intersect(I, Ideal([g], I.ring))
    gens = [divide_exact(h, g) for h in K.gens]
    return Ideal(gens, I.ring)


@_scoped
def saturation(I: Ideal, g: Polynomial) -> tuple[Ideal, int]:
    """``(I : g^inf, N)`` with ``N`` minimal such that ``I : g^N`` is saturated."""
    cur = I
    n = 0
    while True:
        nxt = ideal_quotient(cur, g)
        if nxt.issubset(cur):
            return cur, n
        cur = nxt
        n += 1


def _independent_dimension(ring: PolyRing, lms: list[tuple[int, ...]]) -> int:
    n = ring.nvars
    supports = []
    for e in lms:
        s = 0
        for i, k in enumerate(e):
            if k:
                s |= 1 << i
        supports.append(s)
    if any(s == 0 for s in supports):
        return -1
    best = 0
    # search larger sets first
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if all(s & ~mask for s in supports):
                return size
    return best


@_scoped
def dimension(I: Ideal) -> int:
    """Krull dimension of ``R/I`` from maximal independent sets of ``lm(I)``."""
    G = I.groebner()
    if not G:
        return I.ring.nvars
    return _independent_dimension(I.ring, [g.leading_monomial() for g in G])


def height(I: Ideal) -> int:
    d = dimension(I)
    return I.ring.nvars - d if d >= 0 else I.ring.nvars + 1


# ---------------------------------------------------------------------------
# modules


@dataclass
class SyzygyModule:
    rank: int
    generators: list[list[Polynomial]]

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


def vector_terms(ring: PolyRing, vec: Sequence[Polynomial], comps: Sequence[int]) -> dict:
    out: dict[int, mpq] = {}
    for p, c in zip(vec, comps):
        shift = c << ring.cshift
        for m, a in p.terms.items():
            out[m + shift] = a
    return out


def split_vector(ring: PolyRing, terms: dict, comps: Sequence[int]) -> list[Polynomial]:
    where = {c: k for k, c in enumerate(comps)}
    parts: list[dict] = [{} for _ in comps]
    mask = ring.comp_unit - 1
    for m, a in terms.items():
        parts[where[m >> ring.cshift]][m & mask] = a
    return [ring._make(p) for p in parts]


@_scoped
def syzygies(gens: Sequence[Polynomial]) -> SyzygyModule:
    """Generators of ``{v : sum v_i g_i = 0}`` via a POT module basis."""
    ring = _common_ring(gens)
    r = len(gens)
    top = r  # the image component dominates
    vecs = []
    for i, g in enumerate(gens):
        t = {m + (top << ring.cshift): a for m, a in g.terms.items()}
        t[i << ring.cshift] = ONE
        vecs.append(t)
    G = buchberger(ring, vecs, product_criterion=False)
    out = []
    for g in G:
        if (max(g) >> ring.cshift) < top:
            out.append(split_vector(ring, g, list(range(r))))
    return SyzygyModule(r, out)


def module_membership(ring: PolyRing, vec: Sequence[Polynomial], module: Sequence[Sequence[Polynomial]]) -> bool:
    comps = list(range(len(vec)))
    G = buchberger(ring, [vector_terms(ring, v, comps) for v in module], product_criterion=False)
    return not reduce_terms(ring, vector_terms(ring, vec, comps), G)


class Lifter:
    """Cofactor representations ``p = sum a_i g_i`` (left multiplication).

    Uses the module basis of ``g_i e_top + e_i``: reducing ``p e_top`` removes
    the top component exactly when ``p`` is a member, and the lower
    components then hold ``-a_i``.
    """

    def __init__(self, gens: Sequence[Polynomial], ring: PolyRing | None = None):
        self.ring = ring or _common_ring(gens)
        self.gens = list(gens)
        r = self.r = len(gens)
        sh = self.ring.cshift
        vecs = []
        for i, g in enumerate(gens):
            t = {m + (r << sh): a for m, a in g.terms.items()}
            t[i << sh] = ONE
            vecs.append(t)
        self.basis = make_basis(self.ring, buchberger(self.ring, vecs, product_criterion=False))

    def remainder(self, p: Polynomial) -> tuple[Polynomial, list[Polynomial]]:
        """``(rest, a)`` with ``p = rest + sum a_i g_i`` and ``rest`` reduced."""
        ring = self.ring
        sh = ring.cshift
        t = {m + (self.r << sh): a for m, a in p.terms.items()}
        red = _reduce(ring, t, self.basis)
        top = {m - (self.r << sh): a for m, a in red.items() if (m >> sh) == self.r}
        low = {m: -a for m, a in red.items() if (m >> sh) < self.r}
        return ring._make(top), split_vector(ring, low, list(range(self.r)))

    def lift(self, p: Polynomial) -> list[Polynomial] | None:
        rest, a = self.remainder(p)
        return None if rest else a


@_scoped
def lift(p: Polynomial, gens: Sequence[Polynomial]) -> list[Polynomial] | None:
    """Cofactors ``a`` with ``p = sum a_i g_i``, or ``None`` if ``p`` is not a member."""
    return Lifter(gens, p.ring).lift(p)


# ---------------------------------------------------------------------------
# regular sequences


@dataclass
class RegularityReport:
    is_regular_globally: bool
    locus: Ideal
    strict_steps: list[int]
    height: int


@_scoped
def regular_sequence_failure_locus(seq: Sequence[Polynomial], base: Sequence[str] | None = None) -> RegularityReport:
    """Global height test plus the colon-support locus projected to ``base``.

    ``base`` defaults to the ``x`` block of the signature.  The locus is the
    intersection over strict colon steps ``P_{i-1} : seq_i != P_{i-1}`` of the
    contractions of ``P_{i-1} : (P_{i-1} : seq_i)``; it is ``(1)`` when no
    step is strict.
    """
    ring = _common_ring(seq)
    base = list(base) if base is not None else list(ring.signature.block("x"))
    others = [v for v in ring.names if v not in base]
    sub = subring(ring, others)
    hgt = height(Ideal(list(seq), ring))
    regular = hgt == len(seq)
    strict = []
    locus = None
    for i in range(len(seq)):
        P = Ideal(list(seq[:i]), ring)
        Q = ideal_quotient(P, seq[i])
        if Q.issubset(P):
            continue
        strict.append(i)
        support = ideal_quotient(P, Q)
        contracted = eliminate(support, others) if others else support
        contracted = Ideal([g.to_ring(sub) for g in contracted.gens], sub) if others else contracted
        locus = contracted if locus is None else intersect(locus, contracted)
    if locus is None:
        locus = Ideal([sub.one()], sub)
    return RegularityReport(regular, locus, strict, hgt)
