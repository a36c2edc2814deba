"""Weyl algebras D_n, D_n[s] and the Briançon-Maisonobe algebra.

Elements are stored in normal order: for every conjugate pair the "position"
variable sits left of its partner.  Two kinds of pairs are supported:

* Weyl pairs ``(x, dx)`` with ``dx*x = x*dx + 1``;
* shift pairs ``(s, dt)`` with ``dt*s = (s - 1)*dt``, which is the relation
  satisfied by ``s = -dt*t`` inside D_{n+1}.

All remaining variables are central.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

from gmpy2 import mpq

from . import groebner as gb
from .exactpoly import (
    EXP_MAX,
    ONE,
    RBITS,
    ZERO,
    MonomialOrder,
    PolyRing,
    Polynomial,
    RingSignature,
    SignatureError,
    format_terms,
)
from .groebner import Ideal, Timeout, _scoped

log = logging.getLogger(__name__)


class InadmissibleOrder(ValueError):
    pass


@functools.lru_cache(maxsize=None)
def _weyl_expansion(b: int, c: int) -> tuple[tuple[int, int], ...]:
    """``d^b x^c = sum_i coeff_i x^(c-i) d^(b-i)`` as ``(i, coeff_i)``."""
    out = []
    falling = 1
    for i in range(min(b, c) + 1):
        out.append((i, comb(b, i) * falling))
        falling *= c - i
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _shift_expansion(v: int, l: int) -> tuple[tuple[int, int], ...]:
    """``dt^v s^l = (s - v)^l dt^v`` as ``(k, coeff)`` lowering s by ``k``."""
    return tuple((k, comb(l, k) * (-v) ** k) for k in range(l + 1))


class WeylAlgebra(PolyRing):
    """Normally ordered operator algebra over Q."""

    commutative = False

    def __init__(self, signature: RingSignature, order: MonomialOrder | None = None,
                 pairs: Sequence[tuple[str, str]] | None = None,
                 shift_pairs: Sequence[tuple[str, str]] = ()):
        super().__init__(signature, order)
        if pairs is None:
            pairs = list(zip(signature.block("x"), signature.block("d")))
            if signature.block("t") and signature.block("dt"):
                pairs += list(zip(signature.block("t"), signature.block("dt")))
        self.pairs = tuple((a, b) for a, b in pairs)
        self.shift_pairs = tuple(shift_pairs)
        specs = []
        for kind, plist in (("weyl", self.pairs), ("shift", self.shift_pairs)):
            for left, right in plist:
                li, ri = self.index(left), self.index(right)
                if kind == "weyl":
                    delta = self.units[li] + self.units[ri]
                else:
                    delta = self.units[li]
                specs.append((kind, RBITS * ri, RBITS * li, EXP_MAX << (RBITS * li), delta))
        self._specs = specs
        self._right_mask = 0
        for _, roff, _, _, _ in specs:
            self._right_mask |= EXP_MAX << roff
        self._check_admissible()

    def _check_admissible(self):
        # Leibniz corrections divide the leading word, which is enough for
        # any matrix order with a nonnegative first nonzero entry per column.
        for j in range(self.nvars):
            col = [r[j] for r in self._rows]
            first = next((v for v in col if v), 0)
            if first <= 0:
                raise InadmissibleOrder(f"order is not a well-order on {self.names[j]}")

    def with_order(self, order: MonomialOrder) -> WeylAlgebra:
        return WeylAlgebra(self.signature, order, self.pairs, self.shift_pairs)

    def __eq__(self, other):
        return (isinstance(other, WeylAlgebra) and self.signature == other.signature
                and self.order == other.order and self.pairs == other.pairs
                and self.shift_pairs == other.shift_pairs)

    def __hash__(self):
        return hash(("WeylAlgebra", self.signature, self.order, self.pairs, self.shift_pairs))

    def mul_mono_terms(self, u: int, c, terms: Mapping[int, mpq]) -> dict[int, mpq]:
        if not (u & self._right_mask):
            if c == 1:
                return {u + m: a for m, a in terms.items()}
            return {u + m: c * a for m, a in terms.items()}
        active = []
        lmask = 0
        for kind, roff, loff, lm, delta in self._specs:
            b = (u >> roff) & EXP_MAX
            if b:
                active.append((kind, b, loff, delta))
                lmask |= lm
        out: dict[int, mpq] = {}
        get = out.get
        for m, a in terms.items():
            base = u + m
            coef = c * a
            if not (m & lmask):
                v = get(base)
                if v is None:
                    out[base] = coef
                else:
                    v += coef
                    if v:
                        out[base] = v
                    else:
                        del out[base]
                continue
            exp = [(0, 1)]
            for kind, b, loff, delta in active:
                e = (m >> loff) & EXP_MAX
                if not e:
                    continue
                ex = _weyl_expansion(b, e) if kind == "weyl" else _shift_expansion(b, e)
                exp = [(d1 + k * delta, c1 * cf) for d1, c1 in exp for k, cf in ex if cf]
            for d, cf in exp:
                mm = base - d
                val = coef * cf
                v = get(mm)
                if v is None:
                    out[mm] = val
                else:
                    v += val
                    if v:
                        out[mm] = v
                    else:
                        del out[mm]
        return out


class WeylElement(Polynomial):
    """Normally ordered operator."""

    __slots__ = ()

    def __str__(self):
        return format_terms(self.ring.names, self.items())

    def order(self, names: Sequence[str] | None = None) -> int:
        """Degree in the momenta (or in ``names``)."""
        if names is None:
            names = list(self.ring.signature.block("d")) + list(self.ring.signature.block("dt"))
        return self.degree_in(names)

    def total_order(self) -> int:
        sig = self.ring.signature
        return self.degree_in(list(sig.block("d")) + list(sig.block("s")))

    def symbol(self, filtration: str = "F") -> Polynomial:
        return symbol(self, filtration)


WeylAlgebra.element_class = WeylElement


def weyl_algebra(x: Sequence[str] | str, s: bool = False, order: MonomialOrder | None = None,
                 extra: Sequence[str] = ()) -> WeylAlgebra:
    """D_n (or D_n[s]) on ``x`` with momenta named ``d<x>``; ``extra`` adds central variables."""
    if isinstance(x, str):
        x = [v.strip() for v in x.split(",") if v.strip()]
    blocks = dict(d=[f"d{v}" for v in x])
    if s:
        blocks["s"] = ["s"]
    if extra:
        blocks["aux"] = list(extra)
    sig = RingSignature.build(x, **blocks)
    return WeylAlgebra(sig, order)


def bm_algebra(x: Sequence[str], order: MonomialOrder | None = None) -> WeylAlgebra:
    """D_n<s, dt> with ``dt*s = (s-1)*dt``, used for the annihilator of f^s.

    The default order eliminates ``dt`` and then ``s``; keeping ``s`` in its
    own block is several times faster than mixing it into the tail order.
    """
    sig = RingSignature.build(x, d=[f"d{v}" for v in x], s=["s"], dt=["dt"])
    order = order or MonomialOrder.block(["dt"], ["s"])
    return WeylAlgebra(sig, order, pairs=list(zip(x, [f"d{v}" for v in x])), shift_pairs=[("s", "dt")])


def symbol_ring(W: PolyRing, with_s: bool | None = None, order: MonomialOrder | None = None) -> PolyRing:
    sig = W.signature
    x = sig.block("x")
    blocks = dict(xi=[f"xi{i + 1}" for i in range(len(x))])
    if with_s is None:
        with_s = bool(sig.block("s"))
    if with_s:
        blocks["s"] = ["s"]
    return PolyRing(RingSignature.build(x, **blocks), order)


# ---------------------------------------------------------------------------
# symbols and the action on f^s


def symbol(P: WeylElement, filtration: str = "F", target: PolyRing | None = None) -> Polynomial:
    """Principal symbol for the order filtration ``F`` or total order ``FT``.

    Under ``F`` only momenta count and ``s`` is carried along with weight 0;
    under ``FT`` momenta and ``s`` both have weight 1.
    """
    if not P:
        raise ValueError("the zero operator has no symbol")
    W = P.ring
    sig = W.signature
    x, d = sig.block("x"), sig.block("d")
    target = target or symbol_ring(W)
    weights = {v: 1 for v in d}
    if filtration == "FT":
        weights.update({v: 1 for v in sig.block("s")})
    elif filtration != "F":
        raise ValueError(f"unknown filtration {filtration!r}")
    widx = [(W.index(v), w) for v, w in weights.items()]
    items = P.as_dict().items()
    top = max(sum(e[i] * w for i, w in widx) for e, _ in items)
    rename = {v: v for v in x}
    rename.update({dv: f"xi{i + 1}" for i, dv in enumerate(d)})
    if "s" in W.names:
        rename["s"] = "s"
    tpos = [target.index(rename[v]) for v in W.names]
    out = {}
    for e, c in items:
        if sum(e[i] * w for i, w in widx) != top:
            continue
        te = [0] * target.nvars
        for i, k in enumerate(e):
            te[tpos[i]] += k
        out[tuple(te)] = c
    return target.from_dict(out)


def weight_of(P: WeylElement, weights: Mapping[str, int]) -> int:
    idx = [(P.ring.index(v), w) for v, w in weights.items() if v in P.ring.names]
    return max(sum(e[i] * w for i, w in idx) for e, _ in P.as_dict().items())


def apply_operator(P: WeylElement, g: Polynomial) -> Polynomial:
    """Literal action of an operator in D_n (momenta as derivations) on ``g``."""
    W = P.ring
    sig = W.signature
    x, d = sig.block("x"), sig.block("d")
    R = g.ring
    cache: dict[tuple[int, ...], Polynomial] = {(0,) * len(d): g}

    def deriv(b: tuple[int, ...]) -> Polynomial:
        if b not in cache:
            i = next(k for k, v in enumerate(b) if v)
            prev = list(b)
            prev[i] -= 1
            cache[b] = deriv(tuple(prev)).derivative(x[i])
        return cache[b]

    xi = [W.index(v) for v in x]
    di = [W.index(v) for v in d]
    others = [i for i in range(W.nvars) if i not in xi and i not in di]
    out = R.zero()
    for e, c in P.as_dict().items():
        mult = {R.names[R.index(W.names[i])]: e[i] for i in others if e[i]}
        term = deriv(tuple(e[i] for i in di))
        if not term:
            continue
        mono = [0] * R.nvars
        for i in xi:
            mono[R.index(W.names[i])] += e[i]
        for v, k in mult.items():
            mono[R.index(v)] += k
        out = out + R.monomial(mono, c) * term
    return out


@dataclass(frozen=True)
class FsValue:
    """``numerator * f^(-pole) * f^s``, with ``f`` not dividing the numerator when ``pole > 0``."""

    numerator: Polynomial
    pole: int

    def is_zero(self) -> bool:
        return not self.numerator


def _fs_ring(W: PolyRing) -> PolyRing:
    x = W.signature.block("x")
    return PolyRing(RingSignature.build(x, s=["s"]))


def _reduce_fs(N: Polynomial, d: int, f: Polynomial) -> FsValue:
    while d > 0 and N:
        try:
            N = gb.divide_exact(N, f)
        except ValueError:
            break
        d -= 1
    if not N:
        d = 0
    return FsValue(N, d)


def apply_to_fs(P: WeylElement, f: Polynomial) -> FsValue:
    """Action of ``P`` in D_n[s] on ``f^s`` inside O[1/f, s] f^s."""
    if not f:
        raise ValueError("f must be nonzero")
    W = P.ring
    sig = W.signature
    x, d = sig.block("x"), sig.block("d")
    R = _fs_ring(W)
    F = f.to_ring(R)
    s = R.gen("s")
    partial = [F.derivative(v) for v in x]
    cache: dict[tuple[int, ...], tuple[Polynomial, int]] = {(0,) * len(x): (R.one(), 0)}

    def dpow(b: tuple[int, ...]) -> tuple[Polynomial, int]:
        if b not in cache:
            i = next(k for k, v in enumerate(b) if v)
            prev = list(b)
            prev[i] -= 1
            N, k = dpow(tuple(prev))
            cache[b] = (F * N.derivative(x[i]) + (s - k) * partial[i] * N, k + 1)
        return cache[b]

    di = [W.index(v) for v in d]
    pieces = []
    for e, c in P.as_dict().items():
        N, k = dpow(tuple(e[i] for i in di))
        mono = [0] * R.nvars
        for i, v in enumerate(W.names):
            if e[i] and i not in di:
                mono[R.index(v)] += e[i]
        pieces.append((R.monomial(mono, c) * N, k))
    if not pieces:
        return FsValue(R.zero(), 0)
    top = max(k for _, k in pieces)
    fpow = {0: R.one()}
    total = R.zero()
    for N, k in pieces:
        if top - k not in fpow:
            fpow[top - k] = F ** (top - k)
        total = total + N * fpow[top - k]
    return _reduce_fs(total, top, F)


# ---------------------------------------------------------------------------
# left ideals


class LeftIdeal(Ideal):
    """Left ideal of a Weyl-type algebra with a cached left Gröbner basis."""

    def __repr__(self):
        return f"LeftIdeal({', '.join(map(str, self.gens))})"

    def __add__(self, other):
        return LeftIdeal(self.gens + other.gens, self.ring)

    def to_ring(self, ring):
        return LeftIdeal([g.to_ring(ring) for g in self.gens], ring)


@_scoped
def left_groebner_basis(gens: Sequence[WeylElement], order: MonomialOrder | None = None) -> list[WeylElement]:
    ring = gens[0].ring
    if order is not None and order != ring.order:
        target = ring.with_order(order)
        gens = [g.to_ring(target) for g in gens]
        ring = target
    G = gb.buchberger(ring, [g.terms for g in gens if g], product_criterion=False)
    return [ring._make(g) for g in G]


def left_normal_form(P: WeylElement, basis: Sequence[WeylElement]) -> WeylElement:
    ring = P.ring
    G = [gb._monic(g.to_ring(ring).terms) for g in basis if g]
    return ring._make(gb.reduce_terms(ring, P.terms, G))


@_scoped
def left_syzygies(gens: Sequence[WeylElement]) -> list[list[WeylElement]]:
    """Generators of ``{(A_i) : sum A_i g_i = 0}``."""
    return gb.syzygies(gens).generators


def _aux_algebra(W: WeylAlgebra, name: str, order_first: Sequence[str]) -> WeylAlgebra:
    sig = RingSignature(W.signature.blocks + (("aux", (name,)),))
    return WeylAlgebra(sig, MonomialOrder.block(list(order_first)), W.pairs, W.shift_pairs)


@_scoped
def colon_by_central(I: LeftIdeal, c: Polynomial | WeylElement) -> LeftIdeal:
    """``{P : c P in I}`` for ``c`` in Q[s] (central)."""
    W = I.ring
    if not isinstance(c, Polynomial) or c.ring != W:
        c = c.to_ring(W)
    if not c:
        raise ValueError("colon by zero")
    bad = c.variables() - set(W.signature.block("s")) - set(W.signature.block("aux"))
    if bad:
        raise ValueError(f"{c} is not central (involves {sorted(bad)})")
    if c.is_constant():
        return LeftIdeal(list(I.gens), W)
    u = gb.fresh_name(W)
    A = _aux_algebra(W, u, [u])
    U = A.gen(u)
    gens = [U * g.to_ring(A) for g in I.gens] + [(1 - U) * c.to_ring(A)]
    G = gb.buchberger(A, [g.terms for g in gens], product_criterion=False)
    ui = A.index(u)
    out = []
    cA = c.to_ring(A)
    for g in G:
        if A.unpack(max(g))[ui]:
            continue
        q = gb.divide_exact(A._make(g), cA)
        out.append(q.to_ring(W))
    return LeftIdeal(out, W)


@_scoped
def central_slice(I: LeftIdeal, var: str = "s") -> Polynomial:
    """Monic generator of ``I`` intersected with Q[var] (zero if trivial)."""
    W = I.ring
    if var not in W.names:
        raise SignatureError(f"{var} not in {W}")
    rest = [v for v in W.names if v != var]
    E = W.with_order(MonomialOrder.block(rest, [var]))
    G = gb.buchberger(E, [g.to_ring(E).terms for g in I.gens], product_criterion=False)
    R = PolyRing(RingSignature.build([var]))
    vi = E.index(var)
    for g in G:
        e = E.unpack(max(g))
        if all(k == 0 for i, k in enumerate(e) if i != vi):
            return E._make(g).to_ring(R).monic()
    return R.zero()


def minimal_central_polynomial(I: LeftIdeal, P: WeylElement | None = None, var: str = "s",
                               max_degree: int = 64) -> Polynomial | None:
    """Minimal monic ``b(var)`` with ``b * P`` in ``I`` (``P = 1`` by default).

    Linear algebra on normal forms of ``var^k P``; ``None`` past ``max_degree``.
    """
    W = I.ring
    if P is None:
        P = W.one()
    basis = I._reducer()
    s = W.gen(var)
    rows: list[tuple[int, dict, dict]] = []  # pivot, vector, combination
    cur = P
    for k in range(max_degree + 1):
        vec = gb._reduce(W, cur.terms, basis)
        comb_ = {k: ONE}
        for piv, rv, rc in rows:
            a = vec.get(piv)
            if a:
                vec = gb._add_terms(vec, rv, -a)
                comb_ = gb._add_terms(comb_, rc, -a)
        if not vec:
            R = PolyRing(RingSignature.build([var]))
            return R.from_dict({(j,): cf for j, cf in comb_.items()}).monic()
        piv = max(vec)
        inv = ONE / vec[piv]
        vec = {m: a * inv for m, a in vec.items()}
        comb_ = {m: a * inv for m, a in comb_.items()}
        # keep rows fully reduced against the new pivot
        new_rows = []
        for p2, rv, rc in rows:
            a = rv.get(piv)
            if a:
                rv = gb._add_terms(rv, vec, -a)
                rc = gb._add_terms(rc, comb_, -a)
            new_rows.append((p2, rv, rc))
        rows = new_rows + [(piv, vec, comb_)]
        cur = s * cur
        gb._check()
    return None


# ---------------------------------------------------------------------------
# annihilator of f^s


def _dsring(W: PolyRing) -> WeylAlgebra:
    x = W.signature.block("x")
    return weyl_algebra(list(x), s=True)


@_scoped
def ann_fs(f: Polynomial, ring: WeylAlgebra | None = None) -> LeftIdeal:
    """Annihilator of ``f^s`` in D_n[s] (Briançon-Maisonobe elimination of dt)."""
    R = f.ring
    x = list(R.signature.block("x")) or list(R.names)
    if f.is_constant():
        raise ValueError("f must be nonconstant")
    B = bm_algebra(x)
    fB = f.to_ring(B)
    dt = B.gen("dt")
    gens = [B.gen("s") + fB * dt]
    for v in x:
        gens.append(B.gen(f"d{v}") + f.derivative(v).to_ring(B) * dt)
    # autoreduction: intermediate coefficients otherwise swell to 10^5 bits on D_7
    G = gb.buchberger(B, [g.terms for g in gens], product_criterion=False, autoreduce=True)
    target = ring or weyl_algebra(x, s=True)
    dti = B.index("dt")
    out = []
    for g in G:
        if B.unpack(max(g))[dti]:
            continue
        out.append(B._make(g).to_ring(target))
    return LeftIdeal(out, target)


# ---------------------------------------------------------------------------
# serialization


def operator_to_json(P: WeylElement) -> dict:
    """Signature plus ``[exponents, "p/q"]`` pairs in descending term order."""
    W = P.ring
    return {
        "signature": [[b, list(vs)] for b, vs in W.signature.blocks],
        "pairs": [list(p) for p in W.pairs],
        "shift_pairs": [list(p) for p in W.shift_pairs],
        "terms": [[list(e), str(c)] for e, c in P.items()],
    }


def operator_from_json(data: dict, order: MonomialOrder | None = None) -> WeylElement:
    sig = RingSignature(tuple((b, tuple(vs)) for b, vs in data["signature"]))
    W = WeylAlgebra(sig, order, [tuple(p) for p in data["pairs"]],
                    [tuple(p) for p in data.get("shift_pairs", [])])
    return W.from_dict({tuple(e): mpq(c) for e, c in data["terms"]})
