"""Divisors, logarithmic derivations and Saito freeness."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import gmpy2
from gmpy2 import mpq

from . import groebner as gb
from .exactpoly import MonomialOrder, Polynomial, PolyRing, RingSignature, polynomial_ring
from .groebner import Ideal, _scoped
from .weyl import WeylAlgebra, WeylElement, apply_to_fs, weyl_algebra

log = logging.getLogger(__name__)


class NonReducedError(ValueError):
    """Raised for polynomials with a repeated factor; ``witness`` is the gcd."""

    def __init__(self, f: Polynomial, witness: Polynomial):
        super().__init__(f"{f} is not reduced: gcd(f, df) = {witness}")
        self.f = f
        self.witness = witness


class NotApplicable(ValueError):
    pass


class InvariantError(AssertionError):
    """An internal consistency check failed."""


def polynomial_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over Q via the generator of ``(a) ∩ (b)``."""
    if not a:
        return b.monic() if b else b
    if not b:
        return a.monic()
    if a.is_constant() or b.is_constant():
        return a.ring.one()
    lcm = gb.intersect(Ideal([a]), Ideal([b])).groebner()
    if len(lcm) != 1:
        raise InvariantError("intersection of principal ideals is not principal")
    return gb.divide_exact(a * b, lcm[0]).monic()


def divisor_ring(x: Sequence[str]) -> PolyRing:
    return polynomial_ring(list(x))


class Divisor:
    """Reduced hypersurface ``f = 0`` in affine n-space over Q."""

    def __init__(self, f: Polynomial):
        ring = f.ring
        x = ring.signature.block("x") or ring.names
        if set(ring.names) != set(x):
            raise ValueError("a divisor equation may only involve position variables")
        if f.is_constant():
            raise ValueError("f must be nonconstant")
        self.ring = divisor_ring(x)
        self.f = f.to_ring(self.ring)
        self.x = tuple(x)
        self.n = len(x)
        g = self.f
        for v in self.x:
            g = polynomial_gcd(g, self.partials[self.x.index(v)])
            if g.is_constant():
                break
        if not g.is_constant():
            raise NonReducedError(self.f, g)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] | str) -> Divisor:
        return cls(polynomial_ring(variables).parse(text))

    @cached_property
    def partials(self) -> tuple[Polynomial, ...]:
        return tuple(self.f.derivative(v) for v in self.x)

    @cached_property
    def weyl(self) -> WeylAlgebra:
        """D_n[s] with the order used throughout: total order (momenta and s) first."""
        return weyl_algebra(self.x, s=True, order=total_order(self.x))

    @cached_property
    def weyl0(self) -> WeylAlgebra:
        return weyl_algebra(self.x, order=total_order(self.x))

    def derivation(self, coeffs: Sequence[Polynomial]) -> LogDerivation:
        """Wrap ``sum coeffs_i d_i`` after checking it is logarithmic."""
        coeffs = tuple(c.to_ring(self.ring) for c in coeffs)
        if len(coeffs) != self.n:
            raise ValueError("need one coefficient per variable")
        image = sum((a * p for a, p in zip(coeffs, self.partials)), self.ring.zero())
        try:
            weight = gb.divide_exact(image, self.f)
        except ValueError:
            raise ValueError("derivation is not logarithmic") from None
        return LogDerivation(coeffs, weight)

    def __repr__(self):
        return f"Divisor({self.f})"


def total_order(x: Sequence[str]) -> MonomialOrder:
    weights = {f"d{v}": 1 for v in x}
    weights["s"] = 1
    return MonomialOrder.weighted(weights, MonomialOrder.degrevlex())


@dataclass(frozen=True)
class LogDerivation:
    """``delta = sum a_i d_i`` with ``delta(f) = weight * f``."""

    coeffs: tuple[Polynomial, ...]
    weight: Polynomial

    def __call__(self, g: Polynomial) -> Polynomial:
        ring = self.coeffs[0].ring
        return sum((a * g.derivative(v) for a, v in zip(self.coeffs, ring.names)), ring.zero())

    @property
    def constant_weight(self) -> mpq | None:
        return self.weight.constant_value() if self.weight.is_constant() else None

    def operator(self, W: WeylAlgebra) -> WeylElement:
        x = W.signature.block("x")
        return sum((a.to_ring(W) * W.gen(f"d{v}") for a, v in zip(self.coeffs, x)), W.zero())

    def scaled(self, c) -> LogDerivation:
        return LogDerivation(tuple(a * c for a in self.coeffs), self.weight * c)

    def combine(self, other: LogDerivation, c) -> LogDerivation:
        """``self + c * other``."""
        return LogDerivation(tuple(a + c * b for a, b in zip(self.coeffs, other.coeffs)),
                             self.weight + c * other.weight)

    def primitive(self) -> LogDerivation:
        """Scale to coprime integer coefficients with a positive leading coefficient."""
        coeffs = [c for a in self.coeffs for c in a.terms.values()]
        if not coeffs:
            return self
        num = den = 0
        for c in coeffs:
            num = gmpy2.gcd(num, c.numerator)
            den = gmpy2.lcm(den, c.denominator) if den else c.denominator
        lead = next(a for a in self.coeffs if a).leading_coefficient()
        scale = mpq(den, num) * (1 if lead > 0 else -1)
        return self.scaled(scale)

    def degree(self) -> int:
        return max((a.total_degree() for a in self.coeffs if a), default=0)

    def __str__(self):
        ring = self.coeffs[0].ring
        parts = [f"({a})*d{v}" for a, v in zip(self.coeffs, ring.names) if a]
        return " + ".join(parts) or "0"


def bracket(a: LogDerivation, b: LogDerivation, d: Divisor) -> LogDerivation:
    """``[a, b]``; logarithmic again, which the constructor re-checks."""
    return d.derivation([a(bk) - b(ak) for ak, bk in zip(a.coeffs, b.coeffs)])


@dataclass(frozen=True)
class LogBasis:
    derivations: tuple[LogDerivation, ...]
    det: Polynomial
    unit: mpq

    @property
    def weights(self) -> tuple[Polynomial, ...]:
        return tuple(d.weight for d in self.derivations)

    def __len__(self):
        return len(self.derivations)

    def __iter__(self):
        return iter(self.derivations)


@dataclass(frozen=True)
class ThetaOperator:
    delta: LogDerivation
    operator: WeylElement


def jacobian_ideal(d: Divisor) -> Ideal:
    return Ideal([d.f, *d.partials], d.ring)


def determinant(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free (Bareiss) determinant."""
    n = len(rows)
    M = [list(r) for r in rows]
    ring = M[0][0].ring
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return ring.zero()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = gb.divide_exact(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    return M[n - 1][n - 1] * sign


def _sort_key(delta: LogDerivation):
    w = delta.constant_weight
    return (w is None, w != 0 if w is not None else True, delta.degree(),
            [str(a) for a in delta.coeffs])


@_scoped
def log_derivations(d: Divisor) -> list[LogDerivation]:
    """Generators of Der(log D) from the syzygies of ``(f, f_1, ..., f_n)``.

    The generating set is pruned of redundant members.  When an Euler-type
    field ``E`` of constant weight ``c`` is present, every other generator is
    replaced by ``c*delta - weight(delta)*E``, which has weight zero and
    generates the same module together with ``E``.
    """
    syz = gb.syzygies([d.f, *d.partials])
    gens = []
    for v in syz:
        if any(v[1:]):
            gens.append(LogDerivation(tuple(v[1:]), -v[0]))
    gens = _prune(d, gens)
    euler = [g for g in gens if g.constant_weight]
    if euler:
        E = min(euler, key=lambda g: (g.degree(), len(str(g))))
        c = E.constant_weight
        out = []
        for g in gens:
            if g is not E and g.weight:
                g = g.scaled(c).combine(E, -g.weight)
            out.append(g.primitive())
        gens = _prune(d, out)
    gens = [g.primitive() for g in gens]
    gens = [g.scaled(-1) if g.constant_weight is not None and g.constant_weight < 0 else g for g in gens]
    for g in gens:
        d.derivation(g.coeffs)  # invariant: every generator is logarithmic
    return sorted(gens, key=_sort_key)


def _as_vector(g: LogDerivation) -> list[Polynomial]:
    return list(g.coeffs)


def _prune(d: Divisor, gens: list[LogDerivation]) -> list[LogDerivation]:
    gens = sorted(gens, key=lambda g: (-g.degree(), -sum(len(a) for a in g.coeffs)))
    i = 0
    while i < len(gens):
        others = gens[:i] + gens[i + 1:]
        if others and gb.module_membership(d.ring, _as_vector(gens[i]), [_as_vector(o) for o in others]):
            gens = others
        else:
            i += 1
    return gens


def _certify(d: Divisor, subset: Sequence[LogDerivation]) -> LogBasis | None:
    det = determinant([list(g.coeffs) for g in subset])
    if not det:
        return None
    try:
        q = gb.divide_exact(det, d.f)
    except ValueError:
        return None
    if not q.is_constant():
        return None
    return LogBasis(tuple(subset), det, q.constant_value())


@_scoped
def saito_test(d: Divisor, gens: Sequence[LogDerivation]) -> LogBasis | None:
    """A basis of Der(log D) certified by Saito's determinant criterion, if one is found.

    n-subsets of ``gens`` are tried first.  The fallback completes a subset
    ``S`` by adding to one of its members a polynomial combination of the
    remaining generators: the determinant is linear in that row, so this is
    a single ideal-membership (lift) problem for the cofactors ``det / f``.
    """
    gens = list(gens)
    for subset in itertools.combinations(gens, d.n):
        basis = _certify(d, subset)
        if basis is not None:
            return basis
        gb._check()
    for subset in itertools.combinations(range(len(gens)), d.n):
        basis = _complete_row(d, gens, list(subset))
        if basis is not None:
            return basis
    log.info("no %d-subset of %d generators has determinant c*f", d.n, len(gens))
    return None


@_scoped
def locally_free(d: Divisor, gens: Sequence[LogDerivation]) -> bool:
    """Is Der(log D) locally free?

    Locally a minimal generating set can be taken among ``gens``, so by
    Saito's criterion the module is free at a point exactly when some
    cofactor ``det(delta_S) / f`` over an n-subset ``S`` does not vanish
    there: local freedom everywhere means the cofactors generate (1).
    """
    cofactors = [_cofactor(d, subset) for subset in itertools.combinations(gens, d.n)]
    return Ideal([c for c in cofactors if c], d.ring).is_unit()


def _cofactor(d: Divisor, rows: Sequence[LogDerivation]) -> Polynomial:
    return gb.divide_exact(determinant([list(g.coeffs) for g in rows]), d.f)


def _complete_row(d: Divisor, gens: list[LogDerivation], subset: list[int]) -> LogBasis | None:
    rest = [j for j in range(len(gens)) if j not in subset]
    if not rest:
        return None
    base = [gens[i] for i in subset]
    h = _cofactor(d, base)
    for pos in range(d.n):
        hs = []
        for j in rest:
            rows = list(base)
            rows[pos] = gens[j]
            hs.append(_cofactor(d, rows))
        J = Ideal(hs, d.ring)
        if J.is_zero():
            continue
        if J.is_unit():
            c = d.ring.one()
        else:
            c = J.reduce(h)
            if not c or not c.is_constant():
                continue
        coeffs = gb.lift(c - h, hs)
        row = base[pos]
        for j, p in zip(rest, coeffs):
            if p:
                row = row.combine(gens[j], p)
        candidate = list(base)
        candidate[pos] = row.primitive()
        basis = _certify(d, candidate)
        if basis is None:
            raise InvariantError("row completion did not produce a Saito basis")
        return basis
    if len(rest) == 1:
        return _complete_all_rows(d, base, gens[rest[0]], h)
    return None


def _complete_all_rows(d: Divisor, base: list[LogDerivation], extra: LogDerivation,
                       h: Polynomial) -> LogBasis | None:
    # With a single extra generator every row may absorb a multiple of it:
    # terms using the extra row twice vanish, so the determinant stays linear.
    hs = []
    for pos in range(d.n):
        rows = list(base)
        rows[pos] = extra
        hs.append(_cofactor(d, rows))
    J = Ideal(hs, d.ring)
    if J.is_zero():
        return None
    c = d.ring.one() if J.is_unit() else J.reduce(h)
    if not c or not c.is_constant():
        return None
    coeffs = gb.lift(c - h, hs)
    candidate = [row.combine(extra, p).primitive() if p else row for row, p in zip(base, coeffs)]
    basis = _certify(d, candidate)
    if basis is None:
        raise InvariantError("row completion did not produce a Saito basis")
    return basis


def euler_normalize(d: Divisor, basis: LogBasis) -> LogBasis:
    """Basis with weights ``(0, ..., 0, 1)`` by rational column operations."""
    ws = [g.constant_weight for g in basis]
    if any(w is None for w in ws):
        raise NotApplicable("weights are not constant")
    if not any(ws):
        raise NotApplicable("no derivation of nonzero constant weight")
    k = max(i for i, w in enumerate(ws) if w)
    E = basis.derivations[k].scaled(1 / ws[k])
    others = [g.combine(E, -w) for i, (g, w) in enumerate(zip(basis, ws)) if i != k]
    new = _certify(d, others + [E])
    if new is None:
        raise InvariantError("Euler normalization lost the Saito certificate")
    return new


@_scoped
def theta_fs(d: Divisor, basis: LogBasis | Sequence[LogDerivation]) -> list[ThetaOperator]:
    W = d.weyl
    s = W.gen("s")
    out = []
    for delta in basis:
        op = delta.operator(W) - delta.weight.to_ring(W) * s
        if not apply_to_fs(op, d.f).is_zero():
            raise InvariantError(f"{op} does not annihilate f^s")
        out.append(ThetaOperator(delta, op))
    return out


@_scoped
def euler_homogeneous_test(d: Divisor) -> bool:
    """Global Euler homogeneity: ``f`` lies in the ideal of its partials."""
    return Ideal(list(d.partials), d.ring).contains(d.f)
