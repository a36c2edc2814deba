"""Linearity diagnostics for free divisors.

Everything is global over Q[x].  Commutative objects live in the symbol ring
Q[x, xi, s]; operators in D_n[s] with an order that compares total order
(momenta plus s) first, so that truncating a Gröbner basis by total order
yields the filtration pieces of a left ideal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

from gmpy2 import mpq

from . import groebner as gb
from .exactpoly import MonomialOrder, Polynomial, PolyRing, RingSignature
from .groebner import Ideal, Lifter, _scoped
from .logderiv import (
    Divisor,
    InvariantError,
    NotApplicable,
    LogBasis,
    LogDerivation,
    ThetaOperator,
    bracket,
    determinant,
)
from .weyl import (
    LeftIdeal,
    WeylAlgebra,
    WeylElement,
    ann_fs,
    colon_by_central,
    central_slice,
    minimal_central_polynomial,
    symbol,
    symbol_ring,
    weyl_algebra,
)

log = logging.getLogger(__name__)


class NonPrincipalStep(RuntimeError):
    """A tower step is not a colon by a single linear factor."""


def s_ring() -> PolyRing:
    return PolyRing(RingSignature.build(["s"]))


def _symbols(d: Divisor) -> PolyRing:
    return symbol_ring(d.weyl)


def theta_symbols(d: Divisor, theta: Sequence[ThetaOperator]) -> list[Polynomial]:
    S = _symbols(d)
    return [symbol(t.operator, "FT", S) for t in theta]


def order_symbols(d: Divisor, basis: Sequence[LogDerivation]) -> list[Polynomial]:
    """``sigma(delta_i) = sum a_ij xi_j`` in Q[x, xi]."""
    S = symbol_ring(d.weyl, with_s=False)
    xi = [S.gen(f"xi{j + 1}") for j in range(d.n)]
    return [sum((a.to_ring(S) * x for a, x in zip(delta.coeffs, xi)), S.zero()) for delta in basis]


def _xi_degree(p: Polynomial) -> int:
    return p.degree_in([v for v in p.ring.names if v.startswith("xi")])


# ---------------------------------------------------------------------------
# the Rees kernel and commutative linearity


@dataclass
class ReesKernel:
    ring: PolyRing
    full: Ideal
    delta: list[Polynomial]
    extras: list[tuple[Polynomial, int]]

    @property
    def degree_one(self) -> Ideal:
        return Ideal(self.delta, self.ring)


@_scoped
def rees_kernel(d: Divisor, theta: Sequence[ThetaOperator]) -> ReesKernel:
    """``ker(phi)`` for ``s -> f t, xi_i -> f_i t`` by eliminating ``t``."""
    S = _symbols(d)
    T = gb.extend_ring(S, "t", ["t"])
    t = T.gen("t")
    gens = [T.gen("s") - d.f.to_ring(T) * t]
    gens += [T.gen(f"xi{i + 1}") - p.to_ring(T) * t for i, p in enumerate(d.partials)]
    full = gb.eliminate(Ideal(gens, T), ["t"]).to_ring(S)
    full = Ideal([g.to_ring(S) for g in full.gens], S)
    delta = theta_symbols(d, theta)
    ker1 = Ideal(delta, S)
    # reduce leftovers with s eliminated first, then keep a minimal set
    Ss = S.with_order(MonomialOrder.block(["s"]))
    ker1_s = Ideal([g.to_ring(Ss) for g in delta], Ss)
    cands = []
    for g in full.groebner():
        if ker1.contains(g):
            continue
        r = ker1_s.reduce(g.to_ring(Ss)).to_ring(S)
        cands.append(r.primitive())
    cands.sort(key=lambda p: (_xi_degree(p), p.total_degree(), len(p), str(p)))
    kept: list[Polynomial] = []
    for c in cands:
        if not Ideal(delta + kept, S).contains(c):
            kept.append(c)
    # an early element may be generated by later ones: drop it, largest first
    for c in sorted(kept, key=lambda p: (-_xi_degree(p), -p.total_degree(), -len(p), str(p))):
        rest = [q for q in kept if q is not c]
        if Ideal(delta + rest, S).contains(c):
            kept = rest
    for g in full.gens + kept + delta:
        if not _phi(d, g).is_zero():
            raise InvariantError(f"{g} is not in the kernel")
    return ReesKernel(S, full, delta, [(c, _xi_degree(c)) for c in kept])


def _phi(d: Divisor, g: Polynomial) -> Polynomial:
    S = g.ring
    T = gb.extend_ring(d.ring, "t", ["t"])
    t = T.gen("t")
    values = {"s": d.f.to_ring(T) * t}
    values.update({f"xi{i + 1}": p.to_ring(T) * t for i, p in enumerate(d.partials)})
    out = T.zero()
    for e, c in g.as_dict().items():
        term = T.const(c)
        for v, k in zip(S.names, e):
            if k:
                term = term * (values[v] if v in values else T.gen(v)) ** k
        out = out + term
    return out


def clt_test(k: ReesKernel) -> bool:
    return not k.extras


@_scoped
def gcl_exponent(k: ReesKernel, max_power: int = 64) -> int | None:
    """Least ``N`` with ``s^N ker(phi)`` inside ``ker1(phi)``."""
    if not k.extras:
        return 0
    S = k.ring
    ker1 = k.degree_one
    # membership in the saturation first, so the search below terminates
    u = gb.fresh_name(S)
    big = gb.extend_ring(S, "aux", [u])
    sat = Ideal([g.to_ring(big) for g in k.delta] + [1 - big.gen("s") * big.gen(u)], big)
    if not all(sat.contains(t.to_ring(big)) for t, _ in k.extras):
        return None
    s = S.gen("s")
    cur = [t for t, _ in k.extras]
    for N in range(max_power + 1):
        if all(ker1.contains(t) for t in cur):
            return N
        cur = [s * t for t in cur]
        gb._check()
    raise InvariantError("saturation holds but no power found below the cap")


@dataclass
class RegularityResult:
    holds: bool
    locus: Ideal
    height: int


@_scoped
def gk_test(d: Divisor, theta: Sequence[ThetaOperator]) -> RegularityResult:
    rep = gb.regular_sequence_failure_locus(theta_symbols(d, theta), base=list(d.x))
    return RegularityResult(rep.is_regular_globally, rep.locus, rep.height)


@_scoped
def koszul_test(d: Divisor, basis: Sequence[LogDerivation]) -> RegularityResult:
    rep = gb.regular_sequence_failure_locus(order_symbols(d, basis), base=list(d.x))
    return RegularityResult(rep.is_regular_globally, rep.locus, rep.height)


# ---------------------------------------------------------------------------
# annihilators


@dataclass
class AnnData:
    """``ann f^s`` with its total-order Gröbner basis and ``ann^(1)``."""

    ann: LeftIdeal
    ann1: LeftIdeal
    theta: list[ThetaOperator]

    @property
    def basis(self) -> list[WeylElement]:
        return self.ann.groebner()

    def level(self, k: int) -> LeftIdeal:
        W = self.ann.ring
        gens = [t.operator for t in self.theta] + [g for g in self.basis if g.total_order() <= k]
        return LeftIdeal(gens, W)

    @property
    def max_order(self) -> int:
        return max(g.total_order() for g in self.basis)

    def extra_generators(self) -> list[WeylElement]:
        return [g for g in self.basis if not self.ann1.contains(g)]


@_scoped
def annihilator(d: Divisor, theta: Sequence[ThetaOperator]) -> AnnData:
    A = ann_fs(d.f, ring=d.weyl)
    A = LeftIdeal(A.groebner(), d.weyl)
    ann1 = LeftIdeal([t.operator for t in theta], d.weyl)
    for t in theta:
        if not A.contains(t.operator):
            raise InvariantError(f"{t.operator} annihilates f^s but is not in the computed annihilator")
    return AnnData(A, ann1, list(theta))


@_scoped
def bernstein(d: Divisor, data: AnnData | None = None, method: str = "linear") -> Polynomial:
    """Monic b-function from ``(ann f^s + D[s] f)`` intersected with Q[s]."""
    if data is None:
        A = ann_fs(d.f, ring=d.weyl)
    else:
        A = data.ann
    J = LeftIdeal(A.gens + [d.f.to_ring(d.weyl)], d.weyl)
    if method == "linear":
        # any order serves for normal forms; putting s first lets an Euler-type
        # generator delta - c*s rewrite s away, which keeps the basis small
        Ws = d.weyl.with_order(MonomialOrder.block(["s"]))
        Js = LeftIdeal([g.to_ring(Ws) for g in J.gens], Ws)
        b = minimal_central_polynomial(Js, max_degree=10 * (d.f.total_degree() + d.n))
        if b is None:
            raise InvariantError("no b-function found below the degree cap")
        return b
    if method == "elimination":
        return central_slice(J)
    raise ValueError(f"unknown method {method!r}")


def dlt_test(data: AnnData) -> bool:
    return not data.extra_generators()


@dataclass
class TowerLevel:
    k: int
    generators: list[WeylElement]
    factor: Polynomial | None  # connects this level to the next one


@dataclass
class AnnTower:
    levels: list[TowerLevel]
    terminal: int
    complete: bool = True
    failure: str = ""

    @property
    def factors(self) -> list[Polynomial]:
        return [lv.factor for lv in self.levels if lv.factor is not None]


@_scoped
def ann_tower(d: Divisor, data: AnnData, verify_colon: bool = True) -> AnnTower:
    """Levels ``ann^(k)`` joined by colons with linear central factors."""
    R = s_ring()
    cur = data.ann1
    levels: list[TowerLevel] = []
    k = 1
    top = data.max_order
    while True:
        nxt_k = k + 1
        while nxt_k <= top:
            nxt = data.level(nxt_k)
            missing = [g for g in nxt.gens if not cur.contains(g)]
            if missing:
                break
            nxt_k += 1
        else:
            levels.append(TowerLevel(k, cur.gens, None))
            return AnnTower(levels, k)
        bs = []
        for g in missing:
            b = minimal_central_polynomial(cur, g, max_degree=32)
            if b is None:
                raise NonPrincipalStep(f"no central polynomial moves {g} into level {k}")
            bs.append(b.to_ring(R))
        c = reduce(_lcm_univariate, bs)
        if c.total_degree() != 1:
            raise NonPrincipalStep(f"connecting polynomial {c} at level {k} is not linear")
        if verify_colon:
            col = colon_by_central(cur, c.to_ring(d.weyl))
            if not (col.issubset(nxt) and nxt.issubset(col)):
                raise NonPrincipalStep(f"colon by {c} at level {k} is not the next level")
        levels.append(TowerLevel(k, cur.gens, c))
        cur = LeftIdeal(nxt.gens, d.weyl)
        k = nxt_k


def _lcm_univariate(a: Polynomial, b: Polynomial) -> Polynomial:
    from .logderiv import polynomial_gcd

    g = polynomial_gcd(a, b)
    return gb.divide_exact(a * b, g).monic()


@_scoped
def gdl_witness(d: Divisor, data: AnnData, tower: AnnTower | None = None) -> Polynomial:
    """Monic ``beta(s)`` with ``beta * ann f^s`` inside ``ann^(1)``, verified directly."""
    R = s_ring()
    if tower is not None and tower.complete:
        beta = reduce(lambda a, b: a * b, tower.factors, R.one())
    else:
        bs = [minimal_central_polynomial(data.ann1, g, max_degree=64) for g in data.extra_generators()]
        if any(b is None for b in bs):
            raise NonPrincipalStep("ann f^s / ann^(1) is not s-torsion")
        beta = reduce(_lcm_univariate, [b.to_ring(R) for b in bs], R.one())
    betaW = beta.to_ring(d.weyl)
    for g in data.basis:
        if not data.ann1.contains(betaW * g):
            raise InvariantError(f"beta * {g} is not in ann^(1)")
    return beta.monic()


@_scoped
def gr_ann_check(d: Divisor, data: AnnData, k: ReesKernel) -> bool:
    """Do the total-order symbols of ``ann f^s`` generate ``ker(phi)``?"""
    S = k.ring
    I = Ideal([symbol(g, "FT", S) for g in data.basis], S)
    return I.issubset(k.full) and k.full.issubset(I)


# ---------------------------------------------------------------------------
# Spencer-type properties


def bracket_coefficients(d: Divisor, basis: Sequence[LogDerivation], i: int, j: int) -> list[Polynomial]:
    """``a`` with ``[delta_i, delta_j] = sum a_k delta_k`` (Cramer's rule)."""
    br = bracket(basis[i], basis[j], d)
    rows = [list(b.coeffs) for b in basis]
    det = determinant(rows)
    out = []
    for k in range(len(basis)):
        m = list(rows)
        m[k] = list(br.coeffs)
        out.append(gb.divide_exact(determinant(m), det))
    return out


def spencer_relations(d: Divisor, basis: Sequence[LogDerivation], W: WeylAlgebra,
                      subset: Sequence[int] | None = None) -> list[list[WeylElement]]:
    """Relations ``R_ij`` among the operators ``delta_k`` (``k`` in ``subset``)."""
    basis = list(basis)
    idx = list(subset) if subset is not None else list(range(len(basis)))
    ops = [b.operator(W) for b in basis]
    rels = []
    for a_pos, i in enumerate(idx):
        for b_pos in range(a_pos + 1, len(idx)):
            j = idx[b_pos]
            coeffs = bracket_coefficients(d, basis, i, j)
            if any(coeffs[k] for k in range(len(basis)) if k not in idx):
                raise ValueError("the chosen derivations are not closed under brackets")
            rel = [coeffs[k].to_ring(W) for k in idx]
            rel[a_pos] = rel[a_pos] + ops[j]
            rel[b_pos] = rel[b_pos] - ops[i]
            rels.append(rel)
    return rels


@_scoped
def spencer_syzygy_test(gens: Sequence[WeylElement], relations: Sequence[Sequence[WeylElement]]) -> bool:
    """Are all left syzygies of ``gens`` combinations of ``relations``?"""
    W = gens[0].ring
    for rel in relations:
        total = sum((a * g for a, g in zip(rel, gens)), W.zero())
        if total:
            raise InvariantError("a Spencer relation is not a syzygy")
    syz = gb.syzygies(list(gens))
    if not relations:
        return len(syz.generators) == 0
    comps = list(range(len(gens)))
    G = gb.buchberger(W, [gb.vector_terms(W, r, comps) for r in relations], product_criterion=False)
    basis = gb.make_basis(W, G)
    return all(not gb.reduce_terms(W, gb.vector_terms(W, v, comps), basis) for v in syz)


def f_order(x: Sequence[str]) -> MonomialOrder:
    return MonomialOrder.weighted({f"d{v}": 1 for v in x}, MonomialOrder.degrevlex())


@_scoped
def holonomicity_test(gens: Sequence[WeylElement]) -> bool:
    """Characteristic dimension of ``D / D gens`` equals ``n``."""
    W = gens[0].ring
    x = W.signature.block("x")
    F = weyl_algebra(list(x), order=f_order(x))
    I = LeftIdeal([g.to_ring(F) for g in gens], F)
    S = symbol_ring(F, with_s=False)
    char = Ideal([symbol(g, "F", S) for g in I.groebner()], S)
    return gb.dimension(char) == len(x)


@dataclass
class PreSpencerResult:
    holds: bool
    method: str


@_scoped
def pre_spencer_test(d: Divisor, basis: Sequence[LogDerivation], theta: Sequence[ThetaOperator],
                     gk: bool) -> PreSpencerResult:
    basis = list(basis)
    if gk:
        ann1 = LeftIdeal([t.operator for t in theta], d.weyl)
        col = colon_by_central(ann1, d.weyl.gen("s"))
        return PreSpencerResult(col.issubset(ann1), "s-torsion criterion")
    W = d.weyl0
    ops = [b.operator(W) for b in basis]
    rels = spencer_relations(d, basis, W)
    return PreSpencerResult(spencer_syzygy_test(ops, rels), "direct syzygy")


@_scoped
def spencer_test(d: Divisor, basis: Sequence[LogDerivation], pre_spencer: bool) -> bool:
    return pre_spencer and holonomicity_test([b.operator(d.weyl0) for b in basis])


def integer_roots_below(b: Polynomial, bound: int = -1) -> list[int]:
    """Integer roots ``r < bound`` of a univariate polynomial."""
    coeffs = [abs(c) for c in b.terms.values()]
    lead = abs(b.leading_coefficient())
    cauchy = int(1 + max(coeffs) / lead) + 1
    var = b.ring.names[0]
    return [r for r in range(-cauchy, bound) if not b.evaluate({var: r})]


@dataclass
class AnnInverseResult:
    holds: bool | None
    status: str


@_scoped
def ann_f_inverse_check(d: Divisor, b: Polynomial, data: AnnData) -> AnnInverseResult:
    """Is ``ann_D f^-1`` generated by the ``delta_i + alpha_i``?"""
    bad = integer_roots_below(b, -1)
    if bad:
        return AnnInverseResult(None, f"inconclusive: b has integer roots {bad} below -1")
    W = d.weyl0
    specialized = [g.subs({"s": -1}).to_ring(W) for g in data.basis]
    target = LeftIdeal([(t.delta.operator(W) + t.delta.weight.to_ring(W)) for t in data.theta], W)
    at_minus_one = LeftIdeal([g for g in specialized if g], W)
    holds = at_minus_one.issubset(target) and target.issubset(at_minus_one)
    return AnnInverseResult(holds, "specialization at s = -1")


def lct_test(pre_spencer: bool | None, ann_inverse: bool | None) -> bool | None:
    if pre_spencer is False or ann_inverse is False:
        return False
    if pre_spencer is None or ann_inverse is None:
        return None
    return True


@dataclass
class FunctionalEquation:
    P: WeylElement
    order: int
    in_ann1: bool
    strategy: str = "direct"
    generators: int = 0  # size of the saturated generator system (process strategy)


@_scoped
def functional_equation(d: Divisor, b: Polynomial, data: AnnData, strategy: str = "auto",
                        process_threshold: int = 9, max_rounds: int = 12) -> FunctionalEquation:
    """``P`` with ``b(s) - P f`` in ``ann f^s`` (and whether it lies in ``ann^(1)``).

    ``direct`` lifts ``b`` against a Gröbner basis of ``ann f^s + D[s] f``;
    ``process`` works inside ``D[s](f, Theta)`` by symbol-level division (see
    ``SymbolDivision``).  ``auto`` picks ``process`` when ``deg b`` reaches
    ``process_threshold``.
    """
    if strategy == "auto":
        strategy = "process" if b.total_degree() >= process_threshold else "direct"
    if strategy == "direct":
        return _fe_direct(d, b, data)
    if strategy == "process":
        return _fe_process(d, b, data, max_rounds)
    raise ValueError(f"unknown strategy {strategy!r}")


def _fe_direct(d: Divisor, b: Polynomial, data: AnnData) -> FunctionalEquation:
    # the cofactor of f sits in the dominant tracking slot, so the lift
    # normalizes it against {Q : Q f in ann f^s} under the total-order
    # compatible operator order
    W = d.weyl
    fW = d.f.to_ring(W)
    gens = list(data.basis) + [fW]
    L = Lifter(gens, W)
    rest, coeffs = L.remainder(b.to_ring(W))
    if rest:
        raise InvariantError(f"b(s) is not in ann f^s + D[s] f (remainder {rest})")
    P = coeffs[-1]
    residue = b.to_ring(W) - P * fW
    if not data.ann.contains(residue):
        raise InvariantError("functional equation residue is not in ann f^s")
    return FunctionalEquation(P, P.total_order(), data.ann1.contains(residue), "direct", len(gens))


def _fe_process(d: Divisor, b: Polynomial, data: AnnData, max_rounds: int) -> FunctionalEquation:
    W = d.weyl
    base = [d.f.to_ring(W)] + [t.operator for t in data.theta]
    div = SymbolDivision(W, base)
    bW = b.to_ring(W)
    for rnd in range(max_rounds + 1):
        rest, rep = div.reduce(bW, [W.zero()] * len(base))
        if not rest:
            break
        log.info("process round %d: %d generators, remainder of total order %d",
                 rnd, len(div.gens), rest.total_order())
        if not div.saturate_once():
            raise NonPrincipalStep("generator saturation stopped before b(s) was reached")
    else:
        raise NonPrincipalStep(f"b(s) not reached after {max_rounds} saturation rounds")
    P = rep[0]
    residue = bW - P * base[0]
    if residue != sum((c * g for c, g in zip(rep[1:], base[1:])), W.zero()):
        raise InvariantError("tracked representation does not reproduce b(s)")
    return FunctionalEquation(P, P.total_order(), True, "process", len(div.gens))


@dataclass
class _Tracked:
    op: WeylElement
    rep: list[WeylElement]  # op = sum rep[i] * base[i]
    sym: Polynomial
    deg: int


class SymbolDivision:
    """Generators of a left ideal of ``D[s]`` grown towards an involutive basis.

    Each generator remembers how it is built from the starting ones.  A
    round lifts every syzygy of the total-order symbols to ``D[s]``; lifts
    whose symbol is not already in the symbol ideal become new generators.
    ``reduce`` is the filtered division: it removes the leading form while it
    lies in the symbol ideal.
    """

    def __init__(self, W: WeylAlgebra, base: Sequence[WeylElement]):
        self.W = W
        self.S = symbol_ring(W)
        if len(self.S.names) != len(W.names):
            raise ValueError("symbol ring and operator ring do not line up")
        self.base = list(base)
        zero = W.zero()
        self.gens: list[_Tracked] = []
        for i, g in enumerate(self.base):
            rep = [zero] * len(self.base)
            rep[i] = W.one()
            self.gens.append(self._tracked(g, rep))
        self._lifter: Lifter | None = None

    def _tracked(self, op, rep) -> _Tracked:
        return _Tracked(op, rep, symbol(op, "FT", self.S), op.total_order())

    def _weight(self, e) -> int:
        # total-order weight of a symbol monomial: xi and s count
        n = len(self.W.signature.block("x"))
        return sum(e[n:])

    def _part(self, c: Polynomial, k: int) -> Polynomial:
        return self.S.from_dict({e: a for e, a in c.as_dict().items() if self._weight(e) == k})

    def _lift(self, c: Polynomial) -> WeylElement:
        return self.W.from_dict(c.as_dict())

    @property
    def lifter(self) -> Lifter:
        if self._lifter is None:
            self._lifter = Lifter([g.sym for g in self.gens], self.S)
        return self._lifter

    def reduce(self, R: WeylElement, rep: list[WeylElement]) -> tuple[WeylElement, list[WeylElement]]:
        """Return ``(R', rep')`` with ``R - R' = sum (rep' - rep)_i base_i``."""
        rep = list(rep)
        while R:
            k = R.total_order()
            coeffs = self.lifter.lift(symbol(R, "FT", self.S))
            if coeffs is None:
                break
            for c, g in zip(coeffs, self.gens):
                h = self._part(c, k - g.deg)
                if not h:
                    continue
                L = self._lift(h)
                R = R - L * g.op
                rep = [a + L * r for a, r in zip(rep, g.rep)]
            if R and R.total_order() >= k:
                raise InvariantError("filtered division did not lower the total order")
            gb._check()
        return R, rep

    def saturate_once(self) -> bool:
        """One round of syzygy lifting; ``True`` when generators were added."""
        syz = gb.syzygies([g.sym for g in self.gens])
        added = []
        zero = self.W.zero()
        for v in syz:
            degrees = {self._weight(e) + g.deg for c, g in zip(v, self.gens) for e in c.as_dict()}
            for D in sorted(degrees):
                Q = zero
                rep = [zero] * len(self.base)
                for c, g in zip(v, self.gens):
                    h = self._part(c, D - g.deg)
                    if not h:
                        continue
                    L = self._lift(h)
                    Q = Q + L * g.op
                    rep = [a + L * r for a, r in zip(rep, g.rep)]
                # reduce lowers Q while tracking what was subtracted
                R, sub = self.reduce(Q, [zero] * len(self.base))
                if R:
                    added.append(self._tracked(R, [a - s_ for a, s_ in zip(rep, sub)]))
        if not added:
            return False
        self.gens.extend(added)
        self._lifter = None
        return True


@_scoped
def regular_equation_possible(k: ReesKernel, d: Divisor, degree: int) -> bool:
    """``s^degree`` in ``(f) + ker(phi)``: necessary for ``P`` of total order ``degree``."""
    S = k.ring
    I = Ideal(k.full.gens + [d.f.to_ring(S)], S)
    return I.contains(S.gen("s") ** degree)


@dataclass
class GeneratedBy:
    holds: bool
    details: list[tuple[WeylElement, bool]] = field(default_factory=list)


@_scoped
def ann_f_generated_by(d: Divisor, data: AnnData) -> GeneratedBy:
    """Does ``T f`` lie in ``D (delta_i : alpha_i = 0)`` for each extra generator ``T``?

    ``s`` is eliminated from ``T`` using the Euler-type element
    ``delta - c s`` of ``Theta``, substituting ``s^k -> (delta / c)^k`` on the right.
    """
    W0 = d.weyl0
    euler = [t for t in data.theta if t.delta.constant_weight]
    zero = [t.delta.operator(W0) for t in data.theta if not t.delta.weight]
    if not euler:
        raise NotApplicable("no constant-weight Euler field in the basis")
    E = euler[-1].delta
    sub = E.operator(W0) / E.constant_weight
    fW = d.f.to_ring(W0)
    target = LeftIdeal(zero, W0) if zero else None
    details = []
    for T in data.extra_generators():
        T0 = eliminate_s(T, sub, W0)
        ok = target is not None and target.contains(T0 * fW)
        details.append((T0, ok))
    return GeneratedBy(all(ok for _, ok in details), details)


def eliminate_s(T: WeylElement, sub: WeylElement, W0: WeylAlgebra) -> WeylElement:
    W = T.ring
    si = W.index("s")
    by_power: dict[int, dict] = {}
    for e, c in T.as_dict().items():
        k = e[si]
        rest = list(e)
        rest[si] = 0
        by_power.setdefault(k, {})[tuple(rest)] = c
    out = W0.zero()
    for k, terms in by_power.items():
        coeff = W.from_dict(terms).to_ring(W0)
        out = out + coeff * sub ** k
    return out


# ---------------------------------------------------------------------------
# univariate helpers for reporting


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def rational_roots(b: Polynomial) -> list[tuple[mpq, int]]:
    """Rational roots with multiplicities, in increasing order."""
    var = b.ring.names[0]
    p = b
    lcm_den = 1
    for c in p.terms.values():
        lcm_den = lcm_den * int(c.denominator) // _gcd(lcm_den, int(c.denominator))
    p = p * lcm_den
    roots: dict[mpq, int] = {}
    while p.degree(var) > 0:
        coeffs = {e[0]: c for e, c in p.as_dict().items()}
        low = min(coeffs)
        if low > 0:
            roots[mpq(0)] = roots.get(mpq(0), 0) + low
            p = gb.divide_exact(p, p.ring.gen(var) ** low)
            continue
        a0, an = int(coeffs[0]), int(coeffs[max(coeffs)])
        found = None
        for q in _divisors(an):
            for r in _divisors(a0):
                for cand in (mpq(r, q), mpq(-r, q)):
                    if not p.evaluate({var: cand}):
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots[found] = roots.get(found, 0) + 1
        p = gb.divide_exact(p, p.ring.gen(var) - found)
    return sorted(roots.items())


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def factored_text(b: Polynomial) -> str:
    """``(s + 1)^3*(s + 1/2)*...`` when ``b`` splits over Q, else the expanded text."""
    roots = rational_roots(b)
    if sum(m for _, m in roots) != b.total_degree():
        return str(b)
    var = b.ring.names[0]
    parts = []
    for r, m in sorted(roots, key=lambda rm: (-rm[1], -rm[0])):
        c = -r
        body = var if c == 0 else f"{var} {'+' if c > 0 else '-'} {abs(c)}"
        body = f"({body})"
        parts.append(body if m == 1 else f"{body}^{m}")
    lc = b.leading_coefficient()
    prefix = "" if lc == 1 else f"{lc}*"
    return prefix + "*".join(parts) if parts else str(b)
