"""Exact multivariate polynomials over Q.

Monomials are packed into a single Python int laid out as::

    [component] [order key fields] [exponent fields]

The order key is ``M @ e`` for the (nonnegative, injective) matrix ``M`` of the
active monomial order, so comparing two packed monomials as integers compares
them in that order, and multiplying monomials is integer addition.  The low
exponent fields carry a guard bit each, which makes divisibility a two-op test.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

Rational = mpq

RBITS = 16
EXP_MAX = (1 << (RBITS - 1)) - 1
KBITS = 40

ZERO = mpq(0)
ONE = mpq(1)


def as_rational(c) -> mpq:
    if isinstance(c, str):
        return mpq(c)
    if isinstance(c, float):
        raise TypeError("floating-point coefficients are not supported")
    try:
        return mpq(c)
    except TypeError:
        # fractions.Fraction and friends
        return mpq(c.numerator, c.denominator)


class SignatureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# signatures and orders


@dataclass(frozen=True)
class RingSignature:
    """Ordered variable names split into named blocks.

    Block names used across the package: ``x`` (base), ``xi`` (symbols),
    ``s``, ``t``, ``d`` (momenta), ``dt`` and ``aux``.
    """

    blocks: tuple[tuple[str, tuple[str, ...]], ...]
    names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        names = tuple(v for _, vs in self.blocks for v in vs)
        if not names:
            raise SignatureError("a ring needs at least one variable")
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate variable names in {names}")
        kinds = [b for b, _ in self.blocks]
        if len(set(kinds)) != len(kinds):
            raise SignatureError(f"duplicate block names in {kinds}")
        for v in names:
            if not re.fullmatch(r"[A-Za-z]+[0-9]*", v):
                raise SignatureError(f"bad variable name {v!r}")
        object.__setattr__(self, "names", names)

    @classmethod
    def build(cls, x: Sequence[str], **blocks: Sequence[str] | str | None) -> RingSignature:
        items = [("x", tuple(x))]
        for k, v in blocks.items():
            if v is None:
                continue
            if isinstance(v, str):
                v = (v,)
            if v:
                items.append((k, tuple(v)))
        return cls(tuple(items))

    def block(self, name: str) -> tuple[str, ...]:
        for b, vs in self.blocks:
            if b == name:
                return vs
        return ()

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SignatureError(f"unknown variable {name!r}") from None

    def __len__(self):
        return len(self.names)


def _degrevlex_rows(idx: Sequence[int], n: int) -> list[list[int]]:
    rows = []
    for k in range(len(idx), 0, -1):
        r = [0] * n
        for i in idx[:k]:
            r[i] = 1
        rows.append(r)
    return rows


def _lex_rows(idx: Sequence[int], n: int) -> list[list[int]]:
    rows = []
    for i in idx:
        r = [0] * n
        r[i] = 1
        rows.append(r)
    return rows


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order, realised as a nonnegative integer matrix order.

    ``kind`` is one of ``lex``, ``degrevlex``, ``block`` or ``weighted``.
    Blocks and weights refer to variables by name so an order can be reused
    across rings that share those names.
    """

    kind: str = "degrevlex"
    blocks: tuple[tuple[tuple[str, ...], str], ...] = ()
    weights: tuple[tuple[str, int], ...] = ()
    tiebreak: MonomialOrder | None = None

    @classmethod
    def lex(cls) -> MonomialOrder:
        return cls("lex")

    @classmethod
    def degrevlex(cls) -> MonomialOrder:
        return cls("degrevlex")

    @classmethod
    def block(cls, *blocks: Sequence[str], inner: str = "degrevlex") -> MonomialOrder:
        """Block order; earlier blocks dominate, unlisted variables go last."""
        return cls("block", tuple((tuple(b), inner) for b in blocks))

    @classmethod
    def weighted(cls, weights: Mapping[str, int], tiebreak: MonomialOrder | None = None) -> MonomialOrder:
        for v, w in weights.items():
            if w < 0:
                raise ValueError(f"negative weight for {v}: only well-orders are supported")
        return cls("weighted", weights=tuple(sorted(weights.items())),
                   tiebreak=tiebreak or cls.degrevlex())

    def matrix(self, names: Sequence[str]) -> list[list[int]]:
        n = len(names)
        pos = {v: i for i, v in enumerate(names)}
        if self.kind == "lex":
            return _lex_rows(range(n), n)
        if self.kind == "degrevlex":
            return _degrevlex_rows(range(n), n)
        if self.kind == "block":
            seen: list[int] = []
            rows: list[list[int]] = []
            for blk, inner in self.blocks:
                idx = [pos[v] for v in blk if v in pos]
                if not idx:
                    continue
                seen.extend(idx)
                rows += _lex_rows(idx, n) if inner == "lex" else _degrevlex_rows(idx, n)
            rest = [i for i in range(n) if i not in seen]
            if rest:
                rows += _degrevlex_rows(rest, n)
            return rows
        if self.kind == "weighted":
            w = dict(self.weights)
            row = [int(w.get(v, 0)) for v in names]
            return [row] + self.tiebreak.matrix(names)
        raise ValueError(f"unknown order kind {self.kind!r}")

    def key(self, names: Sequence[str], exps: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r * e for r, e in zip(row, exps)) for row in self.matrix(names))


def compare(order: MonomialOrder, names: Sequence[str], a: Sequence[int], b: Sequence[int]) -> int:
    """Return -1, 0 or 1 as monomial ``a`` is smaller, equal or larger than ``b``."""
    if len(a) != len(b) or len(a) != len(names):
        raise SignatureError("arity mismatch")
    ka, kb = order.key(names, a), order.key(names, b)
    return (ka > kb) - (ka < kb)


# ---------------------------------------------------------------------------
# rings


class PolyRing:
    """Commutative polynomial ring Q[names] with a fixed monomial order."""

    commutative = True

    def __init__(self, signature: RingSignature, order: MonomialOrder | None = None):
        self.signature = signature
        self.order = order or MonomialOrder.degrevlex()
        self.names = signature.names
        self.nvars = n = len(self.names)
        self._pos = {v: i for i, v in enumerate(self.names)}
        rows = self.order.matrix(self.names)
        self._rows = rows
        self.kshift = RBITS * n
        self.cshift = self.kshift + KBITS * len(rows)
        self.rmask = (1 << self.kshift) - 1
        self.guard = sum(1 << (RBITS * i + RBITS - 1) for i in range(n))
        self.comp_unit = 1 << self.cshift
        self.units = []
        for i in range(n):
            k = 0
            for r in rows:
                k = (k << KBITS) | r[i]
            self.units.append((k << self.kshift) | (1 << (RBITS * i)))

    # -- monomial packing ---------------------------------------------------

    def pack(self, exps: Sequence[int], comp: int = 0) -> int:
        m = comp << self.cshift
        for e, u in zip(exps, self.units):
            if e:
                if e < 0 or e > EXP_MAX:
                    raise ValueError(f"exponent {e} out of range")
                m += e * u
        return m

    def unpack(self, m: int) -> tuple[int, ...]:
        r = m & self.rmask
        return tuple((r >> (RBITS * i)) & EXP_MAX for i in range(self.nvars))

    def comp(self, m: int) -> int:
        return m >> self.cshift

    def mdeg(self, m: int) -> int:
        r = m & self.rmask
        d = 0
        while r:
            d += r & EXP_MAX
            r >>= RBITS
        return d

    def divides(self, a: int, b: int) -> bool:
        if (a >> self.cshift) != (b >> self.cshift):
            return False
        g = self.guard
        return (((b & self.rmask) | g) - (a & self.rmask)) & g == g

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.unpack(a), self.unpack(b)
        return self.pack([max(x, y) for x, y in zip(ea, eb)], a >> self.cshift)

    def coprime(self, a: int, b: int) -> bool:
        ea, eb = self.unpack(a), self.unpack(b)
        return not any(x and y for x, y in zip(ea, eb))

    # -- multiplication -------------------------------------------------------

    def mul_mono_terms(self, u: int, c, terms: Mapping[int, mpq]) -> dict[int, mpq]:
        """Left multiplication of a term map by the term ``c * u``."""
        if c == 1:
            return {u + m: a for m, a in terms.items()}
        return {u + m: c * a for m, a in terms.items()}

    def mul_terms(self, p: Mapping[int, mpq], q: Mapping[int, mpq]) -> dict[int, mpq]:
        if len(p) > len(q) and self.commutative:
            p, q = q, p
        out: dict[int, mpq] = {}
        get = out.get
        for u, c in p.items():
            for m, a in self.mul_mono_terms(u, c, q).items():
                v = get(m)
                if v is None:
                    out[m] = a
                else:
                    v += a
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        return out

    # -- element construction -------------------------------------------------

    element_class: type

    def _make(self, terms: dict[int, mpq]) -> Polynomial:
        return self.element_class(self, terms)

    def zero(self) -> Polynomial:
        return self._make({})

    def one(self) -> Polynomial:
        return self._make({0: ONE})

    def const(self, c) -> Polynomial:
        c = as_rational(c)
        return self._make({0: c} if c else {})

    def gen(self, name: str) -> Polynomial:
        if name not in self._pos:
            raise SignatureError(f"unknown variable {name!r}")
        return self._make({self.units[self._pos[name]]: ONE})

    def gens(self) -> list[Polynomial]:
        return [self.gen(v) for v in self.names]

    def from_dict(self, d: Mapping[Sequence[int], object]) -> Polynomial:
        terms: dict[int, mpq] = {}
        for e, c in d.items():
            c = as_rational(c)
            if c:
                m = self.pack(e)
                v = terms.get(m, ZERO) + c
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        return self._make(terms)

    def monomial(self, exps: Sequence[int], c=1) -> Polynomial:
        return self.from_dict({tuple(exps): c})

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)

    def index(self, name: str) -> int:
        return self.signature.index(name)

    def with_order(self, order: MonomialOrder) -> PolyRing:
        return type(self)(self.signature, order)

    def __eq__(self, other):
        return type(self) is type(other) and self.signature == other.signature and self.order == other.order

    def __hash__(self):
        return hash((type(self).__name__, self.signature, self.order))

    def __repr__(self):
        return f"{type(self).__name__}({','.join(self.names)}; {self.order.kind})"


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable polynomial; ``terms`` maps packed monomials to nonzero rationals."""

    __slots__ = ("ring", "terms", "_lm")

    def __init__(self, ring: PolyRing, terms: dict[int, mpq]):
        self.ring = ring
        self.terms = terms
        self._lm = None

    # -- inspection -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def lm(self) -> int:
        if self._lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            self._lm = max(self.terms)
        return self._lm

    def leading_monomial(self) -> tuple[int, ...]:
        return self.ring.unpack(self.lm())

    def leading_coefficient(self) -> mpq:
        return self.terms[self.lm()]

    def items(self) -> list[tuple[tuple[int, ...], mpq]]:
        """Terms as ``(exponents, coefficient)``, largest monomial first."""
        up = self.ring.unpack
        return [(up(m), self.terms[m]) for m in sorted(self.terms, reverse=True)]

    def as_dict(self) -> dict[tuple[int, ...], mpq]:
        up = self.ring.unpack
        return {up(m): c for m, c in self.terms.items()}

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.mdeg(m) for m in self.terms)

    def degree(self, name: str) -> int:
        i = self.ring.index(name)
        if not self.terms:
            return -1
        return max(self.ring.unpack(m)[i] for m in self.terms)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [self.ring.index(v) for v in names]
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in map(self.ring.unpack, self.terms))

    def variables(self) -> set[str]:
        used = set()
        for m in self.terms:
            for v, e in zip(self.ring.names, self.ring.unpack(m)):
                if e:
                    used.add(v)
        return used

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms.get(0, ZERO)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise SignatureError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return self.ring._make(out)

    __radd__ = __add__

    def __neg__(self):
        return self.ring._make({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_rational(other)
            if not c:
                return self.ring.zero()
            return self.ring._make({m: c * a for m, a in self.terms.items()})
        other = self._check(other)
        return self.ring._make(self.ring.mul_terms(self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, Polynomial):
            return self._check(other) * self
        return self * other

    def __truediv__(self, c):
        c = as_rational(c)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self * (ONE / c)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self.ring.const(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        return self / self.leading_coefficient()

    def primitive(self) -> Polynomial:
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            den = lcm(den, int(c.denominator))
        num = 0
        for c in self.terms.values():
            num = gcd(num, int(c.numerator * den // c.denominator))
        scale = mpq(den, num)
        if self.leading_coefficient() < 0:
            scale = -scale
        return self * scale

    def derivative(self, name: str) -> Polynomial:
        if not self.ring.commutative:
            raise TypeError("formal derivative is only defined on commutative rings")
        i = self.ring.index(name)
        u = self.ring.units[i]
        out = {}
        for m, c in self.terms.items():
            e = self.ring.unpack(m)[i]
            if e:
                out[m - u] = c * e
        return self.ring._make(out)

    def subs(self, values: Mapping[str, object]) -> Polynomial:
        """Substitute constants or polynomials (of this ring) for variables."""
        ring = self.ring
        idx = {ring.index(v): val for v, val in values.items()}
        result = ring.zero()
        cache: dict[tuple[int, int], Polynomial] = {}
        for m, c in self.terms.items():
            e = list(ring.unpack(m))
            factor = ring.const(c)
            for i, val in idx.items():
                k = e[i]
                if k:
                    e[i] = 0
                    if (i, k) not in cache:
                        v = val if isinstance(val, Polynomial) else ring.const(val)
                        cache[(i, k)] = v ** k
                    factor = factor * cache[(i, k)]
            result = result + ring.monomial(e) * factor
        return result

    def evaluate(self, point: Mapping[str, object]) -> mpq:
        p = self.subs(point)
        if not p.is_constant():
            raise ValueError("evaluation point does not cover all variables")
        return p.constant_value()

    def to_ring(self, target: PolyRing) -> Polynomial:
        """Embed into ``target`` mapping variables by name."""
        src = self.ring.names
        tpos = []
        for v in src:
            tpos.append(target._pos.get(v))
        out: dict[int, mpq] = {}
        for m, c in self.terms.items():
            e = self.ring.unpack(m)
            te = [0] * target.nvars
            for i, k in enumerate(e):
                if k:
                    j = tpos[i]
                    if j is None:
                        raise SignatureError(f"variable {src[i]!r} not present in {target}")
                    te[j] = k
            out[target.pack(te, self.ring.comp(m))] = c
        return target._make(out)

    # -- printing ---------------------------------------------------------------

    def __str__(self):
        return format_terms(self.ring.names, self.items())

    def __repr__(self):
        return f"{type(self).__name__}({self})"


PolyRing.element_class = Polynomial


def _fmt_coeff(c: mpq) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(names: Sequence[str], items: Iterable[tuple[Sequence[int], mpq]]) -> str:
    parts = []
    for e, c in items:
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(names, e) if k)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts) if parts else "0"


def canonical_text(p: Polynomial) -> str:
    """Terms in degrevlex-descending order with explicit rational coefficients."""
    names = p.ring.names
    order = MonomialOrder.degrevlex()
    items = sorted(p.as_dict().items(), key=lambda it: order.key(names, it[0]), reverse=True)
    return format_terms(names, items)


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+[0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("var", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*^()/":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    """Parse ``text`` into an element of ``ring``.

    Grammar: integers and rational literals (``-2/5``), variable identifiers,
    ``+ - * ^`` and parentheses.  No implicit multiplication; ``^`` takes a
    nonnegative integer literal.
    """
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr():
        sign = 1
        if peek()[:2] in (("op", "+"), ("op", "-")):
            sign = -1 if take()[1] == "-" else 1
        acc = term()
        if sign < 0:
            acc = -acc
        while peek()[:2] in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term():
        acc = power()
        while peek()[:2] == ("op", "*"):
            take()
            acc = acc * power()
        return acc

    def power():
        base = atom()
        if peek()[:2] == ("op", "^"):
            take()
            kind, val, pos = take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer", pos)
            base = base ** int(val)
        return base

    def atom():
        kind, val, pos = take()
        if kind == "num":
            if peek()[:2] == ("op", "/"):
                take()
                k2, v2, p2 = take()
                if k2 != "num":
                    raise ParseError("expected denominator", p2)
                if int(v2) == 0:
                    raise ParseError("zero denominator", p2)
                return ring.const(mpq(int(val), int(v2)))
            return ring.const(int(val))
        if kind == "var":
            if val not in ring._pos:
                raise ParseError(f"unknown variable {val!r}", pos)
            return ring.gen(val)
        if (kind, val) == ("op", "("):
            inner = expr()
            k2, v2, p2 = take()
            if (k2, v2) != ("op", ")"):
                raise ParseError("expected ')'", p2)
            return inner
        if (kind, val) == ("op", "-"):
            return -power()
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)

    result = expr()
    kind, val, pos = peek()
    if kind != "end":
        raise ParseError(f"unexpected token {val!r}", pos)
    return result


def polynomial_ring(names: Sequence[str] | str, order: MonomialOrder | None = None, **blocks) -> PolyRing:
    """Convenience constructor: ``polynomial_ring("x,y")``."""
    if isinstance(names, str):
        names = [v.strip() for v in names.split(",") if v.strip()]
    return PolyRing(RingSignature.build(names, **blocks), order)
