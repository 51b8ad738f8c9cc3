"""A small language of polynomial and valuation conditions, and its evaluator.

Grammar (whitespace is free, ``!`` binds tighter than ``&`` which binds
tighter than ``|``)::

    expr  := disj
    disj  := conj ("|" conj)*
    conj  := unary ("&" unary)*
    unary := "!" unary | "(" expr ")" | atom
    atom  := poly "=" poly
           | "val" "(" poly ")" cmp INT          cmp in = >= > <= <
           | "rv" "(" poly ")" "=" "(" INT "," INT ")"
    poly  := term (("+" | "-") term)*
    term  := factor ("*" factor)*
    factor:= ("-" | "+") factor | base ("^" INT)?
    base  := INT | x1 | x2 | ... | "(" poly ")"

Evaluation is exact mod p^m.  A polynomial value that is 0 mod p^m is read
as "valuation at least m"; atoms whose truth would need more digits raise
PrecisionExhausted, and points where the "= 0" convention was used are
flagged as precision-sensitive.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import PadicContext, val_array
from .errors import DegreeOverflow, EmptySet, ExprSyntaxError, PrecisionExhausted, UnknownVariable
from .geometry import Ball, Coloring

MAX_DEGREE = 16


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Integer polynomial as {monomial: coefficient}; a monomial is a sorted tuple of (var, exp)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: int(c) for k, c in (terms or {}).items() if int(c) != 0}

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, i: int) -> "Poly":
        return cls({((i, 1),): 1})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                exps = dict(k1)
                for v, e in k2:
                    exps[v] = exps.get(v, 0) + e
                k = tuple(sorted(exps.items()))
                out[k] = out.get(k, 0) + c1 * c2
        return Poly(out)

    def __pow__(self, e: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def degree(self) -> int:
        return max((sum(e for _, e in k) for k in self.terms), default=0)

    def variables(self) -> set[int]:
        return {v for k in self.terms for v, _ in k}

    def max_var(self) -> int:
        return max(self.variables(), default=0)

    def derivative(self, i: int) -> "Poly":
        out: dict = {}
        for k, c in self.terms.items():
            exps = dict(k)
            e = exps.get(i, 0)
            if e == 0:
                continue
            if e == 1:
                del exps[i]
            else:
                exps[i] = e - 1
            kk = tuple(sorted(exps.items()))
            out[kk] = out.get(kk, 0) + c * e
        return Poly(out)

    def evaluate(self, coords, q: int) -> np.ndarray:
        """Value mod q at coordinate arrays; coords[i] holds variable x_{i+1}."""
        shape = np.shape(coords[0]) if len(coords) else ()
        out = np.zeros(shape, dtype=np.int64)
        cache: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in cache:
                base = np.asarray(coords[v - 1], dtype=np.int64) % q
                acc = np.ones(shape, dtype=np.int64)
                for _ in range(e):
                    acc = (acc * base) % q
                cache[key] = acc
            return cache[key]

        for k, c in self.terms.items():
            term = np.full(shape, c % q, dtype=np.int64)
            for v, e in k:
                term = (term * power(v, e)) % q
            out = (out + term) % q
        return out

    def eval_point(self, x, q: int) -> int:
        return int(self.evaluate([np.int64(a) for a in x], q))

    def _key(self, k):
        return (-sum(e for _, e in k), k)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=self._key):
            c = self.terms[k]
            mono = "*".join(f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in k)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({self})"


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class PolyZero:
    poly: Poly

    def __str__(self):
        return f"{self.poly} = 0"


CMP_OPS = ("=", ">=", ">", "<=", "<")


@dataclass(frozen=True)
class ValCmp:
    poly: Poly
    op: str
    bound: int

    def __str__(self):
        return f"val({self.poly}) {self.op} {self.bound}"


@dataclass(frozen=True)
class RvEq:
    poly: Poly
    lam: int
    u: int

    def __str__(self):
        return f"rv({self.poly}) = ({self.lam}, {self.u})"


@dataclass(frozen=True)
class Not:
    arg: object

    def __str__(self):
        return "!" + _wrap(self.arg, 3)


@dataclass(frozen=True)
class And:
    left: object
    right: object

    def __str__(self):
        return f"{_wrap(self.left, 2)} & {_wrap(self.right, 2, right=True)}"


@dataclass(frozen=True)
class Or:
    left: object
    right: object

    def __str__(self):
        return f"{_wrap(self.left, 1)} | {_wrap(self.right, 1, right=True)}"


SetExpr = object  # any of the node classes above


def _prec(node) -> int:
    if isinstance(node, Or):
        return 1
    if isinstance(node, And):
        return 2
    if isinstance(node, Not):
        return 3
    return 4


def _wrap(node, level: int, right: bool = False) -> str:
    p = _prec(node)
    # binary operators are parsed left-associatively, so a right operand of
    # the same precedence needs parentheses to survive a round trip
    if p < level or (right and p == level and level < 3):
        return f"({node})"
    return str(node)


def to_text(node) -> str:
    return str(node)


def atoms(node) -> Iterator:
    if isinstance(node, (PolyZero, ValCmp, RvEq)):
        yield node
    elif isinstance(node, Not):
        yield from atoms(node.arg)
    elif isinstance(node, (And, Or)):
        yield from atoms(node.left)
        yield from atoms(node.right)


def max_variable(node) -> int:
    return max((a.poly.max_var() for a in atoms(node)), default=0)


# ---------------------------------------------------------------------------
# parser


@dataclass
class _Tok:
    kind: str  # INT, VAR, KW, OP, EOF
    value: object
    line: int
    col: int


_ALIASES = {"≥": ">=", "≤": "<=", "∧": "&", "∨": "|", "¬": "!", "−": "-"}
_TWO = (">=", "<=", "==")
_ONE = set("+-*^(),&|!=<>")


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    line, col = 1, 1
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _ALIASES:
            toks.append(_Tok("OP", _ALIASES[ch], line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(_Tok("INT", int(text[i:j]), line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in ("val", "rv"):
                toks.append(_Tok("KW", word, line, col))
            elif word[0] == "x" and word[1:].isdigit():
                idx = int(word[1:])
                if idx == 0:
                    raise UnknownVariable(f"line {line}, col {col}: variables start at x1")
                toks.append(_Tok("VAR", idx, line, col))
            else:
                raise UnknownVariable(f"line {line}, col {col}: unknown identifier {word!r}")
            col += j - i
            i = j
            continue
        two = text[i : i + 2]
        if two in _TWO:
            toks.append(_Tok("OP", "=" if two == "==" else two, line, col))
            i += 2
            col += 2
            continue
        if ch in _ONE:
            toks.append(_Tok("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise ExprSyntaxError(line, col, "a token", ch)
    toks.append(_Tok("EOF", None, line, col))
    return toks


class _Parser:
    def __init__(self, text: str, n: int | None):
        self.toks = _tokenize(text)
        self.pos = 0
        self.n = n

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def at(self, kind, value=None) -> bool:
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind, value=None, what=None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (value is not None and t.value != value):
            got = "end of input" if t.kind == "EOF" else str(t.value)
            raise ExprSyntaxError(t.line, t.col, what or (repr(value) if value else kind), got)
        self.pos += 1
        return t

    def parse(self):
        node = self.disj()
        self.expect("EOF", what="end of input")
        return node

    def disj(self):
        node = self.conj()
        while self.at("OP", "|"):
            self.pos += 1
            node = Or(node, self.conj())
        return node

    def conj(self):
        node = self.unary()
        while self.at("OP", "&"):
            self.pos += 1
            node = And(node, self.unary())
        return node

    def unary(self):
        if self.at("OP", "!"):
            self.pos += 1
            return Not(self.unary())
        if self.at("OP", "("):
            save = self.pos
            try:
                self.pos += 1
                node = self.disj()
                self.expect("OP", ")")
                if not (self.at("OP") and self.peek().value in ("=", "+", "-", "*", "^")):
                    return node
            except ExprSyntaxError as exc:
                first_err = exc
                first_pos = self.pos
            else:
                first_err = None
                first_pos = self.pos
            self.pos = save
            try:
                return self.atom()
            except ExprSyntaxError as exc:
                if first_err is not None and first_pos > self.pos:
                    raise first_err
                raise exc
        return self.atom()

    def atom(self):
        if self.at("KW", "val"):
            self.pos += 1
            self.expect("OP", "(")
            f = self.poly()
            self.expect("OP", ")")
            t = self.peek()
            if t.kind != "OP" or t.value not in CMP_OPS:
                got = "end of input" if t.kind == "EOF" else str(t.value)
                raise ExprSyntaxError(t.line, t.col, "comparison", got)
            self.pos += 1
            c = self.expect("INT", what="INT").value
            return ValCmp(f, t.value, c)
        if self.at("KW", "rv"):
            self.pos += 1
            self.expect("OP", "(")
            f = self.poly()
            self.expect("OP", ")")
            self.expect("OP", "=")
            self.expect("OP", "(")
            lam = self.expect("INT", what="INT").value
            self.expect("OP", ",")
            u = self.expect("INT", what="INT").value
            self.expect("OP", ")")
            return RvEq(f, lam, u)
        lhs = self.poly()
        self.expect("OP", "=", what="'='")
        rhs = self.poly()
        return PolyZero(lhs - rhs)

    def _check_degree(self, f: Poly, tok: _Tok) -> Poly:
        if f.degree() > MAX_DEGREE:
            raise DegreeOverflow(f"line {tok.line}, col {tok.col}: degree {f.degree()} exceeds {MAX_DEGREE}")
        return f

    def poly(self):
        tok = self.peek()
        f = self.term()
        while self.at("OP", "+") or self.at("OP", "-"):
            op = self.peek().value
            self.pos += 1
            g = self.term()
            f = f + g if op == "+" else f - g
        return self._check_degree(f, tok)

    def term(self):
        tok = self.peek()
        f = self.factor()
        while self.at("OP", "*"):
            self.pos += 1
            f = self._check_degree(f * self.factor(), tok)
        return f

    def factor(self):
        if self.at("OP", "-"):
            self.pos += 1
            return -self.factor()
        if self.at("OP", "+"):
            self.pos += 1
            return self.factor()
        tok = self.peek()
        base = self.base()
        if self.at("OP", "^"):
            self.pos += 1
            e = self.expect("INT", what="INT").value
            if e * max(base.degree(), 1) > MAX_DEGREE and base.degree() > 0:
                raise DegreeOverflow(f"line {tok.line}, col {tok.col}: exponent {e} exceeds degree limit")
            base = base**e
        return base

    def base(self):
        t = self.peek()
        if t.kind == "INT":
            self.pos += 1
            return Poly.const(t.value)
        if t.kind == "VAR":
            self.pos += 1
            if self.n is not None and t.value > self.n:
                raise UnknownVariable(f"line {t.line}, col {t.col}: x{t.value} but n = {self.n}")
            return Poly.var(t.value)
        if self.at("OP", "("):
            self.pos += 1
            f = self.poly()
            self.expect("OP", ")")
            return f
        got = "end of input" if t.kind == "EOF" else str(t.value)
        raise ExprSyntaxError(t.line, t.col, "polynomial", got)


def parse(text: str, n: int | None = None):
    """Parse text into a SetExpr; ``n`` bounds the admissible variables."""
    return _Parser(text, n).parse()


def parse_poly(text: str, n: int | None = None) -> Poly:
    p = _Parser(text, n)
    f = p.poly()
    p.expect("EOF", what="end of input")
    return f


# ---------------------------------------------------------------------------
# evaluation


class FiniteSet:
    """A subset of (Z/p^m)^n as a boolean array of shape (q,)*n."""

    def __init__(self, ctx: PadicContext, mask, sensitive=None, expr: str | None = None):
        self.ctx = ctx
        self.mask = np.asarray(mask, dtype=bool).reshape((ctx.q,) * ctx.n)
        self.sensitive = (
            np.zeros_like(self.mask) if sensitive is None else np.asarray(sensitive, dtype=bool).reshape(self.mask.shape)
        )
        self.expr = expr

    @classmethod
    def from_points(cls, ctx: PadicContext, points) -> "FiniteSet":
        mask = np.zeros((ctx.q,) * ctx.n, dtype=bool)
        for x in points:
            mask[tuple(int(c) % ctx.q for c in x)] = True
        return cls(ctx, mask)

    @classmethod
    def empty(cls, ctx: PadicContext) -> "FiniteSet":
        return cls(ctx, np.zeros((ctx.q,) * ctx.n, dtype=bool))

    @classmethod
    def full(cls, ctx: PadicContext) -> "FiniteSet":
        return cls(ctx, np.ones((ctx.q,) * ctx.n, dtype=bool))

    def __len__(self):
        return int(self.mask.sum())

    def __bool__(self):
        return bool(self.mask.any())

    def __contains__(self, x):
        return bool(self.mask[tuple(int(c) % self.ctx.q for c in x)])

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and self.ctx == other.ctx and np.array_equal(self.mask, other.mask)

    def __iter__(self):
        return iter(self.points())

    def points(self) -> list[tuple[int, ...]]:
        return [tuple(k) for k in np.argwhere(self.mask).tolist()]

    def __or__(self, other):
        return FiniteSet(self.ctx, self.mask | other.mask)

    def __and__(self, other):
        return FiniteSet(self.ctx, self.mask & other.mask)

    def __sub__(self, other):
        return FiniteSet(self.ctx, self.mask & ~other.mask)

    def issubset(self, other) -> bool:
        return bool(np.all(~self.mask | other.mask))

    def in_ball(self, ball: Ball) -> np.ndarray:
        """Membership array indexed by the ball's relative coordinates."""
        return self.mask[tuple(ball.coords_grid())]

    def indicator(self, ball: Ball | None = None) -> Coloring:
        ball = ball or Ball.whole(self.ctx)
        return Coloring(ball, self.in_ball(ball).astype(np.int64))

    def to_json(self) -> dict:
        out = {"ctx": self.ctx.to_json(), "points": self.points()}
        if self.expr is not None:
            out["expr"] = self.expr
        return out


def _atom_values(atom, grid, ctx: PadicContext):
    """(truth, sensitive) arrays; raises PrecisionExhausted where undecidable."""
    p, m, q = ctx.p, ctx.m, ctx.q
    f = atom.poly.evaluate(grid, q)
    zero = f == 0
    if isinstance(atom, PolyZero):
        return zero, zero
    v = val_array(f, p, m)
    if isinstance(atom, ValCmp):
        c, op = atom.bound, atom.op
        exact = {
            "=": v == c,
            ">=": v >= c,
            ">": v > c,
            "<=": v <= c,
            "<": v < c,
        }[op]
        # at zero the true valuation is some unknown value >= m
        if op in (">=", ">"):
            decided = c <= m if op == ">=" else c < m
            return np.where(zero, True, exact), zero & (not decided)
        undecidable = {"=": c >= m, "<=": c >= m, "<": c > m}[op]
        if undecidable and zero.any():
            _raise_at(zero, atom)
        return np.where(zero, False, exact), np.zeros_like(zero)
    if isinstance(atom, RvEq):
        if atom.lam >= m and zero.any():
            _raise_at(zero, atom)
        lam = min(atom.lam, m - 1)
        digit = (f // p**lam) % p
        truth = (v == atom.lam) & (digit == atom.u % p) & (atom.u % p != 0)
        return truth & ~zero, np.zeros_like(zero)
    raise TypeError(f"not an atom: {atom!r}")


def _raise_at(where: np.ndarray, atom):
    pt = tuple(int(a) for a in np.argwhere(where)[0])
    raise PrecisionExhausted(f"atom '{atom}' is undecidable at {pt}", detail=(pt, str(atom)))


def _eval(node, grid, ctx):
    if isinstance(node, (PolyZero, ValCmp, RvEq)):
        return _atom_values(node, grid, ctx)
    if isinstance(node, Not):
        t, s = _eval(node.arg, grid, ctx)
        return ~t, s
    if isinstance(node, And):
        t1, s1 = _eval(node.left, grid, ctx)
        t2, s2 = _eval(node.right, grid, ctx)
        return t1 & t2, s1 | s2
    if isinstance(node, Or):
        t1, s1 = _eval(node.left, grid, ctx)
        t2, s2 = _eval(node.right, grid, ctx)
        return t1 | t2, s1 | s2
    raise TypeError(f"not a SetExpr node: {node!r}")


def evaluate(expr, ctx: PadicContext) -> FiniteSet:
    if isinstance(expr, str):
        text = expr
        expr = parse(expr, ctx.n)
    else:
        text = str(expr)
    if max_variable(expr) > ctx.n:
        raise UnknownVariable(f"x{max_variable(expr)} used with n = {ctx.n}")
    grid = ctx.grid()
    truth, sens = _eval(expr, grid, ctx)
    return FiniteSet(ctx, truth, sens, expr=text)


def dim_estimate(X: FiniteSet) -> int:
    """Largest d such that some d-coordinate projection of X contains a ball of depth m-1."""
    if not X:
        raise EmptySet("dim_estimate of the empty set")
    ctx = X.ctx
    n, p, m = ctx.n, ctx.p, ctx.m
    for d in range(n, 0, -1):
        for idx in itertools.combinations(range(n), d):
            other = tuple(i for i in range(n) if i not in idx)
            img = X.mask.any(axis=other) if other else X.mask
            split = sum(((p, p ** (m - 1)) for _ in range(d)), ())
            full = img.reshape(split).all(axis=tuple(2 * i for i in range(d)))
            if full.any():
                return d
    return 0


def coloring_from_sets(ball: Ball, sets) -> Coloring:
    """Partition of the ball by membership vectors in the given sets."""
    arrs = [s.in_ball(ball).astype(np.int64) for s in sets]
    if not arrs:
        return Coloring.constant(ball)
    base = Coloring(ball, arrs[0])
    return base.product(*[Coloring(ball, a) for a in arrs[1:]])
