"""Finite-precision p-adic arithmetic.

Everything lives in (Z/p^m)^n.  A coordinate is an int in [0, p^m); a value
that is 0 mod p^m is treated as having infinite valuation.  Array helpers use
the integer ``m`` as the stand-in for infinity so that they stay in int64.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import sympy

from .errors import ContextMismatch, InvalidContext, NotUnimodular, TooLarge, ZeroVector

INF = math.inf
PRIMES = (2, 3, 5, 7, 11, 13)
# total point budget for anything that materialises a full grid
MAX_POINTS = 1 << 22


@dataclass(frozen=True)
class PadicContext:
    p: int
    m: int
    n: int

    def __post_init__(self):
        if self.p not in PRIMES:
            raise InvalidContext(f"p must be a prime between 2 and 13, got {self.p}")
        if not 1 <= self.m <= 8:
            raise InvalidContext(f"m must lie in [1, 8], got {self.m}")
        if not 1 <= self.n <= 4:
            raise InvalidContext(f"n must lie in [1, 4], got {self.n}")

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def num_points(self) -> int:
        return self.q**self.n

    def check_size(self, limit: int = MAX_POINTS) -> None:
        if self.num_points > limit:
            raise TooLarge(
                f"(Z/{self.p}^{self.m})^{self.n} has {self.num_points} points, limit is {limit}"
            )

    def point(self, coords: Iterable[int]) -> "Point":
        return Point(self, tuple(coords))

    def scalar(self, value: int) -> "PadicScalar":
        return PadicScalar(self, value)

    def zero(self) -> "Point":
        return Point(self, (0,) * self.n)

    def points(self) -> Iterator[tuple[int, ...]]:
        """All points in lexicographic order."""
        return itertools.product(range(self.q), repeat=self.n)

    def grid(self) -> np.ndarray:
        """Coordinates of all points, shape (n,) + (q,)*n."""
        self.check_size()
        return np.indices((self.q,) * self.n, dtype=np.int64)

    def with_m(self, m: int) -> "PadicContext":
        return PadicContext(self.p, m, self.n)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "PadicContext":
        return cls(int(obj["p"]), int(obj["m"]), int(obj["n"]))


def same_context(*ctxs: PadicContext) -> PadicContext:
    first = ctxs[0]
    for c in ctxs[1:]:
        if c != first:
            raise ContextMismatch(f"{first} vs {c}")
    return first


def valuation_int(a: int, p: int, m: int):
    a %= p**m
    if a == 0:
        return INF
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def valuation_coords(coords: Sequence[int], p: int, m: int):
    return min((valuation_int(c, p, m) for c in coords), default=INF)


def val_array(a: np.ndarray, p: int, m: int) -> np.ndarray:
    """Elementwise valuation of an int array, with m standing for infinity."""
    a = np.asarray(a, dtype=np.int64) % p**m
    out = np.full(a.shape, m, dtype=np.int64)
    for e in range(m - 1, -1, -1):
        out[a % p ** (e + 1) != 0] = e
    return out


def vec_val_array(a: np.ndarray, p: int, m: int) -> np.ndarray:
    """Valuation of vectors stored along the last axis (min over coordinates)."""
    return val_array(a, p, m).min(axis=-1)


def digit_array(a: np.ndarray, p: int, level) -> np.ndarray:
    """The base-p digit at ``level`` (scalar or broadcastable array)."""
    return (np.asarray(a) // np.power(p, level)) % p


@dataclass(frozen=True)
class RvValue:
    """Leading term of a vector: the valuation and the residue vector of x / p^lam.

    The zero value has ``lam = INF`` and an all-zero residue.
    """

    lam: float | int
    u: tuple[int, ...]

    @classmethod
    def zero(cls, n: int) -> "RvValue":
        return cls(INF, (0,) * n)

    @property
    def is_zero(self) -> bool:
        return self.lam == INF

    def __str__(self):
        if self.is_zero:
            return "0"
        return f"({self.lam}, {self.u})"


def normalize_residue(u: Sequence[int], p: int) -> tuple[int, ...]:
    """Scale a nonzero vector over F_p so its first nonzero entry is 1."""
    u = tuple(int(x) % p for x in u)
    for x in u:
        if x:
            inv = pow(x, -1, p)
            return tuple((y * inv) % p for y in u)
    raise ZeroVector("zero vector has no direction")


@dataclass(frozen=True)
class Direction:
    """A point of projective space P^{n-1}(F_p), stored normalised."""

    p: int
    vec: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vec", normalize_residue(self.vec, self.p))

    def __str__(self):
        return "[" + ":".join(map(str, self.vec)) + "]"


def rv_coords(coords: Sequence[int], p: int, m: int) -> RvValue:
    q = p**m
    coords = tuple(int(c) % q for c in coords)
    lam = valuation_coords(coords, p, m)
    if lam == INF:
        return RvValue.zero(len(coords))
    return RvValue(lam, tuple((c // p**lam) % p for c in coords))


@dataclass(frozen=True)
class PadicScalar:
    ctx: PadicContext
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.ctx.q)

    def valuation(self):
        return valuation_int(self.value, self.ctx.p, self.ctx.m)

    def res(self) -> int:
        if self.valuation() != 0:
            raise ValueError("res is only defined on units")
        return self.value % self.ctx.p

    def rv(self) -> RvValue:
        return rv_coords((self.value,), self.ctx.p, self.ctx.m)

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            same_context(self.ctx, other.ctx)
            return other.value
        return int(other)

    def __add__(self, other):
        return PadicScalar(self.ctx, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PadicScalar(self.ctx, self.value - self._coerce(other))

    def __rsub__(self, other):
        return PadicScalar(self.ctx, self._coerce(other) - self.value)

    def __mul__(self, other):
        return PadicScalar(self.ctx, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.ctx, -self.value)

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class Point:
    ctx: PadicContext
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) % self.ctx.q for c in self.coords)
        if len(coords) != self.ctx.n:
            raise ContextMismatch(f"expected {self.ctx.n} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    def valuation(self):
        return valuation_coords(self.coords, self.ctx.p, self.ctx.m)

    def rv(self) -> RvValue:
        return rv_coords(self.coords, self.ctx.p, self.ctx.m)

    def dir(self) -> Direction:
        r = self.rv()
        if r.is_zero:
            raise ZeroVector("dir(0) is undefined")
        return Direction(self.ctx.p, r.u)

    def res(self) -> tuple[int, ...]:
        """Residue vector; only defined when the point lies in O^n."""
        return tuple(c % self.ctx.p for c in self.coords)

    def _other(self, other) -> tuple[int, ...]:
        if isinstance(other, Point):
            same_context(self.ctx, other.ctx)
            return other.coords
        return tuple(other)

    def __add__(self, other):
        return Point(self.ctx, tuple(a + b for a, b in zip(self.coords, self._other(other))))

    def __sub__(self, other):
        return Point(self.ctx, tuple(a - b for a, b in zip(self.coords, self._other(other))))

    def __neg__(self):
        return Point(self.ctx, tuple(-a for a in self.coords))

    def scale(self, c) -> "Point":
        c = int(c)
        return Point(self.ctx, tuple(c * a for a in self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def as_coords(x, ctx: PadicContext | None = None) -> tuple[int, ...]:
    if isinstance(x, Point):
        if ctx is not None:
            same_context(ctx, x.ctx)
        return x.coords
    coords = tuple(int(c) for c in x)
    if ctx is not None:
        coords = tuple(c % ctx.q for c in coords)
    return coords


def rv(x, ctx: PadicContext | None = None) -> RvValue:
    if isinstance(x, (Point, PadicScalar)):
        return x.rv()
    if ctx is None:
        raise TypeError("rv of a raw tuple needs a context")
    return rv_coords(as_coords(x), ctx.p, ctx.m)


def direction(x, ctx: PadicContext | None = None) -> Direction:
    r = rv(x, ctx)
    if r.is_zero:
        raise ZeroVector("dir(0) is undefined")
    p = x.ctx.p if isinstance(x, Point) else ctx.p
    return Direction(p, r.u)


class IntMatrix:
    """An n x n matrix with entries in Z/p^m."""

    def __init__(self, ctx: PadicContext, rows):
        self.ctx = ctx
        self.rows = tuple(tuple(int(a) % ctx.q for a in row) for row in rows)
        if len(self.rows) != ctx.n or any(len(r) != ctx.n for r in self.rows):
            raise ContextMismatch(f"matrix must be {ctx.n}x{ctx.n}")

    @classmethod
    def identity(cls, ctx: PadicContext) -> "IntMatrix":
        return cls(ctx, [[int(i == j) for j in range(ctx.n)] for i in range(ctx.n)])

    @classmethod
    def random_unimodular(cls, ctx: PadicContext, rng: np.random.Generator) -> "IntMatrix":
        while True:
            rows = rng.integers(0, ctx.q, size=(ctx.n, ctx.n))
            mat = cls(ctx, rows.tolist())
            if mat.is_unimodular():
                return mat

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.ctx == other.ctx and self.rows == other.rows

    def __hash__(self):
        return hash((self.ctx, self.rows))

    def __repr__(self):
        return f"IntMatrix({list(map(list, self.rows))})"

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def det(self) -> int:
        return int(sympy.Matrix(self.rows).det()) % self.ctx.q

    def is_unimodular(self) -> bool:
        return self.det() % self.ctx.p != 0

    def inverse(self) -> "IntMatrix":
        if not self.is_unimodular():
            raise NotUnimodular("matrix is not invertible over O")
        inv = sympy.Matrix(self.rows).inv_mod(self.ctx.q)
        return IntMatrix(self.ctx, inv.tolist())

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        same_context(self.ctx, other.ctx)
        prod = (self.as_array() @ other.as_array()) % self.ctx.q
        return IntMatrix(self.ctx, prod.tolist())

    def apply(self, x) -> Point:
        v = np.array(as_coords(x, self.ctx), dtype=np.int64)
        return Point(self.ctx, ((self.as_array() @ v) % self.ctx.q).tolist())

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        """Apply to coordinate vectors stored along the last axis."""
        a = self.as_array()
        out = np.zeros(pts.shape, dtype=np.int64)
        q = self.ctx.q
        for i in range(self.ctx.n):
            acc = np.zeros(pts.shape[:-1], dtype=np.int64)
            for j in range(self.ctx.n):
                acc = (acc + a[i, j] * pts[..., j]) % q
            out[..., i] = acc
        return out

    def apply_rv(self, value: RvValue) -> RvValue:
        if not self.is_unimodular():
            raise NotUnimodular("rv action needs a matrix in GL_n(O)")
        if value.is_zero:
            return value
        p = self.ctx.p
        u = tuple(sum(a * b for a, b in zip(row, value.u)) % p for row in self.rows)
        return RvValue(value.lam, u)
