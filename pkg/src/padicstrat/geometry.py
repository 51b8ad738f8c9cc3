"""Balls, coordinate projections, subspaces of F_p^n, lifts and colorings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import sympy

from .core import INF, PadicContext, as_coords, valuation_coords
from .errors import AtMaxDepth, ContextMismatch, EmptySet, EqualPoints, NotALift, NotInContext


@dataclass(frozen=True)
class Ball:
    """The closed ball {z : z = residue mod p^depth} inside (Z/p^m)^n.

    Points of a ball are addressed by a relative index k in [0, p^height)^n
    with z = residue + p^depth * k.  Lexicographic order on points inside a
    ball is C-order on k, which is what every array in this package uses.
    """

    ctx: PadicContext
    depth: int
    residue: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.depth <= self.ctx.m:
            raise NotInContext(f"depth {self.depth} outside [0, {self.ctx.m}]")
        res = tuple(int(r) % self.ctx.p**self.depth for r in self.residue)
        if len(res) != self.ctx.n:
            raise ContextMismatch(f"residue needs {self.ctx.n} coordinates")
        object.__setattr__(self, "residue", res)

    @classmethod
    def whole(cls, ctx: PadicContext) -> "Ball":
        return cls(ctx, 0, (0,) * ctx.n)

    @classmethod
    def around(cls, ctx: PadicContext, center, depth: int) -> "Ball":
        return cls(ctx, depth, as_coords(center, ctx))

    @property
    def height(self) -> int:
        return self.ctx.m - self.depth

    @property
    def side(self) -> int:
        return self.ctx.p**self.height

    @property
    def num_points(self) -> int:
        return self.side**self.ctx.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.ctx.n

    @property
    def radius(self) -> int:
        return self.depth

    def __str__(self):
        return f"{self.depth}:" + ",".join(map(str, self.residue))

    def label(self) -> str:
        return str(self)

    def contains(self, x) -> bool:
        mod = self.ctx.p**self.depth
        return all(c % mod == r for c, r in zip(as_coords(x, self.ctx), self.residue))

    def contains_ball(self, other: "Ball") -> bool:
        return other.depth >= self.depth and self.contains(other.residue)

    def rel_index(self, x) -> tuple[int, ...]:
        q = self.ctx.q
        step = self.ctx.p**self.depth
        coords = as_coords(x, self.ctx)
        if not self.contains(coords):
            raise NotInContext(f"{coords} is not in ball {self}")
        return tuple(((c - r) % q) // step for c, r in zip(coords, self.residue))

    def rel_index_coord(self, i: int, a: int) -> int:
        """Relative index of the value a in coordinate i."""
        step = self.ctx.p**self.depth
        a = int(a) % self.ctx.q
        if a % step != self.residue[i]:
            raise NotInContext(f"coordinate {i} = {a} misses ball {self}")
        return (a - self.residue[i]) // step

    def point_at(self, k: Sequence[int]) -> tuple[int, ...]:
        step = self.ctx.p**self.depth
        return tuple((r + step * int(a)) % self.ctx.q for r, a in zip(self.residue, k))

    def coords_grid(self) -> np.ndarray:
        """Absolute coordinates of every point, shape (n,) + (side,)*n."""
        self.ctx.check_size()
        k = np.indices(self.shape, dtype=np.int64)
        r = np.array(self.residue, dtype=np.int64).reshape((-1,) + (1,) * self.ctx.n)
        return (r + self.ctx.p**self.depth * k) % self.ctx.q

    def points(self) -> Iterator[tuple[int, ...]]:
        for k in itertools.product(range(self.side), repeat=self.ctx.n):
            yield self.point_at(k)

    def children(self) -> list["Ball"]:
        if self.depth >= self.ctx.m:
            raise AtMaxDepth(f"{self} is a single point")
        p = self.ctx.p
        step = p**self.depth
        return [
            Ball(self.ctx, self.depth + 1, tuple(r + step * e for r, e in zip(self.residue, digits)))
            for digits in itertools.product(range(p), repeat=self.ctx.n)
        ]

    def child(self, digits: Sequence[int]) -> "Ball":
        step = self.ctx.p**self.depth
        return Ball(self.ctx, self.depth + 1, tuple(r + step * e for r, e in zip(self.residue, digits)))

    def parent(self) -> "Ball | None":
        if self.depth == 0:
            return None
        return Ball(self.ctx, self.depth - 1, self.residue)

    def ancestors(self) -> list["Ball"]:
        """Balls strictly containing this one, from the root down."""
        return [Ball(self.ctx, d, self.residue) for d in range(self.depth)]

    def sub_slices(self, sub: "Ball") -> tuple[slice, ...]:
        """Slices that cut ``sub`` out of an array indexed by this ball."""
        if not self.contains_ball(sub):
            raise NotInContext(f"{sub} is not inside {self}")
        stride = self.ctx.p ** (sub.depth - self.depth)
        mod = self.ctx.p**sub.depth
        step = self.ctx.p**self.depth
        return tuple(
            slice(((rs - r) % mod) // step, None, stride) for rs, r in zip(sub.residue, self.residue)
        )

    def sub_balls(self, level: int) -> list["Ball"]:
        """All balls of depth ``self.depth + level`` inside this one, lexicographic."""
        step = self.ctx.p**self.depth
        return [
            Ball(self.ctx, self.depth + level, tuple(r + step * j for r, j in zip(self.residue, js)))
            for js in itertools.product(range(self.ctx.p**level), repeat=self.ctx.n)
        ]

    def to_json(self) -> dict:
        return {"depth": self.depth, "residue": list(self.residue)}

    @classmethod
    def from_json(cls, ctx: PadicContext, obj: dict) -> "Ball":
        return cls(ctx, int(obj["depth"]), tuple(int(r) for r in obj["residue"]))


def relation(b1: Ball, b2: Ball) -> str:
    """One of 'equal', 'contains', 'contained', 'disjoint'."""
    if b1 == b2:
        return "equal"
    if b1.contains_ball(b2):
        return "contains"
    if b2.contains_ball(b1):
        return "contained"
    return "disjoint"


def smallest_ball_containing(ctx: PadicContext, *points) -> Ball:
    """Smallest ball containing the given points (or one iterable of points).

    With exactly two points they must differ.
    """
    if len(points) == 1 and not isinstance(points[0], tuple) and not hasattr(points[0], "coords"):
        points = tuple(points[0])
    pts = [as_coords(x, ctx) for x in points]
    if not pts:
        raise EmptySet("no points given")
    if len(pts) == 2 and pts[0] == pts[1]:
        raise EqualPoints("the two points coincide")
    x0 = pts[0]
    depth = ctx.m
    for x in pts[1:]:
        v = valuation_coords([a - b for a, b in zip(x, x0)], ctx.p, ctx.m)
        if v != INF:
            depth = min(depth, int(v))
    return Ball(ctx, depth, x0)


@dataclass(frozen=True)
class Projection:
    """Coordinate projection onto the sorted index set ``indices``."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if any(not 0 <= i < self.n for i in idx):
            raise ValueError(f"indices {idx} out of range for n={self.n}")
        object.__setattr__(self, "indices", idx)

    @property
    def d(self) -> int:
        return len(self.indices)

    def apply(self, x) -> tuple[int, ...]:
        x = as_coords(x)
        return tuple(x[i] for i in self.indices)

    def complement(self) -> "Projection":
        return Projection(self.n, tuple(i for i in range(self.n) if i not in self.indices))

    def is_exhibition_of(self, V: "Subspace") -> bool:
        if V.dim != self.d:
            return False
        if V.dim == 0:
            return True
        sub = sympy.Matrix([[row[i] for i in self.indices] for row in V.basis])
        return int(sub.det()) % V.p != 0

    def to_json(self) -> list[int]:
        return list(self.indices)


def _rref(rows: Iterable[Sequence[int]], p: int, n: int) -> tuple[tuple[int, ...], ...]:
    mat = [[int(a) % p for a in r] for r in rows]
    out: list[list[int]] = []
    col = 0
    for col in range(n):
        pivot = next((i for i, r in enumerate(mat) if r[col]), None)
        if pivot is None:
            continue
        row = mat.pop(pivot)
        inv = pow(row[col], -1, p)
        row = [(a * inv) % p for a in row]
        mat = [[(a - r[col] * b) % p for a, b in zip(r, row)] for r in mat]
        out = [[(a - r[col] * b) % p for a, b in zip(r, row)] for r in out]
        out.append(row)
    out.sort(key=lambda r: next(i for i, a in enumerate(r) if a))
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_p^n kept in reduced row echelon form."""

    p: int
    n: int
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", _rref(self.basis, self.p, self.n))

    @classmethod
    def span(cls, p: int, n: int, vectors: Iterable[Sequence[int]]) -> "Subspace":
        return cls(p, n, tuple(tuple(v) for v in vectors))

    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, ())

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, a in enumerate(r) if a) for r in self.basis)

    def contains(self, vec: Sequence[int]) -> bool:
        return Subspace(self.p, self.n, self.basis + (tuple(vec),)).dim == self.dim

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.p, self.n, self.basis + other.basis)

    def __le__(self, other: "Subspace") -> bool:
        return (self + other).dim == other.dim

    def intersection(self, other: "Subspace") -> "Subspace":
        # dimension count plus brute force membership is plenty at these sizes
        vecs = [v for v in self.elements() if other.contains(v)]
        return Subspace(self.p, self.n, tuple(vecs))

    def elements(self) -> Iterator[tuple[int, ...]]:
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            yield tuple(
                sum(c * b[i] for c, b in zip(coeffs, self.basis)) % self.p for i in range(self.n)
            )

    def exhibitions(self) -> list[Projection]:
        return [
            Projection(self.n, idx)
            for idx in itertools.combinations(range(self.n), self.dim)
            if Projection(self.n, idx).is_exhibition_of(self)
        ]

    def first_exhibition(self) -> Projection:
        # the pivot columns of the rref basis always exhibit
        return Projection(self.n, self.pivots)

    def __str__(self):
        if not self.basis:
            return "<0>"
        return "<" + ", ".join("(" + ",".join(map(str, r)) + ")" for r in self.basis) + ">"

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.basis]

    @classmethod
    def from_json(cls, p: int, n: int, rows) -> "Subspace":
        return cls(p, n, tuple(tuple(int(a) for a in r) for r in rows))


def subspaces_of_dim(p: int, n: int, d: int) -> list[Subspace]:
    """Every d-dimensional subspace of F_p^n, enumerated through rref shapes."""
    out = []
    for pivots in itertools.combinations(range(n), d):
        free = [(i, j) for i in range(d) for j in range(pivots[i] + 1, n) if j not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(d)]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, j), a in zip(free, vals):
                rows[i][j] = a
            out.append(Subspace(p, n, tuple(tuple(r) for r in rows)))
    return out


def lines(p: int, n: int) -> list[Subspace]:
    return subspaces_of_dim(p, n, 1)


def subspace_lattice(p: int, n: int) -> dict[int, list[Subspace]]:
    return {d: subspaces_of_dim(p, n, d) for d in range(n + 1)}


def _inv_mod_matrix(rows, q: int) -> np.ndarray:
    return np.array(sympy.Matrix(rows).inv_mod(q).tolist(), dtype=np.int64)


class Lift:
    """A free O-submodule of O^n of rank d whose reduction is the subspace V.

    Stored as the graph of a d x (n-d) matrix L over the exhibition I of V
    with the smallest indices: its elements are the points whose
    J-coordinates equal (I-coordinates) @ L, J the complement of I.
    """

    def __init__(self, ctx: PadicContext, V: Subspace, generators: Sequence[Sequence[int]]):
        if V.p != ctx.p or V.n != ctx.n:
            raise ContextMismatch("subspace and context disagree")
        self.ctx = ctx
        self.V = V
        gens = np.array(generators, dtype=np.int64).reshape(-1, ctx.n) % ctx.q
        if gens.shape[0] != V.dim:
            raise NotALift(f"need {V.dim} generators, got {gens.shape[0]}")
        if Subspace(ctx.p, ctx.n, tuple(map(tuple, (gens % ctx.p).tolist()))) != V:
            raise NotALift("generators do not reduce to a basis of V")
        self.exhibition = V.first_exhibition()
        I = list(self.exhibition.indices)
        J = list(self.exhibition.complement().indices)
        if V.dim:
            gi_inv = _inv_mod_matrix(gens[:, I].tolist(), ctx.q)
            self.L = (gi_inv @ gens[:, J]) % ctx.q
        else:
            self.L = np.zeros((0, ctx.n), dtype=np.int64)

    @classmethod
    def canonical(cls, V: Subspace, ctx: PadicContext) -> "Lift":
        return cls(ctx, V, V.basis)

    @classmethod
    def random(cls, V: Subspace, ctx: PadicContext, rng: np.random.Generator) -> "Lift":
        base = np.array(V.basis, dtype=np.int64).reshape(V.dim, ctx.n)
        noise = rng.integers(0, ctx.p ** (ctx.m - 1), size=base.shape) * ctx.p
        return cls(ctx, V, (base + noise) % ctx.q)

    @classmethod
    def all_lifts(cls, V: Subspace, ctx: PadicContext) -> Iterator["Lift"]:
        """Every lift, one per graph matrix L reducing to the canonical one."""
        base = cls.canonical(V, ctx)
        I = list(base.exhibition.indices)
        J = list(base.exhibition.complement().indices)
        shape = base.L.shape
        for vals in itertools.product(range(ctx.p ** (ctx.m - 1)), repeat=int(np.prod(shape))):
            L = (base.L + ctx.p * np.array(vals, dtype=np.int64).reshape(shape)) % ctx.q
            gens = np.zeros((V.dim, ctx.n), dtype=np.int64)
            gens[:, I] = np.eye(V.dim, dtype=np.int64)
            gens[:, J] = L
            yield cls(ctx, V, gens)

    @property
    def generators(self) -> np.ndarray:
        I = list(self.exhibition.indices)
        J = list(self.exhibition.complement().indices)
        gens = np.zeros((self.V.dim, self.ctx.n), dtype=np.int64)
        gens[:, I] = np.eye(self.V.dim, dtype=np.int64)
        gens[:, J] = self.L
        return gens

    def elements(self) -> np.ndarray:
        """All elements as an array of shape (q^d, n)."""
        d = self.V.dim
        if d == 0:
            return np.zeros((1, self.ctx.n), dtype=np.int64)
        coeffs = np.indices((self.ctx.q,) * d, dtype=np.int64).reshape(d, -1).T
        return (coeffs @ self.generators) % self.ctx.q

    def contains(self, x) -> bool:
        x = np.array(as_coords(x, self.ctx), dtype=np.int64)
        I = list(self.exhibition.indices)
        J = list(self.exhibition.complement().indices)
        return bool(np.all((x[I] @ self.L) % self.ctx.q == x[J]))

    def __eq__(self, other):
        return (
            isinstance(other, Lift)
            and self.ctx == other.ctx
            and self.V == other.V
            and np.array_equal(self.L, other.L)
        )

    def __hash__(self):
        return hash((self.ctx, self.V, self.L.tobytes()))

    def __repr__(self):
        return f"Lift({self.V}, L={self.L.tolist()})"


class Coloring:
    """A map from the points of a ball to integer colors, stored as a dense array."""

    def __init__(self, ball: Ball, colors):
        colors = np.asarray(colors)
        if colors.shape != ball.shape:
            colors = colors.reshape(ball.shape)
        self.ball = ball
        self.colors = colors.astype(np.int64, copy=False)

    @property
    def ctx(self) -> PadicContext:
        return self.ball.ctx

    @classmethod
    def constant(cls, ball: Ball, color: int = 0) -> "Coloring":
        return cls(ball, np.full(ball.shape, color, dtype=np.int64))

    @classmethod
    def from_function(cls, ball: Ball, f) -> "Coloring":
        vals = [int(f(x)) for x in ball.points()]
        return cls(ball, np.array(vals, dtype=np.int64).reshape(ball.shape))

    def __eq__(self, other):
        return (
            isinstance(other, Coloring)
            and self.ball == other.ball
            and np.array_equal(self.colors, other.colors)
        )

    def __hash__(self):
        return hash((self.ball, self.colors.tobytes()))

    def __repr__(self):
        return f"Coloring({self.ball}, {self.colors.ravel().tolist()})"

    def color_at(self, x) -> int:
        return int(self.colors[self.ball.rel_index(x)])

    def restrict(self, sub: Ball) -> "Coloring":
        return Coloring(sub, self.colors[self.ball.sub_slices(sub)])

    def fiber(self, indices, values) -> "Coloring":
        """Restriction to the points whose ``indices`` coordinates equal ``values``,
        as a coloring of a ball in the remaining coordinates."""
        ctx, ball = self.ctx, self.ball
        indices = list(indices)
        rest = [j for j in range(ctx.n) if j not in indices]
        idx: list = [slice(None)] * ctx.n
        for i, a in zip(indices, values):
            idx[i] = ball.rel_index_coord(i, a)
        fctx = PadicContext(ctx.p, ctx.m, len(rest))
        fball = Ball(fctx, ball.depth, tuple(ball.residue[j] for j in rest))
        return Coloring(fball, self.colors[tuple(idx)])

    def dense(self) -> "Coloring":
        _, inv = np.unique(self.colors, return_inverse=True)
        return Coloring(self.ball, inv.reshape(self.ball.shape))

    def product(self, *others: "Coloring") -> "Coloring":
        """The coloring by tuples of colors, made dense."""
        for o in others:
            if o.ball != self.ball:
                raise ContextMismatch("product of colorings on different balls")
        stacked = np.stack([self.colors] + [o.colors for o in others], axis=-1)
        flat = stacked.reshape(-1, stacked.shape[-1])
        _, inv = np.unique(flat, axis=0, return_inverse=True)
        return Coloring(self.ball, inv.reshape(self.ball.shape))

    def values(self) -> list[int]:
        return sorted(set(np.unique(self.colors).tolist()))

    def is_constant(self) -> bool:
        return bool(np.all(self.colors == self.colors.flat[0]))

    def class_points(self, color: int) -> list[tuple[int, ...]]:
        ks = np.argwhere(self.colors == color)
        return [self.ball.point_at(k) for k in ks.tolist()]

    def to_json(self) -> dict:
        return {
            "ctx": self.ctx.to_json(),
            "ball": self.ball.to_json(),
            "colors": self.colors.ravel().tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict, ctx: PadicContext | None = None) -> "Coloring":
        ctx = ctx or PadicContext.from_json(obj["ctx"])
        ball = Ball.from_json(ctx, obj["ball"])
        return cls(ball, np.array(obj["colors"], dtype=np.int64))


def children(ball: Ball) -> list[Ball]:
    return ball.children()


def exhibitions(V: Subspace) -> list[Projection]:
    return V.exhibitions()


def canonical_lift(V: Subspace, ctx: PadicContext) -> Lift:
    return Lift.canonical(V, ctx)
