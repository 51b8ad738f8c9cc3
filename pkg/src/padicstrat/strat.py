"""t-stratifications: verification, rainbows, reflection and derived constructions."""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import PadicContext, as_coords, rv_coords, val_array
from .defset import FiniteSet, dim_estimate
from .errors import (
    BudgetExhausted,
    DomainMismatch,
    NotATStratification,
    NotExhibiting,
    NotInContext,
    NotVerified,
    PreconditionFailed,
)
from .geometry import Ball, Coloring, Projection, Subspace, lines
from .riso import _shift_table, check_translatable

log = logging.getLogger(__name__)


def node_reduce(arr: np.ndarray, p: int, n: int, level: int, fn) -> np.ndarray:
    """Reduce an array indexed by a ball over the nodes at relative ``level``.

    The result has shape (p^level,)*n and is indexed by the node's relative residue.
    """
    N = arr.shape[0]
    split = sum(((N // p**level, p**level) for _ in range(n)), ())
    return fn(arr.reshape(split), axis=tuple(2 * i for i in range(n)))


def node_ball(base: Ball, level: int, j) -> Ball:
    step = base.ctx.p**base.depth
    return Ball(base.ctx, base.depth + level, tuple(r + step * int(a) for r, a in zip(base.residue, j)))


class Stratification:
    """A partition of a base ball into strata S_0..S_n, stored as a label per point."""

    def __init__(self, ball: Ball, labels, declared_dims=None):
        n = ball.ctx.n
        labels = np.asarray(labels, dtype=np.int64).reshape(ball.shape)
        if labels.size and (labels.min() < 0 or labels.max() > n):
            raise ValueError(f"stratum labels must lie in [0, {n}]")
        self.ball = ball
        self.labels = labels
        self.declared_dims = list(range(n + 1)) if declared_dims is None else [int(d) for d in declared_dims]
        if len(self.declared_dims) != n + 1:
            raise ValueError(f"need {n + 1} declared dimensions")

    @property
    def ctx(self) -> PadicContext:
        return self.ball.ctx

    @classmethod
    def from_sets(cls, ball: Ball, strata: dict, default: int | None = None, declared_dims=None) -> "Stratification":
        """Labels from {d: points or FiniteSet}; unlisted points get ``default`` (n by default)."""
        n = ball.ctx.n
        labels = np.full(ball.shape, n if default is None else default, dtype=np.int64)
        for d in sorted(strata, reverse=True):
            s = strata[d]
            if isinstance(s, FiniteSet):
                labels[s.in_ball(ball)] = d
            else:
                for x in s:
                    labels[ball.rel_index(x)] = d
        return cls(ball, labels, declared_dims)

    def __eq__(self, other):
        return (
            isinstance(other, Stratification)
            and self.ball == other.ball
            and np.array_equal(self.labels, other.labels)
            and self.declared_dims == other.declared_dims
        )

    def __repr__(self):
        counts = {d: int((self.labels == d).sum()) for d in range(self.ctx.n + 1)}
        return f"Stratification({self.ball}, sizes={counts})"

    def label_at(self, x) -> int:
        return int(self.labels[self.ball.rel_index(x)])

    def stratum(self, d: int) -> list[tuple[int, ...]]:
        return [self.ball.point_at(k) for k in np.argwhere(self.labels == d).tolist()]

    def mask(self, d: int) -> np.ndarray:
        return self.labels == d

    def le(self, d: int) -> np.ndarray:
        return self.labels <= d

    def ge(self, d: int) -> np.ndarray:
        return self.labels >= d

    def as_set(self, d: int) -> FiniteSet:
        return FiniteSet.from_points(self.ctx, self.stratum(d))

    def as_coloring(self) -> Coloring:
        return Coloring(self.ball, self.labels)

    def restrict(self, sub: Ball) -> "Stratification":
        return Stratification(sub, self.labels[self.ball.sub_slices(sub)], self.declared_dims)

    def min_labels(self, level: int) -> np.ndarray:
        return node_reduce(self.labels, self.ctx.p, self.ctx.n, level, np.min)

    def to_json(self) -> dict:
        return {
            "ctx": self.ctx.to_json(),
            "ball": self.ball.to_json(),
            "labels": self.labels.ravel().tolist(),
            "declared_dims": list(self.declared_dims),
        }

    @classmethod
    def from_json(cls, obj: dict, ctx: PadicContext | None = None) -> "Stratification":
        ctx = ctx or PadicContext.from_json(obj["ctx"])
        ball = Ball.from_json(ctx, obj["ball"])
        return cls(ball, np.array(obj["labels"], dtype=np.int64), obj.get("declared_dims"))


# ---------------------------------------------------------------------------
# verification


def tsp_with_filters(col: Coloring) -> tuple[Subspace, dict]:
    """tsp together with the filter that rejected each non-translatable line."""
    ctx = col.ctx
    if col.is_constant():
        return Subspace.full(ctx.p, ctx.n), {}
    out = Subspace.zero(ctx.p, ctx.n)
    rejected = {}
    for line in lines(ctx.p, ctx.n):
        if line <= out:
            continue
        res = check_translatable(col, line, prefilters=True, want_straightener=False)
        if res:
            out = out + line
        else:
            rejected[line] = res.filter
    return out, rejected


@dataclass
class BallResult:
    ball: Ball
    required_d: int
    tsp: Subspace | None
    passed: bool
    filter: str | None = None

    def to_json(self) -> dict:
        out = {"ball": self.ball.to_json(), "required_d": self.required_d, "passed": self.passed}
        if self.tsp is not None:
            out["tsp"] = self.tsp.to_json()
        if not self.passed:
            out["filter"] = self.filter
        return out


@dataclass
class VerifyReport:
    ctx: PadicContext
    results: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    checked_balls: int = 0

    @property
    def verdict(self) -> str:
        return "fail" if self.failures else "pass"

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed

    @property
    def witness(self) -> Ball | None:
        """The deepest failing ball (first in lexicographic order among equals)."""
        if not self.failures:
            return None
        best = max(self.failures, key=lambda r: r.ball.depth)
        return best.ball

    def failure_at(self, ball: Ball) -> BallResult | None:
        return next((f for f in self.failures if f.ball == ball), None)

    def to_json(self) -> dict:
        return {
            "ctx": self.ctx.to_json(),
            "verdict": self.verdict,
            "checked_balls": self.checked_balls,
            "failures": [
                {"ball": f.ball.to_json(), "required_d": f.required_d, "filter": f.filter} for f in self.failures
            ],
            "witness": None if self.witness is None else self.witness.to_json(),
            "warnings": list(self.warnings),
        }


def _check_ball(task) -> tuple[Subspace, bool, str | None]:
    col, req = task
    space, rejected = tsp_with_filters(col)
    if space.dim >= req:
        return space, True, None
    filt = next(iter(rejected.values()), "full")
    return space, False, filt


def verify_tstrat(S: Stratification, col: Coloring | None = None, jobs: int = 1) -> VerifyReport:
    """Check that S is a t-stratification of its base ball (reflecting col if given).

    Every ball B of depth below m is visited top-down; with j the smallest
    label in B, the coloring (labels, col) must be translatable on B in some
    j-dimensional direction.  A ball is skipped when its parent passed with
    the same j, which is sound because translatability passes to sub-balls.
    """
    ball = S.ball
    ctx = ball.ctx
    p, n = ctx.p, ctx.n
    if col is not None and col.ball != ball:
        raise DomainMismatch("stratification and coloring live on different balls")
    report = VerifyReport(ctx)
    for d in range(n + 1):
        if not S.mask(d).any():
            continue
        decl = S.declared_dims[d]
        if decl > d:
            report.failures.append(BallResult(ball, d, None, False, "declared-dimension"))
        est = dim_estimate(S.as_set(d))
        if est > d:
            report.warnings.append(f"S_{d} looks {est}-dimensional at this precision")
    prod = S.as_coloring() if col is None else S.as_coloring().product(col)
    passed_prev = None
    min_prev = None
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for lev in range(ball.height):
            mins = S.min_labels(lev)
            status = np.zeros(mins.shape, dtype=bool)
            todo = []
            for j in np.ndindex(mins.shape):
                req = int(mins[j])
                if req == 0:
                    status[j] = True
                    continue
                if lev > 0:
                    parent = tuple(a % p ** (lev - 1) for a in j)
                    if passed_prev[parent] and min_prev[parent] == req:
                        status[j] = True
                        continue
                todo.append((j, req))
            tasks = [(prod.restrict(node_ball(ball, lev, j)), req) for j, req in todo]
            outcomes = pool.map(_check_ball, tasks, chunksize=8) if pool else map(_check_ball, tasks)
            for (j, req), (space, ok, filt) in zip(todo, outcomes):
                res = BallResult(node_ball(ball, lev, j), req, space, ok, filt)
                report.results.append(res)
                report.checked_balls += 1
                status[j] = ok
                if not ok:
                    report.failures.append(res)
            passed_prev, min_prev = status, mins
    finally:
        if pool:
            pool.shutdown()
    return report


# ---------------------------------------------------------------------------
# rainbow and reflection


def rainbow(S: Stratification) -> Coloring:
    """Color points by the tuple of sets rv(x - S_i); ids by first occurrence."""
    ball = S.ball
    ctx = ball.ctx
    p, n, h = ctx.p, ctx.n, ball.height
    P = p**n
    k = np.indices(ball.shape, dtype=np.int64).reshape(n, -1)
    w = lambda base: base ** np.arange(n - 1, -1, -1, dtype=np.int64)  # noqa: E731
    perm = _shift_table(p, n)
    feats = []
    for i in range(n + 1):
        mem = S.labels == i
        feats.append(mem.reshape(-1, 1))
        for lev in range(h):
            occ = node_reduce(mem, p, n, lev + 1, np.any)
            occ = occ.reshape(sum(((p, p**lev) for _ in range(n)), ()))
            order = tuple(1 + 2 * a for a in range(n)) + tuple(2 * a for a in range(n))
            occ = occ.transpose(order).reshape(p ** (lev * n), P)
            node = w(p**lev) @ (k % p**lev)
            e = w(p) @ ((k // p**lev) % p)
            rows = occ[node[:, None], perm[e]]
            feats.append(rows[:, 1:])
    F = np.concatenate(feats, axis=1).astype(np.uint8)
    _, first, inv = np.unique(F, axis=0, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return Coloring(ball, rank[inv.ravel()].reshape(ball.shape))


def rainbow_bruteforce(S: Stratification) -> Coloring:
    """Same coloring computed literally from the sets {rv(x - s)}; for small inputs."""
    ball = S.ball
    ctx = ball.ctx
    strata = [S.stratum(i) for i in range(ctx.n + 1)]
    seen: dict = {}
    out = np.zeros(ball.shape, dtype=np.int64)
    for kk, x in zip(itertools.product(range(ball.side), repeat=ctx.n), ball.points()):
        key = tuple(
            frozenset(rv_coords([a - b for a, b in zip(x, s)], ctx.p, ctx.m) for s in st) for st in strata
        )
        out[kk] = seen.setdefault(key, len(seen))
    return Coloring(ball, out)


def refines(fine: Coloring, coarse: Coloring) -> bool:
    """Every class of ``fine`` lies inside one class of ``coarse``."""
    pairs = np.unique(np.stack([fine.colors.ravel(), coarse.colors.ravel()], axis=1), axis=0)
    return np.unique(pairs[:, 0]).size == pairs.shape[0]


@dataclass
class ReflectReport:
    reflects: bool
    witness: Ball | None = None
    tsp_strat: Subspace | None = None
    tsp_colored: Subspace | None = None

    def __bool__(self):
        return self.reflects

    def to_json(self) -> dict:
        out = {"reflects": self.reflects, "witness": None}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["tsp_strat"] = self.tsp_strat.to_json()
            out["tsp_colored"] = self.tsp_colored.to_json()
        return out


def _tsp(col: Coloring) -> Subspace:
    return tsp_with_filters(col)[0]


def reflects(S: Stratification, col: Coloring) -> ReflectReport:
    """Whether tsp_B(S, col) = tsp_B(S) on every ball B of the base ball."""
    rep = verify_tstrat(S)
    if not rep:
        raise NotATStratification("reflects needs a t-stratification", rep)
    if col.ball != S.ball:
        raise DomainMismatch("stratification and coloring live on different balls")
    base = S.as_coloring()
    prod = base.product(col)
    ball = S.ball
    for lev in range(ball.height):
        for j in itertools.product(range(ball.ctx.p**lev), repeat=ball.ctx.n):
            B = node_ball(ball, lev, j)
            sb = base.restrict(B)
            pb = prod.restrict(B)
            if np.unique(pb.colors).size == np.unique(sb.colors).size:
                continue
            t_col = _tsp(pb)
            t_s = _tsp(sb)
            if t_col.dim != t_s.dim:
                return ReflectReport(False, B, t_s, t_col)
    return ReflectReport(True)


# ---------------------------------------------------------------------------
# fibers


def induced_fiber_strat(S: Stratification, B: Ball, projection: Projection, x) -> Stratification:
    """T_i = S_{i+d} restricted to the fiber of ``projection`` over x inside B."""
    ctx = S.ctx
    sub = S.restrict(B)
    space = _tsp(sub.as_coloring())
    if not projection.is_exhibition_of(space):
        raise NotExhibiting(f"{projection.indices} does not exhibit tsp = {space}")
    d = projection.d
    I = list(projection.indices)
    J = list(projection.complement().indices)
    x = tuple(int(a) % ctx.q for a in x)
    mod = ctx.p**B.depth
    if any(a % mod != B.residue[i] for a, i in zip(x, I)):
        raise NotInContext(f"fiber over {x} misses {B}")
    step = mod
    idx = [slice(None)] * ctx.n
    for a, i in zip(x, I):
        idx[i] = ((a - B.residue[i]) % ctx.q) // step
    labels = sub.labels[tuple(idx)] - d
    if labels.size and labels.min() < 0:
        raise PreconditionFailed("fiber meets a stratum below the translatability dimension")
    fctx = PadicContext(ctx.p, ctx.m, ctx.n - d)
    fball = Ball(fctx, B.depth, tuple(B.residue[j] for j in J))
    decl = [max(0, dd - d) for dd in S.declared_dims[d:]]
    return Stratification(fball, labels, decl)


def maximal_ball_avoiding(S: Stratification, x, j: int) -> Ball:
    """The largest ball around x inside the base ball that misses S_{<j}."""
    ball = S.ball
    k = ball.rel_index(x)
    if S.labels[k] < j:
        raise PreconditionFailed(f"{x} lies in a stratum below {j}")
    p, n = ball.ctx.p, ball.ctx.n
    for lev in range(ball.height + 1):
        node = tuple(a % p**lev for a in k)
        if S.min_labels(lev)[node] >= j:
            return node_ball(ball, lev, node)
    return node_ball(ball, ball.height, k)


# ---------------------------------------------------------------------------
# greedy stratifier and the small-changes construction


def stratify_greedy(col: Coloring, declared_dims, budget: int = 100, jobs: int = 1) -> Stratification:
    """Start from the declared dimension of each color class and demote until verified.

    ``declared_dims`` maps a color to a dimension (dict or sequence).  On
    each failure the lexicographically least point of the deepest failing
    ball lying in its lowest stratum moves one stratum down.
    """
    ball = col.ball
    n = ball.ctx.n
    getter = declared_dims.get if isinstance(declared_dims, dict) else (lambda c, default=n: declared_dims[c])
    colors = np.unique(col.colors)
    labels = np.full(ball.shape, n, dtype=np.int64)
    for c in colors.tolist():
        labels[col.colors == c] = min(n, max(0, int(getter(c, n))))
    S = Stratification(ball, labels)
    report = None
    for _ in range(budget + 1):
        report = verify_tstrat(S, col, jobs=jobs)
        if report:
            return S
        fails = [f for f in report.failures if f.filter != "declared-dimension"]
        if not fails:
            break
        bad = max(fails, key=lambda r: r.ball.depth).ball
        j = max(fails, key=lambda r: r.ball.depth).required_d
        sub = S.labels[ball.sub_slices(bad)]
        cand = np.argwhere(sub == sub.min())
        rel_in_bad = tuple(cand[0].tolist())
        pt = bad.point_at(rel_in_bad)
        labels = S.labels.copy()
        labels[ball.rel_index(pt)] = max(0, j - 1)
        S = Stratification(ball, labels)
    raise BudgetExhausted(f"no verified stratification within {budget} demotions", report, S)


def enhance_small_changes(S: Stratification, T: Stratification, X: FiniteSet, col: Coloring, d: int | None = None, check: bool = True) -> Stratification:
    """Merge S and T around X: T below dimension d, S (plus X and T_{<d}) above."""
    ball = S.ball
    if T.ball != ball or col.ball != ball:
        raise DomainMismatch("S, T and the coloring need the same base ball")
    if d is None:
        d = dim_estimate(X) if X else 0
    if not verify_tstrat(S):
        raise PreconditionFailed("S is not a t-stratification")
    if not verify_tstrat(T):
        raise PreconditionFailed("T is not a t-stratification")
    inX = X.in_ball(ball)
    fresh = int(col.colors.max()) + 1
    ext = Coloring(ball, np.where(inX, col.colors, fresh))
    target = S.as_coloring().product(ext)
    if not reflects(T, target):
        raise PreconditionFailed("T does not reflect S together with the coloring")
    new = np.where(T.labels < d, T.labels, np.where(inX, d, np.maximum(S.labels, d)))
    out = Stratification(ball, new)
    if check:
        if not verify_tstrat(out) or not reflects(out, target):
            raise PreconditionFailed("merged partition failed re-verification at this precision")
    return out


def minimal_T0(col: Coloring) -> list[tuple[int, ...]]:
    """One point (the least) in every minimal non-monochromatic ball; needs n = 1."""
    ball = col.ball
    ctx = ball.ctx
    if ctx.n != 1:
        raise PreconditionFailed("minimal_T0 is only defined for n = 1")
    p = ctx.p
    out = []
    for lev in range(ball.height):
        lo = node_reduce(col.colors, p, 1, lev, np.min)
        hi = node_reduce(col.colors, p, 1, lev, np.max)
        clo = node_reduce(col.colors, p, 1, lev + 1, np.min)
        chi = node_reduce(col.colors, p, 1, lev + 1, np.max)
        child_mono = (clo == chi).reshape(p, p**lev).all(axis=0)
        for j in np.flatnonzero((lo != hi) & child_mono).tolist():
            out.append(node_ball(ball, lev, (j,)).point_at((0,)))
    return sorted(out)


# ---------------------------------------------------------------------------
# exceptional sets


@dataclass
class KegelResult:
    xi: list  # list of (lam, u) pairs
    valuations: list

    def to_json(self) -> dict:
        return {"xi": [{"lam": lam, "u": list(u)} for lam, u in self.xi], "valuations": self.valuations}


def kegel_xi(col: Coloring, x) -> KegelResult:
    """All xi = (lam, u), lam <= m-2, with col not span(u)-translatable on x + rv^-1(xi)."""
    ball = col.ball
    ctx = ball.ctx
    p, n, m = ctx.p, ctx.n, ctx.m
    x = as_coords(x, ctx)
    out = []
    for lam in range(0, m - 1):
        for u in itertools.product(range(p), repeat=n):
            if not any(u):
                continue
            center = tuple((a + p**lam * b) % ctx.q for a, b in zip(x, u))
            B = Ball(ctx, lam + 1, center)
            if not ball.contains_ball(B):
                continue
            line = Subspace.span(p, n, [u])
            sub = col.restrict(B)
            if not check_translatable(sub, line, prefilters=False, want_straightener=False):
                out.append((lam, u))
    return KegelResult(out, sorted({lam for lam, _ in out}))


def _annihilator(V: Subspace) -> np.ndarray:
    """Columns spanning the vectors w with <v, w> = 0 for all v in V."""
    p, n = V.p, V.n
    W = [w for w in itertools.product(range(p), repeat=n) if all(sum(a * b for a, b in zip(v, w)) % p == 0 for v in V.basis)]
    perp = Subspace.span(p, n, W)
    if perp.dim == 0:
        return np.zeros((n, 0), dtype=np.int64)
    return np.array(perp.basis, dtype=np.int64).T


@dataclass
class WhitneyResult:
    M: list
    d: int
    pairs_checked: int
    violations: list  # sample (x', y', lam) triples, one per valuation

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "d": self.d,
            "pairs_checked": self.pairs_checked,
            "violations": [{"x": list(a), "y": list(b), "lam": lam} for a, b, lam in self.violations],
        }


def whitney_b_M(S: Stratification, B: Ball, d: int | None = None, verified: bool = False) -> WhitneyResult:
    """Valuations of pairs x' in S_d, y' in S_j (j > d) inside B whose direction
    leaves tsp of the maximal ball around y' missing S_{<j}."""
    ctx = S.ctx
    p, n, m = ctx.p, ctx.n, ctx.m
    if not verified:
        rep = verify_tstrat(S)
        if not rep:
            raise NotVerified("stratification does not verify", rep)
    sub = S.labels[S.ball.sub_slices(B)]
    dmin = int(sub.min())
    if d is None:
        d = dmin
    elif not (sub == d).any():
        raise NotVerified(f"B meets no point of S_{d}")
    grid = B.coords_grid().reshape(n, -1).T
    lab = sub.ravel()
    xs = grid[lab == d]
    ys_idx = np.flatnonzero(lab > d)
    if xs.size == 0 or ys_idx.size == 0:
        return WhitneyResult([], d, 0, [])
    # maximal ball around each y' and the annihilator of its tsp
    cache: dict = {}
    ys = grid[ys_idx]
    ylab = lab[ys_idx]
    keys = []
    for y, j in zip(ys.tolist(), ylab.tolist()):
        Bp = maximal_ball_avoiding(S, y, j)
        if Bp not in cache:
            space = _tsp(S.as_coloring().restrict(Bp))
            cache[Bp] = _annihilator(space)
        keys.append(Bp)
    found: dict = {}
    total = 0
    for Bp in dict.fromkeys(keys):
        K = cache[Bp]
        if K.shape[1] == 0:
            total += xs.shape[0] * sum(1 for k in keys if k == Bp)
            continue
        sel = np.array([k == Bp for k in keys])
        ysel = ys[sel]
        diff = (xs[:, None, :] - ysel[None, :, :]) % ctx.q
        lam = val_array(diff, p, m).min(axis=-1)
        u = (diff // np.power(p, np.minimum(lam, m - 1))[..., None]) % p
        bad = ((u @ K) % p).any(axis=-1) & (lam < m)
        total += bad.size
        for a, b in np.argwhere(bad).tolist():
            lv = int(lam[a, b])
            if lv not in found:
                found[lv] = (tuple(xs[a].tolist()), tuple(ysel[b].tolist()), lv)
    return WhitneyResult(sorted(found), d, total, [found[k] for k in sorted(found)])


# ---------------------------------------------------------------------------
# sub-affine sets


def affdir(C, ctx: PadicContext | None = None) -> Subspace:
    """Span of dir(x - x') over distinct pairs of C."""
    if isinstance(C, FiniteSet):
        ctx = C.ctx
        pts = np.array(C.points(), dtype=np.int64).reshape(-1, C.ctx.n)
    else:
        pts = np.array([as_coords(x, ctx) for x in C], dtype=np.int64).reshape(-1, ctx.n)
    if pts.shape[0] == 0:
        from .errors import EmptySet

        raise EmptySet("affdir of the empty set")
    p, m, n = ctx.p, ctx.m, ctx.n
    diff = (pts[:, None, :] - pts[None, :, :]) % ctx.q
    lam = val_array(diff, p, m).min(axis=-1)
    u = (diff // np.power(p, np.minimum(lam, m - 1))[..., None]) % p
    vecs = u[lam < m].reshape(-1, n)
    vecs = np.unique(vecs, axis=0) if vecs.size else vecs
    return Subspace.span(p, n, [tuple(v) for v in vecs.tolist()])


@dataclass
class SubaffineReport:
    subaffine: bool
    affdir: Subspace
    graph_ok: bool
    declared: int | None = None

    def __bool__(self):
        return self.subaffine


def is_subaffine(C, declared_dim: int | None = None, ctx: PadicContext | None = None) -> SubaffineReport:
    """affdir(C) has the declared dimension and every exhibition fiber meets C at most once."""
    V = affdir(C, ctx)
    ctx = C.ctx if isinstance(C, FiniteSet) else ctx
    pts = C.points() if isinstance(C, FiniteSet) else [as_coords(x, ctx) for x in C]
    graph_ok = True
    for proj in V.exhibitions():
        images = [proj.apply(x) for x in pts]
        if len(set(images)) != len(images):
            graph_ok = False
            break
    ok = graph_ok and (declared_dim is None or declared_dim == V.dim)
    return SubaffineReport(ok, V, graph_ok, declared_dim)
