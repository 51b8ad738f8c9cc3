"""Risometries of balls, canonical forms of colored balls, translatability.

A risometry of a ball of height h is determined by a translation label in
F_p^n at every node of its tree: digit l of the image of z is digit l of z
plus the label of the node (z mod p^l).  Labels are kept densely, one array
of shape (p^l,)*n + (n,) per relative level l.

Canonical forms are computed bottom-up for whole batches of colorings at
once: at every node the children are permuted by each shift in F_p^n and the
lexicographically least resulting tuple of child classes wins.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy

from .core import PadicContext, as_coords, val_array
from .errors import (
    DepthMismatch,
    DomainMismatch,
    NotAnExhibition,
    NotBijective,
    NotRisometry,
)
from .geometry import Ball, Coloring, Lift, Projection, Subspace, lines


# ---------------------------------------------------------------------------
# risometries in normal form


def _rel_grid(ball: Ball) -> np.ndarray:
    return np.indices(ball.shape, dtype=np.int64)


def _labels_to_relmap(p: int, n: int, h: int, labels) -> np.ndarray:
    """Relative image of every relative point, shape (p^h,)*n + (n,)."""
    N = p**h
    k = np.indices((N,) * n, dtype=np.int64)
    out = np.zeros((n,) + (N,) * n, dtype=np.int64)
    for lev in range(h):
        node = k % p**lev
        lab = labels[lev][tuple(node)]  # (N,)*n + (n,)
        lab = np.moveaxis(lab, -1, 0)
        digit = (k // p**lev) % p
        out += ((digit + lab) % p) * p**lev
    return np.moveaxis(out, 0, -1)


def _flat(rel: np.ndarray, N: int) -> np.ndarray:
    n = rel.shape[-1]
    w = N ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (rel * w).sum(axis=-1)


def _unflat(flat: np.ndarray, N: int, n: int) -> np.ndarray:
    return np.stack(np.unravel_index(flat, (N,) * n), axis=-1).astype(np.int64)


class Risometry:
    """A risometry from ``ball`` onto ``target`` (same depth) in per-node normal form.

    When the target differs from the domain, relative indices are carried over
    unchanged after the labels are applied, which is a translation by the
    difference of the residues.
    """

    def __init__(self, ball: Ball, labels, target: Ball | None = None):
        target = ball if target is None else target
        if target.depth != ball.depth or target.ctx != ball.ctx:
            raise DepthMismatch("risometry domain and target must have the same depth")
        self.ball = ball
        self.target = target
        p, n, h = ball.ctx.p, ball.ctx.n, ball.height
        if len(labels) != h:
            raise DomainMismatch(f"expected {h} label levels, got {len(labels)}")
        self.labels = tuple(
            np.asarray(lab, dtype=np.int64).reshape((p**lev,) * n + (n,)) % p
            for lev, lab in enumerate(labels)
        )
        self._relmap = None

    @classmethod
    def identity(cls, ball: Ball, target: Ball | None = None) -> "Risometry":
        p, n = ball.ctx.p, ball.ctx.n
        return cls(ball, [np.zeros((p**lev,) * n + (n,), dtype=np.int64) for lev in range(ball.height)], target)

    @classmethod
    def random(cls, ball: Ball, rng: np.random.Generator, target: Ball | None = None) -> "Risometry":
        p, n = ball.ctx.p, ball.ctx.n
        return cls(
            ball,
            [rng.integers(0, p, size=(p**lev,) * n + (n,)) for lev in range(ball.height)],
            target,
        )

    @classmethod
    def translation(cls, ball: Ball, t) -> "Risometry":
        """Translation by t; t must have valuation at least the depth of the ball."""
        ctx = ball.ctx
        t = as_coords(t, ctx)
        if any(c % ctx.p**ball.depth for c in t):
            raise DomainMismatch("translation vector does not preserve the ball")
        grid = ball.coords_grid()
        img = (grid + np.array(t, dtype=np.int64).reshape((-1,) + (1,) * ctx.n)) % ctx.q
        return decompose(ball, _abs_to_rel(ball, img))

    @property
    def ctx(self) -> PadicContext:
        return self.ball.ctx

    @property
    def relmap(self) -> np.ndarray:
        if self._relmap is None:
            self._relmap = _labels_to_relmap(self.ctx.p, self.ctx.n, self.ball.height, self.labels)
        return self._relmap

    @property
    def flatmap(self) -> np.ndarray:
        return _flat(self.relmap, self.ball.side).ravel()

    def apply(self, x) -> tuple[int, ...]:
        k = self.ball.rel_index(x)
        return self.target.point_at(self.relmap[k])

    def __call__(self, x):
        return self.apply(x)

    def as_dict(self) -> dict:
        return {x: self.apply(x) for x in self.ball.points()}

    def compose(self, other: "Risometry") -> "Risometry":
        """self after other."""
        if other.target != self.ball:
            raise DomainMismatch("composition needs other.target == self.ball")
        fm = self.flatmap[other.flatmap]
        return decompose(other.ball, fm, target=self.target)

    __matmul__ = compose

    def inverse(self) -> "Risometry":
        fm = self.flatmap
        inv = np.empty_like(fm)
        inv[fm] = np.arange(fm.size)
        return decompose(self.target, inv, target=self.ball)

    def pullback(self, col: Coloring) -> Coloring:
        """The coloring col after self, living on self.ball."""
        if col.ball != self.target:
            raise DomainMismatch("coloring must live on the target ball")
        flat = col.colors.ravel()[self.flatmap]
        return Coloring(self.ball, flat.reshape(self.ball.shape))

    def __eq__(self, other):
        return (
            isinstance(other, Risometry)
            and self.ball == other.ball
            and self.target == other.target
            and all(np.array_equal(a, b) for a, b in zip(self.labels, other.labels))
        )

    def __hash__(self):
        return hash((self.ball, self.target, tuple(a.tobytes() for a in self.labels)))

    def __repr__(self):
        return f"Risometry({self.ball} -> {self.target}, {len(self.nonzero_labels())} nonzero labels)"

    def is_identity(self) -> bool:
        return self.ball == self.target and all(not a.any() for a in self.labels)

    def nonzero_labels(self) -> dict[Ball, tuple[int, ...]]:
        out = {}
        step = self.ctx.p**self.ball.depth
        for lev, lab in enumerate(self.labels):
            nz = np.argwhere(lab.any(axis=-1))
            for j in nz.tolist():
                res = tuple(r + step * a for r, a in zip(self.ball.residue, j))
                out[Ball(self.ctx, self.ball.depth + lev, res)] = tuple(lab[tuple(j)].tolist())
        return out

    def to_json(self) -> dict:
        return {
            "ctx": self.ctx.to_json(),
            "ball": self.ball.to_json(),
            "target": self.target.to_json(),
            "labels": {str(b): list(t) for b, t in self.nonzero_labels().items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Risometry":
        ctx = PadicContext.from_json(obj["ctx"])
        ball = Ball.from_json(ctx, obj["ball"])
        target = Ball.from_json(ctx, obj["target"])
        out = cls.identity(ball, target)
        labels = [a.copy() for a in out.labels]
        step = ctx.p**ball.depth
        for key, t in obj["labels"].items():
            depth_s, res_s = key.split(":")
            depth = int(depth_s)
            res = [int(a) for a in res_s.split(",")]
            lev = depth - ball.depth
            j = tuple(((r - r0) % ctx.p**depth) // step for r, r0 in zip(res, ball.residue))
            labels[lev][j] = t
        return cls(ball, labels, target)


def _abs_to_rel(ball: Ball, img: np.ndarray) -> np.ndarray:
    """Absolute coordinates (n,)+shape -> flat relative indices in ``ball``."""
    ctx = ball.ctx
    r = np.array(ball.residue, dtype=np.int64).reshape((-1,) + (1,) * (img.ndim - 1))
    rel = ((img - r) % ctx.q) // ctx.p**ball.depth
    return _flat(np.moveaxis(rel, 0, -1), ball.side).ravel()


def _normalize_map(ball: Ball, f, target: Ball) -> np.ndarray:
    """Any accepted map description -> flat array of relative target indices."""
    N, n = ball.side, ball.ctx.n
    if isinstance(f, np.ndarray):
        arr = f.astype(np.int64)
        if arr.shape == (N**n,):
            return arr
        if arr.shape == ball.shape + (n,):
            return _flat(arr, N).ravel()
        raise DomainMismatch(f"map array has shape {arr.shape}")
    if isinstance(f, dict):
        get = lambda x: f[x]  # noqa: E731
    else:
        get = f
    out = np.empty(N**n, dtype=np.int64)
    for i, x in enumerate(ball.points()):
        y = as_coords(get(x), ball.ctx)
        if not target.contains(y):
            raise NotBijective(f"{x} is sent outside the target ball")
        k = target.rel_index(y)
        out[i] = int(np.ravel_multi_index(k, (N,) * n))
    return out


def decompose(ball: Ball, f, target: Ball | None = None) -> Risometry:
    """Per-node normal form of a bijection, or NotRisometry / NotBijective."""
    target = ball if target is None else target
    if target.depth != ball.depth:
        raise DepthMismatch("domain and target must have the same depth")
    fm = _normalize_map(ball, f, target)
    p, n, h = ball.ctx.p, ball.ctx.n, ball.height
    N = ball.side
    if np.unique(fm).size != fm.size:
        raise NotBijective("map is not injective")
    rel = _unflat(fm, N, n).reshape(ball.shape + (n,))
    labels = []
    for lev in range(h):
        sl = tuple(slice(0, p**lev) for _ in range(n))
        labels.append((rel[sl] // p**lev) % p)
    phi = Risometry(ball, labels, target)
    if not np.array_equal(phi.flatmap, fm):
        raise NotRisometry("map does not preserve rv of differences")
    return phi


def _rel_rv(diff: np.ndarray, p: int, h: int):
    """rv of relative difference vectors along the last axis (valuation h = zero)."""
    q = p**h
    diff = diff % q
    lam = val_array(diff, p, h).min(axis=-1)
    u = (diff // np.power(p, np.minimum(lam, h - 1))[..., None]) % p
    u = np.where((lam < h)[..., None], u, 0)
    return lam, u


def is_risometry(ball: Ball, f, target: Ball | None = None) -> bool:
    """All-pairs check of rv(f(x) - f(y)) = rv(x - y); independent of the normal form."""
    target = ball if target is None else target
    if target.depth != ball.depth:
        raise DepthMismatch("domain and target must have the same depth")
    fm = _normalize_map(ball, f, target)
    if np.unique(fm).size != fm.size:
        raise NotBijective("map is not injective")
    p, n, h, N = ball.ctx.p, ball.ctx.n, ball.height, ball.side
    if h == 0:
        return True
    src = _unflat(np.arange(N**n), N, n)
    dst = _unflat(fm, N, n)
    chunk = max(1, (1 << 22) // max(1, N**n))
    for start in range(0, N**n, chunk):
        a = src[start : start + chunk, None, :] - src[None, :, :]
        b = dst[start : start + chunk, None, :] - dst[None, :, :]
        la, ua = _rel_rv(a, p, h)
        lb, ub = _rel_rv(b, p, h)
        if not (np.array_equal(la, lb) and np.array_equal(ua, ub)):
            return False
    return True


# ---------------------------------------------------------------------------
# canonical forms


@lru_cache(maxsize=None)
def _digits(p: int, k: int) -> np.ndarray:
    return np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64).reshape(p**k, k)


@lru_cache(maxsize=None)
def _shift_table(p: int, k: int) -> np.ndarray:
    """perm[s, e] = flat index of digit vector e + s (mod p)."""
    d = _digits(p, k)
    summed = (d[None, :, :] + d[:, None, :]) % p
    return summed @ (p ** np.arange(k - 1, -1, -1, dtype=np.int64))


@dataclass
class _Levels:
    """Bottom-up canonicalisation data for a batch of colored trees.

    ids[l]: class of every node at relative level l, shape (B,) + (p^l,)*k.
    shifts[l]: chosen child shift (flat index into F_p^k) for every node, l < h.
    tables[l]: children classes of each class at level l (rows, canonical order).
    colors: leaf class -> color value.
    """

    p: int
    k: int
    h: int
    ids: list
    shifts: list
    tables: list
    colors: np.ndarray


def canon_levels(arr: np.ndarray, p: int, k: int) -> _Levels:
    """Canonicalise a batch of colorings given as an array (B,) + (p^h,)*k."""
    arr = np.asarray(arr)
    B = arr.shape[0]
    N = arr.shape[1] if k else 1
    h = 0
    while p**h < N:
        h += 1
    colors, leaf = np.unique(arr, return_inverse=True)
    ids: list = [None] * (h + 1)
    shifts: list = [None] * h
    tables: list = [None] * h
    ids[h] = leaf.reshape(arr.shape)
    P = p**k
    perm = _shift_table(p, k)
    for lev in range(h - 1, -1, -1):
        cur = ids[lev + 1]
        sub = p**lev
        shape = (B,) + sum(((p, sub) for _ in range(k)), ())
        cur = cur.reshape(shape)
        order = (0,) + tuple(2 + 2 * i for i in range(k)) + tuple(1 + 2 * i for i in range(k))
        rows = cur.transpose(order).reshape(-1, P)
        cand = rows[:, perm]  # (R, shift, child)
        R = rows.shape[0]
        uniq, inv = np.unique(cand.reshape(-1, P), axis=0, return_inverse=True)
        rank = inv.reshape(R, P)
        best = rank.argmin(axis=1)
        best_rank = rank[np.arange(R), best]
        kept, dense = np.unique(best_rank, return_inverse=True)
        tables[lev] = uniq[kept]
        ids[lev] = dense.reshape((B,) + (sub,) * k)
        shifts[lev] = best.reshape((B,) + (sub,) * k)
    return _Levels(p, k, h, ids, shifts, tables, colors)


def _encode(levels: _Levels, lev: int, cid: int, memo: dict) -> bytes:
    key = (lev, cid)
    if key in memo:
        return memo[key]
    if lev == levels.h:
        out = str(int(levels.colors[cid])).encode()
    else:
        out = b"(" + b",".join(_encode(levels, lev + 1, int(c), memo) for c in levels.tables[lev][cid]) + b")"
    memo[key] = out
    return out


@dataclass(frozen=True)
class CanonicalForm:
    """Risometry invariant of a colored ball: equal forms iff risometric."""

    p: int
    n: int
    height: int
    encoding: bytes

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.full_bytes()).hexdigest()

    def full_bytes(self) -> bytes:
        return f"p{self.p}n{self.n}h{self.height}:".encode() + self.encoding

    def to_json(self) -> dict:
        return {"digest": self.digest, "encoding": self.full_bytes().decode()}


def _canonical_map(levels: _Levels, b: int) -> np.ndarray:
    """Relative canonical position -> relative actual position for batch item b."""
    p, k, h = levels.p, levels.k, levels.h
    N = p**h
    kc = np.indices((N,) * k, dtype=np.int64).reshape(k, -1)
    actual = np.zeros_like(kc)
    digits = _digits(p, k)
    for lev in range(h):
        node = actual % p**lev
        s = levels.shifts[lev][(b,) + tuple(node)]
        dc = (kc // p**lev) % p
        actual += ((dc + digits[s].T) % p) * p**lev
    return actual.T.reshape((N,) * k + (k,))


def canonicalize(col: Coloring, ball: Ball | None = None) -> CanonicalForm:
    if ball is not None and ball != col.ball:
        col = col.restrict(ball)
    ctx = col.ctx
    lv = canon_levels(col.colors[None], ctx.p, ctx.n)
    return CanonicalForm(ctx.p, ctx.n, col.ball.height, _encode(lv, 0, int(np.ravel(lv.ids[0][0])[0]), {}))


def canonizer(col: Coloring) -> tuple[CanonicalForm, Risometry]:
    """The canonical form together with kappa such that col after kappa is canonical."""
    ctx = col.ctx
    lv = canon_levels(col.colors[None], ctx.p, ctx.n)
    form = CanonicalForm(ctx.p, ctx.n, col.ball.height, _encode(lv, 0, int(np.ravel(lv.ids[0][0])[0]), {}))
    kappa = decompose(col.ball, _canonical_map(lv, 0))
    return form, kappa


def canonical_coloring(col: Coloring) -> Coloring:
    _, kappa = canonizer(col)
    return kappa.pullback(col)


def riso_equiv(col1: Coloring, col2: Coloring) -> Risometry | None:
    """A color-respecting risometry from col1's ball onto col2's ball, or None.

    Witnesses are kappa2 after kappa1^-1, so they compose compatibly across a
    family of colorings.
    """
    if col1.ball.depth != col2.ball.depth or col1.ctx != col2.ctx:
        raise DepthMismatch("riso_equiv needs balls of the same depth")
    f1, k1 = canonizer(col1)
    f2, k2 = canonizer(col2)
    if f1 != f2:
        return None
    fm = k2.flatmap[k1.inverse().flatmap]
    return decompose(col1.ball, fm, target=col2.ball)


# ---------------------------------------------------------------------------
# translatability


def graph_matrix(V: Subspace, indices, q: int) -> np.ndarray:
    """L with V = {(x, x L)} over the given exhibition, entries lifted to Z/q."""
    I = list(indices)
    J = [j for j in range(V.n) if j not in I]
    B = sympy.Matrix(V.basis)
    BI = B.extract(list(range(V.dim)), I)
    if int(BI.det()) % V.p == 0:
        raise NotAnExhibition(f"{I} does not exhibit {V}")
    L = BI.inv_mod(V.p) * B.extract(list(range(V.dim)), J)
    return np.array(L.tolist(), dtype=np.int64).reshape(V.dim, len(J)) % V.p % q


@dataclass
class _Sheared:
    ball: Ball
    I: list
    J: list
    L: np.ndarray
    arr: np.ndarray  # I axes first, then J axes; relative coordinates of the sheared ball
    shear_res: tuple  # residue of the sheared ball


def _shear_rel(ball: Ball, I, J, L, rel: np.ndarray, inverse: bool) -> np.ndarray:
    """Map relative coordinates (n, ...) of ball <-> sheared ball, via absolute coordinates."""
    ctx = ball.ctx
    q, step = ctx.q, ctx.p**ball.depth
    r = np.array(ball.residue, dtype=np.int64)
    rs = r.copy()
    if J:
        rs[J] = (r[J] - r[I] @ L) % step
    src_res, dst_res = (rs, r) if inverse else (r, rs)
    shape = (-1,) + (1,) * (rel.ndim - 1)
    z = (src_res.reshape(shape) + step * rel) % q
    out = z.copy()
    sign = 1 if inverse else -1
    for jj, j in enumerate(J):
        acc = np.zeros(z.shape[1:], dtype=np.int64)
        for ii, i in enumerate(I):
            acc = (acc + int(L[ii, jj]) * z[i]) % q
        out[j] = (z[j] + sign * acc) % q
    return ((out - dst_res.reshape(shape)) % q) // step


def _shear(col: Coloring, I, L) -> _Sheared:
    ball = col.ball
    n = ball.ctx.n
    J = [j for j in range(n) if j not in I]
    kp = np.indices(ball.shape, dtype=np.int64)
    k = _shear_rel(ball, I, J, L, kp, inverse=True)
    arr = col.colors[tuple(k)]
    arr = arr.transpose(list(I) + J)
    r = np.array(ball.residue, dtype=np.int64)
    rs = r.copy()
    if J:
        rs[J] = (r[J] - r[I] @ L) % ball.ctx.p**ball.depth
    return _Sheared(ball, list(I), J, L, arr, tuple(rs.tolist()))


def _fiber_levels(sh: _Sheared) -> _Levels:
    ctx = sh.ball.ctx
    d = len(sh.I)
    N = sh.ball.side
    batch = sh.arr.reshape((N**d,) + (N,) * (ctx.n - d))
    return canon_levels(batch, ctx.p, ctx.n - d)


def _level_criterion(lv: _Levels, d: int, N: int) -> bool:
    """Fiber classes at relative level mu depend on x only through x mod p^(mu-1)."""
    p, k, h = lv.p, lv.k, lv.h
    for mu in range(1, h + 1):
        ids = lv.ids[mu].reshape((N,) * d + (p**mu,) * k)
        lo = p ** (mu - 1)
        split = sum(((N // lo, lo) for _ in range(d)), ()) + (p**mu,) * k
        a = ids.reshape(split)
        ref = a[tuple(slice(0, 1) if i % 2 == 0 else slice(None) for i in range(2 * d))]
        if not np.array_equal(np.broadcast_to(ref, a.shape), a):
            return False
    return True


@dataclass
class TranslatabilityResult:
    """Outcome of a translatability query.

    ``filter`` names the check that rejected ("fiber-equivalence",
    "pointwise" or "full"), and is None on success.
    """

    translatable: bool
    V: Subspace
    filter: str | None = None
    straightener: Risometry | None = None
    lift: Lift | None = None
    precision: int = 0

    def __bool__(self):
        return self.translatable


def _build_straightener(col: Coloring, sh: _Sheared, lv: _Levels) -> Risometry:
    ctx = col.ctx
    p, n = ctx.p, ctx.n
    d = len(sh.I)
    N = sh.ball.side
    h = sh.ball.height
    k = n - d
    digits = _digits(p, k)
    # psi on sheared relative coordinates, points ordered I axes then J axes
    x = np.indices((N,) * d, dtype=np.int64).reshape(d, -1)  # (d, X)
    y = np.indices((N,) * k, dtype=np.int64).reshape(k, -1)  # (k, Y)
    X, Y = x.shape[1], y.shape[1]
    b = np.repeat(np.arange(X), Y)
    yc = np.tile(y, (1, X))  # (k, X*Y)
    actual = np.zeros_like(yc)
    for lev in range(h):
        node = actual % p**lev
        s = lv.shifts[lev][(b,) + tuple(node)]
        dc = (yc // p**lev) % p
        actual += ((dc + digits[s].T) % p) * p**lev
    xs = np.repeat(x, Y, axis=1)
    # reassemble coordinates in original axis order
    src = np.zeros((n, X * Y), dtype=np.int64)
    dst = np.zeros((n, X * Y), dtype=np.int64)
    for ii, i in enumerate(sh.I):
        src[i] = xs[ii]
        dst[i] = xs[ii]
    for jj, j in enumerate(sh.J):
        src[j] = yc[jj]
        dst[j] = actual[jj]
    # phi = M^-1 psi M, expressed on relative coordinates of the original ball
    kin = _shear_rel(sh.ball, sh.I, sh.J, sh.L, src, inverse=True)
    kout = _shear_rel(sh.ball, sh.I, sh.J, sh.L, dst, inverse=True)
    fin = _flat(kin.T, N)
    fout = _flat(kout.T, N)
    fm = np.empty(N**n, dtype=np.int64)
    fm[fin] = fout
    return decompose(col.ball, fm)


def check_translatable(
    col: Coloring,
    V: Subspace,
    lift: Lift | None = None,
    prefilters: bool = True,
    want_straightener: bool = True,
) -> TranslatabilityResult:
    ctx = col.ctx
    d = V.dim
    m = ctx.m
    if d == 0:
        phi = Risometry.identity(col.ball) if want_straightener else None
        return TranslatabilityResult(True, V, straightener=phi, precision=m)
    if d == ctx.n:
        if col.is_constant():
            phi = Risometry.identity(col.ball) if want_straightener else None
            return TranslatabilityResult(True, V, straightener=phi, precision=m)
        return TranslatabilityResult(False, V, filter="full", precision=m)
    lift = lift or Lift.canonical(V, ctx)
    I = list(lift.exhibition.indices)
    sh = _shear(col, I, lift.L)
    N = col.ball.side
    lv = _fiber_levels(sh)
    if prefilters:
        if not np.all(lv.ids[0] == lv.ids[0].flat[0]):
            return TranslatabilityResult(False, V, filter="fiber-equivalence", lift=lift, precision=m)
        if _pointwise_failure(sh) is not None:
            return TranslatabilityResult(False, V, filter="pointwise", lift=lift, precision=m)
    if not _level_criterion(lv, d, N):
        return TranslatabilityResult(False, V, filter="full", lift=lift, precision=m)
    phi = _build_straightener(col, sh, lv) if want_straightener else None
    return TranslatabilityResult(True, V, straightener=phi, lift=lift, precision=m)


def is_translatable(col: Coloring, V: Subspace, ball: Ball | None = None, lift: Lift | None = None) -> Risometry | None:
    """A straightener for col in direction V, or None."""
    if ball is not None and ball != col.ball:
        col = col.restrict(ball)
    return check_translatable(col, V, lift=lift).straightener


def translatable(col: Coloring, V: Subspace, lift: Lift | None = None) -> bool:
    return check_translatable(col, V, lift=lift, prefilters=False, want_straightener=False).translatable


def tsp(col: Coloring, ball: Ball | None = None) -> Subspace:
    """Sum of all translatable lines."""
    if ball is not None and ball != col.ball:
        col = col.restrict(ball)
    ctx = col.ctx
    if col.is_constant():
        return Subspace.full(ctx.p, ctx.n)
    out = Subspace.zero(ctx.p, ctx.n)
    for line in lines(ctx.p, ctx.n):
        if line <= out:
            continue
        if translatable(col, line):
            out = out + line
    return out


# ---------------------------------------------------------------------------
# pointwise translatability


def _pointwise_failure(sh: _Sheared):
    """First (x, y, lam) in sheared relative coordinates violating the condition."""
    ctx = sh.ball.ctx
    p, n = ctx.p, ctx.n
    d = len(sh.I)
    k = n - d
    N = sh.ball.side
    h = sh.ball.height
    _, A = np.unique(sh.arr, return_inverse=True)
    A = A.reshape(sh.arr.shape)
    C = int(A.max()) + 1
    flatA = A.reshape(N**d, N**k)
    y = np.indices((N,) * k, dtype=np.int64).reshape(k, -1)
    for lam in range(h):
        mod = p ** (lam + 1)
        yb = _flat((y % mod).T, mod)  # (Y,)
        Yb = mod**k
        P = np.zeros((N**d, Yb, C), dtype=bool)
        xi = np.repeat(np.arange(N**d), N**k)
        P[xi, np.tile(yb, N**d), flatA.ravel()] = True
        P = P.reshape((N,) * d + (Yb, C))
        split = sum(((N // mod, mod) for _ in range(d)), ()) + (Yb, C)
        Q = P.reshape(split).all(axis=tuple(2 * i for i in range(d)))  # (mod,)*d + (Yb, C)
        sib = sum(((p, mod // p) for _ in range(d)), ()) + (Yb, C)
        Qs = Q.reshape(sib)
        top = tuple(2 * i for i in range(d))
        total = Qs.sum(axis=top, keepdims=True)
        others_ok = (total - Qs) == p**d - 1
        R = others_ok.reshape((mod,) * d + (Yb, C))
        # gather for each (x, y)
        xr = np.indices((N,) * d, dtype=np.int64).reshape(d, -1) % mod
        ok = R[tuple(xr[:, :, None].repeat(N**k, axis=2)) + (yb[None, :].repeat(N**d, axis=0), flatA)]
        if not ok.all():
            xf, yf = np.argwhere(~ok)[0]
            return int(xf), int(yf), lam
    return None


@dataclass
class PointwiseResult:
    ok: bool
    witness: tuple | None = None  # (y, x') in absolute coordinates

    def __bool__(self):
        return self.ok


def pointwise_translatable(col: Coloring, V: Subspace, projection: Projection | None = None) -> PointwiseResult:
    ctx = col.ctx
    if V.dim == 0:
        return PointwiseResult(True)
    projection = projection or V.first_exhibition()
    if not projection.is_exhibition_of(V):
        raise NotAnExhibition(f"{projection.indices} does not exhibit {V}")
    I = list(projection.indices)
    L = graph_matrix(V, I, ctx.q)
    sh = _shear(col, I, L)
    fail = _pointwise_failure(sh)
    if fail is None:
        return PointwiseResult(True)
    xf, yf, lam = fail
    d, n, N = V.dim, ctx.n, col.ball.side
    xs = np.array(np.unravel_index(xf, (N,) * d), dtype=np.int64)
    ys = np.array(np.unravel_index(yf, (N,) * (n - d)), dtype=np.int64)
    # locate the offending x' by brute force among the siblings at level lam
    sub_arr = sh.arr.reshape((N**d,) + (N,) * (n - d))
    color = sh.arr[tuple(xs) + tuple(ys)]
    mod = ctx.p ** (lam + 1)
    yb_mask = np.all(
        (np.indices((N,) * (n - d)) % mod) == (ys % mod).reshape((-1,) + (1,) * (n - d)), axis=0
    )
    for xf2 in range(N**d):
        x2 = np.array(np.unravel_index(xf2, (N,) * d), dtype=np.int64)
        diff = (x2 - xs) % N
        if diff.any() and int(val_array(diff, ctx.p, col.ball.height).min()) == lam:
            if not np.any(sub_arr[xf2][yb_mask] == color):
                rel = np.zeros((n, 2), dtype=np.int64)
                rel[I, 0] = xs
                rel[sh.J, 0] = ys
                rel[I, 1] = x2
                back = _shear_rel(col.ball, I, sh.J, L, rel, inverse=True)
                y_abs = col.ball.point_at(back[:, 0])
                x_abs = tuple(col.ball.point_at(back[:, 1])[i] for i in I)
                return PointwiseResult(False, (y_abs, x_abs))
    return PointwiseResult(False, None)


# ---------------------------------------------------------------------------
# translaters


@dataclass
class Translater:
    """A family of risometries alpha_x of a ball indexed by x in pi(B - B)."""

    ball: Ball
    projection: Projection
    V: Subspace
    maps: dict = field(default_factory=dict)  # x (tuple over I) -> flat relative map

    def alpha(self, x) -> Risometry:
        return decompose(self.ball, self.maps[tuple(x)])


def _translation_flatmap(ball: Ball, t) -> np.ndarray:
    ctx = ball.ctx
    grid = ball.coords_grid()
    img = (grid + np.array(t, dtype=np.int64).reshape((-1,) + (1,) * ctx.n)) % ctx.q
    return _abs_to_rel(ball, img)


def translater_from_straightener(col: Coloring, V: Subspace, phi: Risometry, lift: Lift | None = None) -> Translater:
    """alpha_x = phi after (translation by the lift vector over x) after phi^-1."""
    ctx = col.ctx
    ball = col.ball
    lift = lift or Lift.canonical(V, ctx)
    I = list(lift.exhibition.indices)
    J = [j for j in range(ctx.n) if j not in I]
    step = ctx.p**ball.depth
    fm = phi.flatmap
    inv = np.empty_like(fm)
    inv[fm] = np.arange(fm.size)
    out = Translater(ball, lift.exhibition, V)
    for xr in itertools.product(range(ball.side), repeat=len(I)):
        x = np.array(xr, dtype=np.int64) * step % ctx.q
        t = np.zeros(ctx.n, dtype=np.int64)
        t[I] = x
        if J:
            t[J] = (x @ lift.L) % ctx.q
        tau = _translation_flatmap(ball, t)
        out.maps[tuple(int(a) for a in x)] = fm[tau[inv]]
    return out


@dataclass
class TranslaterCheck:
    ok: bool
    failed: str | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def verify_translater(T: Translater, col: Coloring) -> TranslaterCheck:
    """Check invariance, the composition law, the projection law and dir in V."""
    ball = T.ball
    ctx = ball.ctx
    I = list(T.projection.indices)
    colors = col.colors.ravel()
    grid = ball.coords_grid().reshape(ctx.n, -1)
    keys = list(T.maps)
    for x in keys:
        fm = T.maps[x]
        if not np.array_equal(colors[fm], colors):
            return TranslaterCheck(False, "invariance", (x,))
        img = grid[:, fm]
        diff = (img - grid) % ctx.q
        if not np.all(diff[I] == np.array(x, dtype=np.int64)[:, None] % ctx.q):
            return TranslaterCheck(False, "projection", (x,))
        nz = diff.any(axis=0)
        if nz.any():
            lam = val_array(diff[:, nz], ctx.p, ctx.m).min(axis=0)
            u = (diff[:, nz] // ctx.p**lam) % ctx.p
            for col_u in np.unique(u.T, axis=0):
                if not T.V.contains(tuple(col_u.tolist())):
                    return TranslaterCheck(False, "direction", (x, tuple(col_u.tolist())))
    for x1 in keys:
        for x2 in keys:
            s = tuple((a + b) % ctx.q for a, b in zip(x1, x2))
            if s not in T.maps:
                return TranslaterCheck(False, "composition", (x1, x2))
            if not np.array_equal(T.maps[x1][T.maps[x2]], T.maps[s]):
                return TranslaterCheck(False, "composition", (x1, x2))
    return TranslaterCheck(True)
