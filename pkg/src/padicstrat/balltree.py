"""The tree of balls meeting a set, its skeleton, and valuation-matrix invariants."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import PadicContext, val_array
from .defset import FiniteSet, dim_estimate
from .errors import EmptySet, NotVerified, UnknownFormat
from .geometry import Ball
from .strat import Stratification, node_ball, node_reduce, tsp_with_filters, verify_tstrat


class BallTree:
    """The balls of depth 0..m inside a root ball that meet a point set, ordered by inclusion."""

    def __init__(self, root: Ball, nodes):
        self.root = root
        self.ctx = root.ctx
        nodes = sorted(set(nodes), key=lambda b: (b.depth, b.residue))
        self.nodes = nodes
        self._set = set(nodes)
        self.children: dict[Ball, list[Ball]] = {b: [] for b in nodes}
        for b in nodes:
            if b != root and b.depth > root.depth:
                par = b.parent()
                if par in self.children:
                    self.children[par].append(b)
        for kids in self.children.values():
            kids.sort(key=lambda b: b.residue)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, ball):
        return ball in self._set

    def __eq__(self, other):
        return isinstance(other, BallTree) and self.root == other.root and self.nodes == other.nodes

    def __repr__(self):
        return f"BallTree({self.root}, nodes={len(self)})"

    def counts_by_depth(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.nodes:
            out[b.depth] = out.get(b.depth, 0) + 1
        return out

    def child_count(self, ball: Ball) -> int:
        return len(self.children[ball])

    def bifurcations(self) -> list[Ball]:
        return [b for b in self.nodes if len(self.children[b]) > 1]

    def leaves(self) -> list[Ball]:
        return [b for b in self.nodes if not self.children[b]]

    def is_path(self) -> bool:
        return not self.bifurcations()

    def _subtree(self, ball: Ball) -> dict:
        return {"ball": ball.to_json(), "children": [self._subtree(c) for c in self.children[ball]]}

    def to_json(self) -> dict:
        if not self.nodes:
            return {"ctx": self.ctx.to_json(), "ball": None, "children": []}
        tree = self._subtree(self.root)
        return {"ctx": self.ctx.to_json(), **tree}

    @classmethod
    def from_json(cls, obj: dict) -> "BallTree":
        ctx = PadicContext.from_json(obj["ctx"])
        if obj["ball"] is None:
            return cls(Ball.whole(ctx), [])
        nodes = []

        def walk(node):
            b = Ball.from_json(ctx, node["ball"])
            nodes.append(b)
            for c in node["children"]:
                walk(c)

        walk(obj)
        return cls(nodes[0], nodes)

    def to_dot(self) -> str:
        lines = ["digraph T {"]
        for b in self.nodes:
            lines.append(f'  "{b}" [label="{b}"];')
        for b in self.nodes:
            for c in self.children[b]:
                lines.append(f'  "{b}" -> "{c}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_tree(X: FiniteSet, root: Ball | None = None) -> BallTree:
    """All balls inside ``root`` (default: everything) that meet X."""
    ctx = X.ctx
    root = root or Ball.whole(ctx)
    inside = X.in_ball(root)
    if not inside.any():
        raise EmptySet("the tree of an empty set")
    p, n = ctx.p, ctx.n
    nodes = []
    for lev in range(root.height + 1):
        occ = node_reduce(inside, p, n, lev, np.any)
        for j in np.argwhere(occ).tolist():
            nodes.append(node_ball(root, lev, j))
    return BallTree(root, nodes)


def skeleton(T: BallTree, S0) -> BallTree:
    """The nodes of T that also meet S0 (a FiniteSet or a list of points)."""
    pts = S0.points() if isinstance(S0, FiniteSet) else list(S0)
    if not pts:
        return BallTree(T.root, [])
    keep = [b for b in T.nodes if any(b.contains(x) for x in pts)]
    return BallTree(T.root, keep)


def export(T: BallTree, fmt: str) -> bytes:
    if fmt == "dot":
        return T.to_dot().encode()
    if fmt == "json":
        return (json.dumps(T.to_json(), sort_keys=True) + "\n").encode()
    raise UnknownFormat(f"cannot export a tree as {fmt!r}; use dot or json")


# ---------------------------------------------------------------------------
# valuation matrices


def _canonical_order(D: np.ndarray, idx: list[int]) -> tuple[tuple, list[int]]:
    """Canonical code and point order for an ultrametric valuation matrix."""
    if len(idx) == 1:
        return (-1, ()), idx
    sub = D[np.ix_(idx, idx)]
    off = sub[~np.eye(len(idx), dtype=bool)]
    lam = int(off.min())
    classes: list[list[int]] = []
    seen = set()
    for a in idx:
        if a in seen:
            continue
        cls = [b for b in idx if b == a or D[a, b] > lam]
        seen.update(cls)
        classes.append(cls)
    parts = sorted((_canonical_order(D, c) for c in classes), key=lambda t: t[0])
    code = (lam, tuple(c for c, _ in parts))
    order = [i for _, o in parts for i in o]
    return code, order


@dataclass(frozen=True)
class ValMatrix:
    """Pairwise valuations of a finite point set, in a canonical point order.

    Entries equal to m stand for infinity (the diagonal).
    """

    m: int
    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def of_points(cls, points, ctx: PadicContext) -> "ValMatrix":
        pts = np.array(points, dtype=np.int64).reshape(-1, ctx.n)
        if pts.shape[0] == 0:
            return cls(ctx.m, ())
        diff = (pts[:, None, :] - pts[None, :, :]) % ctx.q
        D = val_array(diff, ctx.p, ctx.m).min(axis=-1)
        _, order = _canonical_order(D, list(range(len(pts))))
        M = D[np.ix_(order, order)]
        return cls(ctx.m, tuple(tuple(int(v) for v in row) for row in M))

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_json(self) -> list:
        return [[None if v >= self.m else v for v in row] for row in self.entries]

    def __str__(self):
        return "[" + "; ".join(" ".join("inf" if v >= self.m else str(v) for v in row) for row in self.entries) + "]"


# ---------------------------------------------------------------------------
# side branches and level reports


@dataclass
class Branch:
    ball: Ball
    stratum: int
    exhibition: tuple
    matrix: ValMatrix
    fiber_independent: bool
    mismatch: tuple | None = None  # (fiber point, other matrix) when the fiber choice matters

    def to_json(self) -> dict:
        out = {
            "ball": self.ball.to_json(),
            "stratum": self.stratum,
            "exhibition": list(self.exhibition),
            "matrix": self.matrix.to_json(),
            "fiber_independent": self.fiber_independent,
        }
        return out


def side_branches(X: FiniteSet, S: Stratification) -> list[Ball]:
    """Maximal balls in the base ball that meet X and miss S_0."""
    base = S.ball
    p, n = base.ctx.p, base.ctx.n
    s0 = S.labels == 0
    xin = X.in_ball(base)
    out = []
    for lev in range(base.height + 1):
        has0 = node_reduce(s0, p, n, lev, np.any)
        hasx = node_reduce(xin, p, n, lev, np.any)
        par0 = node_reduce(s0, p, n, lev - 1, np.any) if lev else None
        for j in np.argwhere(~has0 & hasx).tolist():
            if lev == 0 or par0[tuple(a % p ** (lev - 1) for a in j)]:
                out.append(node_ball(base, lev, j))
    return out


def _fiber_points(S: Stratification, B: Ball, I, j: int) -> dict:
    """Points of S_j in B grouped by their I-coordinates."""
    sub = S.labels[S.ball.sub_slices(B)]
    grid = B.coords_grid().reshape(B.ctx.n, -1).T
    lab = sub.ravel()
    groups: dict = {}
    for x in grid[lab == j].tolist():
        groups.setdefault(tuple(x[i] for i in I), []).append(tuple(x))
    return groups


def side_branch_invariants(X: FiniteSet, S: Stratification, verified: bool = False) -> dict[Ball, Branch]:
    """For each side branch: the canonical valuation matrix of S_j on an exhibition fiber."""
    if not verified:
        rep = verify_tstrat(S)
        if not rep:
            raise NotVerified("side branch invariants need a verified stratification", rep)
    out = {}
    ctx = S.ctx
    for B in side_branches(X, S):
        sub = S.restrict(B)
        j = int(sub.labels.min())
        space, _ = tsp_with_filters(sub.as_coloring())
        I = tuple(space.first_exhibition().indices) if space.dim else ()
        groups = _fiber_points(S, B, I, j)
        # fibers over the exhibition image that contain no S_j point count as empty matrices
        mats = {}
        for key, pts in groups.items():
            mats[key] = ValMatrix.of_points(pts, ctx)
        keys = sorted(mats)
        first = mats[keys[0]]
        mismatch = next(((k, mats[k]) for k in keys if mats[k] != first), None)
        total_fibers = B.side ** len(I)
        if mismatch is None and len(groups) < total_fibers:
            mismatch = ("empty fiber", ValMatrix(ctx.m, ()))
        out[B] = Branch(B, j, tuple(I), first, mismatch is None, mismatch)
    return out


def _affine_pieces(values: list[tuple[int, int]]) -> int:
    """Fewest affine pieces covering the points (x, y), taken in order of x."""
    if not values:
        return 0
    pieces = 1
    start = 0
    for i in range(2, len(values) + 1):
        seg = values[start:i]
        if len(seg) <= 2:
            continue
        (x0, y0), (x1, y1) = seg[0], seg[1]
        if any((y - y0) * (x1 - x0) != (y1 - y0) * (x - x0) for x, y in seg[2:]):
            pieces += 1
            start = i - 1
    return pieces


@dataclass
class LevelReport:
    consistent: bool
    level: int
    verdict: str
    skeleton_nodes: int
    bifurcations: int
    by_radius: dict = field(default_factory=dict)
    pieces: int = 0
    witness: dict | None = None

    def __bool__(self):
        return self.consistent

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "consistent": self.consistent,
            "level": self.level,
            "skeleton_nodes": self.skeleton_nodes,
            "bifurcations": self.bifurcations,
            "by_radius": {str(k): [v.to_json() for v in vs] for k, vs in sorted(self.by_radius.items())},
            "affine_pieces": self.pieces,
            "witness": self.witness,
        }


def level_report(X: FiniteSet, S: Stratification, dim: int | None = None) -> LevelReport:
    """Check the structural consequences of "level <= dim X" on the tree of X.

    The skeleton (balls meeting both X and S_0) must be finite, every side
    branch must carry the same valuation matrix on all exhibition fibers,
    and branches of equal radius and stratum must carry equal matrices.
    """
    rep = verify_tstrat(S)
    if not rep:
        raise NotVerified("level report needs a verified stratification", rep)
    d = dim_estimate(X) if dim is None else dim
    T = build_tree(X, S.ball)
    sk = skeleton(T, [x for x in S.stratum(0)])
    inv = side_branch_invariants(X, S, verified=True)
    witness = None
    for br in inv.values():
        if not br.fiber_independent:
            key, other = br.mismatch
            witness = {
                "kind": "fiber-dependence",
                "ball": br.ball.to_json(),
                "matrix": br.matrix.to_json(),
                "other_fiber": list(key) if isinstance(key, tuple) else key,
                "other_matrix": other.to_json(),
            }
            break
    groups: dict = {}
    for br in inv.values():
        groups.setdefault((br.ball.depth, br.stratum), []).append(br)
    by_radius: dict = {}
    for (depth, j), brs in sorted(groups.items()):
        mats = list(dict.fromkeys(b.matrix for b in brs))
        by_radius.setdefault(depth, []).extend(mats)
        if witness is None and len(mats) > 1:
            a = brs[0]
            b = next(x for x in brs if x.matrix != a.matrix)
            witness = {
                "kind": "radius-dependence",
                "balls": [a.ball.to_json(), b.ball.to_json()],
                "matrices": [a.matrix.to_json(), b.matrix.to_json()],
            }
    # radius -> (size, smallest off-diagonal entry), fitted by affine pieces
    seq = []
    for depth in sorted(by_radius):
        m0 = by_radius[depth][0]
        off = [v for i, row in enumerate(m0.entries) for k, v in enumerate(row) if i != k]
        seq.append((depth, min(off) if off else S.ctx.m))
    pieces = _affine_pieces(seq)
    ok = witness is None
    verdict = f"consistent with level ≤ {d}" if ok else "counter-witness"
    return LevelReport(ok, d, verdict, len(sk), len(sk.bifurcations()) if sk.nodes else 0, by_radius, pieces, witness)
