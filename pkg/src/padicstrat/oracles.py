"""Brute-force reference implementations used to check the fast code paths.

Nothing here uses the per-node normal form or the canonical engine, except
all_label_maps, which enumerates normal forms so they can be compared
with the brute-force searches.
"""
from __future__ import annotations

import itertools

import numpy as np

from .core import rv_coords, valuation_coords


def rv_diff(x, y, p, m):
    return rv_coords([a - b for a, b in zip(x, y)], p, m)


def rv_preserving_bijections(ball):
    """Every bijection of the ball's points with rv(f(x)-f(y)) = rv(x-y), by backtracking."""
    ctx = ball.ctx
    p, m = ctx.p, ctx.m
    pts = list(ball.points())
    npts = len(pts)
    rvs = [[rv_diff(a, b, p, m) for b in pts] for a in pts]
    out = []
    img = [None] * npts
    used = [False] * npts

    def rec(i):
        if i == npts:
            out.append(tuple(img))
            return
        for j in range(npts):
            if used[j]:
                continue
            if all(rvs[j][img[k]] == rvs[i][k] for k in range(i)):
                used[j] = True
                img[i] = j
                rec(i + 1)
                used[j] = False
        img[i] = None

    rec(0)
    return pts, out


def lift_translates(ball, lift):
    """For each lift element t with v(t) >= depth: the point permutation z -> z + t."""
    ctx = ball.ctx
    pts = list(ball.points())
    index = {x: i for i, x in enumerate(pts)}
    step = ctx.p**ball.depth
    perms = []
    for t in lift.elements().tolist():
        if any(c % step for c in t):
            continue
        perms.append([index[tuple((a + b) % ctx.q for a, b in zip(x, t))] for x in pts])
    return perms


def invariant(colors, perms):
    return all(all(colors[i] == colors[pi[i]] for i in range(len(colors))) for pi in perms)


def translatable_bruteforce(col, lift, maps):
    """Some map phi in ``maps`` (index tuples) makes col after phi invariant under the lift."""
    colors = col.colors.ravel().tolist()
    perms = lift_translates(col.ball, lift)
    for img in maps:
        pulled = [colors[j] for j in img]
        if invariant(pulled, perms):
            return True
    return False


def fiber_respecting_risometries(ball, I):
    """All normal-form label assignments that fix the I-coordinates, as index tuples.

    Labels are chosen freely on the complementary coordinates at every node.
    """
    ctx = ball.ctx
    p, n, h = ctx.p, ctx.n, ball.height
    J = [j for j in range(n) if j not in I]
    nodes = [(lev, node) for lev in range(h) for node in itertools.product(range(p**lev), repeat=n)]
    N = ball.side
    ks = list(itertools.product(range(N), repeat=n))
    for choice in itertools.product(itertools.product(range(p), repeat=len(J)), repeat=len(nodes)):
        lab = {}
        for (lev, node), t in zip(nodes, choice):
            full = [0] * n
            for j, a in zip(J, t):
                full[j] = a
            lab[(lev, node)] = full
        img = []
        for k in ks:
            out = [0] * n
            for lev in range(h):
                node = tuple(a % p**lev for a in k)
                t = lab[(lev, node)]
                for i in range(n):
                    out[i] += (((k[i] // p**lev) % p + t[i]) % p) * p**lev
            img.append(int(np.ravel_multi_index(tuple(out), (N,) * n)))
        yield tuple(img)


def pointwise_bruteforce(col, V, I):
    """The definition, literally: for all y and all x' in pi(B) some y' over x' works."""
    ball = col.ball
    ctx = ball.ctx
    p, m = ctx.p, ctx.m
    pts = list(ball.points())
    colors = col.colors.ravel().tolist()
    by_proj = {}
    for i, z in enumerate(pts):
        by_proj.setdefault(tuple(z[a] for a in I), []).append(i)
    for i, y in enumerate(pts):
        for xp, fiber in by_proj.items():
            ok = False
            for j in fiber:
                if colors[j] != colors[i]:
                    continue
                if j == i:
                    ok = True
                    break
                r = rv_diff(y, pts[j], p, m)
                if V.contains(r.u):
                    ok = True
                    break
            if not ok:
                return False
    return True


def val(x, p, m):
    return valuation_coords(x, p, m)


def risometric_bruteforce(col1, col2, maps) -> bool:
    """Some rv-preserving bijection sigma (index tuples over the same ball) has col1 = col2 o sigma."""
    c1 = col1.colors.ravel().tolist()
    c2 = col2.colors.ravel().tolist()
    return any(all(c1[i] == c2[j] for i, j in enumerate(img)) for img in maps)


def all_label_maps(ball):
    """Every normal-form map of the ball, as index tuples (one per label assignment)."""
    import itertools as it

    from .riso import Risometry

    ctx = ball.ctx
    p, n, h = ctx.p, ctx.n, ball.height
    shapes = [(p**lev,) * n + (n,) for lev in range(h)]
    sizes = [int(np.prod(s)) for s in shapes]
    out = []
    for flat in it.product(range(p), repeat=sum(sizes)):
        labels, pos = [], 0
        for s, k in zip(shapes, sizes):
            labels.append(np.array(flat[pos : pos + k], dtype=np.int64).reshape(s))
            pos += k
        out.append(tuple(Risometry(ball, labels).flatmap.tolist()))
    return out


def contracting_maps(ball):
    """All maps f: ball -> ball with v(f(x) - f(y)) > v(x - y) for x != y, by backtracking."""
    ctx = ball.ctx
    p, m = ctx.p, ctx.m
    pts = list(ball.points())
    N = len(pts)
    vals = [[valuation_coords([a - b for a, b in zip(x, y)], p, m) for y in pts] for x in pts]
    out = []
    img = [None] * N

    def rec(i):
        if i == N:
            out.append(tuple(img))
            return
        for j in range(N):
            if all(vals[j][img[k]] > vals[i][k] for k in range(i)):
                img[i] = j
                rec(i + 1)
        img[i] = None

    rec(0)
    return pts, out


def fixed_points(img) -> int:
    return sum(1 for i, j in enumerate(img) if i == j)


def rv_preserving_self_maps(points, p, m):
    """All bijections of a point list onto itself preserving rv of differences."""
    N = len(points)
    rvs = [[rv_diff(a, b, p, m) for b in points] for a in points]
    out = []
    img = [None] * N
    used = [False] * N

    def rec(i):
        if i == N:
            out.append(tuple(img))
            return
        for j in range(N):
            if used[j]:
                continue
            if all(rvs[j][img[k]] == rvs[i][k] for k in range(i)):
                used[j] = True
                img[i] = j
                rec(i + 1)
                used[j] = False
        img[i] = None

    rec(0)
    return out
