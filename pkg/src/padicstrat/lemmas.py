"""Finite checks of the basic facts about v, rv, dir, GL_n(O), contractions and finite sets.

Each check runs exhaustively on a small context or on seeded random
samples and returns a LemmaCheck counting cases and recording the first
counterexample.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import INF, IntMatrix, PadicContext, rv_coords, val_array, valuation_coords
from .geometry import Ball
from .oracles import contracting_maps, fixed_points, rv_preserving_bijections, rv_preserving_self_maps


@dataclass
class LemmaCheck:
    name: str
    mode: str
    cases: int = 0
    failures: int = 0
    example: object = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def record(self, good: bool, example=None):
        self.cases += 1
        if not good:
            self.failures += 1
            if self.example is None:
                self.example = example

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        out = f"{status} {self.name} [{self.mode}] {self.cases} cases, {self.failures} failures"
        if self.example is not None:
            out += f"; e.g. {self.example}"
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "cases": self.cases,
            "failures": self.failures,
            "example": None if self.example is None else repr(self.example),
            "ok": self.ok,
        }


def _vec(ctx, rng=None):
    if rng is None:
        return list(itertools.product(range(ctx.q), repeat=ctx.n))
    return None


def _sample_vectors(ctx, rng, k):
    return [tuple(int(a) for a in rng.integers(0, ctx.q, size=ctx.n)) for _ in range(k)]


def _pairs(ctx, rng, k):
    if rng is None:
        pts = list(itertools.product(range(ctx.q), repeat=ctx.n))
        return itertools.product(pts, pts)
    return zip(_sample_vectors(ctx, rng, k), _sample_vectors(ctx, rng, k))


def _v(x, ctx):
    return valuation_coords(x, ctx.p, ctx.m)


def _rv(x, ctx):
    return rv_coords(x, ctx.p, ctx.m)


def _add(a, b, q):
    return tuple((x + y) % q for x, y in zip(a, b))


def _sub(a, b, q):
    return tuple((x - y) % q for x, y in zip(a, b))


def _mode(rng):
    return "exhaustive" if rng is None else "random"


def _same_rv(x, ctx, rng):
    """A random x' with rv(x') = rv(x)."""
    lam = _v(x, ctx)
    if lam == INF or lam + 1 >= ctx.m:
        return x
    step = ctx.p ** (lam + 1)
    return tuple(int((a + step * rng.integers(0, ctx.q // step)) % ctx.q) for a in x)


def check_ultrametric(ctx: PadicContext, rng=None, k: int = 1000) -> LemmaCheck:
    out = LemmaCheck(f"ultrametric p={ctx.p} n={ctx.n} m={ctx.m}", _mode(rng))
    for a, b in _pairs(ctx, rng, k):
        out.record(_v(_add(a, b, ctx.q), ctx) >= min(_v(a, ctx), _v(b, ctx)), (a, b))
    return out


def check_rv_sum(ctx: PadicContext, rng=None, k: int = 1000) -> LemmaCheck:
    """When v(a1 + a2) = min v(a_i), rv(a1 + a2) depends only on rv(a1), rv(a2)."""
    out = LemmaCheck(f"rv-sum p={ctx.p} n={ctx.n} m={ctx.m}", _mode(rng))
    q = ctx.q
    if rng is None:
        seen: dict = {}
        for a, b in _pairs(ctx, None, 0):
            s = _add(a, b, q)
            if _v(s, ctx) != min(_v(a, ctx), _v(b, ctx)):
                continue
            key = (_rv(a, ctx), _rv(b, ctx))
            val = _rv(s, ctx)
            prev = seen.setdefault(key, (val, (a, b)))
            out.record(prev[0] == val, (prev[1], (a, b)))
        return out
    while out.cases < k:
        a, b = _sample_vectors(ctx, rng, 2)
        s = _add(a, b, q)
        if _v(s, ctx) != min(_v(a, ctx), _v(b, ctx)):
            continue
        a2, b2 = _same_rv(a, ctx, rng), _same_rv(b, ctx, rng)
        out.record(_rv(_add(a2, b2, q), ctx) == _rv(s, ctx), (a, b, a2, b2))
    return out


def _res_dir(x, ctx):
    r = _rv(x, ctx)
    return r.u


def _is_multiple(u, w, p):
    """u and w span the same line in F_p^n (both nonzero)."""
    return any(all((c * a - b) % p == 0 for a, b in zip(u, w)) for c in range(1, p))


def check_dir_pi(ctx: PadicContext, rng=None, k: int = 1000) -> LemmaCheck:
    """v(pi a) = v(a) iff pibar(dir a) != 0; then pibar(dir a) = dir(pi a), and (pi a, dir a) fix rv(a)."""
    out = LemmaCheck(f"dir-pi p={ctx.p} n={ctx.n} m={ctx.m}", _mode(rng))
    p, n = ctx.p, ctx.n
    projections = [I for d in range(1, n + 1) for I in itertools.combinations(range(n), d)]
    vecs = list(itertools.product(range(ctx.q), repeat=n)) if rng is None else _sample_vectors(ctx, rng, k)
    for a in vecs:
        if _v(a, ctx) == INF:
            continue
        u = _res_dir(a, ctx)
        for I in projections:
            pa = tuple(a[i] for i in I)
            pu = tuple(u[i] for i in I)
            keeps = _v(pa, ctx) == _v(a, ctx)
            good = keeps == any(c % p for c in pu)
            if good and keeps:
                good = _is_multiple(pu, _res_dir(pa, ctx), p)
            out.record(good, (a, I))
    # third clause: same projection and same direction give the same rv
    pairs = _pairs(ctx, rng, k)
    for a, b in pairs:
        if _v(a, ctx) == INF or _v(b, ctx) == INF:
            continue
        for I in projections:
            pa = tuple(a[i] for i in I)
            if pa != tuple(b[i] for i in I) or _v(pa, ctx) != _v(a, ctx):
                continue
            if not _is_multiple(_res_dir(a, ctx), _res_dir(b, ctx), p):
                continue
            out.record(_rv(a, ctx) == _rv(b, ctx), (a, b, I))
    return out


def check_dir_scal(ctx: PadicContext, rng=None, k: int = 1000) -> LemmaCheck:
    """v(<a, b>) > v(a) + v(b) iff <dir a, dir b> = 0, on pairs with v(a) + v(b) < m."""
    out = LemmaCheck(f"dir-scal p={ctx.p} n={ctx.n} m={ctx.m}", _mode(rng))
    p, q = ctx.p, ctx.q
    skipped = 0
    for a, b in _pairs(ctx, rng, k):
        va, vb = _v(a, ctx), _v(b, ctx)
        if va == INF or vb == INF:
            continue
        if va + vb >= ctx.m:
            skipped += 1
            continue
        s = sum(x * y for x, y in zip(a, b)) % q
        vs = valuation_coords([s], p, ctx.m)
        lhs = vs > va + vb
        rhs = sum(x * y for x, y in zip(_res_dir(a, ctx), _res_dir(b, ctx))) % p == 0
        out.record(lhs == rhs, (a, b))
    out.notes.append(f"{skipped} pairs with v(a) + v(b) >= m left undecided")
    return out


def _unimodular_matrices(ctx, rng, k):
    if rng is None:
        for flat in itertools.product(range(ctx.q), repeat=ctx.n * ctx.n):
            M = IntMatrix(ctx, np.array(flat).reshape(ctx.n, ctx.n))
            if M.is_unimodular():
                yield M
    else:
        for _ in range(k):
            yield IntMatrix.random_unimodular(ctx, rng)


def check_gl_action(ctx: PadicContext, rng=None, k: int = 50) -> LemmaCheck:
    """v(Mx) = v(x) and rv(Mx) = M rv(x) for unimodular M."""
    out = LemmaCheck(f"GL_n(O) action p={ctx.p} n={ctx.n} m={ctx.m}", _mode(rng))
    for M in _unimodular_matrices(ctx, rng, k):
        vecs = list(itertools.product(range(ctx.q), repeat=ctx.n)) if rng is None else _sample_vectors(ctx, rng, 40)
        for x in vecs:
            y = tuple(M.apply(x).coords)
            good = _v(y, ctx) == _v(x, ctx) and M.apply_rv(_rv(x, ctx)) == _rv(y, ctx)
            out.record(good, (M.rows if hasattr(M, "rows") else M, x))
    return out


def _random_contraction(ball: Ball, rng):
    """f with f mod p^(depth+l+1) depending only on x mod p^(depth+l), as an index tuple."""
    ctx = ball.ctx
    p, n, h = ctx.p, ctx.n, ball.height
    pts = list(ball.points())
    k = np.indices(ball.shape, dtype=np.int64).reshape(n, -1).T  # relative coordinates, C order
    out = np.zeros_like(k)
    for lev in range(h):
        table = rng.integers(0, p, size=(p**lev,) * n + (n,))
        out += p**lev * table[tuple((k % p**lev).T)]
    flat = np.ravel_multi_index(tuple(out.T), ball.shape)
    return pts, tuple(flat.tolist())


def _is_contracting(vt, img) -> bool:
    img = np.asarray(img)
    after = vt[np.ix_(img, img)]
    return bool(np.all((after > vt) | np.eye(len(img), dtype=bool)))


def check_banach(ball: Ball, rng=None, k: int = 1000) -> LemmaCheck:
    """A contracting self-map of a ball has exactly one fixed point."""
    ctx = ball.ctx
    out = LemmaCheck(f"Banach fixed point p={ctx.p} n={ctx.n} m={ctx.m} ball {ball}", _mode(rng))
    if rng is None:
        pts, maps = contracting_maps(ball)
        for img in maps:
            out.record(fixed_points(img) == 1, img)
        return out
    vt = None
    for _ in range(k):
        pts, img = _random_contraction(ball, rng)
        if vt is None:
            vt = _val_table(pts, ctx)
        if not _is_contracting(vt, img):
            raise AssertionError("generator produced a non-contracting map")
        out.record(fixed_points(img) == 1, img)
    return out


# ---------------------------------------------------------------------------
# finite sets and risometries


def _diff_tables(pts, ctx):
    """Pairwise valuations (m for zero) and dense rv codes of x - y."""
    p, m, n = ctx.p, ctx.m, ctx.n
    P = np.array(pts, dtype=np.int64)
    diff = (P[:, None, :] - P[None, :, :]) % ctx.q
    lam = val_array(diff, p, m).min(axis=-1)
    u = (diff // np.power(p, np.minimum(lam, m - 1))[..., None]) % p
    flat = (u * p ** np.arange(n - 1, -1, -1)).sum(axis=-1)
    raw = np.where(lam >= m, -1, lam * p**n + flat)
    _, codes = np.unique(raw, return_inverse=True)
    codes = codes.reshape(raw.shape)
    return lam, codes, int(codes.max()) + 1


def _rv_code_table(pts, ctx):
    _, codes, k = _diff_tables(pts, ctx)
    return codes, k


def _val_table(pts, ctx):
    return _diff_tables(pts, ctx)[0]


def _subsets(N, rng, k, max_size=None):
    if rng is None:
        for size in range(1, (max_size or N) + 1):
            yield from itertools.combinations(range(N), size)
    else:
        for _ in range(k):
            size = int(rng.integers(1, min(N, max_size or N) + 1))
            yield tuple(sorted(rng.choice(N, size=size, replace=False).tolist()))


def check_finite_sets(ctx: PadicContext, rng=None, k: int = 1000, max_size=None, search_size: int = 4) -> list[LemmaCheck]:
    """Risometries and finite sets T inside O^n.

    (1) the only risometry T -> T is the identity;
    (2) for x1 != x2: (a) some risometry of O^n fixing T setwise sends x1 to x2,
        (b) the smallest ball around x1, x2 misses T, (c) rv(x1 - T) = rv(x2 - T)
        are equivalent;
    (3) a map that is the identity on T is a risometry iff it restricts to a
        risometry of every maximal ball missing T.

    Clause (2) runs on every T; (1) and (3) need a search per T and run on
    sets of at most ``search_size`` points.  Clause (2)(a) needs the full
    risometry group and is skipped on large contexts.
    """
    ball = Ball.whole(ctx)
    small = ctx.num_points <= 16
    if small:
        pts, group = rv_preserving_bijections(ball)
        perms = np.array(group, dtype=np.int64)
    else:
        pts, perms = list(ball.points()), None
    N = len(pts)
    rvt, ncodes = _rv_code_table(pts, ctx)
    vt = _val_table(pts, ctx)
    off = ~np.eye(N, dtype=bool)
    mode = _mode(rng)
    tag = f"p={ctx.p} n={ctx.n} m={ctx.m}"
    c1 = LemmaCheck(f"finite sets (1) rigidity {tag}", mode)
    implications = {
        key: LemmaCheck(f"finite sets (2) {key} {tag}", mode) for key in ("b=>a", "a=>b", "b=>c", "c=>b")
    }
    c3 = LemmaCheck(f"finite sets (3) gluing {tag}", mode)
    codebits = np.left_shift(np.int64(1), rvt)  # needs ncodes <= 63
    assert ncodes <= 63
    for T in _subsets(N, rng, k, max_size):
        Tl = list(T)
        if len(T) <= search_size:
            selfmaps = rv_preserving_self_maps([pts[i] for i in T], ctx.p, ctx.m)
            nontrivial = [s for s in selfmaps if any(i != j for i, j in enumerate(s))]
            c1.record(not nontrivial, ([pts[i] for i in T], [tuple(pts[T[j]] for j in nontrivial[0])] if nontrivial else []))
        maxv = vt[:, Tl].max(axis=1)
        b = maxv[:, None] < vt
        masks = np.bitwise_or.reduce(codebits[:, Tl], axis=1)
        c = masks[:, None] == masks[None, :]
        _tally(implications["b=>c"], off, b, c, pts, T)
        _tally(implications["c=>b"], off, c, b, pts, T)
        if perms is not None:
            inT = np.zeros(N, dtype=bool)
            inT[Tl] = True
            stab = perms[np.all(inT[perms] == inT[None, :], axis=1)]
            a = np.zeros((N, N), dtype=bool)
            a[np.tile(np.arange(N), stab.shape[0]), stab.ravel()] = True
            _tally(implications["b=>a"], off, b, a, pts, T)
            _tally(implications["a=>b"], off, a, b, pts, T)
            if len(T) <= search_size and rng is None:
                fixes = perms[np.all(perms[:, Tl] == np.array(Tl)[None, :], axis=1)]
                glued = _glued_maps(pts, T, vt, ctx)
                c3.record(set(map(tuple, fixes.tolist())) == glued, [pts[i] for i in T])
    if rng is not None:
        for _ in range(min(k, 200)):
            T = next(_subsets(N, rng, 1, max_size))
            g = _random_glued_map(pts, T, vt, ctx, rng)
            c3.record(_is_risometry_map(pts, g, rvt), [pts[i] for i in T])
    keys = ("b=>a", "a=>b", "b=>c", "c=>b") if perms is not None else ("b=>c", "c=>b")
    return [c1] + [implications[key] for key in keys] + [c3]


def _tally(check: LemmaCheck, off, hyp, concl, pts, T):
    """Count pairs (x1, x2) with hyp true; failures where concl is false."""
    relevant = off & hyp
    bad = relevant & ~concl
    check.cases += int(relevant.sum())
    if bad.any():
        check.failures += int(bad.sum())
        if check.example is None:
            i, j = np.argwhere(bad)[0].tolist()
            check.example = (pts[i], pts[j], [pts[t] for t in T])


def _maximal_balls_missing(pts, T, vt, ctx):
    """Partition of the points outside T into maximal balls missing T."""
    m = ctx.m
    out = []
    seen = set()
    for x in range(len(pts)):
        if x in T or x in seen:
            continue
        depth = 1 + max(int(vt[x, t]) for t in T)
        members = [y for y in range(len(pts)) if y not in T and vt[x, y] >= min(depth, m)]
        seen.update(members)
        out.append(members)
    return out


def _ball_risometries(pts, members, ctx):
    sub = [pts[i] for i in members]
    maps = rv_preserving_self_maps(sub, ctx.p, ctx.m)
    return [tuple(members[j] for j in s) for s in maps]


def _glued_maps(pts, T, vt, ctx):
    parts = _maximal_balls_missing(pts, T, vt, ctx)
    choices = [_ball_risometries(pts, mem, ctx) for mem in parts]
    out = set()
    for combo in itertools.product(*choices):
        img = list(range(len(pts)))
        for mem, s in zip(parts, combo):
            for a, b in zip(mem, s):
                img[a] = b
        out.add(tuple(img))
    return out


def _random_glued_map(pts, T, vt, ctx, rng):
    """Identity on T, a random normal-form risometry on each maximal ball missing T."""
    from .riso import Risometry

    index = {x: i for i, x in enumerate(pts)}
    img = list(range(len(pts)))
    for mem in _maximal_balls_missing(pts, T, vt, ctx):
        lam = min(ctx.m, min(int(vt[mem[0], y]) for y in mem) if len(mem) > 1 else ctx.m)
        B = Ball(ctx, lam, pts[mem[0]])
        phi = Risometry.random(B, rng)
        for a in mem:
            img[a] = index[phi(pts[a])]
    return img


def _is_risometry_map(pts, img, rvt):
    N = len(pts)
    if len(set(img)) != N:
        return False
    return bool(np.array_equal(rvt, rvt[np.ix_(img, img)]))


def lemma_suite(seed: int = 0, random_cases: int = 1000) -> list[LemmaCheck]:
    """Every lemma check: exhaustive at p=2, m=2, n in {1, 2}; random at p=3, m=3."""
    rng = np.random.default_rng(seed)
    out: list[LemmaCheck] = []
    small = [PadicContext(2, 2, 1), PadicContext(2, 2, 2)]
    big = [PadicContext(3, 3, 1), PadicContext(3, 3, 2)]
    for ctx in small:
        out += [check_ultrametric(ctx), check_rv_sum(ctx), check_dir_pi(ctx), check_dir_scal(ctx), check_gl_action(ctx)]
        out.append(check_banach(Ball.whole(ctx)))
        out.append(check_banach(Ball(ctx, 1, (1,) * ctx.n)))
        out += check_finite_sets(ctx)
    for ctx in big:
        k = random_cases
        out += [
            check_ultrametric(ctx, rng, k),
            check_rv_sum(ctx, rng, k),
            check_dir_pi(ctx, rng, k),
            check_dir_scal(ctx, rng, k),
            check_gl_action(ctx, rng, max(1, k // 40)),
            check_banach(Ball.whole(ctx), rng, k),
        ]
        out += check_finite_sets(ctx, rng, k, max_size=6)
    return out
