"""The acceptance suite: twelve end-to-end checks, each runnable on its own.

Every criterion function returns a Criterion with a one-line summary.  Random
inputs come from ``numpy.random.default_rng(seed)`` so runs are repeatable.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .balltree import build_tree, level_report
from .core import PadicContext, rv_coords
from .defset import FiniteSet
from .errors import BudgetExhausted
from .fixtures import FIXTURES
from .geometry import Ball, Coloring, Lift, Subspace, lines, subspaces_of_dim
from .jacobian import check_jacobian, find_z
from .lemmas import lemma_suite
from .oracles import all_label_maps, lift_translates, rv_preserving_bijections
from .riso import Risometry, canonicalize, check_translatable
from .strat import (
    Stratification,
    kegel_xi,
    node_ball,
    rainbow,
    reflects,
    refines,
    stratify_greedy,
    verify_tstrat,
    whitney_b_M,
)

# contexts at which each fixture is exercised
FIXTURE_CONTEXTS = {
    "parabola": [(3, 3)],
    "hyperbola": [(3, 4)],
    "ball-in-K": [(2, 3), (3, 3)],
    "cusp": [(3, 3)],
}

# finite-set statements that fail in residue characteristic p (see the README)
KNOWN_CHAR_P_FAILURES = ("finite sets (1) rigidity", "finite sets (2) a=>b", "finite sets (2) c=>b")

# regression pins, frozen from the first exhaustive runs
KEGEL_PARABOLA_VALUATIONS = [0]
KEGEL_PARABOLA_XI = [(0, (1, 1)), (0, (2, 1))]
WHITNEY_PINS = {
    "parabola": {"0:0,0": [0]},
    "hyperbola": {"0:0,0": [1], "1:0,0": [1]},
}


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    parts: list = field(default_factory=list)  # (name, passed, detail)

    def __bool__(self):
        return self.passed

    def line(self, timing: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        when = f" [{self.seconds:.1f}s]" if timing else ""
        return f"{status} criterion {self.number} ({self.title}){when}: {self.detail}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "detail": self.detail,
            "parts": [{"name": a, "passed": b, "detail": c} for a, b, c in self.parts],
        }


def _finish(number: int, title: str, parts: list, start: float) -> Criterion:
    ok = all(b for _, b, _ in parts)
    bad = [f"{a}: {c}" for a, b, c in parts if not b]
    detail = "; ".join(bad) if bad else "; ".join(f"{a}: {c}" for a, _, c in parts)
    return Criterion(number, title, ok, detail, time.perf_counter() - start, parts)


# ---------------------------------------------------------------------------
# random instances


def random_coloring(ball: Ball, rng, colors: int = 2) -> Coloring:
    return Coloring(ball, rng.integers(0, colors, size=ball.shape))


def translatable_coloring(ctx: PadicContext, V: Subspace, rng, colors: int = 2, scramble: bool = True) -> Coloring:
    """A V-translatable coloring of the whole ball.

    A random function of the coordinates transverse to a random lift is
    invariant under that lift; pulling it back along a random risometry
    keeps it translatable while hiding the structure.
    """
    ball = Ball.whole(ctx)
    n, q = ctx.n, ctx.q
    lift = Lift.random(V, ctx, rng)
    I = list(lift.exhibition.indices)
    J = list(lift.exhibition.complement().indices)
    pts = ball.coords_grid().reshape(n, -1).T
    key = (pts[:, J] - pts[:, I] @ lift.L) % q if J else np.zeros((pts.shape[0], 0), dtype=np.int64)
    codes = np.ravel_multi_index(tuple(key.T), (q,) * len(J)) if J else np.zeros(pts.shape[0], dtype=np.int64)
    table = rng.integers(0, colors, size=q ** len(J))
    col = Coloring(ball, table[codes].reshape(ball.shape))
    if scramble:
        col = Risometry.random(ball, rng).pullback(col)
    return col


def perturb(col: Coloring, rng) -> Coloring:
    """Change the color of one random point to a fresh color."""
    arr = col.colors.copy()
    k = tuple(int(rng.integers(0, s)) for s in arr.shape)
    arr[k] = int(arr.max()) + 1
    return Coloring(col.ball, arr)


def _oracle_translatable(colors: np.ndarray, maps: np.ndarray, perms: np.ndarray) -> bool:
    """Some map in ``maps`` makes the coloring invariant under every permutation in ``perms``."""
    pulled = colors[maps]
    return bool((pulled[:, perms] == pulled[:, None, :]).all(axis=(1, 2)).any())


def _oracle_risometric(c1: np.ndarray, c2: np.ndarray, maps: np.ndarray) -> bool:
    return bool((c2[maps] == c1[None, :]).all(axis=1).any())


# ---------------------------------------------------------------------------
# criteria 1-3: fixture verification


def _verify_pair(name: str, p: int, m: int):
    fx = FIXTURES[name]
    ctx = fx.context(p, m)
    col = fx.coloring(ctx)
    good = verify_tstrat(fx.strat(ctx), col)
    bad = verify_tstrat(fx.strat(ctx, s0=False), col)
    return good, bad


def criterion_1(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    good, bad = _verify_pair("parabola", 3, 3)
    ctx = FIXTURES["parabola"].context(3, 3)
    parts = [
        ("with S_0", good.passed, good.verdict),
        ("without S_0", not bad.passed and bad.witness == Ball.whole(ctx), f"{bad.verdict}, witness {bad.witness}"),
    ]
    elapsed = time.perf_counter() - start
    parts.append(("runtime", elapsed < 60, f"{elapsed:.2f}s < 60s"))
    return _finish(1, "parabola fixture", parts, start)


def criterion_2(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    good, bad = _verify_pair("hyperbola", 3, 4)
    w = bad.witness
    parts = [
        ("with S_0", good.passed, good.verdict),
        (
            "without S_0",
            not bad.passed and w is not None and w.depth == 1 and w.contains((0, 0)),
            f"{bad.verdict}, witness {w}",
        ),
    ]
    elapsed = time.perf_counter() - start
    parts.append(("runtime", elapsed < 300, f"{elapsed:.2f}s < 300s"))
    return _finish(2, "hyperbola fixture", parts, start)


def criterion_3(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    parts = []
    for p in (2, 3):
        good, bad = _verify_pair("ball-in-K", p, 3)
        parts.append((f"p={p}", good.passed, f"{good.verdict}; without S_0: {bad.verdict} at {bad.witness}"))
    return _finish(3, "ball-in-K fixture", parts, start)


# ---------------------------------------------------------------------------
# criterion 4: risometries against brute force


def criterion_4(seed: int = 0, pairs: int = 200) -> Criterion:
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    ctx = PadicContext(2, 2, 2)
    ball = Ball.whole(ctx)
    _, oracle = rv_preserving_bijections(ball)
    labelled = all_label_maps(ball)
    same = set(oracle) == set(labelled)
    parts = [("group", same and len(labelled) == 1024, f"{len(set(labelled))} normal forms, {len(oracle)} rv-preserving bijections")]
    maps = np.array(oracle, dtype=np.int64)
    mismatches, positives = 0, 0
    for i in range(pairs):
        c1 = random_coloring(ball, rng, int(rng.integers(2, 4)))
        if i % 2 == 0:
            img = maps[int(rng.integers(0, len(maps)))]
            c2 = Coloring(ball, c1.colors.ravel()[img])
        else:
            arr = c1.colors.ravel().copy()
            a, b = rng.choice(arr.size, size=2, replace=False)
            arr[[a, b]] = arr[[b, a]]
            c2 = Coloring(ball, arr)
        fast = canonicalize(c1) == canonicalize(c2)
        slow = _oracle_risometric(c1.colors.ravel(), c2.colors.ravel(), maps)
        positives += slow
        mismatches += fast != slow
    parts.append(("canonical forms", mismatches == 0, f"{pairs} pairs ({positives} risometric), {mismatches} mismatches"))
    return _finish(4, "risometry oracle equivalence", parts, start)


# ---------------------------------------------------------------------------
# criterion 5: lemma suite


def criterion_5(seed: int = 0, random_cases: int = 1000) -> Criterion:
    start = time.perf_counter()
    checks = lemma_suite(seed=seed, random_cases=random_cases)
    parts = [(f"{c.name} [{c.mode}]", c.ok, f"{c.cases} cases, {c.failures} failures") for c in checks]
    out = _finish(5, "lemma suite", parts, start)
    failed = sorted({c.name for c in checks if not c.ok})
    if failed:
        out.detail = f"{len(failed)} statements fail: " + ", ".join(failed)
    else:
        out.detail = f"{len(checks)} checks, all green"
    return out


def lemma_parts_split(crit: Criterion) -> tuple[list, list]:
    """(parts outside the known characteristic-p failures, parts inside them)."""
    inside = [pt for pt in crit.parts if pt[0].startswith(KNOWN_CHAR_P_FAILURES)]
    outside = [pt for pt in crit.parts if pt not in inside]
    return outside, inside


# ---------------------------------------------------------------------------
# criterion 6: translatability laws


def _lift_independence(rng, instances: int = 50, lifts: int = 10):
    ctx = PadicContext(3, 3, 2)
    ls = lines(ctx.p, ctx.n)
    disc, positives = 0, 0
    for i in range(instances):
        V = ls[int(rng.integers(0, len(ls)))]
        col = translatable_coloring(ctx, V, rng)
        if i % 2:
            col = perturb(col, rng)
        base = check_translatable(col, V, Lift.canonical(V, ctx), want_straightener=False).translatable
        positives += base
        for _ in range(lifts):
            lift = Lift.random(V, ctx, rng)
            disc += check_translatable(col, V, lift, want_straightener=False).translatable != base
    return disc, positives


def _oracle_tables(ctx: PadicContext):
    ball = Ball.whole(ctx)
    maps = np.array(all_label_maps(ball), dtype=np.int64)
    perms = {}
    for d in range(ctx.n + 1):
        for V in subspaces_of_dim(ctx.p, ctx.n, d):
            perms[V] = [np.array(lift_translates(ball, L), dtype=np.int64) for L in Lift.all_lifts(V, ctx)]
    return ball, maps, perms


def _lift_oracle(rng, tables, instances: int = 20):
    ball, maps, perms = tables
    ctx = ball.ctx
    disc = 0
    for i in range(instances):
        V = lines(ctx.p, ctx.n)[i % 3]
        col = translatable_coloring(ctx, V, rng) if i % 2 == 0 else random_coloring(ball, rng)
        colors = col.colors.ravel()
        for L, P in zip(Lift.all_lifts(V, ctx), perms[V]):
            fast = check_translatable(col, V, L, want_straightener=False).translatable
            disc += fast != _oracle_translatable(colors, maps, P)
    return disc


def _sum_closure(rng, tables, instances: int = 600):
    ball, maps, perms = tables
    ctx = ball.ctx
    ls = lines(ctx.p, ctx.n)
    full = Subspace.full(ctx.p, ctx.n)
    violations, disagreements, two_line = 0, 0, 0
    for i in range(instances):
        kind = i % 3
        if kind == 0:
            col = translatable_coloring(ctx, ls[int(rng.integers(0, len(ls)))], rng)
        elif kind == 1:
            col = random_coloring(ball, rng, 2)
        else:
            col = perturb(translatable_coloring(ctx, ls[int(rng.integers(0, len(ls)))], rng), rng)
        colors = col.colors.ravel()
        verdict = {}
        for V in ls + [full]:
            fast = check_translatable(col, V, want_straightener=False).translatable
            slow = _oracle_translatable(colors, maps, perms[V][0])
            disagreements += fast != slow
            verdict[V] = fast
        for V1, V2 in itertools.combinations(ls, 2):
            if verdict[V1] and verdict[V2]:
                two_line += 1
                violations += not verdict[V1 + V2]
        # the same law on every depth-1 ball, where sums of lines are again lines or the plane
        for B in ball.children():
            sub = col.restrict(B)
            ok = [V for V in ls if check_translatable(sub, V, want_straightener=False).translatable]
            if len(ok) >= 2 and not check_translatable(sub, full, want_straightener=False).translatable:
                violations += 1
    return violations, disagreements, two_line


def _monotone_and_fibers(rng, instances: int = 30):
    ctx = PadicContext(3, 3, 2)
    ls = lines(ctx.p, ctx.n)
    balls, mono_fail, count_fail, fibers = 0, 0, 0, 0
    for _ in range(instances):
        V = ls[int(rng.integers(0, len(ls)))]
        col = translatable_coloring(ctx, V, rng, colors=2)
        if not check_translatable(col, V, want_straightener=False):
            mono_fail += 1
            continue
        ball = col.ball
        for lev in range(1, ball.height + 1):
            for j in itertools.product(range(ctx.p**lev), repeat=ctx.n):
                B = node_ball(ball, lev, j)
                balls += 1
                mono_fail += not check_translatable(col.restrict(B), V, want_straightener=False).translatable
        # equal fiber counts, for every color class and every exhibition of V
        for proj in V.exhibitions():
            I = list(proj.indices)
            rest = tuple(a for a in range(ctx.n) if a not in I)
            for c in np.unique(col.colors).tolist():
                counts = (col.colors == c).sum(axis=rest)
                fibers += counts.size
                count_fail += bool((counts != counts.flat[0]).any())
    return balls, mono_fail, fibers, count_fail


def _fiber_restriction(rng, instances: int = 30):
    checked, fails = 0, 0
    for i in range(instances):
        ctx = PadicContext(2, 2, 3) if i % 2 == 0 else PadicContext(3, 2, 3)
        planes = subspaces_of_dim(ctx.p, ctx.n, 2)
        V = planes[int(rng.integers(0, len(planes)))]
        col = translatable_coloring(ctx, V, rng, colors=3)
        for r in range(ctx.n):
            if not any(v[r] % ctx.p for v in V.basis):
                continue  # the projection onto coordinate r must map V onto k
            J = [j for j in range(ctx.n) if j != r]
            kernel = Subspace.span(ctx.p, ctx.n, [[int(j == a) for a in range(ctx.n)] for j in J])
            W = V.intersection(kernel)
            Wf = Subspace.span(ctx.p, ctx.n - 1, [[v[j] for j in J] for v in W.basis])
            for y in range(ctx.q):
                fib = col.fiber([r], [y])
                checked += 1
                fails += not check_translatable(fib, Wf, want_straightener=False).translatable
    return checked, fails


def criterion_6(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    parts = []
    disc, pos = _lift_independence(rng)
    parts.append(("lift independence", disc == 0, f"50 instances x 10 lifts ({pos} translatable), {disc} discrepancies"))
    tables = _oracle_tables(PadicContext(2, 2, 2))
    disc = _lift_oracle(rng, tables)
    parts.append(("lift independence vs brute force", disc == 0, f"20 instances at p=2, {disc} discrepancies"))
    viol, dis, two = _sum_closure(rng, tables)
    parts.append(
        ("sum closure", viol == 0 and dis == 0, f"600 instances, {two} with two translatable lines, {viol} violations, {dis} oracle disagreements")
    )
    balls, mono, fibers, counts = _monotone_and_fibers(rng)
    parts.append(("sub-ball monotonicity", mono == 0, f"{balls} sub-balls, {mono} failures"))
    parts.append(("equal fiber counts", counts == 0, f"{fibers} fibers, {counts} unequal"))
    checked, fails = _fiber_restriction(rng)
    parts.append(("fiber restriction", fails == 0 and checked > 0, f"{checked} fibers, {fails} failures"))
    return _finish(6, "translatability laws", parts, start)


# ---------------------------------------------------------------------------
# criterion 7: rainbow and reflection


def _node_translation(ball: Ball, lev: int, node, t) -> np.ndarray:
    """Flat map translating the node ball by t (relative digits at its depth) and fixing the rest."""
    n = ball.ctx.n
    N = ball.side
    k = np.indices(ball.shape, dtype=np.int64).reshape(n, -1)
    inside = np.all(k % ball.ctx.p**lev == np.array(node).reshape(n, 1), axis=0)
    moved = k.copy()
    moved[:, inside] = (k[:, inside] + ball.ctx.p**lev * np.array(t).reshape(n, 1)) % N
    return np.ravel_multi_index(tuple(moved), ball.shape)


def label_preserving_risometries(S: Stratification, rng, count: int = 100, max_factors: int = 3, tries: int = 20000):
    """Composites of node translations that keep every label in place, as flat maps."""
    ball = S.ball
    p, n, h = ball.ctx.p, ball.ctx.n, ball.height
    labels = S.labels.ravel()
    gens = []
    for _ in range(tries):
        lev = int(rng.integers(0, h))
        node = tuple(int(a) for a in rng.integers(0, p**lev, size=n))
        t = tuple(int(a) for a in rng.integers(0, p ** (h - lev), size=n))
        if not any(t):
            continue
        f = _node_translation(ball, lev, node, t)
        if np.array_equal(labels[f], labels):
            gens.append(f)
        if len(gens) >= 4 * count:
            break
    out = []
    if not gens:
        return out
    for _ in range(count):
        f = np.arange(labels.size)
        for _ in range(int(rng.integers(1, max_factors + 1))):
            f = f[gens[int(rng.integers(0, len(gens)))]]
        out.append(f)
    return out


def criterion_7(seed: int = 0, random_colorings: int = 50) -> Criterion:
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    cases = [(name, p, m) for name, ctxs in FIXTURE_CONTEXTS.items() for p, m in ctxs]
    mism, total, refl = 0, 0, 0
    strats = {}
    for name, p, m in cases:
        fx = FIXTURES[name]
        ctx = fx.context(p, m)
        S = fx.strat(ctx)
        strats[(name, p, m)] = (S, fx.coloring(ctx))
        rb = rainbow(S)
        total += 1
        r = bool(reflects(S, fx.coloring(ctx)))
        refl += r
        mism += r != refines(rb, fx.coloring(ctx))
    for i in range(random_colorings):
        name, p, m = cases[i % len(cases)]
        S, _ = strats[(name, p, m)]
        rb = rainbow(S)
        g = rng.integers(0, 3, size=int(rb.colors.max()) + 1)
        col = Coloring(S.ball, g[rb.colors])
        if i % 2:
            col = perturb(col, rng)
        total += 1
        r = bool(reflects(S, col))
        refl += r
        mism += r != refines(rb, col)
    parts = [("rainbow refinement iff reflection", mism == 0, f"{total} colorings ({refl} reflected), {mism} mismatches")]
    bad, sampled = 0, 0
    for (name, p, m), (S, col) in strats.items():
        rb = rainbow(S).colors.ravel()
        c = col.colors.ravel()
        maps = label_preserving_risometries(S, rng)
        sampled += len(maps)
        bad += len(maps) < 100
        for f in maps:
            bad += not (np.array_equal(rb[f], rb) and np.array_equal(c[f], c))
    parts.append(("label-preserving risometries respect the rainbow", bad == 0, f"{sampled} maps over {len(strats)} fixtures, {bad} failures"))
    return _finish(7, "rainbow and reflection", parts, start)


# ---------------------------------------------------------------------------
# criteria 8-12


def _parabola4():
    fx = FIXTURES["parabola"]
    ctx = fx.context(3, 4)
    S = fx.strat(ctx)
    return fx, ctx, S, S.as_coloring().product(fx.coloring(ctx))


def criterion_8(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    _, _, _, col = _parabola4()
    res = kegel_xi(col, (0, 0))
    parts = [
        ("finite valuation set", len(res.valuations) <= 2, f"v(Xi) = {res.valuations}, {len(res.xi)} exceptional rv values"),
        ("pinned", res.valuations == KEGEL_PARABOLA_VALUATIONS and res.xi == KEGEL_PARABOLA_XI, f"Xi = {res.xi}"),
    ]
    return _finish(8, "exceptional set at the parabola vertex", parts, start)


def whitney_table(name: str, m: int = 4, max_depth: int = 1) -> dict:
    """M for every ball of depth <= max_depth that meets S_0, keyed by ball label."""
    fx = FIXTURES[name]
    ctx = fx.context(3, m)
    S = fx.strat(ctx)
    out = {}
    for lev in range(max_depth + 1):
        for j in itertools.product(range(ctx.p**lev), repeat=ctx.n):
            B = node_ball(S.ball, lev, j)
            if not (S.labels[S.ball.sub_slices(B)] == 0).any():
                continue
            out[str(B)] = whitney_b_M(S, B, d=0, verified=True).M
    return out


def criterion_9(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    parts = []
    for name in ("parabola", "hyperbola"):
        table = whitney_table(name)
        small = all(len(v) <= 2 for v in table.values())
        pinned = {k: v for k, v in table.items() if v} == WHITNEY_PINS[name]
        parts.append((name, small and pinned, f"M by ball {table}"))
    return _finish(9, "Whitney (b) valuations", parts, start)


def criterion_10(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    ctx = PadicContext(3, 3, 1)
    X = FiniteSet.from_points(ctx, [(x,) for x in range(1, ctx.q, 3)])  # 1 + 3O
    w = find_z("x1^2", X)
    target = rv_coords((2,), 3, 3)
    ok = w is not None and not w.constant and w.rv() == target
    parts = [("find_z", ok, f"z = {None if w is None else w.z} from {None if w is None else w.source}")]
    if ok:
        res = check_jacobian("x1^2", X, w.z)
        parts.append(("all pairs on 1+3O", res.ok, f"{res.pairs_checked} pairs"))
        full = check_jacobian("x1^2", FiniteSet.full(ctx), w.z)
        parts.append(("rejected on O", not full.ok and full.witness is not None, f"witness pair {full.witness}"))
    return _finish(10, "Jacobian property of x^2", parts, start)


def criterion_11(seed: int = 0) -> Criterion:
    start = time.perf_counter()
    parts = []
    for name, ctxs in FIXTURE_CONTEXTS.items():
        for p, m in ctxs:
            fx = FIXTURES[name]
            ctx = fx.context(p, m)
            X = fx.set(ctx)
            T = build_tree(X)
            pts = np.array(X.points(), dtype=np.int64).reshape(-1, ctx.n)
            direct = {d: len({tuple(r) for r in (pts % p**d).tolist()}) for d in range(m + 1)}
            parts.append((f"{name} p={p} m={m}", T.counts_by_depth() == direct, f"{len(T)} nodes"))
    fx = FIXTURES["parabola"]
    ctx = fx.context(3, 4)
    rep = level_report(fx.set(ctx), fx.strat(ctx), dim=fx.dim)
    parts.append(("parabola level", rep.verdict == "consistent with level ≤ 1", rep.verdict))
    ctx = PadicContext(3, 3, 2)
    X = FiniteSet.from_points(ctx, [(1, 2)])
    S = Stratification.from_sets(Ball.whole(ctx), {0: X}, default=2)
    rep = level_report(X, S, dim=0)
    parts.append(("single point level", rep.verdict == "consistent with level ≤ 0", rep.verdict))
    return _finish(11, "ball trees", parts, start)


def criterion_12(seed: int = 0, random_colorings: int = 20, budget: int = 100) -> Criterion:
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    parts = []
    for name, ctxs in FIXTURE_CONTEXTS.items():
        for p, m in ctxs:
            fx = FIXTURES[name]
            ctx = fx.context(p, m)
            col = fx.coloring(ctx)
            try:
                S = stratify_greedy(col, {0: ctx.n, 1: fx.dim}, budget=budget)
                ok = verify_tstrat(S, col).passed
                parts.append((f"{name} p={p} m={m}", ok, f"S_0 = {S.stratum(0)}"))
            except BudgetExhausted as exc:
                parts.append((f"{name} p={p} m={m}", False, str(exc)))
    ctx = PadicContext(2, 2, 2)
    ball = Ball.whole(ctx)
    fails, demoted = 0, 0
    for _ in range(random_colorings):
        k = int(rng.integers(2, 4))
        col = random_coloring(ball, rng, k)
        dims = {c: int(rng.integers(0, ctx.n + 1)) for c in range(k)}
        try:
            S = stratify_greedy(col, dims, budget=budget)
            fails += not verify_tstrat(S, col).passed
            demoted += int((S.labels < np.vectorize(dims.get)(col.colors)).sum())
        except BudgetExhausted:
            fails += 1
    parts.append(("random colorings", fails == 0, f"{random_colorings} colorings, {fails} failures, {demoted} points demoted"))
    return _finish(12, "greedy stratifier", parts, start)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}


def run_criterion(number: int, seed: int = 0) -> Criterion:
    return CRITERIA[number](seed=seed)
