from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicstrat.core import PadicContext
from padicstrat.defset import FiniteSet, evaluate
from padicstrat.errors import NotATStratification, NotInContext, NotVerified, PreconditionFailed
from padicstrat.fixtures import FIXTURES
from padicstrat.geometry import Ball, Coloring, Projection, Subspace
from padicstrat.riso import check_translatable
from padicstrat.strat import (
    Stratification,
    affdir,
    enhance_small_changes,
    induced_fiber_strat,
    is_subaffine,
    kegel_xi,
    maximal_ball_avoiding,
    minimal_T0,
    node_ball,
    rainbow,
    rainbow_bruteforce,
    reflects,
    refines,
    stratify_greedy,
    tsp_with_filters,
    verify_tstrat,
    whitney_b_M,
)


def _fx(name, p=3, m=3):
    fx = FIXTURES[name]
    ctx = fx.context(p, m)
    return fx, ctx, fx.strat(ctx), fx.coloring(ctx)


def test_parabola_verification():
    _, ctx, S, col = _fx("parabola")
    rep = verify_tstrat(S, col)
    assert rep.passed and rep.verdict == "pass"
    bad = verify_tstrat(FIXTURES["parabola"].strat(ctx, s0=False), col)
    assert not bad.passed
    assert bad.witness == Ball.whole(ctx)
    assert bad.failure_at(Ball.whole(ctx)).required_d == 1


def test_hyperbola_witness_is_the_small_ball_at_the_origin():
    fx, ctx, S, col = _fx("hyperbola", 3, 4)
    assert verify_tstrat(S, col)
    bad = verify_tstrat(fx.strat(ctx, s0=False), col)
    assert bad.witness == Ball(ctx, 1, (0, 0))


def test_report_json_fields():
    _, ctx, _, col = _fx("parabola")
    rep = verify_tstrat(FIXTURES["parabola"].strat(ctx, s0=False), col).to_json()
    assert {"verdict", "checked_balls", "failures"} <= set(rep)
    assert {"ball", "required_d", "filter"} <= set(rep["failures"][0])


def test_parallel_verification_agrees():
    _, ctx, S, col = _fx("parabola")
    bad = FIXTURES["parabola"].strat(ctx, s0=False)
    for T in (S, bad):
        assert verify_tstrat(T, col, jobs=2).to_json() == verify_tstrat(T, col).to_json()


def test_declared_dimension_is_checked():
    _, ctx, S, col = _fx("parabola")
    T = Stratification(S.ball, S.labels, [0, 2, 2])
    assert not verify_tstrat(T, col)


def test_stratification_json_roundtrip():
    _, ctx, S, _ = _fx("parabola")
    assert Stratification.from_json(S.to_json()) == S


def test_rainbow_of_single_stratum_is_constant():
    ctx = PadicContext(2, 2, 2)
    S = Stratification(Ball.whole(ctx), np.full((4, 4), 2))
    assert rainbow(S).is_constant()


def test_rainbow_refines_labels_and_matches_bruteforce():
    for name in ("parabola", "cusp"):
        _, ctx, S, _ = _fx(name, 3, 2)
        rb = rainbow(S)
        assert refines(rb, S.as_coloring())
        assert rb == rainbow_bruteforce(S)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rainbow_matches_bruteforce_on_random_partitions(seed):
    rng = np.random.default_rng(seed)
    ctx = PadicContext(3, 2, 2)
    S = Stratification(Ball.whole(ctx), rng.integers(0, 3, size=(9, 9)))
    assert rainbow(S) == rainbow_bruteforce(S)


def test_same_rv_pattern_same_rainbow_color():
    _, ctx, S, _ = _fx("parabola", 3, 2)
    rb = rainbow(S)
    strata = [S.stratum(i) for i in range(3)]
    from padicstrat.core import rv_coords

    def key(x):
        return tuple(frozenset(rv_coords([a - b for a, b in zip(x, s)], 3, 2) for s in st) for st in strata)

    pts = list(S.ball.points())
    for x, y in itertools.combinations(pts[::3], 2):
        assert (key(x) == key(y)) == (rb.color_at(x) == rb.color_at(y))


def test_reflects_examples():
    _, ctx, S, col = _fx("parabola")
    assert reflects(S, Coloring.constant(S.ball))
    assert reflects(S, col)
    g = Coloring(S.ball, np.zeros(S.ball.shape, dtype=np.int64))
    g.colors[1, 5] = 1
    g.colors[4, 2] = 1
    rep = reflects(S, g)
    assert not rep and rep.witness is not None
    with pytest.raises(NotATStratification):
        reflects(FIXTURES["parabola"].strat(ctx, s0=False), col)


def test_reflection_without_rainbow_refinement_in_residue_characteristic_p():
    # S_0 = {0, 1} at p = 2: 1 - 0 and 0 - 1 have the same rv, so the rainbow cannot separate 0 from 1
    ctx = PadicContext(2, 2, 1)
    B = Ball.whole(ctx)
    S = Stratification(B, [0, 0, 1, 1])
    chi = Coloring(B, [1, 0, 0, 0])
    assert verify_tstrat(S)
    assert reflects(S, chi)
    assert not refines(rainbow(S), chi)


def test_induced_fiber_strat():
    _, ctx, S, _ = _fx("parabola")
    T = induced_fiber_strat(S, Ball(ctx, 1, (1, 1)), Projection(2, (0,)), (1,))
    assert T.stratum(0) == [(1,)]
    assert T.ctx.n == 1
    with pytest.raises(NotInContext):
        induced_fiber_strat(S, Ball(ctx, 1, (1, 1)), Projection(2, (0,)), (2,))
    d0 = induced_fiber_strat(S, Ball(ctx, 1, (0, 0)), Projection(2, ()), ())
    assert np.array_equal(d0.labels, S.restrict(Ball(ctx, 1, (0, 0))).labels)


def test_maximal_ball_avoiding():
    _, ctx, S, _ = _fx("parabola")
    assert maximal_ball_avoiding(S, (1, 1), 1) == Ball.whole(ctx).children()[4]
    assert maximal_ball_avoiding(S, (3, 9), 1).depth == 2


def test_greedy_examples():
    _, ctx, S, col = _fx("parabola")
    G = stratify_greedy(col, {0: 2, 1: 1})
    assert G.stratum(0) == [(0, 0)]
    assert verify_tstrat(G, col)
    const = stratify_greedy(Coloring.constant(S.ball), {0: 2})
    assert (const.labels == 2).all()
    one = FiniteSet.from_points(ctx, [(4, 5)]).indicator()
    assert stratify_greedy(one, {0: 2, 1: 2}).stratum(0) == [(4, 5)]


def test_enhance_small_changes():
    _, ctx, S, col = _fx("parabola", 3, 2)
    X = S.as_set(1)
    out = enhance_small_changes(S, S, FiniteSet.empty(ctx), col, d=1)
    assert verify_tstrat(out)
    assert (out.labels[S.labels < 1] < 1).all()
    merged = enhance_small_changes(S, S, X, col, d=1)
    assert verify_tstrat(merged)
    g = Coloring(S.ball, np.zeros(S.ball.shape, dtype=np.int64))
    g.colors[2, 4] = 1  # splits X, which S cannot see
    with pytest.raises(PreconditionFailed):
        enhance_small_changes(S, S, X, g, d=1)


def test_minimal_T0():
    ctx = PadicContext(3, 2, 1)
    assert minimal_T0(Coloring.constant(Ball.whole(ctx))) == []
    assert minimal_T0(FiniteSet.from_points(ctx, [(0,)]).indicator()) == [(0,)]
    assert minimal_T0(FiniteSet.from_points(ctx, [(0,), (1,)]).indicator()) == [(0,), (1,)]


def test_kegel_examples():
    ctx = PadicContext(3, 3, 2)
    assert kegel_xi(Coloring.constant(Ball.whole(ctx)), (0, 0)).xi == []
    assert kegel_xi(evaluate("x2 = 0", ctx).indicator(), (0, 0)).xi == []
    fx = FIXTURES["parabola"]
    c4 = fx.context(3, 4)
    col = fx.strat(c4).as_coloring().product(fx.coloring(c4))
    res = kegel_xi(col, (0, 0))
    assert res.valuations == [0]
    assert res.xi == [(0, (1, 1)), (0, (2, 1))]


def test_whitney_examples():
    fx = FIXTURES["parabola"]
    ctx = fx.context(3, 4)
    S = fx.strat(ctx)
    assert whitney_b_M(S, Ball.whole(ctx)).M == [0]
    assert whitney_b_M(S, Ball(ctx, 1, (1, 1))).M == []
    with pytest.raises(NotVerified):
        whitney_b_M(S, Ball(ctx, 1, (1, 1)), d=0)
    # a horizontal line with the plane around it: every direction from the line lands in tsp
    c3 = PadicContext(3, 3, 2)
    line = evaluate("x2 = 0", c3)
    L = Stratification(Ball.whole(c3), np.where(line.in_ball(Ball.whole(c3)), 1, 2))
    assert whitney_b_M(L, Ball.whole(c3)).M == []


def test_affdir_examples():
    ctx = PadicContext(3, 3, 2)
    assert affdir([(0, 0), (3, 9)], ctx) == Subspace.span(3, 2, [(1, 0)])
    assert affdir(FiniteSet.full(ctx)) == Subspace.full(3, 2)
    X = FIXTURES["parabola"].set(ctx)
    C = [x for x in X.points() if x[0] % 3 == 0 and x[1] % 3 == 0]
    assert affdir(C, ctx) == Subspace.span(3, 2, [(1, 0)])
    assert is_subaffine(C, 1, ctx)


def test_tsp_filters_name_the_rejecting_check():
    _, ctx, S, col = _fx("parabola", 3, 2)
    space, rejected = tsp_with_filters(col)
    assert space.dim == 0
    assert set(rejected.values()) <= {"fiber-equivalence", "pointwise", "full"}
    assert len(rejected) == 4


def test_local_dimension_fiber_counts():
    # on a verified stratification every ball inside S_{>=d} meeting S_d has equal S_d counts on exhibition fibers
    _, ctx, S, _ = _fx("parabola")
    col = S.as_coloring()
    ball = S.ball
    checked = 0
    for lev in range(ball.height + 1):
        for j in itertools.product(range(3**lev), repeat=2):
            B = node_ball(ball, lev, j)
            sub = S.labels[ball.sub_slices(B)]
            if sub.min() != 1:
                continue
            space, _ = tsp_with_filters(col.restrict(B))
            proj = space.first_exhibition()
            counts = (sub == 1).sum(axis=tuple(a for a in range(2) if a not in proj.indices))
            assert (counts == counts.flat[0]).all() and counts.flat[0] > 0
            checked += 1
    assert checked > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verified_balls_are_translatable_in_declared_dimension(seed):
    rng = np.random.default_rng(seed)
    ctx = PadicContext(2, 2, 2)
    col = Coloring(Ball.whole(ctx), rng.integers(0, 2, size=(4, 4)))
    S = stratify_greedy(col, {0: 2, 1: 1})
    both = S.as_coloring().product(col)
    for lev in range(S.ball.height + 1):
        for j in itertools.product(range(2**lev), repeat=2):
            B = node_ball(S.ball, lev, j)
            need = int(S.labels[S.ball.sub_slices(B)].min())
            space, _ = tsp_with_filters(both.restrict(B))
            assert space.dim >= need
            for V in [space]:
                assert check_translatable(both.restrict(B), V).translatable
