from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    all_label_maps,
    invariant,
    lift_translates,
    pointwise_bruteforce,
    risometric_bruteforce,
    rv_preserving_bijections,
    translatable_bruteforce,
)
from padicstrat.core import PadicContext
from padicstrat.errors import NotRisometry
from padicstrat.fixtures import FIXTURES
from padicstrat.geometry import Ball, Coloring, Lift, Subspace, lines
from padicstrat.riso import (
    Risometry,
    Translater,
    canonicalize,
    check_translatable,
    decompose,
    is_risometry,
    is_translatable,
    pointwise_translatable,
    riso_equiv,
    translater_from_straightener,
    tsp,
    verify_translater,
)

P2N2 = PadicContext(2, 2, 2)
P2N1M3 = PadicContext(2, 3, 1)


def _maps(ball):
    return rv_preserving_bijections(ball)[1]


_MAPS = {}


def maps_for(ctx):
    if ctx not in _MAPS:
        _MAPS[ctx] = _maps(Ball.whole(ctx))
    return _MAPS[ctx]


def test_identity_and_inverse(rng):
    ball = Ball.whole(PadicContext(3, 2, 2))
    ident = Risometry.identity(ball)
    assert ident.flatmap.tolist() == list(range(81))
    f = Risometry.random(ball, rng)
    assert f.compose(f.inverse()).is_identity()
    assert f.inverse().compose(f).is_identity()


def test_root_translation_swaps_classes():
    ctx = PadicContext(2, 2, 1)
    ball = Ball.whole(ctx)
    f = Risometry(ball, [np.array([[1]]), np.zeros((2, 1), dtype=np.int64)])
    img = [f((x,))[0] for x in range(4)]
    assert all(a % 2 != b % 2 for a, b in zip(range(4), img))


def test_is_risometry_examples():
    ctx = PadicContext(3, 2, 1)
    ball = Ball.whole(ctx)
    assert not is_risometry(ball, lambda x: (2 * x[0] % 9,))
    assert is_risometry(ball, lambda x: ((x[0] + 4) % 9,))
    with pytest.raises(NotRisometry):
        decompose(ball, lambda x: (2 * x[0] % 9,))


def test_decompose_translation_labels():
    ctx = PadicContext(3, 2, 2)
    ball = Ball.whole(ctx)
    assert Risometry.identity(ball).nonzero_labels() == {}
    t = Risometry.translation(ball, (1, 0))
    assert t.labels[0].reshape(-1).tolist() == [1, 0]
    for x in ball.points():
        assert t(x) == ((x[0] + 1) % 9, x[1])


def test_normal_forms_are_all_risometries():
    for ctx in (PadicContext(2, 2, 1), P2N2):
        ball = Ball.whole(ctx)
        assert set(all_label_maps(ball)) == set(maps_for(ctx))
    assert len(maps_for(P2N2)) == 4**5


def test_canonical_form_examples():
    ctx = PadicContext(2, 2, 1)
    ball = Ball.whole(ctx)
    a = Coloring(ball, [0, 0, 0, 1])
    b = Coloring(ball, [0, 1, 0, 0])
    assert canonicalize(a) == canonicalize(b)
    assert risometric_bruteforce(a, b, maps_for(ctx))
    two = Coloring(ball, [0, 1, 0, 1])
    assert canonicalize(a) != canonicalize(two)
    ctx2 = PadicContext(3, 3, 2)
    assert canonicalize(Coloring.constant(Ball(ctx2, 1, (0, 0)))) == canonicalize(Coloring.constant(Ball(ctx2, 1, (2, 1))))


def test_equiv_witness_maps_colors():
    ctx = PadicContext(2, 2, 1)
    ball = Ball.whole(ctx)
    a = Coloring(ball, [0, 0, 0, 1])
    b = Coloring(ball, [0, 1, 0, 0])
    phi = riso_equiv(a, b)
    assert phi is not None
    assert np.array_equal(b.colors.ravel()[phi.flatmap], a.colors.ravel())
    assert riso_equiv(a, a).is_identity()
    assert riso_equiv(a, Coloring(ball, [0, 1, 1, 1])) is None


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=8, max_size=8), st.lists(st.integers(0, 2), min_size=8, max_size=8))
def test_canonical_equality_matches_bruteforce(c1, c2):
    ball = Ball.whole(P2N1M3)
    a, b = Coloring(ball, c1), Coloring(ball, c2)
    assert (canonicalize(a) == canonicalize(b)) == risometric_bruteforce(a, b, maps_for(P2N1M3))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_canonical_form_is_invariant(seed):
    rng = np.random.default_rng(seed)
    ball = Ball.whole(PadicContext(3, 2, 2))
    col = Coloring(ball, rng.integers(0, 3, size=ball.shape))
    f = Risometry.random(ball, rng)
    moved = f.pullback(col)
    assert canonicalize(moved) == canonicalize(col)
    phi = riso_equiv(moved, col)
    assert np.array_equal(col.colors.ravel()[phi.flatmap], moved.colors.ravel())


def test_invariant_coloring_has_identity_straightener():
    ctx = PadicContext(3, 2, 2)
    ball = Ball.whole(ctx)
    col = Coloring.from_function(ball, lambda x: x[1] % 3)
    res = check_translatable(col, Subspace.span(3, 2, [(1, 0)]))
    assert res.translatable
    assert res.straightener.pullback(col) == col


def test_parabola_translatability():
    fx = FIXTURES["parabola"]
    ctx = fx.context(3, 2)
    col = fx.coloring(ctx)
    for L in lines(3, 2):
        assert is_translatable(col, L) is None
    assert tsp(col).dim == 0
    ctx3 = fx.context(3, 3)
    col3 = fx.coloring(ctx3)
    B = Ball(ctx3, 1, (0, 0))
    V = Subspace.span(3, 2, [(1, 0)])
    phi = is_translatable(col3, V, ball=B)
    assert phi is not None
    sub = col3.restrict(B)
    straight = phi.pullback(sub).colors.ravel().tolist()
    assert invariant(straight, lift_translates(B, Lift.canonical(V, ctx3)))
    assert tsp(col3, B) == V


def _random_col(seed, ctx=P2N2, k=2):
    rng = np.random.default_rng(seed)
    return Coloring(Ball.whole(ctx), rng.integers(0, k, size=(ctx.q,) * ctx.n))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_translatability_matches_bruteforce(seed):
    col = _random_col(seed)
    if seed % 2:
        # make it invariant along (1,1) so positives occur
        col = Coloring(col.ball, np.array([[col.colors[0, (b - a) % 4] for b in range(4)] for a in range(4)]))
    for V in lines(2, 2):
        for lift in Lift.all_lifts(V, P2N2):
            fast = check_translatable(col, V, lift)
            assert fast.translatable == translatable_bruteforce(col, lift, maps_for(P2N2))
            slow = check_translatable(col, V, lift, prefilters=False)
            assert slow.translatable == fast.translatable
            if fast.translatable:
                pulled = fast.straightener.pullback(col).colors.ravel().tolist()
                assert invariant(pulled, lift_translates(col.ball, lift))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pointwise_matches_bruteforce(seed):
    col = _random_col(seed, k=2)
    for V in lines(2, 2):
        for proj in V.exhibitions():
            res = pointwise_translatable(col, V, proj)
            assert res.ok == pointwise_bruteforce(col, V, list(proj.indices))


def test_single_point_fails_pointwise_with_witness():
    ctx = PadicContext(3, 2, 2)
    ball = Ball.whole(ctx)
    col = Coloring(ball, np.zeros(ball.shape, dtype=np.int64))
    col.colors[1, 2] = 1
    res = pointwise_translatable(col, Subspace.span(3, 2, [(1, 0)]))
    assert not res.ok
    y, xp = res.witness
    assert col.color_at(y) == 1


def test_translater_from_straightener():
    fx = FIXTURES["parabola"]
    ctx = fx.context(3, 3)
    B = Ball(ctx, 1, (0, 0))
    col = fx.coloring(ctx).restrict(B)
    V = Subspace.span(3, 2, [(1, 0)])
    phi = is_translatable(col, V)
    T = translater_from_straightener(col, V, phi)
    assert verify_translater(T, col).ok


def test_broken_translater_rejected():
    ctx = PadicContext(3, 2, 2)
    ball = Ball.whole(ctx)
    col = Coloring.from_function(ball, lambda x: x[1] % 3)
    V = Subspace.span(3, 2, [(1, 0)])
    T = translater_from_straightener(col, V, Risometry.identity(ball))
    assert verify_translater(T, col).ok
    key = next(k for k in T.maps if any(k))
    bad = Translater(T.ball, T.projection, T.V, dict(T.maps))
    bad.maps[key] = np.arange(81)
    assert not verify_translater(bad, col).ok
