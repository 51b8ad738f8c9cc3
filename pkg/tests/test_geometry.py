from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicstrat.core import PadicContext
from padicstrat.errors import AtMaxDepth, EqualPoints
from padicstrat.geometry import (
    Ball,
    Coloring,
    Lift,
    Projection,
    Subspace,
    lines,
    smallest_ball_containing,
    subspace_lattice,
)


def test_children_of_whole_line():
    ctx = PadicContext(2, 2, 1)
    kids = Ball.whole(ctx).children()
    assert [b.residue for b in kids] == [(0,), (1,)]
    assert all(b.depth == 1 for b in kids)


def test_children_count_and_max_depth():
    ctx = PadicContext(3, 3, 2)
    assert len(Ball(ctx, 1, (1, 2)).children()) == 9
    with pytest.raises(AtMaxDepth):
        Ball(ctx, 3, (0, 0)).children()


def test_smallest_ball():
    ctx = PadicContext(3, 3, 2)
    assert smallest_ball_containing(ctx, (0, 0), (9, 0)) == Ball(ctx, 2, (0, 0))
    assert smallest_ball_containing(ctx, (0, 0), (1, 0)) == Ball.whole(ctx)
    with pytest.raises(EqualPoints):
        smallest_ball_containing(ctx, (4, 4), (4, 4))


def test_exhibitions():
    V = Subspace.span(3, 2, [(1, 0)])
    assert [e.indices for e in V.exhibitions()] == [(0,)]
    assert [e.indices for e in Subspace.full(3, 2).exhibitions()] == [(0, 1)]
    W = Subspace.span(2, 2, [(1, 1)])
    assert sorted(e.indices for e in W.exhibitions()) == [(0,), (1,)]
    assert not Projection(2, (1,)).is_exhibition_of(V)


def test_lift_elements():
    ctx = PadicContext(3, 2, 2)
    V = Subspace.span(3, 2, [(1, 0)])
    got = {tuple(x) for x in Lift.canonical(V, ctx).elements().tolist()}
    assert got == {(a, 0) for a in range(9)}
    assert Lift.canonical(Subspace.zero(3, 2), ctx).elements().tolist() == [[0, 0]]
    W = Subspace.span(3, 2, [(1, 2)])
    els = Lift.canonical(W, ctx).elements()
    assert len(els) == 9
    assert Subspace.span(3, 2, (els % 3).tolist()) == W


def test_random_lift_reduces_to_V(rng):
    ctx = PadicContext(3, 3, 3)
    V = Subspace.span(3, 3, [(1, 2, 0), (0, 1, 1)])
    for _ in range(10):
        L = Lift.random(V, ctx, rng)
        assert Subspace.span(3, 3, (L.elements() % 3).tolist()) == V


def test_subspace_counts():
    lat = subspace_lattice(2, 2)
    assert sum(len(v) for v in lat.values()) == 5
    assert len(lines(3, 2)) == 4
    assert Subspace.span(3, 2, [(1, 0)]) + Subspace.span(3, 2, [(0, 1)]) == Subspace.full(3, 2)


def test_ball_points_in_lex_order():
    ctx = PadicContext(2, 3, 2)
    B = Ball(ctx, 1, (1, 0))
    pts = list(B.points())
    assert pts == sorted(pts)
    assert all(B.contains(x) for x in pts)
    assert len(pts) == B.num_points == 16
    for x in pts:
        assert B.point_at(B.rel_index(x)) == x


def test_coloring_fiber():
    ctx = PadicContext(2, 2, 2)
    col = Coloring(Ball.whole(ctx), np.arange(16).reshape(4, 4))
    fib = col.fiber([0], [2])
    assert fib.ctx.n == 1
    assert fib.colors.tolist() == [8, 9, 10, 11]


def test_json_roundtrip():
    ctx = PadicContext(3, 2, 2)
    B = Ball(ctx, 1, (2, 1))
    assert Ball.from_json(ctx, B.to_json()) == B
    col = Coloring(B, np.arange(9) % 2)
    assert Coloring.from_json(col.to_json()) == col
    V = Subspace.span(3, 2, [(1, 2)])
    assert Subspace.from_json(3, 2, V.to_json()) == V


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 26), st.integers(0, 26), st.integers(0, 26), st.integers(0, 26))
def test_balls_nested_or_disjoint(a, b, c, d):
    ctx = PadicContext(3, 3, 2)
    for da in range(4):
        for db in range(4):
            B1 = Ball(ctx, da, (a, b))
            B2 = Ball(ctx, db, (c, d))
            s1, s2 = set(B1.points()), set(B2.points())
            assert s1 <= s2 or s2 <= s1 or not (s1 & s2)
