from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicstrat.balltree import (
    BallTree,
    ValMatrix,
    build_tree,
    export,
    level_report,
    side_branches,
    skeleton,
)
from padicstrat.core import PadicContext
from padicstrat.defset import FiniteSet, evaluate
from padicstrat.errors import EmptySet, UnknownFormat
from padicstrat.fixtures import FIXTURES
from padicstrat.geometry import Ball
from padicstrat.strat import stratify_greedy

GOLDEN = Path(__file__).parent / "golden"


def _parabola(p=3, m=2):
    fx = FIXTURES["parabola"]
    ctx = fx.context(p, m)
    return ctx, fx.set(ctx), fx.strat(ctx)


def test_single_point_is_a_path():
    ctx = PadicContext(3, 3, 2)
    X = FiniteSet.from_points(ctx, [(4, 7)])
    T = build_tree(X)
    assert len(T) == ctx.m + 1
    assert T.is_path()
    assert T.leaves() == [Ball(ctx, 3, (4, 7))]


def test_whole_space_gives_complete_tree():
    ctx = PadicContext(2, 3, 2)
    T = build_tree(evaluate("x1 = x1", ctx))
    assert T.counts_by_depth() == {d: 4**d for d in range(4)}
    assert all(T.child_count(b) == 4 for b in T.nodes if b.depth < 3)


def test_empty_set_has_no_tree():
    ctx = PadicContext(3, 2, 1)
    with pytest.raises(EmptySet):
        build_tree(FiniteSet.from_points(ctx, []))


def test_parabola_tree_counts():
    _, X, _ = _parabola()
    T = build_tree(X)
    # one node per residue of x1 at each depth, since x2 is a function of x1
    assert T.counts_by_depth() == {0: 1, 1: 3, 2: 9}
    assert len(T) == 13


def test_skeleton():
    ctx, X, _ = _parabola(m=3)
    T = build_tree(X)
    sk = skeleton(T, [(0, 0)])
    assert len(sk) == ctx.m + 1 and sk.is_path()
    assert len(skeleton(T, [])) == 0
    assert skeleton(T, X) == T


def test_golden_files_match():
    _, X, _ = _parabola()
    T = build_tree(X)
    assert export(T, "json") == (GOLDEN / "parabola_p3_m2_tree.json").read_bytes()
    assert export(T, "dot") == (GOLDEN / "parabola_p3_m2_tree.dot").read_bytes()


def test_json_roundtrip_is_byte_identical():
    raw = (GOLDEN / "parabola_p3_m2_tree.json").read_bytes()
    T = BallTree.from_json(json.loads(raw))
    assert export(T, "json") == raw


def test_dot_parses():
    _, X, _ = _parabola()
    T = build_tree(X)
    text = T.to_dot()
    lines = text.strip().splitlines()
    assert lines[0] == "digraph T {" and lines[-1] == "}"
    node = re.compile(r'^  "([^"]+)" \[label="\1"\];$')
    edge = re.compile(r'^  "([^"]+)" -> "([^"]+)";$')
    names = [node.match(s).group(1) for s in lines[1:-1] if node.match(s)]
    edges = [edge.match(s).groups() for s in lines[1:-1] if edge.match(s)]
    assert len(names) + len(edges) == len(lines) - 2
    assert len(names) == len(T) and len(edges) == len(T) - 1
    assert {a for a, _ in edges} | {b for _, b in edges} <= set(names)


def test_export_unknown_format():
    _, X, _ = _parabola()
    with pytest.raises(UnknownFormat):
        export(build_tree(X), "svg")


def test_valmatrix_single_point():
    ctx = PadicContext(3, 3, 2)
    M = ValMatrix.of_points([(1, 2)], ctx)
    assert M.size == 1 and M.to_json() == [[None]]
    assert str(M) == "[inf]"


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 26), st.integers(0, 26)), min_size=1, max_size=7, unique=True), st.randoms())
def test_valmatrix_is_order_independent(pts, rnd):
    ctx = PadicContext(3, 3, 2)
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    A = ValMatrix.of_points(pts, ctx)
    B = ValMatrix.of_points(shuffled, ctx)
    assert A == B
    E = np.array(A.entries)
    assert (E == E.T).all() and (np.diag(E) == ctx.m).all()
    # ultrametric: the two smallest of any triangle are equal
    for i in range(len(pts)):
        for j in range(len(pts)):
            for k in range(len(pts)):
                if len({i, j, k}) == 3:
                    a, b, c = sorted((E[i, j], E[j, k], E[i, k]))
                    assert a == b


def test_valmatrix_mixed_cluster_sizes():
    # a lone point next to a cluster of two
    ctx = PadicContext(3, 2, 1)
    M = ValMatrix.of_points([(0,), (1,), (4,)], ctx)
    assert M.entries == ((2, 0, 0), (0, 2, 1), (0, 1, 2))


def test_parabola_level_report_equal_by_radius():
    ctx, X, S = _parabola(m=4)
    rep = level_report(X, S)
    assert rep.consistent and rep.verdict == "consistent with level ≤ 1"
    assert rep.witness is None
    assert all(len(v) == 1 for v in rep.by_radius.values())
    assert sorted(rep.by_radius) == [1, 2, 3, 4]
    assert rep.skeleton_nodes == ctx.m + 1 and rep.bifurcations == 0


def test_single_point_level_zero():
    ctx = PadicContext(3, 2, 2)
    X = FiniteSet.from_points(ctx, [(1, 1)])
    S = stratify_greedy(X.indicator(), {0: 2})
    rep = level_report(X, S)
    assert rep.level == 0 and rep.verdict == "consistent with level ≤ 0"
    assert side_branches(X, S) == []


def test_counter_witness():
    # lines at distance 2 in one depth-1 ball, at distance 1 in another
    ctx = PadicContext(3, 3, 2)
    X = evaluate("x2 = 0 | x2 = 9 | x2 = 1 | x2 = 4 | x1 = 0", ctx)
    S = stratify_greedy(X.indicator(), {0: 2, 1: 1})
    rep = level_report(X, S, dim=1)
    assert not rep
    assert rep.verdict == "counter-witness"
    assert rep.witness["kind"] == "radius-dependence"
    a, b = rep.witness["matrices"]
    assert a != b
    # without the vertical line there is no S_0 and nothing to compare
    Y = evaluate("x2 = 0 | x2 = 9 | x2 = 1 | x2 = 4", ctx)
    assert level_report(Y, stratify_greedy(Y.indicator(), {0: 2, 1: 1}), dim=1)
