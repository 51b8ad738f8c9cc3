from __future__ import annotations

import itertools

import numpy as np
import pytest

from padicstrat.core import PadicContext, rv_coords
from padicstrat.geometry import Ball
from padicstrat.lemmas import (
    check_banach,
    check_dir_pi,
    check_dir_scal,
    check_finite_sets,
    check_gl_action,
    check_rv_sum,
    check_ultrametric,
)

SMALL = [PadicContext(2, 2, 1), PadicContext(2, 2, 2), PadicContext(3, 2, 1)]


@pytest.mark.parametrize("ctx", SMALL, ids=str)
def test_exhaustive_checks_hold(ctx):
    for check in (check_ultrametric, check_rv_sum, check_dir_pi, check_dir_scal, check_gl_action):
        c = check(ctx)
        assert c.ok, c.line()
        assert c.mode == "exhaustive" and c.cases > 0


def test_random_checks_hold():
    ctx = PadicContext(3, 3, 2)
    rng = np.random.default_rng(5)
    for check in (check_ultrametric, check_rv_sum, check_dir_pi, check_dir_scal):
        c = check(ctx, rng, 300)
        assert c.ok, c.line()
        assert c.mode == "random"


def test_banach_on_subball():
    ctx = PadicContext(2, 2, 2)
    assert check_banach(Ball(ctx, 1, (1, 1))).ok
    assert check_banach(Ball.whole(ctx)).ok


@pytest.mark.parametrize("ctx", SMALL, ids=str)
def test_finite_sets_holding_parts(ctx):
    checks = {c.name.split(" p=")[0]: c for c in check_finite_sets(ctx, np.random.default_rng(0), 200)}
    for name in ("finite sets (2) b=>a", "finite sets (2) b=>c", "finite sets (3) gluing"):
        assert checks[name].ok, checks[name].line()


def _is_risometry(pts, img, ctx):
    return all(
        rv_coords([(a - b) % ctx.q for a, b in zip(x, y)], ctx.p, ctx.m)
        == rv_coords([(a - b) % ctx.q for a, b in zip(fx, fy)], ctx.p, ctx.m)
        for (x, fx), (y, fy) in itertools.combinations(zip(pts, img), 2)
    )


@pytest.mark.parametrize("p", [2, 3])
def test_finite_sets_rigidity_fails_in_residue_characteristic(p):
    # translating by 1 cycles the residues: a non-identity risometry of T onto itself
    ctx = PadicContext(p, 3, 1)
    T = [(a,) for a in range(p)]
    img = [((a + 1) % p,) for a in range(p)]
    assert img != T and sorted(img) == T
    assert _is_risometry(T, img, ctx)
    checks = {c.name.split(" p=")[0]: c for c in check_finite_sets(PadicContext(p, 2, 1), np.random.default_rng(0), 200)}
    assert not checks["finite sets (1) rigidity"].ok
    assert not checks["finite sets (2) a=>b"].ok
    assert not checks["finite sets (2) c=>b"].ok


def test_lemma_check_reporting():
    c = check_ultrametric(PadicContext(2, 2, 1))
    assert c.line().startswith("PASS ultrametric")
    assert c.to_json()["ok"] is True
