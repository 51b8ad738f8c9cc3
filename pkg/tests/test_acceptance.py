"""All twelve acceptance criteria; a PASS/FAIL line per criterion is printed in the summary."""
from __future__ import annotations

import pytest

from conftest import ACCEPTANCE_LINES
from padicstrat.acceptance import CRITERIA, lemma_parts_split, run_criterion


def _record(c):
    line = c.line()
    ACCEPTANCE_LINES[c.number] = line
    print(line)


@pytest.mark.parametrize("number", [k for k in sorted(CRITERIA) if k != 5])
def test_criterion(number):
    c = run_criterion(number, seed=0)
    _record(c)
    assert c.passed, c.detail


@pytest.fixture(scope="module")
def lemma_criterion():
    c = run_criterion(5, seed=0)
    _record(c)
    return c


def test_criterion_5_outside_residue_characteristic(lemma_criterion):
    outside, inside = lemma_parts_split(lemma_criterion)
    assert outside and inside
    bad = [pt for pt in outside if not pt[1]]
    assert not bad, bad


@pytest.mark.xfail(
    strict=True,
    reason="finite-set rigidity and the a=>b, c=>b directions fail when residue "
    "characteristic equals p: translation by 1 permutes {0, ..., p-1} rv-isometrically",
)
def test_criterion_5_finite_set_statements(lemma_criterion):
    _, inside = lemma_parts_split(lemma_criterion)
    bad = [pt for pt in inside if not pt[1]]
    assert not bad, f"{len(bad)} failing checks, e.g. {bad[0]}"
