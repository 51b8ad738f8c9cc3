"""Ball trees, valuation matrices and a set that fails the level test."""
from __future__ import annotations

from padicstrat.balltree import ValMatrix, build_tree, export, level_report
from padicstrat.core import PadicContext
from padicstrat.defset import evaluate
from padicstrat.strat import stratify_greedy

ctx = PadicContext(3, 3, 2)

# %% valuation matrices are canonical up to reordering the points
print(ValMatrix.of_points([(0, 0), (9, 0), (1, 0)], ctx))

# %% horizontal lines: pairs at distance 2 near x2 = 0, distance 1 near x2 = 1
X = evaluate("x2 = 0 | x2 = 9 | x2 = 1 | x2 = 4 | x1 = 0", ctx)
S = stratify_greedy(X.indicator(), {0: 2, 1: 1})
rep = level_report(X, S, dim=1)
print(rep.verdict, rep.witness)

# %% the tree in DOT, ready for graphviz
print(export(build_tree(evaluate("x2 = 0", PadicContext(2, 2, 2))), "dot").decode())
