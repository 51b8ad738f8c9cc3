"""Walk through the parabola x2 = x1^2: its set, tree, stratification and exceptional directions."""
from __future__ import annotations

from padicstrat.balltree import build_tree, level_report
from padicstrat.fixtures import FIXTURES
from padicstrat.strat import kegel_xi, stratify_greedy, verify_tstrat

# %% the set at p=3, m=3
fx = FIXTURES["parabola"]
ctx = fx.context(3, 3)
X = fx.set(ctx)
print(f"{len(X)} points on the parabola in (Z/27)^2")

# %% hand-made stratification: the vertex alone in S_0
S = fx.strat(ctx)
print("with the vertex:", verify_tstrat(S, fx.coloring(ctx)).verdict)

# without the vertex the tangent direction jumps at the origin
bad = verify_tstrat(fx.strat(ctx, s0=False), fx.coloring(ctx))
print("without it:", bad.verdict, "at", bad.witness)

# %% the greedy stratifier finds the same S_0
G = stratify_greedy(fx.coloring(ctx), {0: 2, 1: 1})
print("greedy S_0:", G.stratum(0))

# %% ball tree: one node per residue of x1 at every depth
T = build_tree(X)
print(T, T.counts_by_depth())

# %% level report and the directions seen from the vertex
print(level_report(X, S).verdict)
xi = kegel_xi(S.as_coloring().product(fx.coloring(ctx)), (0, 0))
print("valuations", xi.valuations, "xi", xi.xi)
