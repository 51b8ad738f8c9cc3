"""Canonical forms decide whether two colorings differ by a risometry."""
from __future__ import annotations

import numpy as np

from padicstrat.core import PadicContext
from padicstrat.geometry import Ball, Coloring
from padicstrat.riso import Risometry, canonicalize, riso_equiv

rng = np.random.default_rng(3)
ctx = PadicContext(2, 3, 2)
ball = Ball.whole(ctx)

# %% a coloring and its pullback along a random risometry share a canonical form
col = Coloring.from_function(ball, lambda x: int(x[0] % 4 == 0) + int(x[1] % 2 == 1))
phi = Risometry.random(ball, rng)
moved = phi.pullback(col)
print(canonicalize(col).digest == canonicalize(moved).digest)

# %% riso_equiv returns the map; pulling back by it recovers the original
psi = riso_equiv(col, moved)
print(psi is not None and psi.pullback(moved) == col)

# %% a coloring with a different point count is never equivalent
other = Coloring.from_function(ball, lambda x: int(x == (0, 0)))
print(riso_equiv(col, other))
