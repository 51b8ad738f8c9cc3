"""Named example sets with hand-chosen stratifications."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PadicContext
from .defset import FiniteSet, evaluate
from .errors import UnknownFixture
from .geometry import Ball, Coloring
from .strat import Stratification


@dataclass(frozen=True)
class Fixture:
    name: str
    n: int
    dim: int
    description: str
    s0: tuple  # the extra point(s) put in S_0

    def expr(self, ctx: PadicContext) -> str:
        if self.name == "parabola":
            return "x2 - x1^2 = 0"
        if self.name == "hyperbola":
            return f"x1*x2 - {ctx.p**2} = 0"
        if self.name == "ball-in-K":
            return "rv(x1 - 1) = (1, 1)"
        if self.name == "cusp":
            return "x2^2 - x1^3 = 0"
        raise UnknownFixture(self.name)

    def context(self, p: int = 3, m: int = 3) -> PadicContext:
        return PadicContext(p, m, self.n)

    def set(self, ctx: PadicContext) -> FiniteSet:
        self._check(ctx)
        return evaluate(self.expr(ctx), ctx)

    def coloring(self, ctx: PadicContext) -> Coloring:
        return self.set(ctx).indicator(Ball.whole(ctx))

    def strat(self, ctx: PadicContext, s0: bool = True) -> Stratification:
        """S_0 = the marked point(s), S_dim = X minus S_0, S_n = everything else."""
        X = self.set(ctx)
        ball = Ball.whole(ctx)
        n = ctx.n
        labels = np.full(ball.shape, n, dtype=np.int64)
        labels[X.in_ball(ball)] = self.dim
        if s0:
            for x in self.s0:
                labels[ball.rel_index(x)] = 0
        return Stratification(ball, labels, list(range(n + 1)))

    def _check(self, ctx: PadicContext):
        if ctx.n != self.n:
            raise ValueError(f"fixture {self.name} lives in dimension {self.n}, not {ctx.n}")


FIXTURES = {
    "parabola": Fixture("parabola", 2, 1, "the curve x2 = x1^2", ((0, 0),)),
    "hyperbola": Fixture("hyperbola", 2, 1, "the curve x1*x2 = p^2, smooth but nearly singular at the origin", ((0, 0),)),
    "ball-in-K": Fixture("ball-in-K", 1, 1, "the ball 1 + rv^-1((1, 1)) in one variable", ((1,),)),
    "cusp": Fixture("cusp", 2, 1, "the cusp x2^2 = x1^3", ((0, 0),)),
}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
