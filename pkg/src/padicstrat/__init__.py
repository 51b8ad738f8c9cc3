"""Finite-precision toolkit for t-stratifications of p-adic sets."""
from __future__ import annotations

from .core import INF, Direction, IntMatrix, PadicContext, PadicScalar, Point, RvValue, direction, rv
from .geometry import Ball, Coloring, Lift, Projection, Subspace, children, smallest_ball_containing

__version__ = "0.1.0"
