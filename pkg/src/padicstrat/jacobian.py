"""The Jacobian property of polynomial maps on finite pieces.

f has the property on X when it is constant there or when one nonzero z
satisfies v(f(x) - f(x') - <z, x - x'>) > v(z) + v(x - x') for all x != x'
in X.  At precision m a left side that vanishes mod p^m only proves
v >= m, so such a pair is decided only when the right side is below m.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import PadicContext, as_coords, rv_coords, val_array, valuation_coords
from .defset import FiniteSet, Poly, parse_poly
from .errors import PrecisionExhausted

_CHUNK = 2048


@dataclass
class JacobianResult:
    ok: bool
    constant: bool = False
    witness: tuple | None = None  # (x, x') violating the inequality
    pairs_checked: int = 0

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "constant": self.constant,
            "witness": None if self.witness is None else [list(self.witness[0]), list(self.witness[1])],
            "pairs_checked": self.pairs_checked,
        }


@dataclass
class JacobianWitness:
    z: tuple[int, ...]
    scope: FiniteSet
    constant: bool = False
    source: str = ""

    def rv(self):
        ctx = self.scope.ctx
        return rv_coords(self.z, ctx.p, ctx.m)

    def to_json(self) -> dict:
        return {"z": list(self.z), "constant": self.constant, "source": self.source, "rv": str(self.rv())}


def _as_poly(f, n: int) -> Poly:
    return parse_poly(f, n) if isinstance(f, str) else f


def _values(f: Poly, pts: np.ndarray, q: int) -> np.ndarray:
    return f.evaluate([pts[:, i] for i in range(pts.shape[1])], q)


def check_jacobian(f, X: FiniteSet, z, rv_samples: int = 0, rng=None) -> JacobianResult:
    """Exhaustive pair check; raises PrecisionExhausted when only undecidable pairs remain.

    With ``rv_samples`` > 0, that many other z' with rv(z') = rv(z) are
    checked too and must give the same verdict.
    """
    ctx = X.ctx
    f = _as_poly(f, ctx.n)
    res = _check(f, X, as_coords(z, ctx))
    if rv_samples and not res.constant:
        rng = rng if rng is not None else np.random.default_rng(0)
        for zp in rv_class_samples(as_coords(z, ctx), ctx, rv_samples, rng):
            try:
                other = _check(f, X, zp).ok
            except PrecisionExhausted:
                continue
            if other != res.ok:
                raise AssertionError(f"verdict differs for z' = {zp} in the rv class of {z}")
    return res


def rv_class_samples(z, ctx: PadicContext, k: int, rng) -> list[tuple[int, ...]]:
    """k random z' with rv(z') = rv(z)."""
    lam = valuation_coords(z, ctx.p, ctx.m)
    if lam == float("inf") or lam + 1 >= ctx.m:
        return []
    step = ctx.p ** (lam + 1)
    out = []
    for _ in range(k):
        noise = rng.integers(0, ctx.q // step, size=ctx.n)
        out.append(tuple(int((a + step * b) % ctx.q) for a, b in zip(z, noise)))
    return out


def _check(f: Poly, X: FiniteSet, z: tuple[int, ...]) -> JacobianResult:
    ctx = X.ctx
    p, m, q = ctx.p, ctx.m, ctx.q
    pts = np.array(X.points(), dtype=np.int64).reshape(-1, ctx.n)
    fx = _values(f, pts, q)
    if pts.shape[0] == 0 or np.all(fx == fx[0]):
        return JacobianResult(True, constant=True)
    vz = valuation_coords(z, p, m)
    if vz == float("inf"):
        # z = 0 and f is not constant: the pair with different values fails
        i = int(np.flatnonzero(fx != fx[0])[0])
        return JacobianResult(False, witness=(tuple(pts[0].tolist()), tuple(pts[i].tolist())), pairs_checked=1)
    if _affine_remainder(f, z, q):
        # f(x) - <z, x> is constant as a polynomial: every lift gives exactly 0
        return JacobianResult(True, pairs_checked=pts.shape[0] * (pts.shape[0] - 1))
    zv = np.array(z, dtype=np.int64)
    N = pts.shape[0]
    undecided = None
    checked = 0
    for start in range(0, N, _CHUNK):
        a = pts[start : start + _CHUNK]
        fa = fx[start : start + _CHUNK]
        d = (a[:, None, :] - pts[None, :, :]) % q
        vd = val_array(d, p, m).min(axis=-1)
        lhs = (fa[:, None] - fx[None, :] - (d * zv).sum(axis=-1)) % q
        vl = val_array(lhs, p, m)
        rhs = vz + vd
        pair = vd < m  # distinct points
        fails = pair & (lhs != 0) & (vl <= rhs)
        undec = pair & (lhs == 0) & (rhs >= m)
        checked += int(pair.sum())
        if fails.any():
            i, j = np.argwhere(fails)[0].tolist()
            return JacobianResult(False, witness=(tuple(a[i].tolist()), tuple(pts[j].tolist())), pairs_checked=checked)
        if undecided is None and undec.any():
            i, j = np.argwhere(undec)[0].tolist()
            undecided = (tuple(a[i].tolist()), tuple(pts[j].tolist()))
    if undecided is not None:
        raise PrecisionExhausted(
            f"pair {undecided} needs digits beyond precision {m}", detail=undecided
        )
    return JacobianResult(True, pairs_checked=checked)


def _affine_remainder(f: Poly, z, q: int) -> bool:
    g = f - sum((Poly.const(int(c)) * Poly.var(i + 1) for i, c in enumerate(z)), Poly.const(0))
    return all(c % q == 0 for k, c in g.terms.items() if k)


def _gradient(f: Poly, x, q: int) -> tuple[int, ...]:
    n = len(x)
    return tuple(f.derivative(i + 1).eval_point(x, q) for i in range(n))


def _difference_quotients(f: Poly, X: FiniteSet) -> tuple[int, ...] | None:
    """z_i from the first pair of X differing only in coordinate i, as an exact quotient."""
    ctx = X.ctx
    p, m, q = ctx.p, ctx.m, ctx.q
    z = [0] * ctx.n
    found = False
    for i in range(ctx.n):
        for x in X.points():
            for k in range(m):
                t = p**k
                y = list(x)
                y[i] = (y[i] + t) % q
                if tuple(y) not in X:
                    continue
                diff = (f.eval_point(y, q) - f.eval_point(x, q)) % q
                if diff % t:
                    continue
                z[i] = diff // t  # a representative mod p^(m-k)
                found = True
                break
            if found and z[i]:
                break
    return tuple(z) if found and any(z) else None


def rv_class_representatives(ctx: PadicContext):
    """One z per nonzero rv value: p^lam * u for lam < m and u in F_p^n minus 0."""
    for lam in range(ctx.m):
        for u in itertools.product(range(ctx.p), repeat=ctx.n):
            if any(u):
                yield tuple(ctx.p**lam * a for a in u)


def find_z(f, X: FiniteSet) -> JacobianWitness | None:
    """Search for z; the final pass over every rv class makes the search complete."""
    ctx = X.ctx
    f = _as_poly(f, ctx.n)
    pts = X.points()
    q = ctx.q
    fx = [f.eval_point(x, q) for x in pts]
    if len(set(fx)) <= 1:
        return JacobianWitness((0,) * ctx.n, X, constant=True, source="constant")
    tried = set()

    def attempt(z, source):
        z = tuple(int(a) % q for a in z)
        key = rv_coords(z, ctx.p, ctx.m)
        if key.is_zero or key in tried:
            return None
        tried.add(key)
        try:
            ok = _check(f, X, z).ok
        except PrecisionExhausted:
            return None
        return JacobianWitness(z, X, source=source) if ok else None

    w = attempt(_gradient(f, pts[0], q), "gradient")
    if w:
        return w
    dq = _difference_quotients(f, X)
    if dq is not None:
        w = attempt(dq, "difference-quotient")
        if w:
            return w
    for z in rv_class_representatives(ctx):
        w = attempt(z, "rv-search")
        if w:
            return w
    return None
