"""Command-line entry point: ``python -m padicstrat <command> [flags]``.

Exit codes: 0 success or positive answer, 1 negative answer (a failed
verification, a missing risometry, an exhausted budget), 2 usage error,
3 precision exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .core import PadicContext, as_coords
from .errors import BudgetExhausted, PadicStratError, PrecisionExhausted
from .geometry import Ball, Coloring

COMMANDS = (
    "eval",
    "tree",
    "verify",
    "reflects",
    "tsp",
    "canon",
    "equiv",
    "stratify",
    "kegel",
    "whitney-b",
    "jacobian",
    "fixtures",
    "acceptance",
)

GRAMMAR = """\
set expressions ('!' binds tighter than '&', which binds tighter than '|'):
  expr  := disj ; disj := conj ('|' conj)* ; conj := unary ('&' unary)*
  unary := '!' unary | '(' expr ')' | atom
  atom  := poly '=' poly | 'val' '(' poly ')' CMP INT | 'rv' '(' poly ')' '=' '(' INT ',' INT ')'
  CMP in = >= > <= <
  poly  := sums, differences and products of integers and x1..xn, with '^' INT for powers
examples: "x2 - x1^2 = 0", "val(x1) >= 1 & x2 = 0", "rv(x1 - 1) = (1, 1)"
balls: DEPTH:R1,...,Rn, for example 1:0,0 (or a JSON object {"depth": .., "residue": [..]})
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global flags")
    g.add_argument("--p", type=int, default=None, help="residue characteristic")
    g.add_argument("--m", type=int, default=None, help="precision: coordinates live in Z/p^m")
    g.add_argument("--n", type=int, default=None, help="ambient dimension")
    g.add_argument("--out", default=None, help="write the output here instead of stdout")
    g.add_argument("--format", choices=("json", "dot", "text"), default="json")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--budget", type=int, default=100, help="demotion budget for stratify")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for verification")
    g.add_argument("--fixture", default=None, help="named example (see the fixtures command)")
    g.add_argument("--no-s0", action="store_true", help="drop the marked S_0 points of the fixture")
    g.add_argument("--expr", default=None, help="set expression, or the polynomial for jacobian")
    g.add_argument("--set", default=None, help="set file ({expr, ctx}) or inline set expression")
    g.add_argument("--coloring", action="append", default=None, help="coloring file; equiv takes two")
    g.add_argument("--strat", default=None, help="stratification file")
    g.add_argument("--ball", default=None, help="ball as DEPTH:R1,...,Rn")
    g.add_argument("--point", default=None, help="point as X1,...,Xn")
    g.add_argument("--z", default=None, help="candidate z for jacobian, as Z1,...,Zn")
    g.add_argument("--dims", default=None, help="declared dimension per color for stratify, as C:D,...")
    g.add_argument("--criterion", type=int, default=None, help="acceptance criterion number (default: all)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="padicstrat", description="Finite-precision t-stratification toolkit.", epilog=GRAMMAR,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    helps = {
        "eval": "evaluate a set expression",
        "tree": "ball tree of a set",
        "verify": "verify a t-stratification",
        "reflects": "does a t-stratification reflect a coloring",
        "tsp": "translatability space of a coloring on a ball",
        "canon": "risometry canonical form of a coloring",
        "equiv": "risometry between two colorings",
        "stratify": "greedy t-stratification of a coloring",
        "kegel": "exceptional rv values around a point",
        "whitney-b": "valuations violating the Whitney (b) analogue on a ball",
        "jacobian": "find or check z for the Jacobian property",
        "fixtures": "list the named examples",
        "acceptance": "run acceptance criteria",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], epilog=GRAMMAR,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


# ---------------------------------------------------------------------------
# input helpers


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _fixture(args):
    from .fixtures import get_fixture

    return get_fixture(args.fixture)


def _ctx(args, n: int | None = None) -> PadicContext:
    if args.fixture:
        fx = _fixture(args)
        p = args.p if args.p is not None else 3
        m = args.m if args.m is not None else 3
        return fx.context(p, m)
    n = args.n if args.n is not None else n
    if args.p is None or args.m is None or n is None:
        raise UsageError("--p, --m and --n are required without --fixture")
    return PadicContext(args.p, args.m, n)


def _parse_ball(text: str, ctx: PadicContext) -> Ball:
    text = text.strip()
    if text.startswith("{"):
        return Ball.from_json(ctx, json.loads(text))
    try:
        depth, res = text.split(":")
        return Ball(ctx, int(depth), tuple(int(a) for a in res.split(",")))
    except ValueError:
        raise UsageError(f"cannot parse ball {text!r}; expected DEPTH:R1,...,Rn") from None


def _parse_vec(text: str, ctx: PadicContext) -> tuple[int, ...]:
    try:
        vals = [int(a) for a in text.replace("(", "").replace(")", "").split(",")]
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}") from None
    if len(vals) != ctx.n:
        raise UsageError(f"point {text!r} needs {ctx.n} coordinates")
    return as_coords(vals, ctx)


def _load_set(args, ctx: PadicContext | None = None):
    from .defset import evaluate

    text = args.set
    if text and os.path.exists(text):
        obj = _load_json(text)
        ctx = PadicContext.from_json(obj["ctx"]) if "ctx" in obj else ctx
        if ctx is None:
            raise UsageError("the set file has no ctx; pass --p, --m and --n")
        return evaluate(obj["expr"], ctx)
    if ctx is None:
        raise UsageError("--p, --m and --n are required for an inline set")
    return evaluate(text, ctx)


def _set_and_ctx(args):
    """The set named by --fixture, --expr or --set."""
    from .defset import evaluate

    if args.fixture:
        ctx = _ctx(args)
        return _fixture(args).set(ctx), ctx
    if args.set:
        ctx = _ctx(args) if args.n is not None else None
        X = _load_set(args, ctx)
        return X, X.ctx
    if args.expr:
        ctx = _ctx(args)
        return evaluate(args.expr, ctx), ctx
    raise UsageError("give --fixture, --set or --expr")


def _load_coloring(path: str, args) -> Coloring:
    obj = _load_json(path)
    ctx = PadicContext.from_json(obj["ctx"]) if "ctx" in obj else _ctx(args)
    return Coloring.from_json(obj, ctx)


def _coloring(args) -> Coloring:
    if args.coloring:
        return _load_coloring(args.coloring[0], args)
    if args.fixture:
        return _fixture(args).coloring(_ctx(args))
    if args.set or args.expr:
        X, ctx = _set_and_ctx(args)
        return X.indicator(Ball.whole(ctx))
    raise UsageError("give --coloring, --fixture, --set or --expr")


def _strat(args):
    from .strat import Stratification

    if args.strat:
        obj = _load_json(args.strat)
        ctx = PadicContext.from_json(obj["ctx"]) if "ctx" in obj else _ctx(args)
        return Stratification.from_json(obj, ctx)
    if args.fixture:
        return _fixture(args).strat(_ctx(args), s0=not args.no_s0)
    raise UsageError("give --strat or --fixture")


def _dims(text: str | None, col: Coloring) -> dict:
    if text is None:
        return {c: col.ctx.n for c in col.values()}
    out = {}
    try:
        for item in text.split(","):
            c, d = item.split(":")
            out[int(c)] = int(d)
    except ValueError:
        raise UsageError(f"cannot parse --dims {text!r}; expected C:D,...") from None
    return out


# ---------------------------------------------------------------------------
# commands; each returns (exit code, json payload, text rendering)


def cmd_eval(args):
    X, ctx = _set_and_ctx(args)
    obj = X.to_json()
    obj["size"] = len(X)
    obj["precision_sensitive"] = [tuple(k) for k in np.argwhere(X.sensitive).tolist()]
    text = f"{len(X)} points in (Z/{ctx.p}^{ctx.m})^{ctx.n}\n" + "\n".join(" ".join(map(str, x)) for x in X.points())
    return 0, obj, text


def cmd_tree(args):
    from .balltree import build_tree

    X, ctx = _set_and_ctx(args)
    root = _parse_ball(args.ball, ctx) if args.ball else None
    T = build_tree(X, root)
    counts = T.counts_by_depth()
    text = f"{len(T)} nodes; by depth " + ", ".join(f"{d}: {c}" for d, c in sorted(counts.items()))
    return 0, T.to_json(), text, T.to_dot()


def cmd_verify(args):
    from .strat import verify_tstrat

    S = _strat(args)
    col = _coloring(args) if (args.coloring or args.fixture) else None
    rep = verify_tstrat(S, col, jobs=args.jobs)
    text = f"{rep.verdict}" + (f", witness ball {rep.witness}" if rep.witness is not None else "")
    return (0 if rep.passed else 1), rep.to_json(), text


def cmd_reflects(args):
    from .strat import reflects

    S = _strat(args)
    col = _coloring(args)
    rep = reflects(S, col)
    text = "reflects" if rep else f"does not reflect; tsp drops on {rep.witness}"
    return (0 if rep else 1), rep.to_json(), text


def cmd_tsp(args):
    from .strat import tsp_with_filters

    col = _coloring(args)
    if args.ball:
        col = col.restrict(_parse_ball(args.ball, col.ctx))
    space, rejected = tsp_with_filters(col)
    obj = {
        "ball": col.ball.to_json(),
        "dim": space.dim,
        "tsp": space.to_json(),
        "rejected": [{"line": V.to_json(), "filter": f} for V, f in rejected.items()],
    }
    return 0, obj, f"tsp on {col.ball} has dimension {space.dim}: {space}"


def cmd_canon(args):
    from .riso import canonicalize

    col = _coloring(args)
    if args.ball:
        col = col.restrict(_parse_ball(args.ball, col.ctx))
    form = canonicalize(col)
    return 0, form.to_json(), form.digest


def cmd_equiv(args):
    from .riso import riso_equiv

    if not args.coloring or len(args.coloring) != 2:
        raise UsageError("equiv needs two --coloring files")
    c1 = _load_coloring(args.coloring[0], args)
    c2 = _load_coloring(args.coloring[1], args)
    phi = riso_equiv(c1, c2)
    obj = {"equivalent": phi is not None, "risometry": None if phi is None else phi.to_json()}
    return (0 if phi is not None else 1), obj, "risometric" if phi is not None else "not risometric"


def cmd_stratify(args):
    from .strat import stratify_greedy

    col = _coloring(args)
    if args.fixture and args.dims is None:
        fx = _fixture(args)
        dims = {0: col.ctx.n, 1: fx.dim}
    else:
        dims = _dims(args.dims, col)
    S = stratify_greedy(col, dims, budget=args.budget, jobs=args.jobs)
    text = "\n".join(f"S_{d}: {len(S.stratum(d))} points" for d in range(col.ctx.n + 1))
    return 0, S.to_json(), text


def cmd_kegel(args):
    from .strat import kegel_xi

    if args.fixture:
        fx = _fixture(args)
        ctx = _ctx(args)
        col = fx.strat(ctx, s0=not args.no_s0).as_coloring().product(fx.coloring(ctx))
    else:
        col = _coloring(args)
    x = _parse_vec(args.point, col.ctx) if args.point else (0,) * col.ctx.n
    res = kegel_xi(col, x)
    return 0, res.to_json(), f"valuations {res.valuations}; xi {res.xi}"


def cmd_whitney(args):
    from .strat import whitney_b_M

    S = _strat(args)
    B = _parse_ball(args.ball, S.ctx) if args.ball else S.ball
    res = whitney_b_M(S, B)
    return 0, res.to_json(), f"M = {res.M} on {B} ({res.pairs_checked} pairs)"


def cmd_jacobian(args):
    from .jacobian import check_jacobian, find_z

    if not args.expr:
        raise UsageError("jacobian needs --expr (the polynomial) and --set (the domain)")
    if args.fixture:
        X, ctx = _set_and_ctx(args)
    elif args.set:
        ctx = _ctx(args) if args.n is not None else None
        X = _load_set(args, ctx)
        ctx = X.ctx
    else:
        raise UsageError("jacobian needs --set or --fixture for the domain")
    if args.z:
        z = _parse_vec(args.z, ctx)
        res = check_jacobian(args.expr, X, z)
        obj = dict(res.to_json(), z=list(z))
        text = "holds" if res.ok else f"fails at pair {res.witness}"
        return (0 if res.ok else 1), obj, text
    w = find_z(args.expr, X)
    if w is None:
        return 1, {"found": False, "z": None}, "no z found"
    return 0, dict(w.to_json(), found=True), f"z = {w.z} ({w.source})"


def cmd_fixtures(args):
    from .fixtures import FIXTURES

    obj = [{"name": f.name, "n": f.n, "dim": f.dim, "description": f.description, "s0": [list(x) for x in f.s0]}
           for f in FIXTURES.values()]
    text = "\n".join(f"{f.name}: n={f.n}, dim {f.dim}, {f.description}" for f in FIXTURES.values())
    return 0, obj, text


def cmd_acceptance(args):
    from .acceptance import CRITERIA, run_criterion

    numbers = [args.criterion] if args.criterion is not None else sorted(CRITERIA)
    for k in numbers:
        if k not in CRITERIA:
            raise UsageError(f"no criterion {k}; choose from 1-{len(CRITERIA)}")
    results = [run_criterion(k, seed=args.seed) for k in numbers]
    ok = all(results)
    text = "\n".join(r.line(timing=False) for r in results)
    return (0 if ok else 1), [r.to_json() for r in results], text


HANDLERS = {
    "eval": cmd_eval,
    "tree": cmd_tree,
    "verify": cmd_verify,
    "reflects": cmd_reflects,
    "tsp": cmd_tsp,
    "canon": cmd_canon,
    "equiv": cmd_equiv,
    "stratify": cmd_stratify,
    "kegel": cmd_kegel,
    "whitney-b": cmd_whitney,
    "jacobian": cmd_jacobian,
    "fixtures": cmd_fixtures,
    "acceptance": cmd_acceptance,
}


def _render(fmt: str, result) -> str:
    obj, text = result[1], result[2]
    if fmt == "dot":
        if len(result) < 4:
            raise UsageError("--format dot is only available for tree")
        return result[3]
    if fmt == "text":
        return text + "\n"
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (tuple, set, frozenset)):
        return list(o)
    return str(o)


def _emit(args, payload: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        result = HANDLERS[args.command](args)
        _emit(args, _render(args.format, result))
        return result[0]
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n\n")
        sys.stderr.write(parser.format_help())
        sys.stderr.write("\nflags:\n" + _common().format_help().split("global flags:", 1)[-1])
        return 2
    except PrecisionExhausted as exc:
        sys.stderr.write(f"precision exhausted: {exc}\n")
        return 3
    except BudgetExhausted as exc:
        obj = {"error": "budget exhausted", "message": str(exc)}
        if getattr(exc, "report", None) is not None:
            obj["report"] = exc.report.to_json()
        _emit(args, json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n")
        return 1
    except (PadicStratError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"usage error: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
