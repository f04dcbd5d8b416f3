"""``spd-geom`` command-line interface.

Subcommands
-----------
curvature-grid
    Monte-Carlo sectional-curvature bounds of MPE(alpha, beta) over a grid.
mean-kernel-scan
    Classify power-Wasserstein metrics as mean kernel metrics over a p range.
eval
    One-off evaluation of a metric, divergence, distance or curvature.

Matrices are given either as a path to a CSV file or inline: ``"1,4"`` is
``diag(1, 4)`` and ``"2,1;1,3"`` lists rows separated by semicolons.
Exit codes: 0 success, 2 usage or parse error, 3 math domain error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import deformed, experiments
from .divergences import DivergenceSpec, divergence
from .errors import GeometryError
from .linalg import ScalarFunction, as_eigh, exp_map, identity, log_map, power
from .mixed import (
    MixedEuclideanMetric,
    me_curvature,
    me_metric_eval,
    mpe_distance_commuting,
    sectional_curvature,
)

EXIT_USAGE = 2
EXIT_DOMAIN = 3


class ParseError(Exception):
    """Malformed command-line value."""


def parse_matrix(text: str) -> np.ndarray:
    path = Path(text)
    try:
        if path.is_file():
            M = np.loadtxt(path, delimiter=",", ndmin=2)
        elif ";" in text:
            M = np.array([[float(x) for x in row.split(",")] for row in text.split(";")])
        else:
            M = np.diag([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise ParseError(f"cannot parse matrix {text!r}: {exc}") from exc
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParseError(f"matrix {text!r} is not square")
    return M


def parse_pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise ParseError(f"expected 'a,b', got {text!r}") from exc
    return a, b


def parse_function(text: str) -> ScalarFunction:
    """``log``, ``exp``, ``id`` or ``pow<p>`` (e.g. ``pow0.5``)."""
    named = {"log": log_map, "exp": exp_map, "id": identity}
    if text in named:
        return named[text]()
    if text.startswith("pow"):
        try:
            p = float(text[3:])
        except ValueError as exc:
            raise ParseError(f"bad power map {text!r}") from exc
        if p == 0:
            raise ParseError("pow0 is not a diffeomorphism; use log")
        return power(p)
    raise ParseError(f"unknown function {text!r}")


def parse_me(args) -> MixedEuclideanMetric | None:
    if getattr(args, "mpe", None):
        return MixedEuclideanMetric.mpe(*parse_pair(args.mpe))
    if getattr(args, "me", None):
        parts = args.me.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'u,v', got {args.me!r}")
        return MixedEuclideanMetric(parse_function(parts[0]), parse_function(parts[1]))
    return None


def parse_grid_range(text: str) -> tuple[float, float, float]:
    try:
        return experiments.parse_range(text)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def fmt(x: float) -> str:
    return "%.15g" % x


NAMED_METRICS = {
    "euclidean": deformed.euclidean,
    "log-euclidean": deformed.log_euclidean,
    "affine-invariant": deformed.affine_invariant,
    "bures-wasserstein": deformed.bures_wasserstein,
    "bkm": deformed.bkm,
}
PARAM_METRICS = {
    "power-euclidean": deformed.power_euclidean,
    "power-affine": deformed.power_affine,
    "power-wasserstein": deformed.power_wasserstein,
    "alpha-procrustes": deformed.alpha_procrustes,
}


def named_metric(name: str) -> deformed.MetricHandle:
    """Catalog metric, optionally parametrized as ``name:p``."""
    base, _, param = name.partition(":")
    if base in NAMED_METRICS and not param:
        return NAMED_METRICS[base]()
    if base in PARAM_METRICS and param:
        try:
            return PARAM_METRICS[base](float(param))
        except ValueError as exc:
            raise ParseError(f"bad parameter in {name!r}") from exc
    raise ParseError(
        f"unknown metric {name!r}; choose from {sorted(NAMED_METRICS)} or "
        f"{sorted(PARAM_METRICS)} with ':p'"
    )


def _axis(text: str | None) -> tuple[float, float, float | None]:
    if text is None:
        return -2.0, 2.0, None
    lo, hi, step = parse_grid_range(text)
    return lo, hi, (step if text.count(":") == 2 else None)


def cmd_curvature_grid(args) -> int:
    defaults = experiments.GridConfig.fast() if args.fast else experiments.GridConfig()
    a_lo, a_hi, a_step = _axis(args.alpha)
    b_lo, b_hi, b_step = _axis(args.beta)
    steps = {s for s in (a_step, b_step) if s is not None}
    if len(steps) > 1:
        raise ParseError("alpha and beta ranges must share one step")
    step = steps.pop() if steps else defaults.step
    try:
        cfg = experiments.GridConfig(
            alpha_range=(a_lo, a_hi),
            beta_range=(b_lo, b_hi),
            step=step,
            dim=args.dim,
            n_matrices=args.matrices if args.matrices is not None else defaults.n_matrices,
            n_planes=args.planes if args.planes is not None else defaults.n_planes,
            seed=args.seed,
            out_path=args.out,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    rows = experiments.curvature_grid(cfg)
    text = experiments.grid_csv(rows)
    if args.out:
        experiments.write_text(args.out, text)
        lo = min((r.kappa_min for r in rows), default=float("nan"))
        hi = max((r.kappa_max for r in rows), default=float("nan"))
        skipped = sum(r.n_skipped for r in rows)
        print(f"{len(rows)} cells written to {args.out}; kappa in [{fmt(lo)}, {fmt(hi)}]; {skipped} skipped")
    else:
        sys.stdout.write(text)
    return 0


def cmd_mean_kernel_scan(args) -> int:
    lo, hi, step = parse_grid_range(args.range)
    if step <= 0 or hi < lo:
        raise ParseError(f"bad scan range {args.range!r}")
    result = experiments.run_mean_kernel_scan(lo, hi, step)
    text = experiments.scan_csv(result)
    if args.out:
        experiments.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(experiments.bracket_line(result))
    return 0


def cmd_eval_metric(args) -> int:
    sigma = as_eigh(parse_matrix(args.sigma))
    X = parse_matrix(args.x)
    Y = parse_matrix(args.y) if args.y else X
    me = parse_me(args)
    if me is not None:
        value = me_metric_eval(me, sigma, X, Y)
    elif args.name:
        value = named_metric(args.name).inner(sigma, X, Y)
    else:
        raise ParseError("give a metric name, --mpe a,b or --me u,v")
    print(fmt(value))
    return 0


def cmd_eval_divergence(args) -> int:
    sigma = parse_matrix(args.sigma)
    sigma_p = parse_matrix(args.sigma2)
    if args.uv:
        parts = args.uv.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'u,v', got {args.uv!r}")
        spec = DivergenceSpec.uv(parse_function(parts[0]), parse_function(parts[1]))
    elif args.alpha is not None and args.beta is not None:
        spec = DivergenceSpec.ab(args.alpha, args.beta)
    else:
        raise ParseError("give --alpha and --beta, or --uv u,v")
    value = divergence(spec, sigma_p, sigma) if args.dual else divergence(spec, sigma, sigma_p)
    print(fmt(value))
    return 0


def cmd_eval_distance(args) -> int:
    sigma = parse_matrix(args.sigma)
    lam = parse_matrix(args.sigma2)
    if args.mpe:
        value = mpe_distance_commuting(parse_pair(args.mpe), sigma, lam)
    elif args.name:
        value = deformed.deformed_distance(named_metric(args.name), sigma, lam)
    else:
        raise ParseError("give --mpe a,b or a flat metric name")
    print(fmt(value))
    return 0


def cmd_eval_curvature(args) -> int:
    me = parse_me(args)
    if me is None:
        raise ParseError("give --mpe a,b or --me u,v")
    sigma = parse_matrix(args.sigma)
    X = parse_matrix(args.x)
    Y = parse_matrix(args.y)
    if args.z or args.t:
        if not (args.z and args.t):
            raise ParseError("--z and --t go together")
        value = me_curvature(me, sigma, X, Y, parse_matrix(args.z), parse_matrix(args.t))
    else:
        value = sectional_curvature(me, sigma, X, Y)
    print(fmt(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spd-geom", description="Geometry of SPD matrices.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("curvature-grid", help="sectional-curvature bounds of MPE(alpha, beta)")
    g.add_argument("--alpha", help="lo:hi:step (default -2:2 at the preset step)")
    g.add_argument("--beta", help="lo:hi:step (default -2:2 at the preset step)")
    g.add_argument("--dim", type=int, default=3)
    g.add_argument("--matrices", type=int, default=None, help="number of base points (default 1000)")
    g.add_argument("--planes", type=int, default=None, help="number of planes (default 1000)")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--fast", action="store_true", help="step 0.25, 100 matrices, 100 planes")
    g.add_argument("--out", help="CSV output path (stdout if omitted)")
    g.set_defaults(func=cmd_curvature_grid)

    s = sub.add_parser("mean-kernel-scan", help="mean-kernel classification of power-Wasserstein metrics")
    s.add_argument("--range", default="2.5:2.7:0.01", help="lo:hi:step over p (default %(default)s)")
    s.add_argument("--out", help="CSV output path (stdout if omitted)")
    s.set_defaults(func=cmd_mean_kernel_scan)

    e = sub.add_parser("eval", help="evaluate a single quantity")
    esub = e.add_subparsers(dest="what", required=True)

    def me_options(p):
        p.add_argument("--mpe", help="alpha,beta of a mixed-power-Euclidean metric")
        p.add_argument("--me", help="u,v maps (log, exp, id, pow<p>) of a mixed-Euclidean metric")

    m = esub.add_parser("metric", help="g_sigma(X, Y)")
    m.add_argument("name", nargs="?", help="catalog metric, e.g. bkm or power-euclidean:0.5")
    me_options(m)
    m.add_argument("--sigma", required=True)
    m.add_argument("--x", required=True)
    m.add_argument("--y", help="defaults to X")
    m.set_defaults(func=cmd_eval_metric)

    d = esub.add_parser("divergence", help="D(sigma | sigma2)")
    d.add_argument("--alpha", type=float)
    d.add_argument("--beta", type=float)
    d.add_argument("--uv", help="u,v maps of a (u, v)-divergence")
    d.add_argument("--dual", action="store_true", help="evaluate the dual divergence")
    d.add_argument("--sigma", required=True)
    d.add_argument("--sigma2", required=True)
    d.set_defaults(func=cmd_eval_divergence)

    t = esub.add_parser("distance", help="distance between commuting matrices or under a flat metric")
    t.add_argument("name", nargs="?", help="flat metric, e.g. log-euclidean or power-euclidean:0.5")
    t.add_argument("--mpe", help="alpha,beta (inputs must commute)")
    t.add_argument("--sigma", required=True)
    t.add_argument("--sigma2", required=True)
    t.set_defaults(func=cmd_eval_distance)

    c = esub.add_parser("curvature", help="sectional curvature, or R(X,Y,Z,T) with --z/--t")
    me_options(c)
    c.add_argument("--sigma", required=True)
    c.add_argument("--x", required=True)
    c.add_argument("--y", required=True)
    c.add_argument("--z")
    c.add_argument("--t")
    c.set_defaults(func=cmd_eval_curvature)
    return parser


RANGE_OPTIONS = ("--alpha", "--beta", "--range")


def _attach_ranges(argv: list[str]) -> list[str]:
    """Glue ``--alpha -2:2:0.05`` into ``--alpha=-2:2:0.05``.

    argparse reads a value starting with ``-`` as a new option unless it
    parses as a plain negative number, which ``lo:hi:step`` does not.
    """
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in RANGE_OPTIONS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and ":" in nxt:
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_ranges(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"spd-geom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"spd-geom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
