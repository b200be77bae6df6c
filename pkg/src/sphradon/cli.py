"""Command-line frontend: coefficient export, sampling, inversion, checks.

Four subcommands over the library, with deterministic byte-identical output
for identical arguments and atomic (write-then-rename) file emission:

    coeffs       exact-rational coefficient and filter-polynomial tables
    forward      sample a phantom's moment data onto a detector grid CSV
    reconstruct  invert analytic or gridded data over a planar slice
    verify       run the full residual-check lattice and write the report

Exit codes: 0 success, 1 usage or invalid configuration, 2 a numerical
check failed its tolerance, 3 I/O failure.

The phantom argument is NAME, NAME:params, or NAME(params); params are
comma-separated key=value pairs (a single bare number binds to the factory's
first parameter, so const:3 is the constant 3).  The name paper8 is kept as
an alias of rsqz3 because published artifacts refer to the worked-example
phantom by that label.

A slice in the plane z=V reuses --zrange for the y extent: the flag set is
fixed, and a z-slice has no z extent to spend it on.
"""

from __future__ import annotations

import argparse
import inspect
import io
import os
import re
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import fields
from .checks import run_all_checks, write_residual_csv
from .coeffs import (
    build_tables,
    perturb_entry,
    write_coefficient_csv,
    write_polynomial_csv,
)
from .fields import PHANTOM_NAMES, ScalarField3D, make_phantom
from .moments import read_moment_csv, sample_moments, write_moment_csv
from .reconstruct import (
    SliceSpec,
    reconstruct_slice,
    write_slice_csv,
    write_slice_pgm,
)

__all__ = ["main", "RunConfig"]

_TABLE_ORDER = 8
_ALIASES = {"paper8": "rsqz3"}


@dataclass(frozen=True)
class RunConfig:
    """Validated per-subcommand configuration; unused fields stay None."""

    subcommand: str
    phantom: str | None = None
    grid_path: str | None = None
    origin: tuple | None = None
    h: float | None = None
    n_p: int | None = None
    n_q: int | None = None
    umax: float | None = None
    n_u: int | None = None
    analytic: bool = False
    order_n: int | None = None
    mode: str | None = None
    slice_axis: str | None = None
    slice_value: float | None = None
    xrange: tuple | None = None
    zrange: tuple | None = None
    step: float | None = None
    min_abs_z: float | None = None
    max_n: int | None = None
    fd_step: float | None = None
    seed: int | None = None
    perturb: str | None = None
    out: str | None = None
    pgm: str | None = None


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        # values like -3,3 or -0.2,-0.2 must bind to pair-valued flags
        # rather than being mistaken for option strings
        self._negative_number_matcher = re.compile(r"^-\d*\.?\d+(?:,-?\d*\.?\d+)*$")


def _pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_phantom(spec: str) -> ScalarField3D:
    m = re.fullmatch(r"([A-Za-z0-9_]+)\((.*)\)", spec)
    if m:
        name, params = m.group(1), m.group(2)
    elif ":" in spec:
        name, params = spec.split(":", 1)
    else:
        name, params = spec, ""
    name = _ALIASES.get(name, name)
    kwargs = {}
    first_positional = None
    for tok in filter(None, (t.strip() for t in params.split(","))):
        if "=" in tok:
            key, val = tok.split("=", 1)
            kwargs[key.strip()] = float(val)
        elif first_positional is None:
            first_positional = float(tok)
        else:
            raise ValueError(f"at most one bare parameter allowed, got {params!r}")
    if first_positional is not None:
        ctor = getattr(fields, f"{name}_field", None)
        params_of = inspect.signature(ctor).parameters if ctor else {}
        if not params_of:
            raise ValueError(f"phantom {name!r} takes no parameters")
        kwargs.setdefault(next(iter(params_of)), first_positional)
    return make_phantom(name, **kwargs)


def _atomic_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ----- subcommands -----


def _cmd_coeffs(cfg: RunConfig) -> int:
    if cfg.max_n < 0:
        raise ValueError("--max-n must be >= 0")
    table = build_tables(cfg.max_n)
    buf = io.StringIO()
    write_coefficient_csv(table, buf)
    _atomic_text(cfg.out, buf.getvalue())
    root, ext = os.path.splitext(cfg.out)
    poly_path = f"{root}.polynomials{ext or '.csv'}"
    buf = io.StringIO()
    write_polynomial_csv(table, cfg.max_n, buf)
    _atomic_text(poly_path, buf.getvalue())
    print(f"wrote {cfg.out} and {poly_path}")
    return 0


def _cmd_forward(cfg: RunConfig) -> int:
    if cfg.h <= 0 or cfg.umax <= 0:
        raise ValueError("--h and --umax must be positive")
    if cfg.n_p < 1 or cfg.n_q < 1 or cfg.n_u < 1:
        raise ValueError("--np, --nq, --nu must be >= 1")
    field = _parse_phantom(cfg.phantom)
    du = cfg.umax / cfg.n_u
    nodes = du * np.arange(1, cfg.n_u + 1)
    grid = sample_moments(
        field, cfg.origin, cfg.h, cfg.n_p, cfg.n_q, nodes, analytic=cfg.analytic
    )
    write_moment_csv(grid, cfg.out)
    print(f"wrote {cfg.out}: {cfg.n_p}x{cfg.n_q} centers, {cfg.n_u} radii")
    return 0


def _cmd_reconstruct(cfg: RunConfig) -> int:
    if cfg.step <= 0:
        raise ValueError("--step must be positive")
    if cfg.min_abs_z <= 0:
        raise ValueError("--min-abs-z must be positive")
    if cfg.order_n < 0 or cfg.order_n > _TABLE_ORDER:
        raise ValueError(f"--order must be in 0..{_TABLE_ORDER}")
    if cfg.phantom is not None:
        source = _parse_phantom(cfg.phantom)
    else:
        source = read_moment_csv(cfg.grid_path)
    spec = SliceSpec(
        axis=cfg.slice_axis,
        value=cfg.slice_value,
        xrange=cfg.xrange,
        other_range=cfg.zrange,
        step=cfg.step,
    )
    table = build_tables(_TABLE_ORDER)
    result = reconstruct_slice(
        spec, cfg.order_n, cfg.mode, source, table, min_abs_z=cfg.min_abs_z
    )
    write_slice_csv(result, cfg.out)
    msg = f"wrote {cfg.out}: {result.values.shape[0]}x{result.values.shape[1]} points"
    if cfg.pgm:
        write_slice_pgm(result, cfg.pgm)
        msg += f" (+ {cfg.pgm})"
    print(msg)
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    if cfg.fd_step <= 0:
        raise ValueError("--fd-step must be positive")
    table = build_tables(_TABLE_ORDER)
    if cfg.perturb:
        try:
            family, key_text, factor_text = cfg.perturb.split(":")
            key = tuple(int(v) for v in key_text.split(","))
            if len(key) != 3:
                raise ValueError
            factor = float(factor_text)
        except ValueError:
            raise ValueError(
                f"malformed perturbation {cfg.perturb!r}; expected FAMILY:K,I,M:FACTOR"
            ) from None
        table = perturb_entry(table, family, key, factor)
    reports = run_all_checks(table=table, fd_step=cfg.fd_step, seed=cfg.seed)
    write_residual_csv(reports, cfg.out)
    failures = [r for r in reports if not r.passed]
    print(f"{len(reports)} checks, {len(failures)} failures -> {cfg.out}")
    for r in failures:
        phantom = r.extras.get("phantom", "?")
        print(
            f"FAIL {r.identity} phantom={phantom} point={r.point} n={r.n} "
            f"rel={r.rel_residual:.3e} tol={r.tolerance:g}"
        )
    return 2 if failures else 0


# ----- wiring -----


def _build_parser() -> _Parser:
    parser = _Parser(prog="sphradon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    c = sub.add_parser("coeffs", help="export exact coefficient tables")
    c.add_argument("--max-n", type=int, required=True, metavar="N")
    c.add_argument("--out", required=True, metavar="PATH")

    f = sub.add_parser("forward", help="sample moment data onto a grid CSV")
    f.add_argument(
        "--phantom",
        required=True,
        metavar="NAME[:params]",
        help=f"one of {', '.join(PHANTOM_NAMES)} (paper8 = rsqz3)",
    )
    f.add_argument("--origin", type=_pair, required=True, metavar="P0,Q0")
    f.add_argument("--h", type=float, required=True)
    f.add_argument("--np", dest="n_p", type=int, required=True, metavar="NP")
    f.add_argument("--nq", dest="n_q", type=int, required=True, metavar="NQ")
    f.add_argument("--umax", type=float, required=True, metavar="U")
    f.add_argument("--nu", dest="n_u", type=int, required=True, metavar="NU")
    f.add_argument("--out", required=True, metavar="PATH")
    f.add_argument("--analytic", action="store_true", help="use analytic moment callbacks")

    r = sub.add_parser("reconstruct", help="invert data over a planar slice")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--phantom", metavar="NAME[:params]")
    src.add_argument("--grid", dest="grid_path", metavar="PATH")
    r.add_argument("--order", dest="order_n", type=int, required=True, metavar="N")
    r.add_argument("--mode", choices=("two-data", "even-mirror"), default="two-data")
    r.add_argument("--slice", dest="slice_", required=True, metavar="y=V|z=V")
    r.add_argument("--xrange", type=_pair, required=True, metavar="A,B")
    r.add_argument(
        "--zrange",
        type=_pair,
        required=True,
        metavar="A,B",
        help="z extent for y-slices; the y extent for z-slices",
    )
    r.add_argument("--step", type=float, required=True, metavar="S")
    r.add_argument("--min-abs-z", dest="min_abs_z", type=float, default=1e-3, metavar="E")
    r.add_argument("--out", required=True, metavar="PATH")
    r.add_argument("--pgm", metavar="PATH", help="also render an 8-bit PGM image")

    v = sub.add_parser("verify", help="run every residual check, write the CSV report")
    v.add_argument("--fd-step", dest="fd_step", type=float, default=1e-3, metavar="E")
    v.add_argument("--seed", type=int, metavar="S")
    v.add_argument("--out", required=True, metavar="PATH")
    v.add_argument("--perturb", help=argparse.SUPPRESS)

    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    if args.subcommand == "reconstruct":
        m = re.fullmatch(r"([yz])=(.+)", args.slice_)
        if not m:
            raise ValueError(f"--slice must look like y=V or z=V, got {args.slice_!r}")
        axis, value = m.group(1), float(m.group(2))
        return RunConfig(
            subcommand="reconstruct",
            phantom=args.phantom,
            grid_path=args.grid_path,
            order_n=args.order_n,
            mode=args.mode.replace("-", "_"),
            slice_axis=axis,
            slice_value=value,
            xrange=args.xrange,
            zrange=args.zrange,
            step=args.step,
            min_abs_z=args.min_abs_z,
            out=args.out,
            pgm=args.pgm,
        )
    if args.subcommand == "coeffs":
        return RunConfig(subcommand="coeffs", max_n=args.max_n, out=args.out)
    if args.subcommand == "forward":
        return RunConfig(
            subcommand="forward",
            phantom=args.phantom,
            origin=args.origin,
            h=args.h,
            n_p=args.n_p,
            n_q=args.n_q,
            umax=args.umax,
            n_u=args.n_u,
            analytic=args.analytic,
            out=args.out,
        )
    return RunConfig(
        subcommand="verify",
        fd_step=args.fd_step,
        seed=args.seed,
        perturb=args.perturb,
        out=args.out,
    )


_HANDLERS = {
    "coeffs": _cmd_coeffs,
    "forward": _cmd_forward,
    "reconstruct": _cmd_reconstruct,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from(args)
        return _HANDLERS[cfg.subcommand](cfg)
    except (ValueError, KeyError) as exc:
        print(f"sphradon: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"sphradon: I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
