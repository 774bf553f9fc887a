"""Command-line front end.

Subcommands: analyze, reduce, spectrum, projnorm, growth, resolvent,
fixtures.  Inputs come either from the built-in fixture catalog
(``--fixture davies --theta 0.3``) or from a JSON file (``--input``)
containing a QuadraticForm.  Output is deterministic: fixed orderings,
complex numbers as [re, im] pairs, reals with 17 significant digits.

Exit codes: 0 success, 2 input error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fixtures as fixture_catalog
from .errors import InputError, NumericalError, QuadSpecError
from .matcore import Tolerance
from .normalform import reduce as nf_reduce
from .resolvent import resolvent_sweep, sweep_to_csv, sweep_to_long_csv
from .spectral import (eigen_projection_norm, enumerate_lattice, growth_rate,
                       mu, orthogonality_test)
from .symplectic import QuadraticForm, classify, hamilton_map
from .weights import QuadraticWeight

__all__ = ["main"]


# -- deterministic JSON ------------------------------------------------------

def _fmt_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    return format(float(x), ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """JSON text with reals at 17 significant digits (bit-stable goldens)."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        import json as _json
        return _json.dumps(obj)
    if isinstance(obj, dict):
        items = [f'{dump_json(str(k))}: {dump_json(v, indent)}'
                 for k, v in obj.items()]
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dump_json(v, indent) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


# -- shared option plumbing ---------------------------------------------------

def _add_input_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fixture", choices=fixture_catalog.FIXTURE_NAMES)
    p.add_argument("--input", help="JSON file with a QuadraticForm")
    p.add_argument("--theta", type=float, help="davies rotation angle")
    p.add_argument("--eps", type=float, help="jordan perturbation")
    p.add_argument("--r", type=str, help="harmonic frequencies, comma-separated")
    p.add_argument("--tol-rank", type=float, default=1e-10)
    p.add_argument("--tol-cluster", type=float, default=1e-8)
    p.add_argument("--tol-sym", type=float, default=1e-10)
    p.add_argument("--output", help="write to this file instead of stdout")


def _tol(args) -> Tolerance:
    return Tolerance(rank_tol=args.tol_rank, cluster_tol=args.tol_cluster,
                     sym_tol=args.tol_sym)


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"cannot parse number list {text!r}") from exc


def _load_form(args) -> tuple[QuadraticForm, "fixture_catalog.Fixture | None"]:
    if args.fixture and args.input:
        raise InputError("give either --fixture or --input, not both")
    if args.input:
        with open(args.input) as f:
            return QuadraticForm.from_json(f.read()), None
    if args.fixture:
        fx = fixture_catalog.by_name(
            args.fixture, theta=args.theta, eps=args.eps,
            r=_parse_floats(args.r) if args.r else None)
        return fx.form, fx
    raise InputError("one of --fixture or --input is required")


def _load_weight_file(path: str) -> QuadraticWeight:
    import json
    with open(path) as f:
        d = json.load(f)
    if "Phi2" in d:                      # a reduce output
        return QuadraticWeight.from_json_dict(d["Phi2"])
    return QuadraticWeight.from_json_dict(d)


def _complex_pair(z: complex) -> list:
    return [z.real, z.imag]


def _matrix_pairs(M) -> list:
    return [[_complex_pair(complex(z)) for z in row] for row in np.asarray(M)]


# -- subcommands ---------------------------------------------------------------

def cmd_analyze(args) -> int:
    form, _ = _load_form(args)
    tol = _tol(args)
    cls = classify(form, tol)
    F = hamilton_map(form)
    out = {"classification": cls.to_json_dict(),
           "hamilton_map": _matrix_pairs(F.F),
           "eigenvalues": [_complex_pair(z) for z in
                           sorted(np.linalg.eigvals(F.F),
                                  key=lambda z: (round(z.real, 12), round(z.imag, 12)))]}
    _write(dump_json(out), args.output)
    return 0


def cmd_reduce(args) -> int:
    form, _ = _load_form(args)
    nf = nf_reduce(form, _tol(args), gauge_scale=args.gauge)
    d = nf.to_json_dict()
    orth = orthogonality_test(form, nf, _tol(args))
    d["orthogonality"] = orth.to_json_dict()
    _write(dump_json(d), args.output)
    return 0


def cmd_spectrum(args) -> int:
    form, _ = _load_form(args)
    nf = nf_reduce(form, _tol(args))
    pts = enumerate_lattice(nf.lambdas, R=args.R, h=args.h)
    out = {"h": args.h, "R": args.R,
           "points": [p.to_json_dict() for p in pts]}
    _write(dump_json(out), args.output)
    return 0


def cmd_projnorm(args) -> int:
    tol = _tol(args)
    if args.weight_file:
        w = _load_weight_file(args.weight_file)
        if args.alpha is None:
            raise InputError("--weight-file mode needs --alpha")
        from .spectral import (LatticePoint, projection_norm_formula,
                               tau_bound, tau_norm_oracle)
        alpha = tuple(int(x) for x in _parse_floats(args.alpha))
        rec = {"alphas": [list(alpha)], "simple": True,
               "norm": projection_norm_formula(w, alpha, tol=tol),
               "oracle": None, "bounds": {"tau": tau_bound(w, [alpha])},
               "growth_rate": None}
        if args.with_oracle:
            rec["oracle"] = tau_norm_oracle(w, [alpha]).value
        _write(dump_json({"reports": [rec]}), args.output)
        return 0
    form, _ = _load_form(args)
    nf = nf_reduce(form, tol)
    if args.alpha is not None:
        alpha = tuple(int(x) for x in _parse_floats(args.alpha))
        z = mu(nf.lambdas, alpha, 1.0)
        pts = [p for p in enumerate_lattice(nf.lambdas, abs(z) + 1.0)
               if alpha in p.alphas]
    elif args.all_upto is not None:
        d = args.all_upto
        Rmax = max(abs(mu(nf.lambdas, a, 1.0))
                   for a in _all_alphas(nf.n, d)) + 1e-9
        pts = [p for p in enumerate_lattice(nf.lambdas, Rmax)
               if any(sum(a) <= d for a in p.alphas)]
    else:
        raise InputError("projnorm needs --alpha or --all-upto")
    reports = [eigen_projection_norm(nf, p, with_oracle=args.with_oracle,
                                     tol=tol) for p in pts]
    _write(dump_json({"reports": [r.to_json_dict() for r in reports]}),
           args.output)
    return 0


def _all_alphas(n: int, d: int):
    from .weights import multi_indices
    return multi_indices(n, d)


def cmd_growth(args) -> int:
    tol = _tol(args)
    if args.weight_file:
        w = _load_weight_file(args.weight_file)
    else:
        form, fx = _load_form(args)
        if fx is not None:
            w = fx.canonical_weight
        else:
            w = nf_reduce(form, tol).Phi2
    if args.sweep:
        if w.n != 2:
            raise InputError("--sweep is defined for 2-dimensional weights")
        ts = np.linspace(0.0, 1.0, args.sweep)
        recs = []
        for t in ts:
            beta = (1.0 - t, t)
            recs.append({"t": float(t), "beta": list(beta),
                         "g": growth_rate(w, beta, tol=tol)})
        if args.plot:
            from .plotting import plot_growth_sweep
            plot_growth_sweep([r["t"] for r in recs], [r["g"] for r in recs],
                              args.plot, title="growth rate along beta=(1-t, t)")
        if args.format == "csv":
            lines = ["t,beta1,beta2,g"]
            lines += [f'{r["t"]:.17g},{r["beta"][0]:.17g},'
                      f'{r["beta"][1]:.17g},{r["g"]:.17g}' for r in recs]
            _write("\n".join(lines) + "\n", args.output)
        else:
            _write(dump_json({"sweep": recs}), args.output)
        return 0
    if args.beta is None:
        raise InputError("growth needs --beta or --sweep")
    beta = _parse_floats(args.beta)
    g = growth_rate(w, beta, tol=tol)
    out = {"beta": list(beta), "g": g}
    _write(dump_json(out), args.output)
    return 0


def cmd_resolvent(args) -> int:
    form, fx = _load_form(args)
    if fx is not None and fx.M1 is not None:
        M1 = fx.M1
    else:
        M1 = nf_reduce(form, _tol(args)).M
    z = complex(*_parse_floats(args.z))
    h_list = _parse_floats(args.h_list)
    rows = resolvent_sweep(M1, z, h_list, args.m_max,
                           baseline=not args.no_baseline)
    if args.plot:
        from .plotting import plot_resolvent_sweep
        plot_resolvent_sweep(rows, args.plot,
                             title=f"restricted resolvent, z = {z}")
    if args.plot_data:
        with open(args.plot_data, "w") as f:
            f.write(sweep_to_long_csv(rows))
    if args.format == "json":
        recs = [{"m": r.m, "h": r.h, "energy": r.energy,
                 "resolvent_norm": r.resolvent_norm,
                 "baseline_norm": r.baseline_norm} for r in rows]
        _write(dump_json({"z": _complex_pair(z), "rows": recs}), args.output)
    else:
        _write(sweep_to_csv(rows), args.output)
    return 0


def cmd_fixtures(args) -> int:
    out = {"fixtures": [
        {"name": "davies", "params": ["theta"],
         "description": "rotated harmonic oscillator (1-D, elliptic)"},
        {"name": "kfp", "params": [],
         "description": "Kramers-Fokker-Planck with quadratic potential "
                        "(2-D, partially elliptic)"},
        {"name": "jordan", "params": ["eps"],
         "description": "elliptic symbol with a Jordan-block Hamilton map, "
                        "split by eps"},
        {"name": "harmonic", "params": ["r"],
         "description": "selfadjoint harmonic family sum r_j (x_j^2 + xi_j^2)"},
    ]}
    _write(dump_json(out), args.output)
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quadspec",
        description="classification, normal forms, spectral projections, and "
                    "resolvent sweeps for quadratic operators")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify a quadratic form")
    _add_input_opts(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("reduce", help="full reduction to normal form")
    _add_input_opts(p)
    p.add_argument("--gauge", type=float, default=1.0,
                   help="extra positive scale on the unit-column G gauge "
                        "(recorded in the output)")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("spectrum", help="eigenvalue lattice in a disc")
    _add_input_opts(p)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--h", type=float, default=1.0)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("projnorm", help="spectral projection norms")
    _add_input_opts(p)
    p.add_argument("--alpha", help="multi-index, comma-separated")
    p.add_argument("--all-upto", type=int, help="all |alpha| <= this degree")
    p.add_argument("--weight-file",
                   help="JSON weight (or reduce output) to use directly")
    p.add_argument("--with-oracle", action="store_true",
                   help="also run the Gram-matrix oracle")
    p.set_defaults(fn=cmd_projnorm)

    p = sub.add_parser("growth", help="exponential growth rates")
    _add_input_opts(p)
    p.add_argument("--beta", help="ray direction, comma-separated, sums to 1")
    p.add_argument("--sweep", type=int,
                   help="number of t values for beta = (1-t, t)")
    p.add_argument("--weight-file",
                   help="JSON weight (or reduce output) to use directly")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--plot", help="write a figure (PNG/PDF) of the sweep")
    p.set_defaults(fn=cmd_growth)

    p = sub.add_parser("resolvent", help="energy-shell resolvent sweep")
    _add_input_opts(p)
    p.add_argument("--z", required=True, help="spectral parameter re,im")
    p.add_argument("--h-list", default="0.1,0.05,0.025")
    p.add_argument("--m-max", type=int, default=120)
    p.add_argument("--no-baseline", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot-data", help="write long-format CSV here")
    p.add_argument("--plot", help="write a log-log figure (PNG/PDF) here")
    p.set_defaults(fn=cmd_resolvent)

    p = sub.add_parser("fixtures", help="list the fixture catalog")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_fixtures)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except QuadSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
