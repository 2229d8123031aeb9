"""Command-line front end: ``starsearch {walk,spectrum,grover,predict,sweep}``.

Exit codes: 0 success, 2 bad arguments, 3 numerical failure, 4 run refused
by ``--strict`` because the parameters are outside the analysed regime.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import harness, oracle, spectral
from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    NumericalError,
    PoleError,
    RegimeWarning,
    ResourceError,
    StarSearchError,
)
from .phases import format_phase, parse_phase_classes
from .svg import write_line_chart
from .trace import SearchTrace
from .walk import PhaseProfile, localization_curve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_REGIME = 4

OUT_ENV = "STARSEARCH_OUT"

_NUMERICAL = (ConvergenceError, NumericalError, PoleError, ResourceError, FloatingPointError)


class _Refused(Exception):
    pass


class _Printer:
    def __init__(self, precision: int, stream=None):
        self.precision = precision
        self.stream = stream or sys.stdout

    def num(self, x) -> str:
        if isinstance(x, complex):
            # drop rounding-level components so exact roots print cleanly
            eps = 1e-14 * max(1.0, abs(x))
            x = complex(0.0 if abs(x.real) < eps else x.real, 0.0 if abs(x.imag) < eps else x.imag)
            sign = "-" if x.imag < 0 else "+"
            return f"{x.real:.{self.precision}g}{sign}{abs(x.imag):.{self.precision}g}i"
        return f"{x:.{self.precision}g}"

    def __call__(self, *parts):
        print(*parts, file=self.stream)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _phase_classes(text: str):
    try:
        return parse_phase_classes(text)
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _window(text: str):
    return "auto" if text == "auto" else _positive(text)


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or ".")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    p.add_argument("--format", choices=("csv", "json", "plot-data"), default="csv")
    p.add_argument("--svg", action="store_true", help="also render a minimal SVG chart")
    p.add_argument("--precision", type=_positive, default=6, help="significant digits")
    p.add_argument("--no-files", action="store_true", help="print only, write nothing")


def _write_trace(trace: SearchTrace, args, stem: str, out: _Printer, title: str, value_name="P_k"):
    if args.no_files:
        return
    d = _out_dir(args)
    d.mkdir(parents=True, exist_ok=True)
    has_pred = trace.predicted is not None
    if args.format == "csv":
        path = d / f"{stem}.csv"
        text = harness.trace_to_csv(trace)
        if value_name != "P_k":
            text = text.replace("P_k", value_name, 1)
    elif args.format == "json":
        path = d / f"{stem}.json"
        rows = [
            {"k": k, value_name: p, **({"P_pred": pp} if has_pred else {})}
            for k, p, pp in trace.rows()
        ]
        text = json.dumps(rows, indent=1) + "\n"
    else:
        path = d / f"{stem}.dat"
        head = "# k " + value_name + (" P_pred" if has_pred else "")
        lines = [head] + [
            f"{k} {p!r}" + (f" {pp!r}" if has_pred else "") for k, p, pp in trace.rows()
        ]
        text = "\n".join(lines) + "\n"
    path.write_text(text, encoding="utf-8", newline="")
    out(f"trace written: {path}")
    if args.svg:
        series = {value_name: trace.probabilities}
        if has_pred:
            series["P_pred"] = trace.predicted
        svg = write_line_chart(d / f"{stem}.svg", trace.steps, series, title=title)
        out(f"chart written: {svg}")


def _header(out: _Printer, command: str, **tolerances):
    out(f"# starsearch {command}")
    if tolerances:
        out("# tolerances: " + ", ".join(f"{k}={v:g}" for k, v in tolerances.items()))


# -- walk ------------------------------------------------------------------


def cmd_walk(args, out: _Printer) -> int:
    profile = PhaseProfile(args.phases)
    target = args.target
    if target is None:
        target = int(np.argmin(profile.counts))
    profile.check_class(target)
    _header(out, "walk", norm=1e-12)
    trace = localization_curve(profile, target, args.steps)
    n_target = int(profile.counts[target])
    out(f"N = {profile.N}, classes = " + ", ".join(f"{format_phase(p)}:{n}" for p, n in profile.classes))
    out(f"target class {target} (phase {format_phase(profile.classes[target][0])}, {n_target} edges)")
    out(f"steps scanned: 0..{trace.steps[-1]}")
    out(f"peak P = {out.num(trace.p_max)} at m = {trace.k_max}")
    out(f"peak P per edge = {out.num(trace.p_max / n_target)}")
    out(f"min P = {out.num(float(trace.probabilities.min()))}")
    try:
        theta0 = spectral.localization_angle(profile, target)
        out(f"predicted theta0 = {out.num(theta0)}, pi/(2 theta0) = {out.num(math.pi / (2 * theta0))}")
    except (spectral.NoSpeedupError, InvalidArgumentError) as exc:
        out(f"no localization prediction: {exc}")
    written = trace
    name = "P_k"
    if args.per_edge:
        written = SearchTrace(trace.steps, trace.probabilities / n_target)
        name = "P_edge"
    _write_trace(written, args, "walk_trace", out, "walk localization", value_name=name)
    return EXIT_OK


# -- spectrum --------------------------------------------------------------


def cmd_spectrum(args, out: _Printer) -> int:
    spec = spectral.GroupedPhaseSpec.from_classes(args.phases)
    tol = spectral.DEFAULT_TOLERANCES
    _header(out, "spectrum", residual=tol["residual"], unit_circle=tol["unit_circle"],
            double_root_value=tol["double_root_value"], double_root_slope=tol["double_root_slope"])
    out(f"N = {spec.N}, classes = " + ", ".join(f"{format_phase(p)}:{n}" for p, n in zip(spec.phases, spec.counts)))
    coeffs = spectral.grouped_polynomial(spec)
    out("polynomial (highest degree first): " + ", ".join(out.num(complex(c)) for c in coeffs))
    out("principal branch (z = lambda^2):")
    for sol in spectral.principal_eigenvalues(spec):
        out(
            f"  z = {out.num(sol.z)}  lambda = +/-({out.num(sol.lambda_pair[0])})"
            f"  |z|-1 = {abs(sol.z) - 1:.2e}  residual = {sol.residual:.2e}"
        )
    out("degenerate branch:")
    degen = spectral.degenerate_eigenvalues(spec)
    if not degen:
        out("  (none: all phases distinct)")
    for sol in degen:
        out(
            f"  z = {out.num(sol.z)}  lambda = +/-({out.num(sol.lambda_pair[0])})"
            f"  multiplicity {sol.degeneracy} each (class {sol.class_index})"
        )
    small = args.small
    if small is None:
        small = [c for c, x in enumerate(spec.fractions) if x <= tol["small_fraction"]]
    if small and len(small) < spec.m:
        try:
            pert = spectral.perturbative_double_root(spec, small)
        except spectral.NoSpeedupError as exc:
            out(f"perturbative: {exc}")
        else:
            out(f"perturbative (small classes {list(pert.small_classes)}): z0 = {out.num(pert.z0)}")
            for dz, dzr in zip(pert.delta_z, pert.delta_z_refined):
                out(f"  dz = {out.num(dz)}  (refined {out.num(dzr)})  z = {out.num(pert.z0 + dz)}")
            out(f"  theta0 = {out.num(pert.theta0)}  order {pert.order_estimate}")
    if args.dense_check:
        U = spectral.dense_unitary(spec.to_profile())
        dense = spectral.dense_spectrum(U).values
        mismatch, _ = spectral.match_spectra(spectral.analytic_spectrum(spec), dense)
        out(f"dense check: {U.shape[0]} eigenvalues, max eigenvalue mismatch = {mismatch:.3e}")
        if mismatch > 1e-8:
            out("dense check FAILED")
            return EXIT_NUMERICAL
    return EXIT_OK


# -- grover ----------------------------------------------------------------


def _refuse_if_strict(args, notes, out):
    if notes and args.strict:
        for n in notes:
            out(f"refused: {n}")
        raise _Refused()


def cmd_grover(args, out: _Printer) -> int:
    dist = "even" if args.even else args.dist
    inst = harness.generate_instance(args.N, args.d, args.M, distribution=dist, seed=args.seed, mode=args.mode)
    notes = inst.regime_warnings()
    _refuse_if_strict(args, notes, out)
    _header(out, "grover", norm=1e-12)
    window = harness.sweep_window(inst.N, inst.d, inst.M, args.window)
    trace = oracle.run_search(inst, window, warn=False)
    pred = trace.prediction
    out(f"N = {inst.N}, d = {inst.d}, M = {inst.M}, mode = {inst.mode}, distribution = {dist}, seed = {args.seed}")
    out(f"value counts: {inst.value_counts()}")
    n = round(math.log(inst.N, inst.d))
    if inst.d**n != inst.N:
        out(f"note: N = {inst.N} is not a power of d = {inst.d}; the register is simulated directly")
    for n in notes:
        out(f"warning: outside the analysed regime: {n}")
    out(f"P_max = {out.num(trace.p_max)} at k_max = {trace.k_max}")
    out(f"predicted P_max = {out.num(pred.p_max_pred)}, k_max = {out.num(pred.k_max_pred)}")
    out(f"queries/iteration = {trace.queries_per_iteration}")
    out(f"queries to k_max = {trace.queries_per_iteration * trace.k_max}")
    out(f"expected repetitions = {out.num(1 / trace.p_max)}")
    _write_trace(trace, args, "grover_trace", out, f"oracle search N={inst.N} d={inst.d}")
    return EXIT_OK


def cmd_predict(args, out: _Printer) -> int:
    notes = oracle.regime_warnings(args.N, args.d, args.M)
    _refuse_if_strict(args, notes, out)
    _header(out, "predict")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        record, seq = oracle.predicted_trace(args.N, args.d, args.M, args.window)
    for n in notes:
        out(f"warning: outside the analysed regime: {n}")
    out(f"N = {args.N}, d = {args.d}, M = {args.M}")
    out(f"theta = {out.num(record.theta)}  (sin theta = sqrt(3M/(N(d+1))))")
    out(f"P_max_pred = 3/(d+1) = {out.num(record.p_max_pred)}")
    out(f"k_max_pred = {out.num(record.k_max_pred)}")
    trace = SearchTrace(np.arange(len(seq)), seq)
    _write_trace(trace, args, "predicted_trace", out, "predicted P_k")
    return EXIT_OK


# -- sweep -----------------------------------------------------------------


def cmd_sweep(args, out: _Printer) -> int:
    cfg = harness.SweepConfig(
        Ns=args.N, ds=args.d, Ms=args.M, modes=args.mode, distribution=args.dist,
        seed=args.seed, window=args.window, workers=args.workers, record_timing=args.timing,
    )
    flagged = [key for key in cfg.cells() if oracle.regime_warnings(*key[:3])]
    if flagged and args.strict:
        for key in flagged:
            out(f"refused: cell {key} is outside the analysed regime")
        raise _Refused()
    _header(out, "sweep")
    out(f"seed = {cfg.seed}, distribution = {cfg.distribution}, cells = {len(cfg.cells())}")
    records = harness.run_sweep(cfg)
    text = harness.records_to_csv(records)
    if not args.no_files:
        d = _out_dir(args)
        if args.format in ("csv", "plot-data"):
            p = harness.write_records(records, d / "sweep.csv", "csv")
            out(f"records written: {p}")
        else:
            p = harness.write_records(records, d / "sweep.json", "json")
            out(f"records written: {p}")
    for line in text.splitlines():
        out(line)
    for rec in records:
        if rec.error:
            out(f"cell ({rec.N},{rec.d},{rec.M},{rec.mode}) failed: {rec.error}")
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.d, rec.M, rec.mode), []).append(rec)
    for (d, M, mode), recs in groups.items():
        if len({r.N for r in recs}) >= 3:
            try:
                fit = harness.fit_scaling(recs, "N", "k_max_sim")
                out(f"fit k_max ~ N^a (d={d}, M={M}, {mode}): a = {out.num(fit.exponent)} +/- {out.num(fit.stderr)}")
            except StarSearchError as exc:
                out(f"fit skipped (d={d}, M={M}): {exc}")
    by_nd: dict = {}
    for rec in records:
        by_nd.setdefault((rec.N, rec.d, rec.mode), []).append(rec)
    for (N, d, mode), recs in by_nd.items():
        if len({r.M for r in recs}) >= 3:
            try:
                fit = harness.fit_scaling(recs, "M", "k_max_sim")
                out(f"fit k_max ~ M^a (N={N}, d={d}, {mode}): a = {out.num(fit.exponent)} +/- {out.num(fit.stderr)}")
            except StarSearchError as exc:
                out(f"fit skipped (N={N}, d={d}): {exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starsearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", help="star-graph walk localization trace")
    p.add_argument("--phases", type=_phase_classes, required=True,
                   help="phase:count list, e.g. 2pi/3:50,-2pi/3:50,0:1")
    p.add_argument("--target", type=int, help="target class index (default: smallest class)")
    p.add_argument("--steps", type=_positive, help="last step m to scan (default: 2 ceil(pi/(2 theta0)))")
    p.add_argument("--per-edge", action="store_true", help="write probability per target edge")
    _common(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("spectrum", help="eigenvalues of the walk operator")
    p.add_argument("--phases", type=_phase_classes, required=True)
    p.add_argument("--small", type=lambda s: [int(v) for v in s.split(",")],
                   help="class indices treated as small in the perturbative expansion")
    p.add_argument("--dense-check", action="store_true", help="compare with dense eigendecomposition")
    p.add_argument("--precision", type=_positive, default=6)
    p.set_defaults(func=cmd_spectrum)

    for name, func, helptext in (
        ("grover", cmd_grover, "multivalued-oracle Grover search"),
        ("predict", cmd_predict, "closed-form success prediction"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("-N", "--N", type=_positive, required=True, dest="N")
        p.add_argument("-d", "--d", type=_positive, required=True, dest="d")
        p.add_argument("-M", "--M", type=_positive, default=1, dest="M")
        p.add_argument("--window", type=_window, default="auto")
        p.add_argument("--strict", action="store_true", help="refuse runs outside N >> d, M << N")
        if name == "grover":
            p.add_argument("--mode", choices=oracle.MODES, default="multi-phase")
            p.add_argument("--even", action="store_true", help="shorthand for --dist even")
            p.add_argument("--dist", choices=harness.DISTRIBUTIONS, default="balanced")
            p.add_argument("--seed", type=int, default=0)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="parameter sweep over N, d, M")
    p.add_argument("--N", type=_int_list, required=True, dest="N")
    p.add_argument("--d", type=_int_list, required=True, dest="d")
    p.add_argument("--M", type=_int_list, default=[1], dest="M")
    p.add_argument("--mode", type=lambda s: [m.strip() for m in s.split(",")], default=["multi-phase"])
    p.add_argument("--dist", choices=harness.DISTRIBUTIONS, default="even")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=_window, default="auto")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--timing", action="store_true", help="record wall_ms (output no longer byte-reproducible)")
    p.add_argument("--strict", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    out = _Printer(getattr(args, "precision", 6))
    try:
        return args.func(args, out)
    except _Refused:
        return EXIT_REGIME
    except _NUMERICAL as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (StarSearchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
