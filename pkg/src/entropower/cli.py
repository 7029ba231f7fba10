"""Command-line interface: ``entropower <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 a required finite result was not
obtained. Options may also come from a ``key=value`` file given with
``--config``; explicit flags take precedence over the file.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .cumulants import cumulants_from_scan, gldf_from_density, gram_charlier_reconstruct
from .errors import EntropowerError, NumericalError, ValidationError
from .formatting import csv_value, json_value
from .grid import (
    SampledAmplitude,
    SampledDensity,
    amplitude_from_density,
    density_from_amplitude,
    normalize,
    read_csv,
)
from .infoscan import DEFAULT_BINS, DEFAULT_SPAN, find_peaks, information_scan
from .renyi import EntropyIndex, evaluate
from .repur import default_r_grid, repur_sweep
from . import states
from .tails import CLEARANCE_BITS, classify_tail, fit_power_tail, fit_stretched_tail
from .transform import fourier_conjugate

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3
STATE_KINDS = ("gaussian", "squeezed", "cauchy", "uniform", "laplace", "exponential", "synthetic", "mixture", "file")
CAUCHY_SHANNON_REFERENCE = 0.0052 * math.pi**4

# option defaults; None in argparse marks "not given" so a config file can fill it
DEFAULTS = {
    "state": "gaussian",
    "hbar": 1.0,
    "sigma": 1.0,
    "center": 0.0,
    "zeta": 1.0,
    "omega": 1.0,
    "gamma": 1.0,
    "m": 0.0,
    "length": 4.0,
    "lam": 1.0,
    "model": "power_law",
    "alpha": 1.0,
    "c": 1.0 / math.pi,
    "a": 2.0,
    "beta": 1.0,
    "d": 1.0,
    "core_sigma": 1.0,
    "weights": "0.7,0.3",
    "centers": "0,20",
    "sigmas": "1,1",
    "file": None,
    "side": "x",
    "index": "1",
    "r": None,
    "points": 41,
    "bins": DEFAULT_BINS,
    "span": DEFAULT_SPAN,
    "delta": 0.01,
    "n_max": 3,
    "method": "gldf",
    "richardson": False,
    "order": 2,
    "window": None,
    "clearance": CLEARANCE_BITS,
    "fit": "auto",
    "convergence": False,
    "peaks": False,
    "smooth": 3,
    "min_height": 0.0,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# parser


def _state_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("state")
    g.add_argument("--state", choices=STATE_KINDS, default=None)
    g.add_argument("--sigma", type=float, default=None)
    g.add_argument("--center", type=float, default=None)
    g.add_argument("--zeta", type=float, default=None)
    g.add_argument("--omega", type=float, default=None)
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--m", type=float, default=None)
    g.add_argument("--length", type=float, default=None, help="uniform density width")
    g.add_argument("--lam", type=float, default=None, help="Laplace/exponential rate")
    g.add_argument("--model", choices=("power_law", "stretched"), default=None, help="synthetic tail family")
    g.add_argument("--alpha", type=float, default=None)
    g.add_argument("--c", type=float, default=None)
    g.add_argument("--a", type=float, default=None)
    g.add_argument("--beta", type=float, default=None)
    g.add_argument("--d", type=float, default=None)
    g.add_argument("--core-sigma", dest="core_sigma", type=float, default=None)
    g.add_argument("--weights", default=None, help="mixture weights, comma separated")
    g.add_argument("--centers", default=None)
    g.add_argument("--sigmas", default=None)
    g.add_argument("--file", default=None, help="CSV density (x,value) or amplitude (x,re,im)")


def _output_options(p: argparse.ArgumentParser) -> None:
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output")
    fmt.add_argument("--csv", action="store_true", help="CSV output")
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--config", default=None, help="key=value option file")
    p.add_argument("--output", "-o", default=None, help="write to a file instead of stdout")


def _scan_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--side", choices=("x", "p"), default=None, help="position or momentum density")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--span", type=float, default=None, help="scan window width in bits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropower", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="sample a state and emit its amplitude CSV")
    p.add_argument("kind", choices=STATE_KINDS)
    _state_options(p)
    _output_options(p)

    for name, text in (("entropy", "Rényi entropy in bits"), ("power", "Rényi entropy power")):
        p = sub.add_parser(name, help=text)
        _state_options(p)
        _output_options(p)
        p.add_argument("--index", default=None, help="Rényi order p (number or 'inf')")
        p.add_argument("--side", choices=("x", "p"), default=None)

    p = sub.add_parser("repur", help="entropy-power uncertainty products")
    _state_options(p)
    _output_options(p)
    p.add_argument("--r", action="append", default=None, help="index r (repeatable; default sweep)")
    p.add_argument("--points", type=int, default=None, help="log-spaced sweep points")

    p = sub.add_parser("scan", help="information scan f(x), g(x)")
    _state_options(p)
    _output_options(p)
    _scan_options(p)
    p.add_argument("--peaks", action="store_true", default=None, help="list the peaks of g instead of the scan")
    p.add_argument("--smooth", type=int, default=None, help="moving-average width in bins for peak detection")
    p.add_argument("--min-height", dest="min_height", type=float, default=None, help="ignore peaks of g below this value")

    p = sub.add_parser("cumulants", help="information cumulants")
    _state_options(p)
    _output_options(p)
    _scan_options(p)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--method", choices=("gldf", "scan"), default=None)
    p.add_argument("--richardson", action="store_true", default=None)

    p = sub.add_parser("reconstruct", help="Gram–Charlier reconstruction of g")
    _state_options(p)
    _output_options(p)
    _scan_options(p)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--method", choices=("gldf", "scan"), default=None)
    p.add_argument("--richardson", action="store_true", default=None)

    p = sub.add_parser("tailfit", help="fit the tail of g")
    _state_options(p)
    _output_options(p)
    _scan_options(p)
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--clearance", type=float, default=None, help="bits past the onset for the auto window")
    p.add_argument("--fit", choices=("auto", "power_law", "stretched"), default=None)

    p = sub.add_parser("reproduce", help="regenerate published tables and numbers")
    p.add_argument("target", choices=("fig1", "eq30", "figS3"))
    _output_options(p)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--convergence", action="store_true", default=None, help="eq30: add the grid-doubling study")
    return parser


def _read_config(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValidationError(f"{path}:{lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                out[key.replace("-", "_")] = value
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from None
    return out


def _coerce(key: str, raw: str):
    default = DEFAULTS.get(key)
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if key == "window":
        return _floats(raw)
    if key == "r":
        return [v for v in raw.split(",") if v.strip()]
    return raw


def _merge(args: argparse.Namespace) -> argparse.Namespace:
    config = _read_config(args.config) if getattr(args, "config", None) else {}
    for key, default in DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is not None:
            continue
        if key in config:
            try:
                setattr(args, key, _coerce(key, config[key]))
            except ValueError:
                raise ValidationError(f"config value {key}={config[key]!r} is invalid") from None
        else:
            setattr(args, key, default)
    return args


# ---------------------------------------------------------------------------
# states


def build_state(args, kind: Optional[str] = None):
    """Return the requested state: a SampledAmplitude or a SampledDensity."""
    kind = kind or args.state
    hbar = args.hbar
    if kind == "gaussian":
        return states.gaussian_state(args.sigma, args.center, hbar)
    if kind == "squeezed":
        return states.squeezed_superposition(args.zeta, args.omega, hbar).psi
    if kind == "cauchy":
        return states.cauchy_pltwp(args.gamma, args.m, hbar).psi
    if kind == "uniform":
        return states.uniform_density(args.length)
    if kind == "laplace":
        return states.laplace_density(args.lam)
    if kind == "exponential":
        return states.exponential_density(args.lam)
    if kind == "synthetic":
        if args.model == "power_law":
            model = states.PowerLawTail(args.alpha, args.c)
        else:
            model = states.StretchedTail(args.a, args.beta, args.d)
        return states.synthetic_tail_density(model, args.core_sigma)
    if kind == "mixture":
        return states.gaussian_mixture_state(_floats(args.weights), _floats(args.centers), _floats(args.sigmas), hbar)
    if kind == "file":
        if not args.file:
            raise ValidationError("--state file needs --file PATH")
        return read_csv(args.file)
    raise ValidationError(f"unknown state {kind!r}")


def _as_amplitude(obj) -> SampledAmplitude:
    return obj if isinstance(obj, SampledAmplitude) else amplitude_from_density(normalize(obj))


def _density(obj, side: str, hbar: float) -> SampledDensity:
    if side == "p":
        return normalize(density_from_amplitude(fourier_conjugate(_as_amplitude(obj), hbar)))
    if isinstance(obj, SampledAmplitude):
        return normalize(density_from_amplitude(obj))
    return normalize(obj)


# ---------------------------------------------------------------------------
# output helpers


def _scalar_output(args, name: str, value: float, extra: Optional[dict] = None) -> str:
    extra = extra or {}
    if args.json:
        payload = {name: json_value(value)}
        payload.update({k: json_value(v) if isinstance(v, float) else v for k, v in extra.items()})
        return json.dumps(payload, indent=2) + "\n"
    if args.csv:
        keys = [name] + list(extra)
        vals = [value] + list(extra.values())
        return ",".join(keys) + "\n" + ",".join(csv_value(v) if not isinstance(v, str) else v for v in vals) + "\n"
    return csv_value(value) + "\n"


def _columns_output(args, columns: dict, meta: Optional[dict] = None) -> str:
    """Emit equal-length numeric columns as CSV (default) or JSON arrays."""
    if args.json:
        payload = dict(meta or {})
        payload.update({k: [json_value(float(v)) for v in col] for k, col in columns.items()})
        return json.dumps(payload) + "\n"
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in zip(*columns.values()):
        out.write(",".join(csv_value(float(v)) for v in row) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_state(args) -> str:
    amp = _as_amplitude(build_state(args, args.kind))
    return _columns_output(args, {"x": amp.x, "re": amp.re, "im": amp.im})


def _evaluate(args):
    F = _density(build_state(args), args.side, args.hbar)
    return evaluate(F, EntropyIndex.parse(args.index))


def cmd_entropy(args) -> str:
    res = _evaluate(args)
    return _scalar_output(args, "entropy_bits", res.entropy_bits, {"index": str(res.index), "diverged": res.diverged})


def cmd_power(args) -> str:
    res = _evaluate(args)
    return _scalar_output(args, "power", res.power, {"index": str(res.index), "diverged": res.diverged})


def _table_output(args, table) -> str:
    return table.to_json() + "\n" if args.json else table.to_csv()


def cmd_repur(args) -> str:
    psi = _as_amplitude(build_state(args))
    grid = args.r if args.r else default_r_grid(args.points)
    return _table_output(args, repur_sweep(psi, grid, args.hbar, state_label=args.state))


def _scan(args):
    F = _density(build_state(args), args.side, args.hbar)
    return F, information_scan(F, args.bins, args.span)


def cmd_scan(args) -> str:
    _, sc = _scan(args)
    if args.peaks:
        if args.smooth < 1:
            raise ValidationError("--smooth must be at least 1")
        return _columns_output(args, {"peak_bits": find_peaks(sc, args.smooth, args.min_height)}, {"bin_width": json_value(sc.bin_width)})
    meta = {"onset": json_value(sc.onset), "overflow_mass": json_value(sc.overflow_mass)}
    return _columns_output(args, {"x_bits": sc.x, "f": sc.f, "g": sc.g}, meta)


def _cumulant_set(args, F, sc, n_max: int):
    if args.method == "scan":
        return cumulants_from_scan(sc if sc is not None else information_scan(F, args.bins, args.span), n_max)
    return gldf_from_density(F, args.delta, n_max, bool(args.richardson))


def cmd_cumulants(args) -> str:
    F = _density(build_state(args), args.side, args.hbar)
    ks = _cumulant_set(args, F, None, args.n_max)
    if args.csv:
        head = "delta,D,source," + ",".join(f"kappa_{n}" for n in range(1, ks.order + 1))
        row = [csv_value(ks.delta), str(ks.dim), ks.source] + [csv_value(float(k)) for k in ks.kappa]
        return head + "\n" + ",".join(row) + "\n"
    return json.dumps(ks.to_dict(), indent=2) + "\n"


def cmd_reconstruct(args) -> str:
    F, sc = _scan(args)
    ks = _cumulant_set(args, F, sc, max(args.order, 2))
    res = gram_charlier_reconstruct(ks, args.order, edges=sc.edges)
    meta = {"order": args.order, "clipped_mass": json_value(res.clipped_mass)}
    if args.json:
        return _columns_output(args, {"x_bits": res.x, "g_reference": res.reference, "g_reconstructed": res.reconstructed}, meta)
    return res.to_csv()


def cmd_tailfit(args) -> str:
    _, sc = _scan(args)
    window = tuple(args.window) if args.window else None
    if args.fit == "auto":
        fit = classify_tail(sc, window, args.clearance)
    else:
        from .tails import auto_window

        win = window or auto_window(sc, args.clearance)
        fit = (fit_power_tail if args.fit == "power_law" else fit_stretched_tail)(sc, win)
    payload = fit.to_dict()
    if args.csv:
        keys = ["model"] + [f"param_{k}" for k in payload["params"]] + ["window_lo", "window_hi", "residual", "ambiguous"]
        vals = (
            [payload["model"]]
            + [csv_value(v) for v in payload["params"].values()]
            + [csv_value(v) for v in payload["window"]]
            + [csv_value(payload["residual"]), csv_value(payload["ambiguous"])]
        )
        return ",".join(keys) + "\n" + ",".join(vals) + "\n"
    return json.dumps(payload, indent=2) + "\n"


def _prefixed_tables(args, tables) -> str:
    """Concatenate sweep tables with leading parameter columns."""
    if args.json:
        return json.dumps([dict(params, **table.to_dict()) for params, table in tables], indent=2) + "\n"
    lines = []
    for i, (params, table) in enumerate(tables):
        body = table.to_csv().splitlines()
        prefix_head = ",".join(params)
        prefix_vals = ",".join(csv_value(float(v)) for v in params.values())
        if i == 0:
            lines.append(prefix_head + "," + body[0])
        lines.extend(prefix_vals + "," + row for row in body[1:])
    return "\n".join(lines) + "\n"


def cauchy_shannon_product(hbar: float, n: int = states.CAUCHY_N, span: int = states.CAUCHY_SPAN_EXPONENT) -> float:
    st = states.cauchy_pltwp(1.0, 0.0, hbar, n=n, span_exponent=span)
    fx = density_from_amplitude(st.psi)
    fp = density_from_amplitude(fourier_conjugate(st.psi, hbar))
    return evaluate(fx, 1.0).power * evaluate(fp, 1.0).power


def cmd_reproduce(args) -> str:
    hbar = args.hbar
    if args.target == "fig1":
        grid = default_r_grid(args.points)
        tables = []
        for zeta in (1.0, 2.0, 3.0):
            st = states.squeezed_superposition(zeta, 1.0, hbar)
            tables.append(({"zeta": zeta}, repur_sweep(st.psi, grid, hbar, state_label=f"squeezed zeta={zeta:g}")))
        return _prefixed_tables(args, tables)
    if args.target == "figS3":
        grid = default_r_grid(args.points)
        tables = []
        for gamma in (0.5, 1.0, 2.0):
            for m in (0.0, 1.0):
                st = states.cauchy_pltwp(gamma, m, hbar)
                tables.append(({"gamma": gamma, "m": m}, repur_sweep(st.psi, grid, hbar, state_label="cauchy")))
        return _prefixed_tables(args, tables)
    product = cauchy_shannon_product(hbar)
    extra = {
        "product_over_hbar2": product / hbar**2,
        "reference": CAUCHY_SHANNON_REFERENCE,
        "ratio": product / hbar**2 / CAUCHY_SHANNON_REFERENCE,
    }
    if args.convergence:
        for label, (n, span) in (("double_domain", (2**21, 15)), ("double_both", (2**22, 15))):
            val = cauchy_shannon_product(hbar, n, span)
            extra[f"{label}_product"] = val
            extra[f"{label}_change"] = val / product - 1.0
    return _scalar_output(args, "product", product, extra)


COMMANDS = {
    "state": cmd_state,
    "entropy": cmd_entropy,
    "power": cmd_power,
    "repur": cmd_repur,
    "scan": cmd_scan,
    "cumulants": cmd_cumulants,
    "reconstruct": cmd_reconstruct,
    "tailfit": cmd_tailfit,
    "reproduce": cmd_reproduce,
}


def _report_error(exc: Exception, code: int, as_json: bool) -> None:
    if as_json:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"error: {exc}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    as_json = "--json" in argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
        if code and as_json:
            sys.stderr.write(json.dumps({"error": "UsageError", "message": "invalid command line", "exit_code": code}) + "\n")
        return code
    try:
        args = _merge(args)
        if args.hbar is not None and not args.hbar > 0:
            raise ValidationError("--hbar must be positive")
        text = COMMANDS[args.command](args)
    except ValidationError as exc:
        _report_error(exc, EXIT_VALIDATION, as_json)
        return EXIT_VALIDATION
    except (NumericalError, FloatingPointError) as exc:
        _report_error(exc, EXIT_NUMERICAL, as_json)
        return EXIT_NUMERICAL
    except EntropowerError as exc:
        _report_error(exc, EXIT_NUMERICAL, as_json)
        return EXIT_NUMERICAL
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
