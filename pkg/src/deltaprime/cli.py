"""Command-line front end.

Subcommands cover every computation in the package; `table6` reproduces the
headline table of resonant intensities, coupling values and transmission
probabilities for the built-in quadratic profile on the scan window [0, 200].

Output formats: ``table`` (aligned, 6 significant digits), ``csv`` (full
double precision, header row) and ``json`` (full precision, stable key
order).  Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import convergence, profiles, resonance, scattering
from .errors import InvalidInputError, NumericalFailureError
from .shooting import FundamentalData, shoot

FORMATS = ("table", "csv", "json")


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _eps_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None
    return values


def _add_profile_flags(sub):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--builtin", metavar="NAME", help="built-in profile name")
    group.add_argument("--profile", metavar="PATH", help="profile JSON file")
    sub.add_argument(
        "--mirror",
        action="store_true",
        help="reflect the profile about xi=0 (right-incidence scattering)",
    )


def _add_format_flag(sub):
    sub.add_argument("--format", choices=FORMATS, default="table")


def _resolve_profile(args) -> profiles.PotentialProfile:
    if args.builtin is not None:
        prof = profiles.builtin_profile(args.builtin)
    else:
        prof = profiles.load_profile(args.profile)
    if getattr(args, "mirror", False):
        prof = prof.reflected()
    return prof


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deltaprime",
        description=(
            "Resonant couplings, coupling function and scattering coefficients "
            "of 1-D Schrodinger operators with short-range delta-prime-like "
            "potentials alpha*eps^-2*psi(x/eps)."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("moments", help="zeroth and first moments of a profile")
    _add_profile_flags(p)
    _add_format_flag(p)
    p.set_defaults(handler=_cmd_moments)

    p = subs.add_parser("shoot", help="fundamental-solution boundary data at xi=1")
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument("--kappa2", type=_finite_float, default=0.0)
    p.set_defaults(handler=_cmd_shoot)

    p = subs.add_parser("resonances", help="resonant couplings on a scan window")
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha-min", type=_finite_float, default=resonance.DEFAULT_ALPHA_MIN)
    p.add_argument("--alpha-max", type=_finite_float, default=resonance.DEFAULT_ALPHA_MAX)
    p.add_argument("--scan-step", type=_finite_float, default=resonance.DEFAULT_SCAN_STEP)
    p.set_defaults(handler=_cmd_resonances)

    p = subs.add_parser("theta", help="coupling value at a resonant alpha")
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument(
        "--tol",
        type=_finite_float,
        default=1e-3,
        help="accept alpha within this distance of a refined root",
    )
    p.set_defaults(handler=_cmd_theta)

    p = subs.add_parser("scatter-limit", help="zero-range-limit scattering coefficients")
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument(
        "--tol",
        type=_finite_float,
        default=1e-8,
        help="resonance classification tolerance in alpha",
    )
    p.set_defaults(handler=_cmd_scatter_limit)

    p = subs.add_parser("scatter-eps", help="exact finite-scale scattering coefficients")
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument("--k", type=_finite_float, default=1.0)
    p.add_argument("--eps", type=_finite_float, required=True)
    p.set_defaults(handler=_cmd_scatter_eps)

    p = subs.add_parser(
        "scatter-asymptotic",
        help="leading small-kappa expansion at kappa = eps*k",
    )
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument("--k", type=_finite_float, default=1.0)
    p.add_argument("--eps", type=_finite_float, required=True)
    p.set_defaults(handler=_cmd_scatter_asymptotic)

    p = subs.add_parser(
        "converge",
        help="resolvent-error study of the scaled family against its limit",
    )
    _add_profile_flags(p)
    _add_format_flag(p)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument(
        "--eps-list",
        type=_eps_list,
        default=convergence.DEFAULT_EPS_LIST,
        metavar="E1,E2,...",
        help="decreasing eps values (default 0.2,0.1,0.05,0.025)",
    )
    p.set_defaults(handler=_cmd_converge)

    p = subs.add_parser(
        "table6",
        help="resonant intensities, coupling values and |T|^2 for the "
        "built-in quadratic profile on [0, 200]",
    )
    _add_format_flag(p)
    p.set_defaults(handler=_cmd_table6)

    return parser


def _cmd_moments(args):
    return profiles.moments(_resolve_profile(args))


def _cmd_shoot(args):
    return shoot(_resolve_profile(args), args.alpha, args.kappa2)


def _cmd_resonances(args):
    return resonance.find_resonances(
        _resolve_profile(args), args.alpha_min, args.alpha_max, args.scan_step
    )


def _cmd_theta(args):
    prof = _resolve_profile(args)
    return {"alpha": args.alpha, "theta": resonance.coupling(prof, args.alpha, args.tol)}


def _cmd_scatter_limit(args):
    prof = _resolve_profile(args)
    c = resonance.classify(prof, args.alpha, args.tol)
    return scattering.limit_coeffs(c)


def _cmd_scatter_eps(args):
    return scattering.finite_coeffs(_resolve_profile(args), args.alpha, args.k, args.eps)


def _cmd_scatter_asymptotic(args):
    return scattering.asymptotic_coeffs(
        _resolve_profile(args), args.alpha, args.eps * args.k
    )


def _cmd_converge(args):
    return convergence.study(_resolve_profile(args), args.alpha, args.eps_list)


def _cmd_table6(args):
    prof = profiles.builtin_profile("seba-quadratic")
    rows = []
    for rv in resonance.find_resonances(prof, 0.0, 200.0, 0.5):
        coeffs = scattering.limit_coeffs(resonance.Resonant(rv.theta))
        rows.append(
            {"alpha": rv.alpha, "theta": rv.theta, "T2": coeffs.transmission_probability}
        )
    return rows


# --- rendering -------------------------------------------------------------


def _to_records(result):
    """Normalize any module output to an ordered record dict or list of them."""
    if isinstance(result, profiles.Moments):
        return {"m0": result.m0, "m1": result.m1}
    if isinstance(result, FundamentalData):
        return asdict(result)
    if isinstance(result, resonance.ResonantValue):
        return {
            "alpha": result.alpha,
            "theta": result.theta,
            "residual": result.residual,
            "bracket_lo": result.bracket[0],
            "bracket_hi": result.bracket[1],
        }
    if isinstance(result, scattering.ScatteringCoefficients):
        return {
            "R_re": result.R.real,
            "R_im": result.R.imag,
            "T_re": result.T.real,
            "T_im": result.T.imag,
            "T2": result.transmission_probability,
            "regime": result.regime,
        }
    if isinstance(result, convergence.ConvergenceReport):
        kind = "resonant" if isinstance(result.limit_kind, resonance.Resonant) else "non-resonant"
        return {
            "entries": [{"eps": e, "error": r} for e, r in result.entries],
            "fitted_rate": result.fitted_rate,
            "limit_kind": kind,
            "theta": result.theta,
        }
    if isinstance(result, list):
        return [_to_records(item) for item in result]
    if isinstance(result, dict):
        return result
    raise InvalidInputError(f"render: unsupported result type {type(result).__name__}")


def _cell(value, full_precision: bool) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float):  # incl. numpy float64, normalized through float()
        return repr(float(value)) if full_precision else f"{float(value):.6g}"
    if value is None:
        return ""
    return str(value)


def _render_table(records) -> str:
    if isinstance(records, dict):
        if "entries" in records:  # convergence report
            lines = [_render_table(records["entries"])]
            for key in ("fitted_rate", "limit_kind", "theta"):
                if records[key] is not None:
                    lines.append(f"{key}={_cell(records[key], False)}")
            return "\n".join(lines)
        return " ".join(f"{k}={_cell(v, False)}" for k, v in records.items())
    if not records:
        return "(empty)"
    keys = list(records[0].keys())
    cells = [[_cell(r[k], False) for k in keys] for r in records]
    widths = [max(len(k), max(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    header = "  ".join(k.rjust(w) for k, w in zip(keys, widths))
    body = "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
    return header + "\n" + body


def _render_csv(records) -> str:
    if isinstance(records, dict):
        if "entries" in records:
            return _render_csv(records["entries"])
        records = [records]
    if not records:
        return ""
    keys = list(records[0].keys())
    lines = [",".join(keys)]
    for r in records:
        lines.append(",".join(_cell(r[k], True) for k in keys))
    return "\n".join(lines)


def render(result, fmt: str) -> str:
    """Render any module output in the requested format."""
    if fmt not in FORMATS:
        raise InvalidInputError(f"render: unknown format {fmt!r}")
    records = _to_records(result)
    if fmt == "json":
        return json.dumps(records, indent=2)
    if fmt == "csv":
        return _render_csv(records)
    return _render_table(records)


def run(argv) -> int:
    """Parse argv, dispatch, print to stdout; return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        result = args.handler(args)
        text = render(result, args.format)
    except InvalidInputError as exc:
        print(f"deltaprime: error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailureError as exc:
        print(f"deltaprime: numerical failure: {exc}", file=sys.stderr)
        return 3
    print(text)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
