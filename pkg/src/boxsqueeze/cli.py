"""Command-line interface: build states, report moments, run verifications.

Reports go to stdout as JSON (default) or CSV with all floats at 17
significant digits and fixed field order, so identical invocations are
byte-identical.  Errors are machine-readable JSON objects on stderr with
exit code 2 (validation) or 3 (numerical failure).  A ``--config`` file
may hold ``key = value`` lines for any long option; explicit flags win.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Any, Optional

import numpy as np

from .bounds import (
    lemB_residuals,
    lemC_ladder,
    lemC_window,
    lemD_bound,
    nanoscale_projection,
    thm1_residuals,
    thm2_residuals,
    thm3_bounds,
)
from .errors import NumericalError, ValidationError
from .families import (
    BUILTIN_DENSITIES,
    build_discretized_state,
    build_theta_state,
    build_truncated_gaussian,
    build_well_adapted,
)
from .geometry import HBAR_SI, ClassicalTarget, IntervalGeometry
from .limits import large_l_convergence, semiclassical_sweep
from .moments import (
    default_e_star,
    energy_expand,
    energy_moments,
    finiteness_diagnostic,
    uncertainty_report,
)
from .specfun import gaussian_tail, theta_eval_with_bound
from .states import boundary_values

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _fmt(value: Any) -> Any:
    """17-significant-digit strings for floats; recursive over containers."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, complex):
        return {"re": f"{value.real:.17g}", "im": f"{value.imag:.17g}"}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_fmt(v) for v in value]
    if isinstance(value, dict):
        return {k: _fmt(v) for k, v in value.items()}
    return value


def _emit(rows, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "json":
        json.dump(_fmt(rows), stream, indent=2)
        stream.write("\n")
        return
    # CSV: rows must be a list of flat dicts
    if isinstance(rows, dict):
        rows = [rows]
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    stream.write(",".join(keys) + "\n")
    for row in rows:
        cells = []
        for k in keys:
            v = _fmt(row.get(k, ""))
            cells.append(str(v))
        stream.write(",".join(cells) + "\n")


def _row(obj) -> dict:
    if dataclasses.is_dataclass(obj):
        d = {}
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if dataclasses.is_dataclass(v) or callable(v):
                continue
            if isinstance(v, tuple) and v and isinstance(v[0], (int, float)):
                continue
            d[f.name] = v
        return d
    return dict(obj)


def _geometry(args) -> IntervalGeometry:
    if args.units == "si":
        return IntervalGeometry(l=args.l, hbar=HBAR_SI, mass=args.mass, unit_mode="si")
    return IntervalGeometry(l=args.l, hbar=1.0, mass=1.0, unit_mode="dimensionless")


def _build_state(args):
    geometry = _geometry(args)
    target = ClassicalTarget.make(geometry, args.xstar, args.pstar)
    fam = args.family
    if fam == "gauss":
        if args.beta is None or args.eps is None:
            raise ValidationError("gauss family needs --beta and --eps")
        # stricter than the library precondition: the packet core (+-3 beta)
        # must sit on the mollifier plateau, or the cutoff visibly distorts it
        if abs(args.xstar) + 3.0 * args.beta >= geometry.l - 3.0 * args.eps:
            raise ValidationError(
                "epsilon too large: 3*eps leaves no boundary margin for the packet core"
            )
        return build_truncated_gaussian(geometry, target, args.beta, args.eps)
    if fam == "theta":
        if args.alpha is None:
            raise ValidationError("theta family needs --alpha")
        return build_theta_state(geometry, target, args.alpha)
    if fam == "disc":
        if args.alpha is None:
            raise ValidationError("disc family needs --alpha")
        density = BUILTIN_DENSITIES[args.density]()
        return build_discretized_state(geometry, target, density, args.alpha)
    if fam == "well":
        if args.alpha is None:
            raise ValidationError("well family needs --alpha")
        density = BUILTIN_DENSITIES[args.density]() if args.inner == "disc" else None
        return build_well_adapted(
            geometry, target, inner=args.inner, alpha=args.alpha, density=density
        )
    raise ValidationError(f"unknown family {fam!r}")


def _cmd_state_build(args) -> int:
    state = _build_state(args)
    lo, hi = boundary_values(state)
    report = {
        "family": state.family,
        "x_star": state.target.x_star,
        "p_star": state.target.p_star,
        "k_star": state.target.k_star,
        "k_bar": state.target.k_bar,
        "l": state.geometry.l,
        "hbar": state.geometry.hbar,
        "mass": state.geometry.mass,
        "unit_mode": state.geometry.unit_mode,
        "truncation_k": state.series.truncation_k,
        "coefficients": state.series.coefficients.size,
        "norm_sq": state.series.norm_sq,
        "tail_bound": state.series.tail_bound,
        "boundary_value": complex(lo),
        "params": {
            k: v
            for k, v in state.params.items()
            if isinstance(v, (int, float, str)) or v is None
        },
    }
    _emit(report, args.format)
    return EXIT_OK


def _cmd_state_moments(args) -> int:
    state = _build_state(args)
    rep = uncertainty_report(state)
    _emit(_row(rep), args.format)
    return EXIT_OK


def _cmd_state_energy(args) -> int:
    state = _build_state(args)
    series = energy_expand(state, args.N)
    report = energy_moments(series, default_e_star(state))
    fin = finiteness_diagnostic(state, n_energy=args.N)
    out = {
        "N": args.N,
        "e_star": report.e_star,
        "parseval_defect": abs(series.norm_sq - 1.0),
        "mean_partial": report.mean_partial,
        "mean_class": report.mean_class.verdict,
        "dstar_partial": report.dstar_partial,
        "dstar_class": report.dstar_class.verdict,
        "momentum_class": fin.momentum_class,
        "energy_class": fin.energy_class,
        "boundary_left": fin.boundary_left,
        "boundary_right": fin.boundary_right,
    }
    _emit(out, args.format)
    return EXIT_OK


def _cmd_verify(args) -> int:
    geometry = IntervalGeometry()
    which = args.check
    if which == "theta":
        rows = []
        for x in [0.1 * i for i in range(10)]:
            for tau in (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0):
                # identity residual: comb route vs branch-rule route
                lhs = np.exp(np.pi * x * x / tau) * _comb_value(x, tau)
                rhs = np.sqrt(tau) * np.exp(np.pi * x * x / tau) * theta_eval_with_bound(x, tau)[0]
                rows.append(
                    {
                        "x": x,
                        "tau": tau,
                        "lhs": lhs,
                        "rhs": rhs,
                        "rel_residual": abs(lhs - rhs) / abs(lhs),
                    }
                )
        _emit(rows, args.format)
        return EXIT_OK
    if which == "gauss-tail":
        from .quadrature import integrate_real

        rows = []
        for gamma in (0.5, 1.0, 2.0):
            for x in np.linspace(0.0, 6.0, 13):
                closed = gaussian_tail(x, gamma, 2)
                quad, _ = integrate_real(
                    lambda t: t * t * np.exp(-gamma * t * t),
                    x,
                    x + 40.0 / np.sqrt(gamma),
                    tol=1e-16,
                    max_panels=200000,
                )
                rows.append(
                    {
                        "x": float(x),
                        "gamma": gamma,
                        "closed_form": closed,
                        "quadrature": quad,
                        "residual": abs(closed - quad),
                    }
                )
        _emit(rows, args.format)
        return EXIT_OK
    if which == "thm1":
        target = ClassicalTarget.make(geometry, args.xstar, args.pstar)
        rows = thm1_residuals(geometry, target, [0.2, 0.1, 0.05], args.eps or 0.02)
        _emit([_row(r) for r in rows], args.format)
        return EXIT_OK
    if which == "thm2":
        target = ClassicalTarget.make(geometry, args.xstar, args.pstar)
        rows = thm2_residuals(geometry, target, [2.0, 3.0, 4.0, 6.0, 8.0])
        _emit([_row(r) for r in rows], args.format)
        return EXIT_OK
    if which == "thm3":
        target = ClassicalTarget.make(geometry, args.xstar, args.pstar)
        density = BUILTIN_DENSITIES[args.density]()
        rows = []
        for alpha in (10.0, 50.0, 100.0):
            state = build_discretized_state(geometry, target, density, alpha)
            rows.append(_row(thm3_bounds(state)))
        proj = nanoscale_projection(density, 100e-9, HBAR_SI, 0.1e-9)
        rows.append({"alpha": None, "quantity": "nanoscale_projection", **proj})
        _emit(rows, args.format)
        return EXIT_OK
    if which == "lemC":
        target = ClassicalTarget.make(geometry, 0.0, 0.0)
        out = []
        for name in ("gaussian", "laplace"):
            lad = lemC_ladder(geometry, target, BUILTIN_DENSITIES[name](), [5.0, 10.0, 20.0, 40.0])
            for r in lad["reports"]:
                out.append({"density": name, **_row(r)})
            out.append({"density": name, "quantity": "loglog_slope", "slope": lad["slope"]})
        _emit(out, args.format)
        return EXIT_OK
    if which == "lemD":
        rng = np.random.default_rng(args.seed)
        rows = []
        worst = 0.0
        for _ in range(args.trials):
            n = int(rng.integers(2, 400))
            seq = np.sort(rng.random(n))[::-1] * rng.random()
            x = float(rng.uniform(0.1, np.pi))
            rep = lemD_bound(seq, x, form="two-sided")
            worst = max(worst, abs(rep.chi) / rep.bound)
            if not rep.ok:
                rows.append({"x": x, "chi": rep.chi, "bound": rep.bound, "ok": rep.ok})
        rows.append({"trials": args.trials, "violations": len(rows), "worst_ratio": worst})
        _emit(rows, args.format)
        return EXIT_OK
    if which == "lemB":
        rows = lemB_residuals([0.2, 0.1, 0.05], a=0.0)
        _emit([_row(r) for r in rows], args.format)
        return EXIT_OK
    raise ValidationError(f"unknown verification {which!r}")


def _comb_value(x: float, tau: float) -> float:
    # Gaussian-comb evaluation of theta(x/(i tau), 1/tau) / e^{pi x^2 / tau}:
    # sum_k exp(-pi (k - x)^2 / tau), kept separate from theta_eval's branch
    m = int(np.ceil(np.sqrt(42.0 * tau / np.pi))) + 2
    base = round(x)
    k = np.arange(base - m, base + m + 1)
    return float(np.sum(np.exp(-np.pi * (k - x) ** 2 / tau)))


def _cmd_limits(args) -> int:
    if args.sweep == "large-l":
        density = BUILTIN_DENSITIES[args.density]()
        rows = large_l_convergence(density, args.xstar, [8.0, 16.0, 32.0, 64.0])
        _emit([_row(r) for r in rows], args.format)
        return EXIT_OK
    if args.sweep == "semiclassical":
        rows = semiclassical_sweep(args.xstar, args.pstar, rungs=args.rungs)
        _emit([_row(r) for r in rows], args.format)
        return EXIT_OK
    raise ValidationError(f"unknown sweep {args.sweep!r}")


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Inject ``key = value`` pairs from --config as leading defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        raise ValidationError("--config needs a file path")
    injected: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" in line:
                key, _, value = line.partition("=")
            else:
                key, _, value = line.partition(" ")
            key, value = key.strip(), value.strip()
            flag = "--" + key.lstrip("-")
            if flag not in argv:
                injected.extend([flag, value])
    rest = argv[:i] + argv[i + 2 :]
    # config-provided flags go after the subcommand words, before user flags
    n_words = 0
    for tok in rest:
        if tok.startswith("-"):
            break
        n_words += 1
    return rest[:n_words] + injected + rest[n_words:]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxsqueeze", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_state_args(q):
        q.add_argument("--family", required=True, choices=["gauss", "theta", "disc", "well"])
        q.add_argument("--alpha", type=float)
        q.add_argument("--beta", type=float)
        q.add_argument("--eps", type=float)
        q.add_argument("--xstar", type=float, default=0.0)
        q.add_argument("--pstar", type=float, default=0.0)
        q.add_argument("--l", type=float, default=1.0)
        q.add_argument("--mass", type=float, default=1.0)
        q.add_argument("--units", choices=["dimensionless", "si"], default="dimensionless")
        q.add_argument("--density", choices=sorted(BUILTIN_DENSITIES), default="gaussian")
        q.add_argument("--inner", choices=["theta", "disc"], default="theta")
        q.add_argument("--format", choices=["json", "csv"], default="json")
        q.add_argument("--config", help="key = value defaults, one per line")

    state = sub.add_parser("state", help="build states and report their moments")
    state_sub = state.add_subparsers(dest="state_command", required=True)
    for name, fn in [
        ("build", _cmd_state_build),
        ("moments", _cmd_state_moments),
        ("energy", _cmd_state_energy),
    ]:
        q = state_sub.add_parser(name)
        add_state_args(q)
        if name == "energy":
            q.add_argument("--N", type=int, default=4096)
        q.set_defaults(fn=fn)

    verify = sub.add_parser("verify", help="verification tables for the stated bounds")
    verify.add_argument(
        "check",
        choices=["theta", "gauss-tail", "thm1", "thm2", "thm3", "lemC", "lemD", "lemB"],
    )
    verify.add_argument("--xstar", type=float, default=0.0)
    verify.add_argument("--pstar", type=float, default=0.0)
    verify.add_argument("--eps", type=float)
    verify.add_argument("--density", choices=sorted(BUILTIN_DENSITIES), default="gaussian")
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=20120711)
    verify.add_argument("--format", choices=["json", "csv"], default="json")
    verify.add_argument("--config")
    verify.set_defaults(fn=_cmd_verify)

    limits = sub.add_parser("limits", help="large-interval and semiclassical sweeps")
    limits.add_argument("sweep", choices=["large-l", "semiclassical"])
    limits.add_argument("--xstar", type=float, default=0.0)
    limits.add_argument("--pstar", type=float, default=1.0)
    limits.add_argument("--rungs", type=int, default=6)
    limits.add_argument("--density", choices=sorted(BUILTIN_DENSITIES), default="gaussian")
    limits.add_argument("--format", choices=["json", "csv"], default="json")
    limits.add_argument("--config")
    limits.set_defaults(fn=_cmd_limits)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.fn(args)
    except ValidationError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
