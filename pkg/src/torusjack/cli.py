"""Command-line interface.

Subcommands: repr, nsjp, flow, series, solve-h, gram, fourier, check.
Reports are JSON (schemaVersion, sorted keys, matrices as row-major
[re, im] pairs) with the effective configuration echoed in every report;
``gram`` can additionally write delimited CSV, and several commands render
figures next to their output when ``--plot`` is given.

Configuration precedence: values from a ``--config`` JSON file override
command-line flags, which override built-in defaults.  The thread budget
can also be set by the TORUSJACK_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .symgroup import build_irrep, stembridge_profile, commutation_system_sizes

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def mat_json(m: np.ndarray) -> list:
    """Row-major nested lists of [re, im] pairs."""
    a = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def effective_config(args: argparse.Namespace,
                     fields: list[str]) -> dict:
    """Flags over defaults (already merged by argparse), then config-file
    values over flags; validates kappa against the parameter window."""
    cfg = {f: getattr(args, f.replace("-", "_")) for f in fields}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        for key, val in file_cfg.items():
            if key not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = val
    env_threads = os.environ.get("TORUSJACK_THREADS")
    if "threads" in cfg and env_threads:
        cfg["threads"] = int(env_threads)
    if "kappa" in cfg and cfg["kappa"] is not None:
        k = float(cfg["kappa"])
        if not abs(k) < 0.5:
            raise ConfigError(f"kappa={k} outside |kappa| < 1/2")
    return cfg


def warn_kappa_window(cfg: dict, irrep) -> list[str]:
    warnings = []
    if "kappa" in cfg and cfg["kappa"] is not None:
        if abs(float(cfg["kappa"])) >= 1.0 / irrep.h_tau:
            warnings.append(
                f"kappa={cfg['kappa']} outside the positivity window "
                f"|kappa| < 1/h_tau = 1/{irrep.h_tau}")
    return warnings


def emit(report: dict, cfg: dict, args: argparse.Namespace) -> None:
    report["schemaVersion"] = SCHEMA_VERSION
    report["version"] = __version__
    report["config"] = {k: (list(v) if isinstance(v, tuple) else v)
                        for k, v in cfg.items()}
    def jsonable(v):
        if isinstance(v, (np.bool_,)):
            return bool(v)
        if isinstance(v, np.integer):
            return int(v)
        if isinstance(v, np.floating):
            return float(v)
        raise TypeError(f"not serializable: {type(v)}")

    text = json.dumps(report, sort_keys=True, indent=2, default=jsonable)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _tau(cfg: dict) -> tuple[int, ...]:
    t = cfg["tau"]
    return tuple(t) if not isinstance(t, str) else parse_ints(t)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_repr(args) -> int:
    cfg = effective_config(args, ["tau"])
    tau = _tau(cfg)
    ir = build_irrep(tau)
    e, commutant = stembridge_profile(tau)
    n_unknowns, m_equations = commutation_system_sizes(tau)
    report = {
        "tau": list(tau),
        "nTau": ir.n_tau,
        "mTau": ir.m_tau,
        "hTau": ir.h_tau,
        "contentSum": float(ir.s1),
        "gamma": float(ir.gamma),
        "lambdaTrace": float(ir.lambda_trace),
        "weights": [float(w) for w in ir.weights],
        "contentVectors": [list(t.content_vector) for t in ir.basis],
        "fakeDegreeFolded": e,
        "commutantDim": commutant,
        "systemUnknowns": n_unknowns,
        "systemEquations": m_equations,
    }
    emit(report, cfg, args)
    return 0


def cmd_nsjp(args) -> int:
    from .jackpoly import nsjp
    cfg = effective_config(args, ["tau", "kappa", "alpha", "tableau"])
    ir = build_irrep(_tau(cfg))
    alpha = tuple(cfg["alpha"]) if not isinstance(cfg["alpha"], str) \
        else parse_ints(cfg["alpha"])
    p = nsjp(ir, float(cfg["kappa"]), alpha, int(cfg["tableau"]))
    terms = {",".join(map(str, a)): [[float(v.real), float(v.imag)]
                                     for v in c]
             for a, c in sorted(p.terms.items())}
    report = {"warnings": warn_kappa_window(cfg, ir), "terms": terms}
    emit(report, cfg, args)
    return 0


def cmd_flow(args) -> int:
    from .odeflow import TorusPoint, det_closed_form, extend_L
    cfg = effective_config(args, ["tau", "kappa", "theta"])
    ir = build_irrep(_tau(cfg))
    theta = tuple(cfg["theta"]) if not isinstance(cfg["theta"], str) \
        else parse_floats(cfg["theta"])
    kappa = float(cfg["kappa"])
    val = extend_L(ir, kappa, TorusPoint(theta))
    det = complex(np.linalg.det(val))
    report = {
        "warnings": warn_kappa_window(cfg, ir),
        "L": mat_json(val),
        "detAbs": abs(det),
        "detAbsClosedForm": abs(det_closed_form(ir, kappa,
                                                TorusPoint(theta))),
    }
    emit(report, cfg, args)
    return 0


def cmd_series(args) -> int:
    from . import localseries as ls
    cfg = effective_config(args, ["tau", "kappa", "terms", "plot"])
    ir = build_irrep(_tau(cfg))
    kappa = float(cfg["kappa"])
    chart, z = ls.x0_chart(ir, kappa)
    series = ls.expand(chart, int(cfg["terms"]))
    norms = series.coefficient_norms()
    bounds = ls.coefficient_bounds(chart, series.truncation, norms[0])
    match = ls.matching_constant(ir, kappa)
    report = {
        "warnings": warn_kappa_window(cfg, ir),
        "coefficientNorms": norms,
        "coefficientBounds": bounds,
        "parityResidual": series.parity_residual(),
        "tailBoundAtX0": series.tail_bound(abs(z)),
        "matchingConstant": mat_json(match),
    }
    if cfg["plot"]:
        from .plotting import series_decay
        path = (args.output or "series") + ".png"
        report["figure"] = series_decay(norms, bounds, path,
                                        title=f"tau={cfg['tau']} kappa={kappa}")
    emit(report, cfg, args)
    return 0


def cmd_solve_h(args) -> int:
    from .weightsolve import face_residuals, solve_H
    cfg = effective_config(args, ["tau", "kappa"])
    ir = build_irrep(_tau(cfg))
    sol = solve_H(ir, float(cfg["kappa"]))
    r1, r2 = face_residuals(sol)
    report = {
        "warnings": warn_kappa_window(cfg, ir),
        "H": mat_json(sol.h),
        "singularValues": [float(s) for s in sol.singular_values],
        "gap": sol.gap,
        "hermiticity": sol.hermiticity,
        "upsilonCommutator": sol.commutator,
        "eigenvalues": [float(v) for v in sol.eigenvalues],
        "positive": sol.positive,
        "faceResiduals": [r1, r2],
    }
    emit(report, cfg, args)
    return 0


def cmd_gram(args) -> int:
    from .torusquad import TwoGridPairing, gram_matrix
    from .weightsolve import solve_H
    cfg = effective_config(args, ["tau", "kappa", "grid_p", "max_norm",
                                  "threads", "plot"])
    ir = build_irrep(_tau(cfg))
    sol = solve_H(ir, float(cfg["kappa"]))
    pairing = TwoGridPairing(sol, int(cfg["grid_p"]))
    rep = gram_matrix(pairing, int(cfg["max_norm"]))
    report = {
        "warnings": warn_kappa_window(cfg, ir),
        "labels": [[list(a), t] for a, t in rep.labels],
        "offDiagonalRatio": rep.off_diagonal_ratio,
        "degreeZeroDiagonal": [float(v) for v in rep.degree_zero_diag],
        "weightsAtKappaZero": [float(v) for v in rep.weights0],
        "weightRatioError": rep.weight_ratio_error,
        "gram": mat_json(rep.gram),
    }
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("row,col,alphaRow,tRow,alphaCol,tCol,re,im\n")
            for i, (ai, ti) in enumerate(rep.labels):
                for j, (aj, tj) in enumerate(rep.labels):
                    v = rep.gram[i, j]
                    fh.write(f"{i},{j},{' '.join(map(str, ai))},{ti},"
                             f"{' '.join(map(str, aj))},{tj},"
                             f"{v.real!r},{v.imag!r}\n")
        report["csv"] = args.csv
    if cfg["plot"]:
        from .plotting import gram_heatmap
        path = (args.csv or args.output or "gram") + ".png"
        report["figure"] = gram_heatmap(
            rep.gram, path, title=f"tau={cfg['tau']} kappa={cfg['kappa']}")
    emit(report, cfg, args)
    return 0


def cmd_fourier(args) -> int:
    from .torusquad import FourierK, Pairing, QuadratureGrid
    from .weightsolve import solve_H
    cfg = effective_config(args, ["tau", "kappa", "grid_p", "beta",
                                  "threads"])
    ir = build_irrep(_tau(cfg))
    sol = solve_H(ir, float(cfg["kappa"]))
    pairing = Pairing(sol, QuadratureGrid(ir.N, int(cfg["grid_p"])))
    beta = tuple(cfg["beta"]) if not isinstance(cfg["beta"], str) \
        else parse_ints(cfg["beta"])
    khat = FourierK(pairing)(beta)
    report = {"warnings": warn_kappa_window(cfg, ir),
              "beta": list(beta), "KHat": mat_json(khat)}
    emit(report, cfg, args)
    return 0


def cmd_check(args) -> int:
    cfg = effective_config(args, ["tau", "kappa", "seed", "samples",
                                  "max_norm", "grid_p", "threads", "plot"])
    ir = build_irrep(_tau(cfg))
    kappa = float(cfg["kappa"])
    report: dict = {"warnings": warn_kappa_window(cfg, ir),
                    "check": args.what}
    if args.what == "flow-invariants":
        from .odeflow import (TorusPoint, det_closed_form, extend_L,
                              monodromy_factor, permute_point)
        from .symgroup import cycle_perm
        rng = np.random.default_rng(int(cfg["seed"]))
        n = ir.N
        worst_mono, worst_det = 0.0, 0.0
        for _ in range(int(cfg["samples"])):
            th = np.sort(rng.uniform(0, 2 * np.pi, n))
            if np.min(np.diff(th)) < 0.2 or th[0] + 2 * np.pi - th[-1] < 0.2:
                continue
            x = TorusPoint(tuple(th))
            lx = extend_L(ir, kappa, x)
            w0 = cycle_perm(n)
            lxw = extend_L(ir, kappa, permute_point(x, w0))
            pred = monodromy_factor(ir, w0, x) @ lx @ ir.rep(w0)
            worst_mono = max(worst_mono, float(np.abs(lxw - pred).max()))
            worst_det = max(worst_det, abs(
                abs(np.linalg.det(lx)) - abs(det_closed_form(ir, kappa, x))))
        report["monodromyResidual"] = worst_mono
        report["detResidual"] = worst_det
        report["passed"] = worst_mono < 1e-8 and worst_det < 1e-8
    elif args.what == "fcrec":
        from .torusquad import (FourierK, Pairing, QuadratureGrid,
                                fcrec_error_estimate, fcrec_residual,
                                laurent_labels)
        from .weightsolve import solve_H
        sol = solve_H(ir, kappa)
        p = int(cfg["grid_p"])
        fine = FourierK(Pairing(sol, QuadratureGrid(ir.N, p)))
        coarse = FourierK(Pairing(sol, QuadratureGrid(ir.N, p // 2)))
        rows, passed = [], True
        for alpha in laurent_labels(ir.N, int(cfg["max_norm"])):
            for i in range(1, ir.N + 1):
                res, scale = fcrec_residual(ir, kappa, fine, alpha, i)
                est = fcrec_error_estimate(ir, kappa, fine, coarse,
                                           alpha, i)
                ok = bool(res <= 3 * est or res < 1e-12)
                passed = passed and ok
                rows.append({"alpha": list(alpha), "i": i,
                             "residual": res, "estimate": est,
                             "scale": scale, "ok": ok})
        report["equations"] = rows
        report["passed"] = passed
    elif args.what == "boundary-exponent":
        from .weightsolve import (boundary_odd_norms, loglog_slope,
                                  solve_H)
        sol = solve_H(ir, kappa)
        z_abs = list(np.geomspace(1e-4, 1e-2, 7))
        norms = boundary_odd_norms(sol, z_abs)
        slope = loglog_slope(z_abs, norms)
        expected = 1 - 2 * abs(kappa)
        report["zAbs"] = z_abs
        report["oddPartNorms"] = norms
        report["slope"] = slope
        report["expectedSlope"] = expected
        report["passed"] = bool(abs(slope - expected) <= 0.1)
        if cfg["plot"]:
            from .plotting import boundary_slope_plot
            path = (args.output or "boundary") + ".png"
            report["figure"] = boundary_slope_plot(z_abs, norms, slope,
                                                   expected, path)
    else:
        raise ConfigError(f"unknown check {args.what!r}")
    emit(report, cfg, args)
    return 0 if report.get("passed", True) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="torusjack",
        description="Matrix weight functions on the torus for vector-valued "
                    "nonsymmetric Jack polynomials.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, kappa=True):
        p.add_argument("--tau", default="2,1",
                       help="partition, comma-separated (default 2,1)")
        if kappa:
            p.add_argument("--kappa", type=float, default=0.1,
                           help="coupling parameter, |kappa| < 1/2")
        p.add_argument("--config", help="JSON config file; its values "
                                        "override flags")
        p.add_argument("--output", help="write the JSON report here "
                                        "instead of stdout")

    p = sub.add_parser("repr", help="representation data and constants")
    common(p, kappa=False)
    p.set_defaults(func=cmd_repr)

    p = sub.add_parser("nsjp", help="one nonsymmetric Jack polynomial")
    common(p)
    p.add_argument("--alpha", default="1,0,0", help="exponent vector")
    p.add_argument("--tableau", type=int, default=0)
    p.set_defaults(func=cmd_nsjp)

    p = sub.add_parser("flow", help="L(x) at a torus point")
    common(p)
    p.add_argument("--theta", default="0.3,2.1,4.4",
                   help="angles, comma-separated")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("series", help="face series at the base-point chart")
    common(p)
    p.add_argument("--terms", type=int, default=24)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("solve-h", help="solve for the weight constant H")
    common(p)
    p.set_defaults(func=cmd_solve_h)

    p = sub.add_parser("gram", help="Gram matrix of the Jack basis")
    common(p)
    p.add_argument("--grid-p", type=int, default=48)
    p.add_argument("--max-norm", type=int, default=2)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv", help="also write the matrix as CSV here")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("fourier", help="one Fourier coefficient of K")
    common(p)
    p.add_argument("--grid-p", type=int, default=48)
    p.add_argument("--beta", default="1,-1,0")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("check", help="named verification suites")
    p.add_argument("what", choices=["flow-invariants", "fcrec",
                                    "boundary-exponent"])
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--max-norm", type=int, default=2)
    p.add_argument("--grid-p", type=int, default=24)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_check)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
