"""Command-line interface: ``duomode report|figure|verify|sweep``.

Exit codes: 0 ok, 1 verification failure, 2 unstable parameters,
3 unphysical input, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import analytic
from .analytic import DEGREE_FIELDS, REPORT_FIELDS, SteadyStateReport
from .dynamics import report_from_covariance, steady_state_lyapunov
from .errors import (
    DegeneratePopulationError,
    InstabilityError,
    InvalidParameterError,
    UnphysicalReservoirError,
)
from .figures import FIGURES
from .model import (
    M_MODES,
    ReservoirSpec,
    SystemParams,
    classify_regime,
    diffusion_matrix,
    drift_matrix,
    stability,
)
from .stochastic import SdeConfig, run_ensemble

EXIT_OK, EXIT_VERIFY, EXIT_UNSTABLE, EXIT_UNPHYSICAL, EXIT_IO = 0, 1, 2, 3, 4

DEFAULTS = {"kappa": 1.0, "g": 0.0, "lambda": 0.0, "phi": 0.0, "n": 0.0, "m": None, "m_mode": "thermal"}

GRID_G = (0.0, 0.3, 0.5, 0.8, 0.99, 1.2, 3.0)
GRID_LAMBDA = (0.0, 0.3, 0.5, 0.8, 1.0, 3.0, 5.0)
GRID_N = (0.0, 0.5, 2.0)
GRID_PHI = (0.0, math.pi / 4, math.pi / 2, 2.1)

PARAM_COLUMNS = ("kappa", "g", "lambda", "phi", "n", "m")
COMPLEX_FIELDS = ("corr_aa", "corr_bb", "corr_ab", "corr_adag_b")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, int, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def value_columns(names: Iterable[str]) -> list[str]:
    cols = []
    for name in names:
        if name in COMPLEX_FIELDS:
            cols += [f"{name}_re", f"{name}_im", f"{name}_abs"]
        else:
            cols.append(name)
    return cols


def value_cells(report: SteadyStateReport | None, names: Iterable[str]) -> list[str]:
    cells = []
    for name in names:
        v = None if report is None else getattr(report, name)
        if name in COMPLEX_FIELDS:
            cells += ["", "", ""] if v is None else [fmt(v.real), fmt(v.imag), fmt(abs(v))]
        else:
            cells.append(fmt(v))
    return cells


def param_cells(params: SystemParams, res: ReservoirSpec) -> list[str]:
    return [fmt(v) for v in (params.kappa, params.g, params.lam, params.phi, res.n, res.m)]


def threads() -> int:
    try:
        return max(1, int(os.environ.get("DUOMODE_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items: Sequence):
    # rows always come back in input order
    if threads() > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads()) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# -- configuration -------------------------------------------------------------

def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}", EXIT_UNPHYSICAL) from exc
    if not isinstance(data, dict):
        raise CliError("config must be a flat key-value object", EXIT_UNPHYSICAL)
    return {k.replace("-", "_"): v for k, v in data.items()}


def merged(args: argparse.Namespace) -> dict:
    """Defaults < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    cfg.update(load_config(getattr(args, "config", None)))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "m", None) is not None:
        cfg["m_mode"] = None
    return cfg


def build_inputs(cfg: dict) -> tuple[SystemParams, ReservoirSpec]:
    try:
        params = SystemParams(float(cfg["kappa"]), float(cfg["g"]), float(cfg["lambda"]), float(cfg["phi"]))
        mode = cfg["m"] if cfg.get("m") is not None else cfg.get("m_mode") or "thermal"
        res = ReservoirSpec.from_mode(float(cfg["n"]), mode)
    except (UnphysicalReservoirError, InvalidParameterError) as exc:
        raise CliError(f"unphysical input: {exc}", EXIT_UNPHYSICAL) from exc
    return params, res


def sde_config(args: argparse.Namespace, cfg: dict) -> SdeConfig:
    def pick(name, default):
        value = getattr(args, name, None)
        return cfg.get(name, default) if value is None else value

    return SdeConfig(
        dt=float(pick("dt", 1e-3)),
        t_end=float(pick("t_end", 10.0)),
        n_traj=int(pick("n_traj", 2000)),
        burn_in=float(pick("burn_in", 0.5)),
        seed=int(pick("seed", 0)),
    )


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def relative_deviation(a, b, floor: float = 1e-12) -> float:
    """|a - b| / |b|; zero when |b| is below ``floor`` (absolute deviations cover those)."""
    return abs(a - b) / abs(b) if abs(b) > floor else 0.0


# -- report ----------------------------------------------------------------------

def cmd_report(args: argparse.Namespace) -> int:
    cfg = merged(args)
    params, res = build_inputs(cfg)
    info = classify_regime(params)
    if not stability(params):
        raise CliError("unstable: kappa^2+lambda^2-g^2 <= 0", EXIT_UNSTABLE)
    report = analytic.steady_state_report(params, res, strict=False)
    columns = {"analytic": report}
    if args.verify:
        sigma = steady_state_lyapunov(drift_matrix(params), diffusion_matrix(params, res))
        columns["lyapunov"] = report_from_covariance(sigma, strict=False)
        if args.sde or "n_traj" in cfg:
            est = run_ensemble(params, res, sde_config(args, cfg))
            columns["montecarlo"] = report_from_covariance(est.sigma_hat, strict=False)

    out = sys.stdout
    out.write(f"kappa={params.kappa:g} g={params.g:g} lambda={params.lam:g} phi={params.phi:.6g} "
              f"n={res.n:g} m={res.m:.6g}\n")
    out.write(f"regime: {info.regime.value}\n")
    out.write("roots (units of kappa): " + ", ".join(f"{r.real:.6g}{r.imag:+.6g}i" for r in info.roots) + "\n\n")
    names = list(columns)
    out.write(f"{'quantity':<14}" + "".join(f"{n:>28}" for n in names) + "\n")
    worst = {name: [0.0, 0.0] for name in names[1:]}
    for field in REPORT_FIELDS:
        cells = []
        for name in names:
            v = getattr(columns[name], field)
            if v is None:
                cells.append("undefined")
            elif isinstance(v, complex):
                cells.append(f"{v.real:.9g}{v.imag:+.9g}i")
            else:
                cells.append(f"{v:.12g}")
            if name != "analytic" and v is not None and getattr(report, field) is not None:
                ref = getattr(report, field)
                worst[name][0] = max(worst[name][0], relative_deviation(v, ref))
                worst[name][1] = max(worst[name][1], abs(v - ref))
        out.write(f"{field:<14}" + "".join(f"{c:>28}" for c in cells) + "\n")
    for name, (rel, dev) in worst.items():
        out.write(f"max deviation {name} vs analytic: relative {rel:.3e}, absolute {dev:.3e}\n")
    return EXIT_OK


# -- figure ------------------------------------------------------------------------

def cmd_figure(args: argparse.Namespace) -> int:
    fig = FIGURES[args.figure_id]
    points = list(fig.points(args.lam))

    def row(pt):
        stable = stability(pt.params)
        report = analytic.steady_state_report(pt.params, pt.res, strict=False) if stable else None
        return [fig.name, pt.curve, *param_cells(pt.params, pt.res), fmt(stable), *value_cells(report, fig.quantities)]

    header = ["figure", "curve", *PARAM_COLUMNS, "stable", *value_columns(fig.quantities)]
    write_csv(args.out, header, ordered_map(row, points))
    return EXIT_OK


# -- sweep ---------------------------------------------------------------------------

SWEEP_VARS = {"g": "g", "lambda": "lambda", "phi": "phi", "n": "n"}


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = merged(args)
    build_inputs(cfg)  # validate the base point
    axes = [(args.var, np.linspace(args.start, args.stop, args.steps))]
    if args.var2:
        if args.start2 is None or args.stop2 is None:
            raise CliError("--var2 needs --start2 and --stop2", EXIT_UNPHYSICAL)
        axes.append((args.var2, np.linspace(args.start2, args.stop2, args.steps2)))
    names = [a[0] for a in axes]
    combos = list(itertools.product(*[a[1] for a in axes]))

    def row(values):
        point = dict(cfg)
        for name, v in zip(names, values):
            point[name] = float(v)
        try:
            params, res = build_inputs(point)
        except CliError:
            mode = point["m"] if point.get("m") is not None else point.get("m_mode")
            cells = [fmt(point[k]) for k in ("kappa", "g", "lambda", "phi", "n")] + [fmt(mode)]
            return cells + ["", "false", "false"] + value_cells(None, REPORT_FIELDS)
        stable = stability(params)
        report = analytic.steady_state_report(params, res, strict=False) if stable else None
        regime = classify_regime(params).regime.value
        return param_cells(params, res) + [regime, fmt(stable), "true"] + value_cells(report, REPORT_FIELDS)

    header = [*PARAM_COLUMNS, "regime", "stable", "physical", *value_columns(REPORT_FIELDS)]
    write_csv(args.out, header, ordered_map(row, combos))
    return EXIT_OK


# -- verify ----------------------------------------------------------------------------

@dataclass
class FieldStats:
    max_abs: float = 0.0
    max_rel: float = 0.0
    excess: float = 0.0
    worst: tuple | None = None
    ok: bool = True


def parse_floats(text: str | None, default: Sequence[float]) -> tuple[float, ...]:
    if text is None:
        return tuple(default)
    return tuple(float(eval_number(t)) for t in text.split(",") if t.strip())


def eval_number(token: str) -> float:
    token = token.strip().lower().replace("pi", repr(math.pi))
    try:
        return float(token)
    except ValueError:
        if "/" in token:
            num, den = token.split("/", 1)
            return float(num) / float(den)
        raise


def verify_grid(args) -> list[tuple[SystemParams, ReservoirSpec]]:
    kappa = float(args.kappa or 1.0)
    grid = []
    modes = tuple(args.m_modes.split(",")) if args.m_modes else M_MODES
    for g, lam, n, mode, phi in itertools.product(
        parse_floats(args.g_values, GRID_G),
        parse_floats(args.lambda_values, GRID_LAMBDA),
        parse_floats(args.n_values, GRID_N),
        modes,
        parse_floats(args.phi_values, GRID_PHI),
    ):
        try:
            params = SystemParams(kappa, g * kappa, lam * kappa, phi)
            res = ReservoirSpec.from_mode(n, mode)
        except (UnphysicalReservoirError, InvalidParameterError) as exc:
            raise CliError(f"unphysical grid point: {exc}", EXIT_UNPHYSICAL) from exc
        if stability(params):
            grid.append((params, res))
    return grid


def compare_reports(a: SteadyStateReport, b: SteadyStateReport, rtol: float, atol: float):
    """Yield (field, abs deviation, relative deviation, tolerance used, ok) per report field.

    ``b`` is the reference; a field passes when |a - b| <= rtol |b| + atol.
    """
    for field in REPORT_FIELDS:
        x, y = getattr(a, field), getattr(b, field)
        if x is None or y is None:
            same = x is None and y is None
            bad = 0.0 if same else math.inf
            yield field, bad, bad, atol, same
            continue
        diff = abs(x - y)
        allowed = rtol * abs(y) + atol
        yield field, diff, relative_deviation(x, y), allowed, diff <= allowed


def cmd_verify(args: argparse.Namespace) -> int:
    rtol = args.tol
    atol = args.atol if args.atol is not None else rtol * 1e-3
    grid = verify_grid(args)
    if not grid:
        raise CliError("verification grid contains no stable points", EXIT_UNSTABLE)
    stats = {f: FieldStats() for f in REPORT_FIELDS}

    def evaluate(point):
        params, res = point
        a = analytic.steady_state_report(params, res, strict=False)
        sigma = steady_state_lyapunov(drift_matrix(params), diffusion_matrix(params, res))
        b = report_from_covariance(sigma, strict=False)
        return list(compare_reports(b, a, rtol, atol))

    failures = []
    for (params, res), rows in zip(grid, ordered_map(evaluate, grid)):
        key = (params.g_bar, params.lam_bar, res.n, res.m, params.phi)
        for field, diff, rel, allowed, ok in rows:
            st = stats[field]
            st.max_abs = max(st.max_abs, diff)
            st.max_rel = max(st.max_rel, rel)
            excess = diff / allowed if allowed > 0 else (0.0 if diff == 0 else math.inf)
            if st.worst is None or excess > st.excess:
                st.excess, st.worst = excess, key
            if not ok:
                st.ok = False
                failures.append((field, key, diff))

    mc_rows = []
    if args.sde:
        mc_rows = verify_montecarlo(args, grid)
        failures += [(f"montecarlo:{r[0]}", r[1], r[2]) for r in mc_rows if not r[3]]

    header = ["field", "max_abs_dev", "max_rel_dev", "worst_g", "worst_lambda", "worst_n", "worst_m", "worst_phi", "pass"]
    rows = []
    for field, st in stats.items():
        worst = st.worst or (None,) * 5
        rows.append([field, fmt(st.max_abs), fmt(st.max_rel), *[fmt(v) for v in worst], fmt(st.ok)])
    for name, key, zmax, ok in mc_rows:
        rows.append([f"montecarlo:{name}", "", fmt(zmax), *[fmt(v) for v in key], fmt(ok)])
    write_csv(args.out, header, rows)

    if failures:
        for field, key, diff in failures[:20]:
            g, lam, n, m, phi = key
            sys.stderr.write(
                f"FAIL {field}: g={g:g} lambda={lam:g} n={n:g} m={m:.6g} phi={phi:.6g} deviation={diff:.3e}\n"
            )
        return EXIT_VERIFY
    return EXIT_OK


def verify_montecarlo(args, grid):
    """Monte Carlo check of the covariance at every grid point (z-score <= 5)."""
    cfg = merged(args)
    sde = sde_config(args, cfg)
    out = []
    for params, res in grid:
        sigma = steady_state_lyapunov(drift_matrix(params), diffusion_matrix(params, res))
        est = run_ensemble(params, res, sde)
        z = np.abs(est.sigma_hat - sigma) / est.stderr
        zmax = float(np.max(z))
        out.append(("sigma", (params.g_bar, params.lam_bar, res.n, res.m, params.phi), zmax, zmax <= 5.0))
    return out


# -- argument parsing -------------------------------------------------------------------

def add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON key-value file; explicit flags win")
    p.add_argument("--kappa", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--phi", type=eval_number)
    p.add_argument("--n", type=float)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--m", type=float, help="literal two-photon correlation m")
    group.add_argument("--m-mode", dest="m_mode", help="thermal | classical-max | quantum-max")


def add_sde_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sde", action="store_true", help="also run the Monte Carlo oracle")
    p.add_argument("--n-traj", dest="n_traj", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--burn-in", dest="burn_in", type=float)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="duomode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="steady-state report at one parameter point")
    add_param_flags(p)
    add_sde_flags(p)
    p.add_argument("--verify", action="store_true", help="add Lyapunov (and Monte Carlo) columns")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("figure", help="CSV data behind a figure")
    p.add_argument("figure_id", choices=sorted(FIGURES))
    p.add_argument("--out", default="-")
    p.add_argument("--lambda", dest="lam", type=float, help="override the figure's fixed lambda")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="closed form vs Lyapunov over a grid")
    p.add_argument("--kappa", type=float)
    p.add_argument("--g-values")
    p.add_argument("--lambda-values")
    p.add_argument("--n-values")
    p.add_argument("--m-modes")
    p.add_argument("--phi-values")
    p.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    p.add_argument("--atol", type=float, help="absolute floor (default tol/1000)")
    p.add_argument("--out", default="-")
    p.add_argument("--config")
    add_sde_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="report fields over a 1-D or 2-D parameter sweep")
    add_param_flags(p)
    p.add_argument("--var", choices=sorted(SWEEP_VARS), required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--var2", choices=sorted(SWEEP_VARS))
    p.add_argument("--start2", type=float)
    p.add_argument("--stop2", type=float)
    p.add_argument("--steps2", type=int, default=21)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"{exc}\n")
        return exc.code
    except InstabilityError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_UNSTABLE
    except (UnphysicalReservoirError, InvalidParameterError) as exc:
        sys.stderr.write(f"unphysical input: {exc}\n")
        return EXIT_UNPHYSICAL
    except DegeneratePopulationError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_UNPHYSICAL
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
