"""Command-line entry point.

Each subcommand writes a CSV table (``--out PATH``, default stdout) and,
when ``--out`` is given, a JSON run summary next to it (``PATH.json``).
``steady`` and ``stability`` print JSON only. Exit status is 0 on success,
1 for configuration errors and 2 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import (
    angle_difference,
    logarithmic_negativity,
    mechanical_block,
    principal_axis_angle,
    squeezing_db,
    wigner_grid,
)
from .bogoliubov import adiabatic_variance, bogoliubov_occupancy
from .classical import DriveModulation, check_periodicity, integrate_mean_field
from .config import RunConfig, SweepRange, apply_overrides, load_config, parse_lines, to_flat
from .covariance import (
    default_covariance_dt,
    drift_rwa,
    floquet_drift,
    evolve_covariance,
    full_limit_cycle,
    noise_matrix,
    routh_hurwitz,
    steady_state_covariance,
    thermal_covariance,
)
from .errors import ConfigError, InvalidConfig, NumericalError, OptoSqueezeError
from .params import compute_couplings
from .spectral import integrate_spectrum, spectrum_table
from .sweeps import (
    SweepResult,
    format_cell,
    optimal_ratio,
    run_kappa_sweep,
    run_ratio_sweep,
    run_robustness_sweep,
)

COMMANDS = ("classical", "evolve", "steady", "wigner", "spectrum", "stability", "sweep-ratio", "sweep-kappa", "sweep-nb")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidConfig(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="optosqueeze", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="PATH", help="key = value config file")
    parser.add_argument("--mode", choices=("rwa", "full"))
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--t-end", type=float)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--sweep-axis")
    parser.add_argument("--sweep-range", metavar="LO:HI:N")
    parser.add_argument("--log-axis", action="store_true", default=None)
    parser.add_argument("--a2c-sign", choices=("printed", "positive"))
    parser.add_argument("--workers", type=int)
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    flat = parse_lines("\n".join(args.set))
    cli = {
        "run.mode": args.mode,
        "run.t_end": args.t_end,
        "run.dt": args.dt,
        "sweep.axis": args.sweep_axis,
        "sweep.range": args.sweep_range,
        "sweep.log": args.log_axis,
        "run.a2c_sign": args.a2c_sign,
        "run.workers": args.workers,
    }
    flat.update({k: str(v) for k, v in cli.items() if v is not None})
    return apply_overrides(cfg, flat)


def _table(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(format_cell(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o))


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _couplings_dict(c) -> dict:
    return {
        "G0": c.G0,
        "G1": c.G1,
        "Gt0": c.Gt0,
        "Gt1": c.Gt1,
        "G_plus": c.G_plus,
        "G_minus": c.G_minus,
        "Gt_plus": c.Gt_plus,
        "Gt_minus": c.Gt_minus,
        "G_eff": c.G_eff,
        "r": c.r,
        "h": c.h,
        "ratio": c.ratio,
    }


def _stability_dict(c, p) -> dict:
    rep = routh_hurwitz(c, p)
    eig = np.linalg.eigvals(drift_rwa(c, p).m)
    return {
        "margins": list(rep.margins),
        "hurwitz_determinant": rep.hurwitz_determinant,
        "stable": rep.stable,
        "max_real_eigenvalue": float(np.max(eig.real)),
    }


def cmd_stability(cfg: RunConfig) -> tuple:
    c = compute_couplings(cfg.params, cfg.floquet)
    return None, {"couplings": _couplings_dict(c), "stability": _stability_dict(c, cfg.params)}


def cmd_steady(cfg: RunConfig) -> tuple:
    p, f = cfg.params, cfg.floquet
    c = compute_couplings(p, f)
    out = {"mode": cfg.mode, "couplings": _couplings_dict(c), "stability": _stability_dict(c, p)}
    if cfg.mode == "full":
        cycle = full_limit_cycle(p, f, t_settle=cfg.t_settle, dt=cfg.dt)
        out.update(
            v33_min=cycle.v33_min,
            v33_max=cycle.v33_max,
            v33_mean=cycle.v33_mean,
            period=cycle.period,
            squeezing_db=squeezing_db(cycle.v33_min),
            e_n_max=max(logarithmic_negativity(v).e_n for v in cycle.trajectory),
        )
        return None, out
    v = steady_state_covariance(drift_rwa(c, p), noise_matrix(p))
    out.update(
        v33=v.v33,
        v44=v.v44,
        squeezing_db=squeezing_db(v.v33),
        e_n=logarithmic_negativity(v).e_n,
        occupancy=bogoliubov_occupancy(mechanical_block(v), c.r) if c.defined else "undefined",
        covariance=v.v.tolist(),
    )
    try:
        out["v33_adiabatic"] = adiabatic_variance(c, p, cfg.a2c_sign)
    except NumericalError as exc:
        out["v33_adiabatic"] = f"undefined ({exc})"
    spec = integrate_spectrum(c, p, epsrel=cfg.quad_epsrel)
    out["v33_spectral"], out["v33_spectral_error"] = spec.value, spec.error
    return None, out


def cmd_evolve(cfg: RunConfig) -> tuple:
    p, f = cfg.params, cfg.floquet
    dt = cfg.dt or default_covariance_dt(p, f)
    if cfg.mode == "full":
        drift = floquet_drift(p, f)
    else:
        drift = drift_rwa(compute_couplings(p, f), p)
    traj = evolve_covariance(drift, noise_matrix(p), thermal_covariance(p), cfg.t_end, dt, cfg.record_every)
    rows = [(t, v[2, 2], v[3, 3]) for t, v in zip(traj.times, traj.v)]
    summary = {"mode": cfg.mode, "dt": dt, "steps": int(round(cfg.t_end / dt)), "v33_final": float(traj.v33[-1])}
    return _table(("t", "V33", "V44"), rows), summary


def _mechanical_state(cfg: RunConfig):
    p, f = cfg.params, cfg.floquet
    if cfg.mode == "full":
        dt = cfg.dt or default_covariance_dt(p, f)
        traj = evolve_covariance(floquet_drift(p, f), noise_matrix(p), thermal_covariance(p), cfg.t_end, dt)
        return mechanical_block(traj[len(traj) - 1]), float(traj.times[-1])
    c = compute_couplings(p, f)
    return mechanical_block(steady_state_covariance(drift_rwa(c, p), noise_matrix(p))), math.inf


def cmd_wigner(cfg: RunConfig) -> tuple:
    v_b, t = _mechanical_state(cfg)
    grid = wigner_grid(v_b, n=cfg.wigner_n, extent=cfg.wigner_extent)
    rows = [(q, pv, grid.values[i, j]) for i, pv in enumerate(grid.p_axis) for j, q in enumerate(grid.q_axis)]
    summary = {
        "mode": cfg.mode,
        "t": t if math.isfinite(t) else "steady",
        "v_b": v_b.tolist(),
        "squeezed_axis_angle": principal_axis_angle(v_b),
        "grid_integral": grid.integral(),
    }
    return _table(("q", "p", "W"), rows), summary


def cmd_spectrum(cfg: RunConfig) -> tuple:
    p, f = cfg.params, cfg.floquet
    c = compute_couplings(p, f)
    rng = cfg.sweep_range or cfg.spectrum_range
    table = spectrum_table(c, p, rng.values(False))
    spec = integrate_spectrum(c, p, epsrel=cfg.quad_epsrel)
    summary = {"integral": spec.value, "error": spec.error, "window": spec.window}
    return _table(("omega", "S_Q"), zip(table.omegas, table.s_q)), summary


def cmd_classical(cfg: RunConfig) -> tuple:
    if cfg.drive is None:
        raise InvalidConfig("the classical command needs drive.* keys")
    p, d = cfg.params, cfg.drive
    traj = integrate_mean_field(p, d, cfg.t_end, cfg.dt)
    step = cfg.record_every
    rows = [
        (t, a.real, a.imag, b.real, b.imag)
        for t, a, b in zip(traj.times[::step], traj.alpha[::step], traj.beta[::step])
    ]
    summary = {"dt": float(traj.times[1] - traj.times[0]), "period": d.period}
    if traj.times[-1] >= 2 * d.period:
        rep = check_periodicity(traj, d.period, traj.times[-1] - 2 * d.period, 1e-3)
        summary["periodicity"] = {
            "alpha_drift": rep.alpha_drift,
            "beta_drift": rep.beta_drift,
            "passed": rep.passed,
        }
    return _table(("t", "alpha_re", "alpha_im", "beta_re", "beta_im"), rows), summary


def _axis(cfg: RunConfig, allowed: tuple, default: str) -> str:
    axis = cfg.sweep_axis or default
    if axis not in allowed:
        raise InvalidConfig(f"sweep axis must be one of {allowed}, got {axis!r}")
    return axis


def _result(sweep: SweepResult, extra: dict | None = None) -> tuple:
    summary = {"axis": sweep.axis, "points": len(sweep.rows), **sweep.meta}
    if extra:
        summary.update(extra)
    return sweep.to_csv(), summary


def cmd_sweep_ratio(cfg: RunConfig) -> tuple:
    _axis(cfg, ("b_sum",), "b_sum")
    rng = cfg.sweep_range or cfg.inner_range
    sweep = run_ratio_sweep(
        cfg.params, cfg.floquet, rng.values(cfg.log_axis), cfg.sideband_ratio, cfg.a2c_sign, cfg.workers, cfg.quad_epsrel
    )
    extra = {}
    try:
        extra["ratio_opt"], extra["v33_min"] = optimal_ratio(sweep)
    except NumericalError as exc:
        extra["ratio_opt"] = f"undefined ({exc})"
    return _result(sweep, extra)


def cmd_sweep_kappa(cfg: RunConfig) -> tuple:
    axis = _axis(cfg, ("kappa", "b_0"), "kappa")
    default = SweepRange(0.01, 2.0, 30) if axis == "kappa" else SweepRange(20.0, 200.0, 30)
    rng = cfg.sweep_range or default
    log = cfg.log_axis if cfg.sweep_range is not None else axis == "kappa"
    sweep = run_kappa_sweep(
        cfg.params,
        cfg.floquet,
        axis,
        rng.values(log),
        cfg.inner_range.values(False),
        cfg.sideband_ratio,
        cfg.a2c_sign,
        cfg.workers,
        cfg.quad_epsrel,
    )
    return _result(sweep)


def cmd_sweep_nb(cfg: RunConfig) -> tuple:
    _axis(cfg, ("n_b",), "n_b")
    rng = cfg.sweep_range or SweepRange(1.0, 1e4, 25)
    log = cfg.log_axis if cfg.sweep_range is not None else True
    sweep = run_robustness_sweep(
        cfg.params, cfg.floquet, rng.values(log), cfg.kappas, cfg.a2c_sign, cfg.workers, cfg.quad_epsrel
    )
    return _result(sweep)


HANDLERS = {
    "classical": cmd_classical,
    "evolve": cmd_evolve,
    "steady": cmd_steady,
    "wigner": cmd_wigner,
    "spectrum": cmd_spectrum,
    "stability": cmd_stability,
    "sweep-ratio": cmd_sweep_ratio,
    "sweep-kappa": cmd_sweep_kappa,
    "sweep-nb": cmd_sweep_nb,
}


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        started = time.perf_counter()
        table, summary = HANDLERS[args.command](cfg)
        elapsed = time.perf_counter() - started
    except ConfigError as exc:
        print(f"optosqueeze: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, OptoSqueezeError, np.linalg.LinAlgError) as exc:
        print(f"optosqueeze: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    summary = _jsonable(summary)
    if table is None:
        _write(args.out, json.dumps(summary, indent=2, default=_json_default) + "\n")
        return EXIT_OK
    _write(args.out, table)
    if args.out is not None:
        run = {
            "command": args.command,
            "config": to_flat(cfg),
            "versions": {
                "optosqueeze": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "elapsed_s": elapsed,
            "result": summary,
        }
        Path(args.out + ".json").write_text(json.dumps(run, indent=2, default=_json_default) + "\n", encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
