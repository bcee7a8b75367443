"""Parameter sweeps over the rotating-frame steady state.

Every point recomputes the couplings from the sideband amplitudes and
evaluates the exact (Lyapunov), adiabatic and spectral variances together
with the Bogoliubov occupancy and the log-negativity. Points where a
method does not apply carry an explicit marker instead of a number.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .analysis import logarithmic_negativity, mechanical_block
from .bogoliubov import adiabatic_variance, bogoliubov_occupancy
from .covariance import drift_rwa, noise_matrix, routh_hurwitz, steady_state_covariance
from .errors import InvalidConfig, NoStablePoints, NumericalError
from .params import FloquetAmplitudes, SystemParams, compute_couplings
from .spectral import integrate_spectrum

UNSTABLE = "unstable"
UNDEFINED = "undefined"

POINT_COLUMNS = (
    "ratio",
    "v33_lyapunov",
    "v33_adiabatic",
    "v33_spectral",
    "occupancy",
    "e_n",
    "stable",
)


@dataclass
class SweepResult:
    axis: str
    columns: Sequence[str]
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]

    def numeric(self, name: str) -> np.ndarray:
        """Column as floats with markers mapped to NaN."""
        return np.array([v if isinstance(v, (int, float)) and not isinstance(v, bool) else math.nan for v in self.column(name)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(format_cell(row[c]) for c in self.columns) + "\n")
        return buf.getvalue()


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def evaluate_point(p: SystemParams, f: FloquetAmplitudes, a2c_sign: str = "printed", epsrel: float = 1e-10) -> dict:
    """All per-point observables of the rotating-frame model."""
    c = compute_couplings(p, f)
    row = {"G0": c.G0, "G1": c.G1, "ratio": c.ratio}
    report = routh_hurwitz(c, p)
    row["stable"] = report.stable
    if not report.stable:
        for name in ("v33_lyapunov", "v33_adiabatic", "v33_spectral", "occupancy", "e_n"):
            row[name] = UNSTABLE
        return row
    try:
        v = steady_state_covariance(drift_rwa(c, p), noise_matrix(p))
    except NumericalError:
        row["stable"] = False
        for name in ("v33_lyapunov", "v33_adiabatic", "v33_spectral", "occupancy", "e_n"):
            row[name] = UNSTABLE
        return row
    row["v33_lyapunov"] = v.v33
    row["v33_adiabatic"] = _guard(lambda: adiabatic_variance(c, p, a2c_sign))
    row["v33_spectral"] = _guard(lambda: integrate_spectrum(c, p, epsrel=epsrel).value)
    row["occupancy"] = _guard(lambda: bogoliubov_occupancy(mechanical_block(v), c.r) if c.defined else UNDEFINED)
    row["e_n"] = _guard(lambda: logarithmic_negativity(v).e_n)
    return row


def _guard(fn: Callable):
    try:
        out = fn()
    except NumericalError:
        return UNDEFINED
    if isinstance(out, float) and not math.isfinite(out):
        return UNDEFINED
    return out


def _point_job(args):
    return evaluate_point(*args)


def _run_jobs(jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) < 2:
        return [_point_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order
        return list(pool.map(_point_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def run_ratio_sweep(
    p: SystemParams,
    f: FloquetAmplitudes,
    b_sums: Sequence[float] = tuple(np.linspace(0.0, 600.0, 200)),
    sideband_ratio: float = 2.5,
    a2c_sign: str = "printed",
    workers: int = 1,
    epsrel: float = 1e-10,
) -> SweepResult:
    """Vary ``b_m1 + b_1`` at fixed ``b_1 / b_m1``, which moves ``G1/G0`` through physically consistent couplings."""
    jobs = [(p, f.with_mechanical_sum(float(s), sideband_ratio), a2c_sign, epsrel) for s in b_sums]
    rows = _run_jobs(jobs, workers)
    for s, row in zip(b_sums, rows):
        row["b_sum"] = float(s)
    return SweepResult("b_sum", ("b_sum",) + POINT_COLUMNS, rows, {"sideband_ratio": sideband_ratio})


def _parabola_vertex(x, y):
    (x0, x1, x2), (y0, y1, y2) = x, y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom
    if a <= 0:
        return None
    xv = -b / (2 * a)
    return xv, c - b * b / (4 * a)


def optimal_ratio(sweep: SweepResult, axis: str = "ratio", value: str = "v33_lyapunov") -> tuple:
    """Smallest exact variance over the stable points, refined by a parabola through its neighbours."""
    x = sweep.numeric(axis)
    y = sweep.numeric(value)
    ok = np.isfinite(x) & np.isfinite(y)
    if ok.sum() < 3:
        raise NoStablePoints("need at least three stable points to locate an optimum")
    xs, ys = x[ok], y[ok]
    k = int(np.argmin(ys))
    if 0 < k < len(xs) - 1:
        vertex = _parabola_vertex(xs[k - 1 : k + 2], ys[k - 1 : k + 2])
        lo, hi = sorted((xs[k - 1], xs[k + 1]))
        if vertex is not None and lo <= vertex[0] <= hi:
            return float(vertex[0]), float(min(vertex[1], ys[k]))
    return float(xs[k]), float(ys[k])


def run_kappa_sweep(
    p: SystemParams,
    f: FloquetAmplitudes,
    axis: str,
    values: Sequence[float],
    b_sums: Sequence[float] = tuple(np.linspace(0.0, 600.0, 200)),
    sideband_ratio: float = 2.5,
    a2c_sign: str = "printed",
    workers: int = 1,
    epsrel: float = 1e-10,
) -> SweepResult:
    """Optimal sideband ratio and minimum variance along ``kappa`` or ``b_0``.

    ``axis="b_0"`` moves ``G0`` through the static mechanical amplitude and
    reports ``G0`` alongside.
    """
    if axis not in ("kappa", "b_0"):
        raise InvalidConfig("kappa sweeps run along 'kappa' or 'b_0'")
    rows = []
    for val in values:
        pp, ff = (p.with_(kappa=float(val)), f) if axis == "kappa" else (p, f.with_(b_0=float(val)))
        inner = run_ratio_sweep(pp, ff, b_sums, sideband_ratio, a2c_sign, workers, epsrel)
        row = {axis: float(val), "G0_base": compute_couplings(pp, ff.with_mechanical_sum(0.0, sideband_ratio)).G0}
        try:
            row["ratio_opt"], row["v33_min"] = optimal_ratio(inner)
        except NoStablePoints:
            row["ratio_opt"] = row["v33_min"] = UNSTABLE
        rows.append(row)
    return SweepResult(axis, (axis, "G0_base", "ratio_opt", "v33_min"), rows, {"sideband_ratio": sideband_ratio})


def run_robustness_sweep(
    p: SystemParams,
    f: FloquetAmplitudes,
    n_bs: Sequence[float] = tuple(np.geomspace(1.0, 1e4, 25)),
    kappas: Sequence[float] = (0.1, 1.0),
    a2c_sign: str = "printed",
    workers: int = 1,
    epsrel: float = 1e-10,
) -> SweepResult:
    """Steady-state observables against the mechanical bath occupancy, for each cavity linewidth."""
    jobs, keys = [], []
    for k in kappas:
        for nb in n_bs:
            jobs.append((replace(p, kappa=float(k), n_b=float(nb)), f, a2c_sign, epsrel))
            keys.append((float(k), float(nb)))
    rows = _run_jobs(jobs, workers)
    for (k, nb), row in zip(keys, rows):
        row["kappa"], row["n_b"] = k, nb
    return SweepResult("n_b", ("kappa", "n_b") + POINT_COLUMNS, rows, {"kappas": list(kappas)})


def contiguous_band(mask: Sequence[bool]) -> Optional[tuple]:
    """``(start, stop)`` of the longest run of True values, or None."""
    best, start = None, None
    for i, m in enumerate(list(mask) + [False]):
        if m and start is None:
            start = i
        elif not m and start is not None:
            if best is None or i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best
