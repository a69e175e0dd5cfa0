"""Monte-Carlo experiment harness.

An :class:`ExperimentSpec` names one swept quantity (``k``, ``m``, ``snr``,
``sigma`` or ``mu``) and a grid of values.  For each grid point and trial a
fresh instance is drawn from a seed derived from the master seed, every
configured solver is run on it, and success is judged by the relative error
``||s_hat - s|| / ||s|| < tau_exact``.  A diverging solver counts as a
failure with infinite MSD.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .core import derive_seed, make_instance, msd, relative_error, sigma_for_snr
from .solvers import DivergenceError, SolverConfig, SolverKind, preset, run

SWEEP_VARS = ("k", "m", "snr", "sigma", "mu")
CSV_HEADER = [
    "solver", "sweep_var", "sweep_value", "trials",
    "success_prob", "mean_msd", "mean_iters", "mean_seconds",
]

#: Default success threshold on relative l2 error.
TAU_EXACT = 0.1

snr_to_sigma = sigma_for_snr


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    sweep_var: str
    grid: tuple
    solvers: dict = field(default_factory=dict)
    trials: int = 50
    n: int = 1000
    m: int = 200
    k: int = 30
    sigma: float = 0.0
    snr: float | None = None
    normalize: str = "peak"
    master_seed: int = 20100401
    tau_exact: float = TAU_EXACT
    record_timing: bool = True
    label_suffix: str = ""

    def __post_init__(self):
        if self.sweep_var not in SWEEP_VARS:
            raise ValueError(f"sweep_var must be one of {SWEEP_VARS}, got {self.sweep_var!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ValueError("grid must be nonempty")
        if list(grid) != sorted(grid):
            raise ValueError("grid must be sorted")
        object.__setattr__(self, "grid", grid)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.solvers:
            raise ValueError("at least one solver is required")
        if not self.tau_exact > 0:
            raise ValueError("tau_exact must be positive")


@dataclass(frozen=True)
class SweepRow:
    solver: str
    sweep_var: str
    sweep_value: float
    trials: int
    success_prob: float
    mean_msd: float
    mean_iters: float
    mean_seconds: float


@dataclass
class SweepResult:
    rows: list
    # (solver, point index) -> dict of per-trial arrays; empty when loaded from CSV
    per_trial: dict = field(default_factory=dict)

    def solvers(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.solver not in seen:
                seen.append(r.solver)
        return seen

    def series(self, solver: str, metric: str = "success_prob"):
        rows = [r for r in self.rows if r.solver == solver]
        return np.array([r.sweep_value for r in rows]), np.array([getattr(r, metric) for r in rows])

    def row(self, solver: str, value: float) -> SweepRow:
        for r in self.rows:
            if r.solver == solver and math.isclose(r.sweep_value, value, rel_tol=1e-12, abs_tol=1e-12):
                return r
        raise KeyError((solver, value))


def _default_solvers():
    return {k.value: preset(k) for k in (SolverKind.L0LMS, SolverKind.L0EFWLMS, SolverKind.L0ZAP)}


def experiment_preset(name: str, **overrides) -> ExperimentSpec:
    """Experiment definitions matching the reference study.

    ``exp1``  single point, N=1000, M=200, K=30, sigma=3.2e-3, 10 trials.
    ``exp2``  noiseless, K from 10 to 80.
    ``exp3``  noiseless, K=50, M from 140 to 320.
    ``exp4``  SNR from 4 to 32 dB.
    ``exp5``  l0-LMS with kappa=1e-6, mu from 0.3 to 1.1 at a given M.
    """
    if name == "exp1":
        base = dict(sweep_var="sigma", grid=(3.2e-3,), sigma=3.2e-3, trials=10)
    elif name == "exp2":
        base = dict(sweep_var="k", grid=tuple(range(10, 81, 5)))
    elif name == "exp3":
        base = dict(sweep_var="m", grid=tuple(range(140, 321, 20)), k=50)
    elif name == "exp4":
        base = dict(sweep_var="snr", grid=tuple(range(4, 33, 4)))
    elif name == "exp5":
        m = overrides.get("m", 200)
        base = dict(
            sweep_var="mu",
            grid=tuple(np.round(np.arange(0.3, 1.1001, 0.1), 10)),
            sigma=3.2e-3,
            solvers={"l0lms": preset(SolverKind.L0LMS, kappa=1e-6)},
            label_suffix=f"[M={m}]",
        )
    elif name == "custom":
        base = {}
    else:
        raise ValueError(f"unknown experiment {name!r}")
    base.setdefault("solvers", _default_solvers())
    base.update(overrides)
    return ExperimentSpec(experiment=name, **base)


def _point_params(spec: ExperimentSpec, value: float):
    params = dict(n=spec.n, m=spec.m, k=spec.k, sigma=spec.sigma, snr=spec.snr)
    if spec.sweep_var in ("k", "m"):
        params[spec.sweep_var] = int(round(value))
    elif spec.sweep_var in ("snr", "sigma"):
        params[spec.sweep_var] = value
    return params


def _solvers_at(spec: ExperimentSpec, value: float):
    if spec.sweep_var == "mu":
        return {name: cfg.with_(mu=value) for name, cfg in spec.solvers.items()}
    return spec.solvers


def _trial_seed(spec: ExperimentSpec, point: int, trial: int) -> int:
    # step-size sweeps reuse the same instances at every grid point
    if spec.sweep_var == "mu":
        return derive_seed(spec.master_seed, trial)
    return derive_seed(spec.master_seed, point, trial)


def run_trial(spec: ExperimentSpec, point: int, trial: int) -> dict:
    """Run every solver on one instance.

    Returns ``{solver: (success, msd, iters, seconds, relative_error)}``.
    """
    value = spec.grid[point]
    p = _point_params(spec, value)
    problem = make_instance(
        p["m"], p["n"], p["k"], sigma=p["sigma"], seed=_trial_seed(spec, point, trial),
        normalize=spec.normalize, snr=p["snr"],
    )
    out = {}
    for name, cfg in _solvers_at(spec, value).items():
        try:
            report = run(problem, cfg)
        except DivergenceError as exc:
            out[name] = (False, math.inf, exc.iteration, math.nan, math.inf)
            continue
        err = relative_error(report.final_estimate, problem.truth.values)
        out[name] = (
            bool(err < spec.tau_exact),
            msd(report.final_estimate, problem.truth.values),
            report.iterations,
            report.elapsed if spec.record_timing else math.nan,
            err,
        )
    return out


def _run_task(args):
    spec, point, trial = args
    return point, trial, run_trial(spec, point, trial)


def run_experiment(spec: ExperimentSpec, workers: int = 1, progress=None) -> SweepResult:
    """Run all grid points and trials of ``spec``.

    Trials may be spread over ``workers`` processes; results are reduced in
    (point, trial) order, so the outcome does not depend on scheduling.
    ``progress``, if given, is called as ``progress(done, total)``.
    """
    _kernels.warm_up()
    tasks = [(spec, p, t) for p in range(len(spec.grid)) for t in range(spec.trials)]
    results = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, (p, t, out) in enumerate(pool.map(_run_task, tasks, chunksize=1)):
                results[p, t] = out
                if progress:
                    progress(i + 1, len(tasks))
    else:
        for i, task in enumerate(tasks):
            p, t, out = _run_task(task)
            results[p, t] = out
            if progress:
                progress(i + 1, len(tasks))

    rows = []
    per_trial = {}
    for name in spec.solvers:
        label = name + spec.label_suffix
        for p, value in enumerate(spec.grid):
            outcomes = [results[p, t][name] for t in range(spec.trials)]
            success = np.array([o[0] for o in outcomes], dtype=bool)
            msds = np.array([o[1] for o in outcomes], dtype=float)
            iters = np.array([o[2] for o in outcomes], dtype=float)
            secs = np.array([o[3] for o in outcomes], dtype=float)
            errs = np.array([o[4] for o in outcomes], dtype=float)
            per_trial[label, p] = dict(
                success=success, msd=msds, iterations=iters, seconds=secs, relative_error=errs
            )
            rows.append(SweepRow(
                solver=label,
                sweep_var=spec.sweep_var,
                sweep_value=value,
                trials=spec.trials,
                success_prob=float(success.mean()),
                mean_msd=float(msds.mean()),
                mean_iters=float(iters.mean()),
                mean_seconds=float(secs.mean()) if spec.record_timing else math.nan,
            ))
    return SweepResult(rows, per_trial)


def merge_results(*results: SweepResult) -> SweepResult:
    rows = []
    per_trial = {}
    for r in results:
        rows.extend(r.rows)
        per_trial.update(r.per_trial)
    return SweepResult(rows, per_trial)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_results(result: SweepResult, path) -> Path:
    """Write one CSV row per (solver, grid point)."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in result.rows:
                w.writerow([
                    r.solver, r.sweep_var, _fmt(r.sweep_value), r.trials,
                    _fmt(r.success_prob), _fmt(r.mean_msd), _fmt(r.mean_iters), _fmt(r.mean_seconds),
                ])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_results(path) -> SweepResult:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            rows = [
                SweepRow(s, v, float(x), int(t), float(p), float(ms), float(it), float(sec))
                for s, v, x, t, p, ms, it, sec in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    return SweepResult(rows)


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def emit_plot(result: SweepResult, path, metric: str | None = None, title: str = "") -> Path:
    """Render a sweep as a standalone SVG line chart.

    ``metric`` is ``"success_prob"`` (default for k/m/mu sweeps) or
    ``"mean_msd"`` (default for snr/sigma sweeps, drawn on a log axis).
    """
    if not result.rows:
        raise ValueError("nothing to plot")
    sweep_var = result.rows[0].sweep_var
    if metric is None:
        metric = "mean_msd" if sweep_var in ("snr", "sigma") else "success_prob"
    log_y = metric == "mean_msd"

    series = []
    for name in result.solvers():
        x, y = result.series(name, metric)
        keep = np.isfinite(y) & ((y > 0) if log_y else True)
        series.append((name, x[keep], y[keep]))
    xs = np.concatenate([s[1] for s in series]) if series else np.array([])
    ys = np.concatenate([s[2] for s in series]) if series else np.array([])
    if xs.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([1.0, 1.0])

    width, height = 640, 420
    left, right, top, bottom = 70, 160, 40, 55
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(xs.min()), float(xs.max())
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if log_y:
        y0 = math.floor(math.log10(ys.min()))
        y1 = math.ceil(math.log10(ys.max()))
        if y0 == y1:
            y1 += 1
        yticks = list(range(y0, y1 + 1))
        ty = lambda v: top + ph * (1 - (math.log10(v) - y0) / (y1 - y0))  # noqa: E731
        ylabels = [(top + ph * (1 - (t - y0) / (y1 - y0)), f"1e{t}") for t in yticks]
    else:
        y0, y1 = (0.0, 1.0) if metric == "success_prob" else (float(ys.min()), float(ys.max()) or 1.0)
        if y0 == y1:
            y1 = y0 + 1
        ty = lambda v: top + ph * (1 - (v - y0) / (y1 - y0))  # noqa: E731
        ylabels = [(ty(t), f"{t:g}") for t in _nice_ticks(y0, y1)]
    tx = lambda v: left + pw * (v - x0) / (x1 - x0)  # noqa: E731

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>')
    for t in _nice_ticks(x0, x1):
        px = tx(t)
        out.append(f'<line x1="{px:.1f}" y1="{top + ph}" x2="{px:.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.1f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for py, label in ylabels:
        out.append(f'<line x1="{left - 5}" y1="{py:.1f}" x2="{left}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{py:.1f}" x2="{left + pw}" y2="{py:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.1f}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{sweep_var}</text>')
    ylab = "mean MSD" if log_y else metric.replace("_", " ")
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">{ylab}</text>'
    )
    for i, (name, x, y) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{tx(a):.2f},{ty(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        for a, b in zip(x, y):
            out.append(f'<circle cx="{tx(a):.2f}" cy="{ty(b):.2f}" r="3" fill="{color}"/>')
        ly = top + 10 + 20 * i
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    path = Path(path)
    try:
        path.write_text("\n".join(out) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    return path
