import math

import numpy as np
import pytest

from l0cs.bench import (
    CSV_HEADER,
    ExperimentSpec,
    SweepResult,
    SweepRow,
    _trial_seed,
    emit_plot,
    experiment_preset,
    merge_results,
    read_results,
    run_experiment,
    run_trial,
    snr_to_sigma,
    write_results,
)
from l0cs.solvers import preset

SMALL = dict(n=100, m=40, k=5)


def _small_spec(**kw):
    base = dict(SMALL, trials=3, record_timing=False, master_seed=7)
    base.update(kw)
    return experiment_preset("exp1", **base)


def test_snr_to_sigma_unit_case():
    A = np.eye(4)
    s = np.ones(4)  # ||A s||^2 = M
    assert snr_to_sigma(0.0, A, s) == pytest.approx(1.0)
    assert snr_to_sigma(400.0, A, s) < 1e-15


def test_presets_grids():
    assert experiment_preset("exp2").grid == tuple(float(v) for v in range(10, 81, 5))
    e3 = experiment_preset("exp3")
    assert e3.grid[0] == 140 and e3.grid[-1] == 320 and e3.k == 50
    e4 = experiment_preset("exp4")
    assert e4.grid[0] == 4 and e4.grid[-1] == 32 and e4.sweep_var == "snr"
    e5 = experiment_preset("exp5", m=300)
    assert e5.grid[0] == pytest.approx(0.3) and e5.grid[-1] == pytest.approx(1.1)
    assert list(e5.solvers) == ["l0lms"] and e5.solvers["l0lms"].attractor.kappa == 1e-6
    assert e5.label_suffix == "[M=300]"
    e1 = experiment_preset("exp1")
    assert (e1.n, e1.m, e1.k, e1.sigma, e1.trials) == (1000, 200, 30, 3.2e-3, 10)
    assert set(e1.solvers) == {"l0lms", "l0efwlms", "l0zap"}
    with pytest.raises(ValueError):
        experiment_preset("exp9")


def test_spec_validation():
    ok = dict(experiment="custom", sweep_var="k", grid=(5,), solvers={"l0lms": preset("l0lms")})
    ExperimentSpec(**ok)
    with pytest.raises(ValueError):
        ExperimentSpec(**{**ok, "grid": ()})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**ok, "grid": (10, 5)})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**ok, "trials": 0})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**ok, "sweep_var": "alpha"})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**ok, "solvers": {}})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**ok, "tau_exact": 0.0})


def test_smoke_single_row():
    solvers = {name: preset(name, epsilon=1e3) for name in ("l0lms", "l0efwlms", "l0zap")}
    spec = _small_spec(trials=1, solvers=solvers)
    result = run_experiment(spec)
    assert len(result.rows) == 3
    for row in result.rows:
        assert row.trials == 1 and row.mean_iters == 1.0
        assert 0.0 <= row.success_prob <= 1.0
        assert math.isnan(row.mean_seconds)


def test_timing_recorded_when_enabled():
    result = run_experiment(_small_spec(trials=1, record_timing=True))
    assert all(r.mean_seconds > 0 for r in result.rows)


def test_round_trip(tmp_path):
    result = run_experiment(_small_spec(record_timing=True))
    path = write_results(result, tmp_path / "exp1.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 3
    back = read_results(path)
    for a, b in zip(result.rows, back.rows):
        assert (a.solver, a.sweep_var, a.trials) == (b.solver, b.sweep_var, b.trials)
        for field in ("sweep_value", "success_prob", "mean_msd", "mean_iters", "mean_seconds"):
            x, y = getattr(a, field), getattr(b, field)
            assert y == pytest.approx(x, rel=1e-6)


def test_read_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n")
    with pytest.raises(ValueError):
        read_results(p)
    with pytest.raises(OSError):
        read_results(tmp_path / "missing.csv")
    with pytest.raises(OSError):
        write_results(SweepResult([]), tmp_path / "no" / "such" / "dir.csv")


def test_byte_identical_csv(tmp_path):
    spec = experiment_preset("exp2", grid=(5, 15), **SMALL, trials=3, record_timing=False, master_seed=99)
    a = write_results(run_experiment(spec), tmp_path / "a.csv").read_bytes()
    b = write_results(run_experiment(spec), tmp_path / "b.csv").read_bytes()
    c = write_results(run_experiment(spec, workers=2), tmp_path / "c.csv").read_bytes()
    assert a == b == c


def test_trial_seeds_distinct():
    spec = experiment_preset("exp2", trials=1000)
    seeds = {_trial_seed(spec, p, t) for p in range(len(spec.grid)) for t in range(1000)}
    assert len(seeds) == len(spec.grid) * 1000
    # step-size sweeps share instances across grid points
    e5 = experiment_preset("exp5")
    assert _trial_seed(e5, 0, 4) == _trial_seed(e5, 3, 4)


def test_divergence_counts_as_failure():
    spec = experiment_preset("exp5", grid=(5.0,), trials=2, **SMALL)
    out = run_trial(spec, 0, 0)
    success, msd_val, iters, secs, err = out["l0lms"]
    assert success is False and math.isinf(msd_val) and math.isinf(err) and iters >= 1
    result = run_experiment(spec)
    assert result.rows[0].success_prob == 0.0 and math.isinf(result.rows[0].mean_msd)


def test_exp5_collapses_between_03_and_05():
    spec = experiment_preset("exp5", grid=(0.3, 0.5), trials=20, m=200)
    result = run_experiment(spec)
    lo, hi = result.rows[0].success_prob, result.rows[1].success_prob
    assert hi <= 0.1
    assert lo - hi >= 0.5


def test_merge_results():
    a = SweepResult([SweepRow("x", "k", 1.0, 1, 1.0, 0.0, 1.0, 0.0)])
    b = SweepResult([SweepRow("y", "k", 1.0, 1, 0.0, 0.0, 1.0, 0.0)])
    assert [r.solver for r in merge_results(a, b).rows] == ["x", "y"]
    assert merge_results(a, b).solvers() == ["x", "y"]


def _rows(name, var, xs, ys, metric="success_prob"):
    rows = []
    for x, y in zip(xs, ys):
        vals = dict(success_prob=0.5, mean_msd=1e-3)
        vals[metric] = y
        rows.append(SweepRow(name, var, x, 10, vals["success_prob"], vals["mean_msd"], 100.0, 0.1))
    return rows


def test_plot_single_series(tmp_path):
    res = SweepResult(_rows("l0lms", "k", [10, 20], [1.0, 0.0]))
    svg = emit_plot(res, tmp_path / "p.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 1
    assert "l0lms" in svg and "success prob" in svg


def test_plot_log_msd(tmp_path):
    rows = _rows("a", "snr", [8, 16, 24], [1e-2, 1e-3, 1e-4], "mean_msd") + _rows(
        "b", "snr", [8, 16, 24], [2e-2, 2e-3, 2e-4], "mean_msd"
    )
    svg = emit_plot(SweepResult(rows), tmp_path / "m.svg").read_text()
    assert svg.count("<polyline") == 2
    assert "1e-4" in svg and "1e-2" in svg and "mean MSD" in svg
    # decreasing MSD draws as rising pixel y
    pts = svg.split('points="')[1].split('"')[0].split()
    ys = [float(p.split(",")[1]) for p in pts]
    assert ys == sorted(ys)


def test_plot_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_plot(SweepResult([]), tmp_path / "e.svg")
