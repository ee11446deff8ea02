"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``conftest.ACCEPTANCE_LINES`` and shown in the
terminal summary. Criteria are checked at their stated tolerances.
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, random_density, random_hermitian
from lambda_qb import cli
from lambda_qb.bath import (BathSpec, JumpChannel, default_grid, enumerate_channels, rate_surface,
                            redfield_rate, spectral_density)
from lambda_qb.dynamics import IntegratorConfig, evolve
from lambda_qb.energetics import ergotropy
from lambda_qb.linalg import propagator
from lambda_qb.model import DriveWaveform, SystemSpec, gibbs_state, initial_state
from lambda_qb.presets import PRESETS, get_preset
from lambda_qb.runner import read_summary, read_trajectory, run_preset, sweep_filename

SWEEP_PRESETS = sorted(n for n, p in PRESETS.items() if p.param is not None)


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="session")
def preset_runs(tmp_path_factory):
    """Every sweep preset run once; {name: (directory, seconds)}."""
    root = tmp_path_factory.mktemp("presets")
    out = {}
    for name in SWEEP_PRESETS:
        start = time.perf_counter()
        run_preset(name, root / name)
        out[name] = (root / name, time.perf_counter() - start)
    return out


def sweep_series(preset_runs, name):
    """{value: (t, ergotropy)} for one preset."""
    directory, _ = preset_runs[name]
    p = get_preset(name)
    series = {}
    for v in p.values:
        records, _ = read_trajectory(directory / sweep_filename(p.param, v))
        series[v] = (np.array([r.t for r in records]), np.array([r.ergotropy for r in records]))
    return series


def summary_column(preset_runs, name, column):
    rows = read_summary(preset_runs[name][0] / "summary.csv")
    return [float(r[column]) for r in rows]


def test_criterion_1_closed_system():
    start = time.perf_counter()
    v = 1.5
    spec = SystemSpec(n=4, delta_e=1.5, drives={j: DriveWaveform("constant", v, tau=1e9) for j in (2, 3, 4)})
    h = np.diag(spec.energies).astype(complex)
    h[0, 1:] = h[1:, 0] = v
    norm = np.linalg.norm(h, 2)
    t_end = 10.0 / spec.delta_e
    rng = np.random.default_rng(1)
    rho0 = random_density(rng, 4, rank=1)
    cfg = IntegratorConfig(dt=1e-3 / norm, t_end=t_end, record_every=100)
    traj = evolve(rho0, spec, BathSpec(gamma=0.0), cfg)
    err = max(float(np.max(np.abs(rho - propagator(h, t) @ rho0 @ propagator(h, t).conj().T)))
              for t, rho in zip(traj.times, traj.states))
    purity = max(abs(r.purity - 1.0) for r in traj.records)
    elapsed = time.perf_counter() - start
    ok = err <= 1e-8 and purity <= 1e-8 and elapsed < 5
    report(1, "closed-system oracle", ok,
           f"max entry error {err:.2e}, purity drift {purity:.2e}, {elapsed:.2f} s")


def test_criterion_2_rate_equation():
    start = time.perf_counter()
    spec = SystemSpec.uniform(4, 1.5, amplitude=0.0)
    rate = 0.5
    cfg = IntegratorConfig(dt=1e-3, t_end=5.0, record_every=50)
    traj = evolve(initial_state(spec, "pure-level", level=1), spec, None, cfg,
                  channels=[JumpChannel(0, 1, 1.5, rate)])
    t = np.array(traj.times[1:101])
    p1 = np.array([r.populations[0] for r in traj.records[1:101]])
    err = float(np.max(np.abs(p1 - np.exp(-2 * rate * t))))
    elapsed = time.perf_counter() - start
    ok = len(t) == 100 and err <= 1e-6 and elapsed < 1
    report(2, "rate-equation oracle", ok, f"{len(t)} samples, max error {err:.2e}, {elapsed:.2f} s")


def test_criterion_3_detailed_balance_and_gibbs():
    start = time.perf_counter()
    worst_ratio = 0.0
    for bath in (BathSpec(gamma=2.6e-7, omega0=0.1, temperature=300.0),
                 BathSpec(gamma=1.0, omega0=1.0, temperature=1.0)):
        beta = bath.hbar / (bath.k_b * bath.temperature)
        for w in np.geomspace(1e-6, 20.0, 60) * bath.omega0:
            ratio = redfield_rate(bath, w) / redfield_rate(bath, -w)
            worst_ratio = max(worst_ratio, abs(ratio / math.exp(beta * w) - 1))

    bath = BathSpec(gamma=1.0, omega0=1.0, temperature=1.0)
    spec = SystemSpec.uniform(4, 1.5, amplitude=0.0)
    channels = enumerate_channels(spec, bath)
    t_end = 50.0 / min(c.rate for c in channels)
    cfg = IntegratorConfig(dt=0.05, t_end=t_end, record_every=10**7)
    traj = evolve(initial_state(spec, "pure-level", level=1), spec, bath, cfg,
                  channels=channels, keep_states=False)
    target = np.diag(gibbs_state(np.diag(spec.energies), bath.temperature)).real
    gibbs_err = float(np.max(np.abs(np.array(traj.records[-1].populations) / target - 1)))
    elapsed = time.perf_counter() - start
    ok = worst_ratio <= 1e-9 and gibbs_err <= 1e-5 and elapsed < 10
    report(3, "detailed balance and Gibbs stationarity", ok,
           f"ratio error {worst_ratio:.1e}, Gibbs relative error {gibbs_err:.1e} at t={t_end:.0f}, {elapsed:.2f} s")


def test_criterion_4_ergotropy_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    perms = [list(p) for p in itertools.permutations(range(4))]
    worst, most_negative, gibbs_worst = 0.0, 0.0, 0.0
    for _ in range(1000):
        rho = random_density(rng, 4, rank=int(rng.integers(1, 5)))
        h = random_hermitian(rng, 4)
        w = ergotropy(rho, h)
        r = np.linalg.eigvals(rho).real
        e = np.linalg.eigvals(h).real
        brute = np.trace(h @ rho).real - min(float(np.dot(r, e[p])) for p in perms)
        worst = max(worst, abs(w - brute))
        most_negative = min(most_negative, w)
        gibbs_worst = max(gibbs_worst, abs(ergotropy(gibbs_state(h, float(rng.uniform(0.05, 5))), h)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and gibbs_worst <= 1e-10 and most_negative >= -1e-10 and elapsed < 10
    report(4, "ergotropy oracle", ok,
           f"max discrepancy {worst:.1e}, Gibbs ergotropy {gibbs_worst:.1e}, min {most_negative:.1e}, {elapsed:.2f} s")


@pytest.mark.slow
def test_criterion_5_trace_enforcement(preset_runs):
    worst_drift, worst_trace = 0.0, 0.0
    for name in SWEEP_PRESETS:
        worst_drift = max(worst_drift, *summary_column(preset_runs, name, "max_raw_trace_drift"))
        worst_trace = max(worst_trace, *summary_column(preset_runs, name, "max_trace_err"))
    ok = worst_drift <= 1e-10 and worst_trace <= 1e-9
    report(5, "trace and Hermiticity enforcement", ok,
           f"{len(SWEEP_PRESETS)} presets, raw drift {worst_drift:.1e}, recorded |Tr-1| {worst_trace:.1e}")


def test_criterion_6_spectral_density():
    lor = BathSpec(gamma=2.6e-4, omega0=0.05, temperature=300.0)
    grid = np.linspace(lor.omega0 / 100, 10 * lor.omega0, 4001)
    step = grid[1] - grid[0]
    j = spectral_density(lor, grid)
    lor_ok = abs(grid[np.argmax(j)] - lor.omega0) <= step and abs(j.max() / (lor.gamma / (2 * lor.omega0)) - 1) < 1e-6

    exp = BathSpec("debye-exponential", gamma=2.6e-4, omega0=0.05, temperature=300.0)
    je = spectral_density(exp, grid)
    exp_ok = abs(grid[np.argmax(je)] - exp.omega0) <= step and abs(je.max() / (exp.gamma / math.e) - 1) < 1e-6

    # numerical small-frequency limit: two-sided mean, Richardson extrapolated
    ws = np.array([2e-3, 1e-3]) * lor.omega0
    means = [0.5 * (redfield_rate(lor, w) + redfield_rate(lor, -w)) for w in ws]
    limit = (4 * means[1] - means[0]) / 3
    r0 = 2 * lor.gamma * lor.k_b * lor.temperature / (lor.hbar * lor.omega0**2)
    r0_err = abs(limit / r0 - 1)

    rows = rate_surface(lor, default_grid(lor))
    stronger = rate_surface(BathSpec(gamma=5.2e-4, omega0=0.05, temperature=300.0), default_grid(lor))
    surface_ok = all(np.isfinite([r.J, r.R]).all() for r in rows) and all(
        s.R > r.R for r, s in zip(rows, stronger))
    ok = lor_ok and exp_ok and r0_err <= 1e-6 and surface_ok
    report(6, "spectral-density checks", ok,
           f"lorentzian peak {lor_ok}, exponential peak {exp_ok}, R(0) rel error {r0_err:.1e}, surface {surface_ok}")


@pytest.mark.slow
def test_criterion_7_fig3a_trend(preset_runs):
    t_stable = summary_column(preset_runs, "fig3a", "t_stable")
    elapsed = preset_runs["fig3a"][1]
    decreasing = all(b < a for a, b in zip(t_stable, t_stable[1:]))
    reduction = 1 - t_stable[-1] / t_stable[0]
    ok = decreasing and elapsed < 60
    report(7, "fig3a plateau time decreasing in Omega", ok,
           "t_stable " + ", ".join(f"{t:.4g}" for t in t_stable)
           + f"; reduction {reduction:.0%} (target >= 20%, informational); {elapsed:.1f} s")


@pytest.mark.slow
def test_criterion_8_fig3d_trend(preset_runs):
    series = sweep_series(preset_runs, "fig3d")

    def late(v):
        t, e = series[v]
        tail = e[t >= t[-1] - 0.25 * (t[-1] - t[0])]
        return float(tail.mean()), float(tail.max() - tail.min())

    mean_lo, amp_lo = late("0.03")
    mean_hi, amp_hi = late("0.08")
    ok = mean_hi < mean_lo and amp_lo > amp_hi
    report(8, "fig3d tunnelling damps oscillation", ok,
           f"late mean 0.03: {mean_lo:.6g}, 0.08: {mean_hi:.6g}; amplitude 0.03: {amp_lo:.6g}, 0.08: {amp_hi:.6g}")


@pytest.mark.slow
def test_criterion_9_fig4_trends(preset_runs):
    peaks_g = summary_column(preset_runs, "fig4c", "peak_ergotropy")
    gamma_ok = all(b <= a for a, b in zip(peaks_g, peaks_g[1:]))

    values = get_preset("fig4d").values
    peaks_t = dict(zip(values, summary_column(preset_runs, "fig4d", "peak_ergotropy")))
    cold = [peaks_t[v] for v in values if float(v) <= 100]
    spread = (max(cold) - min(cold)) / max(cold)
    hot_ok = peaks_t["300"] < min(cold)
    ok = gamma_ok and spread < 0.05 and hot_ok
    report(9, "fig4c/fig4d trends", ok,
           "gamma peaks " + ", ".join(f"{p:.4g}" for p in peaks_g)
           + f"; T<=100 spread {spread:.1%}; T=300 peak {peaks_t['300']:.4g} vs min cold {min(cold):.4g}")


@pytest.mark.slow
def test_criterion_10_determinism(tmp_path):
    for run in ("a", "b"):
        assert cli.main(["preset", "--name", "fig3a", "--out", str(tmp_path / run)]) == 0
    files = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    same = [(tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files]
    ok = len(files) == 7 and all(same)
    report(10, "determinism", ok, f"{sum(same)}/{len(files)} CSV files byte-identical")
