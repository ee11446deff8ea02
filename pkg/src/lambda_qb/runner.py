"""Single runs, parameter sweeps and their CSV output."""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bath import (default_grid, enumerate_channels, rate_surface, redfield_rate,
                   spectral_density, write_spectrum_csv)
from .config import RunConfig, build_config, parse_config, render_config
from .dynamics import Trajectory, evolve
from .energetics import EnergyRecord
from .model import initial_state
from .presets import get_preset

log = logging.getLogger(__name__)

PLATEAU_BAND = 0.05
FLOAT_FMT = "{:.12g}"


def initial_density(cfg: RunConfig) -> np.ndarray:
    return initial_state(cfg.system, cfg.initial_state, level=cfg.initial_level,
                         temperature=cfg.initial_temperature, k_b=cfg.bath.k_b)


def simulate(cfg: RunConfig, keep_states: bool = False) -> Trajectory:
    channels = enumerate_channels(cfg.system, cfg.bath, rate_floor=cfg.rate_floor)
    return evolve(initial_density(cfg), cfg.system, cfg.bath, cfg.integrator,
                  channels=channels, keep_states=keep_states)


# -- trajectory CSV -------------------------------------------------------

def trajectory_header(n: int) -> list[str]:
    return ["t", "E", "ergotropy", "trace_err", "purity", "min_eig", "coh_l1"] + [
        f"p{k}" for k in range(1, n + 1)]


def emit_trajectory(traj: Trajectory, path) -> None:
    if not traj.records:
        raise ValueError("trajectory has no records")
    n = len(traj.records[0].populations)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trajectory_header(n))
        for r in traj.records:
            row = [r.t, r.energy, r.ergotropy, r.trace_err, r.purity, r.min_eig, r.coherence_l1,
                   *r.populations]
            writer.writerow([FLOAT_FMT.format(x) for x in row])
        for w in traj.warnings:
            fh.write(f"# warning: {w}\n")


def read_trajectory(path) -> tuple[list[EnergyRecord], list[str]]:
    """Parse a trajectory CSV back into records plus any trailing warnings."""
    records, warnings = [], []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            warnings.append(line.lstrip("# ").removeprefix("warning: "))
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    n = len(header) - 7
    for row in reader:
        v = [float(x) for x in row]
        records.append(EnergyRecord(v[0], v[1], v[2], v[3], v[4], v[5], v[6], tuple(v[7:7 + n])))
    return records, warnings


# -- summary metrics ------------------------------------------------------

def plateau_time(times: Sequence[float], ergotropy: Sequence[float], band: float = PLATEAU_BAND) -> float:
    """Earliest t after which ergotropy stays within band * max of its final value."""
    e = np.asarray(ergotropy, dtype=float)
    t = np.asarray(times, dtype=float)
    tol = band * e.max()
    outside = np.nonzero(np.abs(e - e[-1]) > tol)[0]
    if outside.size == 0:
        return float(t[0])
    return float(t[outside[-1] + 1])


@dataclass
class RunSummary:
    param: str
    value: str
    peak_ergotropy: float = float("nan")
    t_peak: float = float("nan")
    t_stable: float = float("nan")
    final_ergotropy: float = float("nan")
    final_energy: float = float("nan")
    max_raw_trace_drift: float = float("nan")
    max_trace_err: float = float("nan")
    min_eig: float = float("nan")
    J_eval: float = float("nan")
    R_eval: float = float("nan")
    status: str = "ok"

    FIELDS = ("param", "value", "peak_ergotropy", "t_peak", "t_stable", "final_ergotropy",
              "final_energy", "max_raw_trace_drift", "max_trace_err", "min_eig",
              "J_eval", "R_eval", "status")

    def row(self) -> list[str]:
        out = []
        for name in self.FIELDS:
            v = getattr(self, name)
            out.append(FLOAT_FMT.format(v) if isinstance(v, float) else str(v))
        return out


def summarize(traj: Trajectory, cfg: RunConfig, param: str = "", value: str = "") -> RunSummary:
    t = np.array(traj.times)
    e = traj.ergotropy
    k = int(np.argmax(e))
    return RunSummary(
        param=param, value=value,
        peak_ergotropy=float(e[k]), t_peak=float(t[k]),
        t_stable=plateau_time(t, e),
        final_ergotropy=float(e[-1]), final_energy=float(traj.energy[-1]),
        max_raw_trace_drift=float(traj.max_raw_trace_drift),
        max_trace_err=float(max(r.trace_err for r in traj.records)),
        min_eig=float(traj.min_eigenvalue),
        J_eval=float(spectral_density(cfg.bath, cfg.omega)),
        R_eval=float(redfield_rate(cfg.bath, cfg.omega)),
    )


def write_summary(rows: Iterable[RunSummary], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RunSummary.FIELDS)
        for r in rows:
            writer.writerow(r.row())


def read_summary(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_metadata(cfg: RunConfig, **extra) -> dict:
    meta = {
        "config": render_config(cfg),
        "defaults_applied": list(cfg.provenance),
        "channels": [
            {"from": ch.source + 1, "to": ch.target + 1, "bohr_frequency": ch.bohr_frequency, "rate": ch.rate}
            for ch in enumerate_channels(cfg.system, cfg.bath, rate_floor=cfg.rate_floor)
        ],
    }
    meta.update(extra)
    return meta


# -- entry points -----------------------------------------------------------

def run_simulation(cfg: RunConfig, out_dir) -> tuple[Path, RunSummary]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj = simulate(cfg)
    path = out / "trajectory.csv"
    emit_trajectory(traj, path)
    summary = summarize(traj, cfg)
    _write_json(run_metadata(cfg, warnings=traj.warnings), out / "metadata.json")
    return path, summary


def sweep_filename(param: str, value: str) -> str:
    return f"{param}={value}.csv"


def _sweep_point(tokens: dict[str, str], param: str, value: str, out_dir: str) -> RunSummary:
    try:
        cfg = build_config({k: (v, 0) for k, v in tokens.items()}).with_value(param, value)
        traj = simulate(cfg)
        emit_trajectory(traj, os.path.join(out_dir, sweep_filename(param, value)))
        return summarize(traj, cfg, param, value)
    except Exception as exc:  # one bad point must not sink the sweep
        log.error("sweep point %s=%s failed: %s", param, value, exc)
        return RunSummary(param, value, status=f"error: {exc}".replace("\n", " "))


def run_sweep(cfg: RunConfig, param: str, values: Sequence[str], out_dir,
              workers: int = 1, extra_meta: dict | None = None) -> list[RunSummary]:
    """One trajectory per value plus ``summary.csv``, ``plot.gp`` and ``metadata.json``.

    Points are independent; with ``workers > 1`` they run in separate
    processes and the output is byte-identical to a serial run.
    """
    if not values:
        raise ValueError("sweep needs at least one value")
    cfg.with_value(param, values[0])  # validates the path before any work
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    args = [(dict(cfg.tokens), param, v, str(out)) for v in values]
    if workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_sweep_point, *zip(*args)))
    else:
        summaries = [_sweep_point(*a) for a in args]
    write_summary(summaries, out / "summary.csv")
    write_gnuplot(param, values, out / "plot.gp")
    meta = run_metadata(cfg, sweep={"param": param, "values": list(values)})
    if extra_meta:
        meta.update(extra_meta)
    _write_json(meta, out / "metadata.json")
    return summaries


def write_gnuplot(param: str, values: Sequence[str], path) -> None:
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        "set ylabel 'ergotropy'",
        "plot \\",
    ]
    entries = [f"  '{sweep_filename(param, v)}' using 1:3 with lines title '{param}={v}'" for v in values]
    lines.append(", \\\n".join(entries))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def run_spectrum(cfg: RunConfig, path, omega_min=None, omega_max=None, points: int = 201) -> list:
    grid = default_grid(cfg.bath, omega_min, omega_max, points)
    rows = rate_surface(cfg.bath, grid)
    write_spectrum_csv(rows, path)
    return rows


def run_preset(name: str, out_dir, workers: int = 1):
    preset = get_preset(name)
    cfg = parse_config(preset.config_text())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if preset.param is None:
        return run_spectrum(cfg, out / "spectrum.csv")
    return run_sweep(cfg, preset.param, preset.values, out, workers=workers,
                     extra_meta={"preset": name, "description": preset.description,
                                 "sweep_values_source": preset.values_source})
