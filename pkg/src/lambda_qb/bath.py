"""Bath spectral densities and the thermal transition rates built from them."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .model import SystemSpec

BATH_KINDS = ("debye-lorentzian", "debye-exponential")
DEFAULT_RATE_FLOOR = 1e-18


@dataclass(frozen=True)
class BathSpec:
    """Environment parameters.

    Attributes:
        kind: ``debye-lorentzian`` for gamma w / (w0^2 + w^2), or
            ``debye-exponential`` for gamma (w / w0) exp(-w / w0).
        gamma: coupling strength, shared by every channel.
        omega0: cutoff frequency.
        temperature: bath temperature.
        hbar, k_b: unit constants (1 in internal units).
    """

    kind: str = "debye-lorentzian"
    gamma: float = 2.6e-7
    omega0: float = 0.10
    temperature: float = 300.0
    hbar: float = 1.0
    k_b: float = 1.0

    def __post_init__(self):
        if self.kind not in BATH_KINDS:
            raise ValueError(f"unknown bath kind {self.kind!r}; expected one of {BATH_KINDS}")
        for name in ("omega0", "temperature", "hbar", "k_b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @property
    def thermal_frequency(self) -> float:
        return self.k_b * self.temperature / self.hbar

    @property
    def omega_small(self) -> float:
        """Below this |w| the rate is taken from its small-frequency expansion."""
        return 1e-8 * max(self.omega0, self.thermal_frequency)


def spectral_density(bath: BathSpec, omega):
    """J(w), extended to negative w as an odd function. Accepts scalars or arrays."""
    w = np.asarray(omega, dtype=float)
    if bath.kind == "debye-lorentzian":
        j = bath.gamma * w / (bath.omega0**2 + w**2)
    else:
        j = bath.gamma * (w / bath.omega0) * np.exp(-np.abs(w) / bath.omega0)
    return j if j.ndim else float(j)


def _j_over_omega(bath: BathSpec, w: np.ndarray) -> np.ndarray:
    """J(w)/w, finite at w = 0."""
    if bath.kind == "debye-lorentzian":
        return bath.gamma / (bath.omega0**2 + w**2)
    return (bath.gamma / bath.omega0) * np.exp(-np.abs(w) / bath.omega0)


def redfield_rate(bath: BathSpec, omega) -> float | np.ndarray:
    """R(w) = J(w) [coth(hbar w / 2 k_B T) + 1].

    Positive w is emission (2J(n+1)), negative w absorption (2J(|w|) n).
    Both branches are written with ``expm1`` so the ratio R(w)/R(-w) is
    exp(hbar w / k_B T) to rounding. Inside |w| < omega_small, where the
    thermal factor diverges, R = (J/w)(2 k_B T / hbar)(1 + x/2 + x^2/12)
    with x = hbar w / k_B T is used instead.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty_like(w)
    beta_hbar = bath.hbar / (bath.k_b * bath.temperature)
    small = np.abs(w) < bath.omega_small
    big = ~small
    wb = w[big]
    jabs = np.abs(spectral_density(bath, np.abs(wb)))
    x = beta_hbar * np.abs(wb)
    with np.errstate(over="ignore"):  # expm1 -> inf gives absorption 0, as it should
        emission = 2.0 * jabs / -np.expm1(-x)
        absorption = 2.0 * jabs / np.expm1(x)
    out[big] = np.where(wb > 0, emission, absorption)
    ws = w[small]
    xs = beta_hbar * ws
    out[small] = _j_over_omega(bath, ws) * (2.0 / beta_hbar) * (1.0 + xs / 2 + xs**2 / 12)
    out = np.maximum(out, 0.0)
    return out if np.ndim(omega) else float(out[0])


class JumpChannel(NamedTuple):
    """Jump |to><from| (0-based array indices) with its rate."""

    source: int
    target: int
    bohr_frequency: float
    rate: float


def enumerate_channels(spec: SystemSpec, bath: BathSpec,
                       rate_floor: float = DEFAULT_RATE_FLOOR) -> list[JumpChannel]:
    """All ordered pairs i != j, rates at the bare Bohr frequency (eps_j - eps_i)/hbar."""
    eps = spec.energies
    channels = []
    for i in range(spec.n):
        for j in range(spec.n):
            if i == j:
                continue
            omega = (eps[j] - eps[i]) / bath.hbar
            rate = redfield_rate(bath, omega)
            if rate >= rate_floor:
                channels.append(JumpChannel(j, i, omega, rate))
    return channels


class RateRow(NamedTuple):
    omega: float
    J: float
    R: float


def rate_surface(bath: BathSpec, omega_grid: Iterable[float]) -> list[RateRow]:
    grid = np.asarray(list(omega_grid), dtype=float)
    if grid.size == 0:
        return []
    if not np.all(np.isfinite(grid)):
        raise ValueError("frequency grid must be finite")
    j = np.atleast_1d(spectral_density(bath, grid))
    r = np.atleast_1d(redfield_rate(bath, grid))
    return [RateRow(float(a), float(b), float(c)) for a, b, c in zip(grid, j, r)]


def write_spectrum_csv(rows: Iterable[RateRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega", "J", "R"])
        for row in rows:
            writer.writerow([f"{row.omega:.12g}", f"{row.J:.12g}", f"{row.R:.12g}"])


def read_spectrum_csv(path) -> list[RateRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [RateRow(float(r["omega"]), float(r["J"]), float(r["R"])) for r in reader]


def default_grid(bath: BathSpec, omega_min: float | None = None,
                 omega_max: float | None = None, points: int = 201) -> np.ndarray:
    lo = bath.omega0 / 100 if omega_min is None else omega_min
    hi = 10 * bath.omega0 if omega_max is None else omega_max
    if points < 1:
        raise ValueError("points must be >= 1")
    if points == 1:
        return np.array([lo])
    if hi <= lo:
        raise ValueError(f"omega_max ({hi}) must exceed omega_min ({lo})")
    return np.linspace(lo, hi, points)


__all__ = [
    "BATH_KINDS", "BathSpec", "JumpChannel", "RateRow", "default_grid",
    "enumerate_channels", "rate_surface", "read_spectrum_csv", "redfield_rate",
    "spectral_density", "write_spectrum_csv",
]
