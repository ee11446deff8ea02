"""Collective Lambda-type battery: drive waveforms, Hamiltonians, initial states.

Level |1> (index 0 in arrays) is the shared excited state; levels |2>..|n>
(indices 1..n-1) are the ground states of the n-1 battery units. Each ground
level j is coupled to |1> by its own drive, and neighbouring ground levels
are coupled by a uniform tunnelling amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .linalg import HERMITIAN_TOL, max_asymmetry

DRIVE_KINDS = ("sine", "one-minus-cosine", "constant", "tabulated")
INITIAL_KINDS = ("uniform-ground", "pure-level", "gibbs", "custom")

# Slack on the time window, so that t_end accumulated from float steps still passes.
_T_SLACK = 1e-9


class InvalidStateError(ValueError):
    """A matrix failed one of the density-matrix invariants."""

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant


@dataclass(frozen=True)
class DriveWaveform:
    """Charging field on one excited-ground transition.

    ``kind`` selects V sin(Omega t / tau), V [1 - cos(Omega t / tau)], a
    constant V, or linear interpolation through ``table_t``/``table_v``.
    """

    kind: str = "sine"
    amplitude: float = 1.5
    multiplier: float = math.pi
    tau: float = 1.0
    table_t: tuple[float, ...] = ()
    table_v: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in DRIVE_KINDS:
            raise ValueError(f"unknown drive kind {self.kind!r}; expected one of {DRIVE_KINDS}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude V must be >= 0, got {self.amplitude}")
        if self.kind == "tabulated":
            if len(self.table_t) < 2 or len(self.table_t) != len(self.table_v):
                raise ValueError("tabulated drive needs matching table_t/table_v of length >= 2")
            if any(b <= a for a, b in zip(self.table_t, self.table_t[1:])):
                raise ValueError("table_t must be strictly increasing")
            if max(abs(v) for v in self.table_v) > 2 * self.amplitude:
                raise ValueError("tabulated values must satisfy |value| <= 2V")


def drive_value(w: DriveWaveform, t: float) -> float:
    if not (-_T_SLACK * w.tau <= t <= w.tau * (1 + _T_SLACK)):
        raise ValueError(f"t={t} outside the drive window [0, {w.tau}]")
    phase = w.multiplier * t / w.tau
    if w.kind == "sine":
        return w.amplitude * math.sin(phase)
    if w.kind == "one-minus-cosine":
        return w.amplitude * (1.0 - math.cos(phase))
    if w.kind == "constant":
        return w.amplitude
    return float(np.interp(t, w.table_t, w.table_v))


def default_drive_kind(j: int) -> str:
    """Per-channel waveform for ground level ``j`` (1-based label).

    Reproduces the n = 4 assignment (sine, one-minus-cosine, sine) and
    alternates beyond it.
    """
    return "sine" if j % 2 == 0 else "one-minus-cosine"


def default_drives(n: int, amplitude: float, multiplier: float, tau: float) -> dict[int, DriveWaveform]:
    return {
        j: DriveWaveform(default_drive_kind(j), amplitude, multiplier, tau)
        for j in range(2, n + 1)
    }


@dataclass(frozen=True)
class SystemSpec:
    """Level structure and drives. ``drives`` is keyed by the 1-based ground label j."""

    n: int = 4
    delta_e: float = 1.5
    eps_base: float = 0.25
    tunneling: float = 0.0
    drives: Mapping[int, DriveWaveform] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")
        expected = set(range(2, self.n + 1))
        if set(self.drives) != expected:
            missing = sorted(expected - set(self.drives))
            extra = sorted(set(self.drives) - expected)
            raise ValueError(f"drives must cover j=2..{self.n} exactly (missing {missing}, extra {extra})")

    @classmethod
    def uniform(cls, n: int = 4, delta_e: float = 1.5, eps_base: float = 0.25,
                tunneling: float = 0.0, amplitude: float = 1.5,
                multiplier: float = math.pi, tau: float = 1.0) -> "SystemSpec":
        """Spec with the default alternating drive assignment on every channel."""
        return cls(n, delta_e, eps_base, tunneling, default_drives(n, amplitude, multiplier, tau))

    @property
    def tau(self) -> float:
        return max(w.tau for w in self.drives.values())

    @property
    def energies(self) -> np.ndarray:
        eps = np.full(self.n, self.eps_base, dtype=float)
        eps[0] += self.delta_e
        return eps


def bare_hamiltonian(spec: SystemSpec) -> np.ndarray:
    """Drive-free, tunnelling-free diag(eps_1, eps_base, ..., eps_base)."""
    return np.diag(spec.energies).astype(complex)


def build_hamiltonian(spec: SystemSpec, t: float, *, drives_on: bool = True) -> np.ndarray:
    """H_S(t): bare energies, drives on row/column 1, tunnelling between neighbouring grounds.

    ``drives_on=False`` gives the field-free Hamiltonian used after the
    charging window has closed.
    """
    h = bare_hamiltonian(spec)
    if drives_on:
        for j, w in spec.drives.items():
            v = drive_value(w, t)
            h[0, j - 1] = v
            h[j - 1, 0] = v
    for a in range(1, spec.n - 1):
        h[a, a + 1] = spec.tunneling
        h[a + 1, a] = spec.tunneling
    return h


def hamiltonian_at(spec: SystemSpec, t: float) -> np.ndarray:
    """H_S(t) with every drive switched off once its window [0, tau] has closed."""
    if t > spec.tau * (1 + _T_SLACK):
        return build_hamiltonian(spec, t, drives_on=False)
    return build_hamiltonian(spec, t)


def check_density_matrix(rho, n: int | None = None, trace_tol: float = 1e-9,
                         herm_tol: float = HERMITIAN_TOL, psd_tol: float = 1e-9) -> np.ndarray:
    """Validate and return ``rho`` as a complex array; raise InvalidStateError otherwise."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError("shape", f"expected square matrix, got {rho.shape}")
    if n is not None and rho.shape[0] != n:
        raise InvalidStateError("shape", f"expected {n}x{n}, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("finite", "matrix has non-finite entries")
    asym = max_asymmetry(rho)
    if asym > herm_tol:
        raise InvalidStateError("hermiticity", f"max |rho - rho^dagger| = {asym:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError("trace", f"Tr rho = {tr!r}, expected 1")
    lam_min = float(np.linalg.eigvalsh(rho).min())
    if lam_min < -psd_tol:
        raise InvalidStateError("positivity", f"minimum eigenvalue {lam_min:.3e} < 0")
    return rho


def gibbs_state(h: np.ndarray, temperature: float, k_b: float = 1.0) -> np.ndarray:
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    vals, vecs = np.linalg.eigh(h)
    w = np.exp(-(vals - vals.min()) / (k_b * temperature))
    w /= w.sum()
    return (vecs * w) @ vecs.conj().T


def initial_state(spec: SystemSpec, kind: str = "uniform-ground", *, level: int | None = None,
                  temperature: float | None = None, k_b: float = 1.0,
                  matrix: Sequence | np.ndarray | None = None) -> np.ndarray:
    """Starting density matrix.

    ``pure-level`` takes a 1-based ``level``; ``gibbs`` is thermal with
    respect to the bare Hamiltonian; ``custom`` validates ``matrix``.
    """
    n = spec.n
    if kind == "uniform-ground":
        rho = np.zeros((n, n), dtype=complex)
        idx = np.arange(1, n)
        rho[idx, idx] = 1.0 / (n - 1)
        return rho
    if kind == "pure-level":
        if level is None or not 1 <= level <= n:
            raise ValueError(f"pure-level needs 1 <= level <= {n}, got {level}")
        rho = np.zeros((n, n), dtype=complex)
        rho[level - 1, level - 1] = 1.0
        return rho
    if kind == "gibbs":
        if temperature is None:
            raise ValueError("gibbs initial state needs a temperature")
        return gibbs_state(bare_hamiltonian(spec), temperature, k_b)
    if kind == "custom":
        if matrix is None:
            raise ValueError("custom initial state needs a matrix")
        return check_density_matrix(matrix, n=n)
    raise ValueError(f"unknown initial state kind {kind!r}; expected one of {INITIAL_KINDS}")
