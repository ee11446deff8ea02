"""Fixed-step RK4 integration of the driven, dissipative master equation.

    d rho/dt = -(i/hbar) [H(t), rho]
               + sum_ij R_ij (2 L rho L^dag - L^dag L rho - rho L^dag L),   L = |i><j|

The factor 2 on the sandwich term is kept; ``lindblad_convention="half"``
halves the whole dissipator to get the textbook normalisation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bath import BathSpec, JumpChannel, enumerate_channels
from .energetics import EnergyRecord, energy_record
from .model import SystemSpec, bare_hamiltonian, build_hamiltonian, drive_value, hamiltonian_at

log = logging.getLogger(__name__)

CONVENTIONS = {"double": 1.0, "half": 0.5}


class IntegrationError(RuntimeError):
    """The state became non-finite during integration."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite density matrix at step {step} (t={t:.6g})")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control. ``dt``/``t_end`` of None mean tau/20000 and tau."""

    dt: float | None = None
    t_end: float | None = None
    hermitize: bool = True
    renormalize_trace: bool = True
    positivity_tol: float = 1e-7
    record_every: int = 20
    lindblad_convention: str = "double"
    energy_reference: str = "bare"

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end is not None and self.dt is not None and self.t_end < self.dt:
            raise ValueError(f"t_end ({self.t_end}) must be >= dt ({self.dt})")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.lindblad_convention not in CONVENTIONS:
            raise ValueError(f"lindblad_convention must be one of {sorted(CONVENTIONS)}")
        if self.energy_reference not in ("bare", "instantaneous"):
            raise ValueError("energy_reference must be 'bare' or 'instantaneous'")
        if self.positivity_tol < 0:
            raise ValueError("positivity_tol must be >= 0")

    def resolve(self, tau: float) -> tuple[float, int]:
        """(step size, number of steps); the step is shrunk so steps tile t_end exactly."""
        t_end = tau if self.t_end is None else self.t_end
        dt = tau / 20000 if self.dt is None else self.dt
        if t_end < dt:
            raise ValueError(f"t_end ({t_end}) must be >= dt ({dt})")
        n_steps = max(1, int(round(t_end / dt)))
        return t_end / n_steps, n_steps


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    records: list[EnergyRecord] = field(default_factory=list)
    max_raw_trace_drift: float = 0.0
    max_hermitian_correction: float = 0.0
    max_trace_correction: float = 0.0
    min_eigenvalue: float = np.inf
    warnings: list[str] = field(default_factory=list)

    @property
    def ergotropy(self) -> np.ndarray:
        return np.array([r.ergotropy for r in self.records])

    @property
    def energy(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])


def _rate_matrix(channels: Sequence[JumpChannel], n: int) -> np.ndarray:
    rates = np.zeros((n, n))
    for ch in channels:
        rates[ch.target, ch.source] += ch.rate
    return rates


def dissipator(rho: np.ndarray, channels: Sequence[JumpChannel], scale: float = 1.0) -> np.ndarray:
    """sum R (2 L rho L^dag - {L^dag L, rho}) for L = |target><source|.

    With L = |i><j|, L rho L^dag = rho_jj |i><i| and L^dag L = |j><j|, so the
    sum collapses to a gain on the diagonal and a per-index loss rate.
    """
    n = rho.shape[0]
    rates = _rate_matrix(channels, n)
    return _dissipator_from_rates(rho, rates, rates.sum(axis=0), scale)


def _dissipator_from_rates(rho, rates, out_rates, scale):
    d = -(out_rates[:, None] + out_rates[None, :]) * rho
    d[np.diag_indices_from(d)] += 2.0 * (rates @ rho.diagonal())
    return scale * d


def rhs(rho: np.ndarray, t: float, spec: SystemSpec, channels: Sequence[JumpChannel],
        hbar: float = 1.0, scale: float = 1.0) -> np.ndarray:
    h = build_hamiltonian(spec, t)
    return -1j / hbar * (h @ rho - rho @ h) + dissipator(rho, channels, scale)


class _Generator:
    """Same right-hand side as ``rhs`` with everything time-independent precomputed."""

    def __init__(self, spec: SystemSpec, channels, hbar: float, scale: float):
        n = spec.n
        self.spec = spec
        self.hbar = hbar
        self.h_static = build_hamiltonian(spec, 0.0, drives_on=False)
        self.drives = [(j - 1, w) for j, w in sorted(spec.drives.items())]
        rates = _rate_matrix(channels, n)
        out = rates.sum(axis=0)
        self.gain = 2.0 * scale * rates
        self.loss = scale * (out[:, None] + out[None, :])
        self.diag = np.arange(n) * (n + 1)
        self._t = None
        self._h = None

    def hamiltonian(self, t: float, drives_on: bool) -> np.ndarray:
        if not drives_on:
            return self.h_static
        if t != self._t:
            h = self.h_static.copy()
            for a, w in self.drives:
                v = drive_value(w, t)
                h[0, a] = v
                h[a, 0] = v
            self._t, self._h = t, h
        return self._h

    def __call__(self, rho, t, drives_on=True):
        h = self.hamiltonian(t, drives_on)
        d = -1j / self.hbar * (h @ rho - rho @ h) - self.loss * rho
        d.flat[self.diag] += self.gain @ rho.diagonal()
        return d


def rk4_step(f, rho, t, dt, **kw):
    k1 = f(rho, t, **kw)
    k2 = f(rho + 0.5 * dt * k1, t + 0.5 * dt, **kw)
    k3 = f(rho + 0.5 * dt * k2, t + 0.5 * dt, **kw)
    k4 = f(rho + dt * k3, t + dt, **kw)
    return rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(rho0: np.ndarray, spec: SystemSpec, bath: BathSpec | None,
           cfg: IntegratorConfig = IntegratorConfig(),
           channels: Sequence[JumpChannel] | None = None,
           keep_states: bool = True) -> Trajectory:
    """Integrate from t=0 and record diagnostics every ``cfg.record_every`` steps.

    ``bath=None`` (or an explicit empty ``channels``) gives closed dynamics.
    Positivity is only monitored: eigenvalues below ``-positivity_tol`` are
    counted and a warning is attached to the trajectory when they exceed
    1000x that tolerance.
    """
    hbar = bath.hbar if bath is not None else 1.0
    if channels is None:
        channels = enumerate_channels(spec, bath) if bath is not None else []
    scale = CONVENTIONS[cfg.lindblad_convention]
    tau = spec.tau
    dt, n_steps = cfg.resolve(tau)
    f = _Generator(spec, channels, hbar, scale)

    rho0 = np.asarray(rho0, dtype=complex)
    rho = rho0.copy()
    h0 = bare_hamiltonian(spec)
    traj = Trajectory()
    n_negative = 0

    def record(step: int, t: float):
        nonlocal n_negative
        h_ref = h0 if cfg.energy_reference == "bare" else hamiltonian_at(spec, t)
        rec = energy_record(t, rho, rho0, h_ref)
        traj.times.append(t)
        traj.records.append(rec)
        if keep_states:
            traj.states.append(rho.copy())
        traj.min_eigenvalue = min(traj.min_eigenvalue, rec.min_eig)
        if rec.min_eig < -cfg.positivity_tol:
            n_negative += 1

    record(0, 0.0)
    # a blow-up is reported as IntegrationError, not as overflow warnings
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for step in range(1, n_steps + 1):
            t_prev = (step - 1) * dt
            t = step * dt
            # a step is either wholly inside the charging window or wholly after it
            rho = rk4_step(f, rho, t_prev, dt, drives_on=t_prev + 0.5 * dt < tau)
            tr = np.trace(rho).real
            if not np.isfinite(tr) or not np.isfinite(rho).all():
                raise IntegrationError(step, t)
            traj.max_raw_trace_drift = max(traj.max_raw_trace_drift, abs(tr - 1.0))
            if cfg.hermitize:
                herm = 0.5 * (rho + rho.conj().T)
                traj.max_hermitian_correction = max(traj.max_hermitian_correction,
                                                    float(np.max(np.abs(herm - rho))))
                rho = herm
            if cfg.renormalize_trace:
                tr = np.trace(rho).real
                traj.max_trace_correction = max(traj.max_trace_correction, abs(tr - 1.0))
                rho = rho / tr
            if step % cfg.record_every == 0 or step == n_steps:
                record(step, t)

    if n_negative:
        log.info("%d recorded states had eigenvalues below -%.1e", n_negative, cfg.positivity_tol)
    if traj.min_eigenvalue < -1e3 * cfg.positivity_tol:
        traj.warnings.append(f"positivity violated: min eigenvalue {traj.min_eigenvalue:.3e}")
    log.debug("max hermitian correction %.2e, max trace correction %.2e",
              traj.max_hermitian_correction, traj.max_trace_correction)
    return traj
