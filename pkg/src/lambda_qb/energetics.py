"""Stored energy, passive states and ergotropy."""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from .linalg import eig_hermitian, trace_product

log = logging.getLogger(__name__)

# Spectral negativity tolerated before clamping (Redfield states may dip below 0).
CLAMP_TOL = 1e-7


class Diagnostics(NamedTuple):
    purity: float
    populations: np.ndarray
    coherence_l1: float
    min_eigenvalue: float


class EnergyRecord(NamedTuple):
    t: float
    energy: float
    ergotropy: float
    trace_err: float
    purity: float
    min_eig: float
    coherence_l1: float
    populations: tuple[float, ...]


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if np.shape(a) != np.shape(b):
        raise ValueError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def internal_energy(rho, rho0, h_ref) -> float:
    """Tr[H rho] - Tr[H rho0]."""
    _check_dims(rho, h_ref)
    _check_dims(rho0, h_ref)
    return trace_product(h_ref, rho).real - trace_product(h_ref, rho0).real


def _state_spectrum(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of rho in descending order, clamped if noticeably negative."""
    r = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[::-1]
    if r[-1] < -CLAMP_TOL:
        log.debug("clamping negative eigenvalues of rho (min %.3e)", r[-1])
        r = np.clip(r, 0.0, None)
        r = r / r.sum()
    return r


def passive_state(rho, h_ref) -> np.ndarray:
    """Populations of rho sorted high-to-low placed on the energy levels of h_ref low-to-high."""
    _check_dims(rho, h_ref)
    r = _state_spectrum(np.asarray(rho, dtype=complex))
    dec = eig_hermitian(h_ref)
    return (dec.vectors * r) @ dec.vectors.conj().T


def passive_energy(rho, h_ref) -> float:
    _check_dims(rho, h_ref)
    r = _state_spectrum(np.asarray(rho, dtype=complex))
    e = eig_hermitian(h_ref).values
    return float(np.dot(r, e))


def ergotropy(rho, h_ref) -> float:
    """Work extractable by a unitary: Tr[H rho] - Tr[H rho_passive]."""
    return trace_product(h_ref, rho).real - passive_energy(rho, h_ref)


def diagnostics(rho) -> Diagnostics:
    rho = np.asarray(rho, dtype=complex)
    pops = rho.diagonal().real.copy()
    offdiag = np.abs(rho).sum() - np.abs(rho.diagonal()).sum()
    purity = trace_product(rho, rho).real
    lam_min = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return Diagnostics(purity, pops, float(offdiag), lam_min)


def energy_record(t: float, rho, rho0, h_ref) -> EnergyRecord:
    d = diagnostics(rho)
    return EnergyRecord(
        t=t,
        energy=internal_energy(rho, rho0, h_ref),
        ergotropy=ergotropy(rho, h_ref),
        trace_err=abs(np.trace(rho).real - 1.0),
        purity=d.purity,
        min_eig=d.min_eigenvalue,
        coherence_l1=d.coherence_l1,
        populations=tuple(float(p) for p in d.populations),
    )
