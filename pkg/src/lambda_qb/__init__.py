"""Driven Lambda-type many-body quantum battery under Redfield-type dissipation."""

from .bath import BathSpec, JumpChannel, enumerate_channels, rate_surface, redfield_rate, spectral_density
from .config import ConfigError, RunConfig, parse_config
from .dynamics import IntegratorConfig, Trajectory, dissipator, evolve, rhs
from .energetics import diagnostics, ergotropy, internal_energy, passive_state
from .linalg import eig_hermitian, propagator, trace_product
from .model import (DriveWaveform, SystemSpec, bare_hamiltonian, build_hamiltonian,
                    drive_value, initial_state)

__version__ = "0.1.0"
