"""Optional physical unit system.

Internally every number is taken as given with hbar = k_B = 1. Choosing the
``ev-fs-k`` system instead sets the two constants so that energies are in eV,
times in fs and temperatures in K.
"""

HBAR_EV_FS = 0.6582119569  # eV fs
K_B_EV_PER_K = 8.617333262e-5  # eV / K

UNIT_SYSTEMS = {
    "internal": {"hbar": 1.0, "k_B": 1.0},
    "ev-fs-k": {"hbar": HBAR_EV_FS, "k_B": K_B_EV_PER_K},
}


def constants(system: str = "internal") -> dict[str, float]:
    try:
        return dict(UNIT_SYSTEMS[system])
    except KeyError:
        raise ValueError(f"unknown unit system {system!r}; expected one of {sorted(UNIT_SYSTEMS)}") from None
