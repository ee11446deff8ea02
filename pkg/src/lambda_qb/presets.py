"""Named scenarios for the three-unit (n = 4) battery.

Each ``fig3*``/``fig4*`` preset fixes one row of the parameter table and
sweeps the column left open in that row. Numerals are taken without units:
gamma is the tabulated value times 1e-7, energies and temperatures as listed.
The charging window is tau = 1 and the run stops at tau.

Sweep lists come from the text where it names values; otherwise they are
evenly spaced guesses around the values used in the other rows, and
``values_source`` says so.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Preset:
    name: str
    fixed: dict[str, str]
    param: str | None = None
    values: tuple[str, ...] = ()
    values_source: str = "text"
    description: str = ""

    def config_text(self) -> str:
        """Config for the first sweep point (the swept key is required by the parser)."""
        items = dict(self.fixed)
        if self.param is not None:
            items[self.param] = self.values[0]
        sections: dict[str, list[str]] = {}
        for dotted, token in items.items():
            section, _, key = dotted.rpartition(".")
            sections.setdefault(section, []).append(f"{key} = {token}")
        lines = [f"# preset {self.name}: {self.description}"]
        for section in ("system", "bath", "integrator", "run"):
            if section in sections:
                lines.append(f"[{section}]")
                lines.extend(sections[section])
        return "\n".join(lines) + "\n"


# One entry per table row: Omega, delta_e, omega, gamma (x1e-7), omega0, t_e, T, V.
# None marks the swept column.
TABLE_ROWS: dict[str, dict[str, float | str | None]] = {
    "fig3a": dict(Omega=None, delta_e=1.5, omega=0.085, gamma=2.6, omega0=0.10, t_e=0, T=300, V=1.5),
    "fig3b_row": dict(Omega="1.0pi", delta_e=None, omega=0.085, gamma=2.6, omega0=0.12, t_e=0, T=300, V=1.5),
    "fig3c_row": dict(Omega="1.0pi", delta_e=2.75, omega=0.085, gamma=2.6, omega0=0.12, t_e=0, T=300, V=None),
    "fig3d": dict(Omega="1.0pi", delta_e=2.75, omega=0.085, gamma=2.6, omega0=0.12, t_e=None, T=300, V=1.5),
    "fig4a": dict(Omega="1.0pi", delta_e=1.5, omega=0.085, gamma=2.6, omega0=None, t_e=0, T=300, V=1.5),
    "fig4b": dict(Omega="1.0pi", delta_e=1.5, omega=None, gamma=9.0, omega0=0.12, t_e=0, T=300, V=1.5),
    "fig4c": dict(Omega="1.0pi", delta_e=1.5, omega=0.085, gamma=None, omega0=0.03, t_e=0, T=300, V=1.5),
    "fig4d": dict(Omega="1.0pi", delta_e=1.5, omega=0.143, gamma=9.0, omega0=0.08, t_e=0, T=None, V=1.5),
}

_PATHS = {
    "Omega": "system.Omega", "delta_e": "system.delta_e", "omega": "bath.omega",
    "gamma": "bath.gamma", "omega0": "bath.omega0", "t_e": "system.t_e",
    "T": "bath.T", "V": "system.V",
}


def _fmt(value) -> str:
    return value if isinstance(value, str) else f"{value:g}"


def _fixed_from_row(row: dict) -> dict[str, str]:
    fixed = {"system.n": "4", "system.eps_base": "0.25", "system.tau": "1.0"}
    for col, value in row.items():
        if value is None:
            continue
        if col == "gamma":
            fixed[_PATHS[col]] = f"{value:g}e-7"
        else:
            fixed[_PATHS[col]] = _fmt(value)
    return fixed


def _sweep_preset(name, row_key, param_col, values, source, description):
    row = dict(TABLE_ROWS[row_key])
    fixed = _fixed_from_row(row)
    return Preset(name, fixed, _PATHS[param_col], tuple(values), source, description)


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        _sweep_preset("fig3a", "fig3a", "Omega",
                      ["0.7pi", "0.8pi", "0.9pi", "1.0pi", "1.1pi", "1.2pi"], "text",
                      "drive frequency multiplier"),
        # the amplitude panel uses the row whose open column is V, the gap panel the row whose open column is delta_e
        _sweep_preset("fig3b", "fig3c_row", "V",
                      ["0.5", "1.0", "1.5", "2.5", "3.0", "3.5"], "guess (3.5 from text)",
                      "drive amplitude"),
        _sweep_preset("fig3c", "fig3b_row", "delta_e",
                      ["1.0", "1.5", "2.0", "2.5", "2.75", "3.0"], "guess",
                      "energy gap"),
        _sweep_preset("fig3d", "fig3d", "t_e",
                      ["0.03", "0.04", "0.05", "0.06", "0.07", "0.08"], "text",
                      "tunnelling between neighbouring units"),
        _sweep_preset("fig4a", "fig4a", "omega0",
                      ["0.03", "0.05", "0.07", "0.09", "0.11", "0.13"], "guess",
                      "bath cutoff frequency"),
        _sweep_preset("fig4b", "fig4b", "omega",
                      ["0.045", "0.065", "0.085", "0.105", "0.125", "0.145"], "guess",
                      "bath evaluation frequency (does not enter the dynamics)"),
        _sweep_preset("fig4c", "fig4c", "gamma",
                      ["1e-7", "3e-7", "5e-7", "7e-7", "9e-7", "11e-7"], "guess",
                      "system-bath coupling"),
        _sweep_preset("fig4d", "fig4d", "T",
                      ["4", "20", "50", "100", "200", "300"], "guess",
                      "bath temperature"),
    ]
}

PRESETS["fig2"] = Preset(
    "fig2",
    {"system.n": "4", "system.delta_e": "1.5", "bath.gamma": "2.6e-4",
     "bath.T": "300", "bath.omega0": "0.05"},
    description="rate and spectral density against frequency",
)


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
