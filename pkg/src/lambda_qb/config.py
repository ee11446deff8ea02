"""Run configuration: a small INI-like text format.

::

    # comments start with '#'
    [system]
    n = 4
    delta_e = 1.5
    Omega = 1.0pi

    [drive.3]
    kind = one-minus-cosine

    [bath]
    gamma = 2.6e-7
    omega0 = 0.10
    T = 300

Values are decimal numbers, ``pi`` multiples such as ``0.7pi``, keywords,
or (for tabulated drives) comma-separated number lists. Every default that
gets filled in is recorded in ``RunConfig.provenance``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Any

from .bath import BATH_KINDS, DEFAULT_RATE_FLOOR, BathSpec
from .dynamics import CONVENTIONS, IntegratorConfig
from .model import DRIVE_KINDS, DriveWaveform, SystemSpec, default_drive_kind
from .units import UNIT_SYSTEMS, constants

log = logging.getLogger(__name__)

REQUIRED = ("system.n", "system.delta_e", "bath.gamma", "bath.omega0", "bath.T")


class ConfigError(ValueError):
    """Bad configuration text; ``problems`` lists every diagnostic found."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


def _kw(*choices):
    return ("keyword", tuple(choices))


# key -> (type, default). A default of None means "derived" or "required".
SCHEMA: dict[str, dict[str, tuple[Any, Any]]] = {
    "system": {
        "n": ("int", None),
        "delta_e": ("float", None),
        "eps_base": ("float", 0.25),
        "t_e": ("float", 0.0),
        "V": ("float", 1.5),
        "Omega": ("float", math.pi),
        "tau": ("float", 1.0),
    },
    "drive": {
        "kind": (_kw(*DRIVE_KINDS), None),
        "V": ("float", None),
        "Omega": ("float", None),
        "tau": ("float", None),
        "table_t": ("floatlist", ()),
        "table_v": ("floatlist", ()),
    },
    "bath": {
        "kind": (_kw(*BATH_KINDS), "debye-lorentzian"),
        "gamma": ("float", None),
        "omega0": ("float", None),
        "T": ("float", None),
        "units": (_kw(*UNIT_SYSTEMS), "internal"),
        "hbar": ("float", None),
        "k_B": ("float", None),
        "omega": ("float", 0.085),
        "rate_floor": ("float", DEFAULT_RATE_FLOOR),
    },
    "integrator": {
        "dt": ("float", None),
        "t_end": ("float", None),
        "hermitize": ("bool", True),
        "renormalize_trace": ("bool", True),
        "positivity_tol": ("float", 1e-7),
        "record_every": ("int", 20),
        "lindblad_convention": (_kw(*CONVENTIONS), "double"),
    },
    "run": {
        "initial_state": (_kw("uniform-ground", "pure-level", "gibbs"), "uniform-ground"),
        "initial_level": ("int", None),
        "initial_T": ("float", None),
        "energy_reference": (_kw("bare", "instantaneous"), "bare"),
        "label": ("str", ""),
    },
}

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PI_RE = re.compile(rf"^({_NUMBER})?\s*\*?\s*pi$")
_NUM_RE = re.compile(rf"^{_NUMBER}$")
_BOOLS = {"true": True, "on": True, "yes": True, "false": False, "off": False, "no": False}
_SECTION_RE = re.compile(r"^\[([A-Za-z_]+(?:\.\d+)?)\]\s*(.*)$")
_PAIR_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)")


def parse_number(token: str) -> float:
    """Decimal literal or pi multiple (``pi``, ``0.7pi``, ``1.2*pi``)."""
    tok = token.strip()
    m = _PI_RE.match(tok)
    if m:
        return (float(m.group(1)) if m.group(1) else 1.0) * math.pi
    if _NUM_RE.match(tok):
        return float(tok)
    raise ValueError(f"not a number: {token!r}")


def convert(kind, token: str):
    if kind == "float":
        return parse_number(token)
    if kind == "int":
        if not re.fullmatch(r"[+-]?\d+", token.strip()):
            raise ValueError(f"expected an integer, got {token!r}")
        return int(token)
    if kind == "bool":
        try:
            return _BOOLS[token.strip().lower()]
        except KeyError:
            raise ValueError(f"expected true/false, got {token!r}") from None
    if kind == "floatlist":
        return tuple(parse_number(t) for t in token.split(",") if t.strip())
    if kind == "str":
        return token.strip()
    _, choices = kind
    if token.strip() not in choices:
        raise ValueError(f"expected one of {', '.join(choices)}, got {token!r}")
    return token.strip()


def _schema_for(section: str) -> dict | None:
    if section.startswith("drive."):
        return SCHEMA["drive"]
    return SCHEMA.get(section)


def tokenize(text: str, strict: bool = True) -> dict[str, tuple[str, int]]:
    """Split config text into {dotted.key: (raw token, line number)}."""
    values: dict[str, tuple[str, int]] = {}
    problems = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            section, line = m.group(1), m.group(2).strip()
            if _schema_for(section) is None:
                problems.append(f"line {lineno}: unknown section [{section}]")
                section = None
                continue
            if not line:
                continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        if line.count("=") > 1:
            pairs = _PAIR_RE.findall(line)
        else:
            key, val = line.split("=", 1)
            pairs = [(key.strip(), val.strip())]
        for key, val in pairs:
            if section is None:
                problems.append(f"line {lineno}: key {key!r} outside any section")
                continue
            dotted = f"{section}.{key}"
            if key not in _schema_for(section):
                msg = f"line {lineno}: unknown key {dotted!r}"
                if strict:
                    problems.append(msg)
                else:
                    log.warning("%s (ignored)", msg)
                continue
            if dotted in values:
                problems.append(f"line {lineno}: duplicate key {dotted!r} (first set on line {values[dotted][1]})")
                continue
            values[dotted] = (val, lineno)
    if problems:
        raise ConfigError(problems)
    return values


@dataclass(frozen=True)
class RunConfig:
    system: SystemSpec
    bath: BathSpec
    integrator: IntegratorConfig
    initial_state: str = "uniform-ground"
    initial_level: int | None = None
    initial_temperature: float | None = None
    omega: float = 0.085
    rate_floor: float = DEFAULT_RATE_FLOOR
    label: str = ""
    values: dict[str, Any] = field(default_factory=dict, compare=False)
    tokens: dict[str, str] = field(default_factory=dict, compare=False)
    provenance: tuple[str, ...] = field(default=(), compare=False)

    def with_value(self, dotted: str, token: str) -> "RunConfig":
        """Copy of this config with one key replaced (used by sweeps)."""
        section, _, key = dotted.rpartition(".")
        schema = _schema_for(section)
        if schema is None or key not in schema:
            raise ConfigError([f"unknown parameter path {dotted!r}"])
        if schema[key][0] in ("floatlist", "str"):
            raise ConfigError([f"parameter {dotted!r} is not a scalar"])
        tokens = dict(self.tokens)
        tokens[dotted] = token
        return build_config({k: (v, 0) for k, v in tokens.items()})


def _lookup(dotted, provenance, typed):
    """Typed value for ``dotted``, falling back to the schema default."""
    if dotted in typed:
        return typed[dotted]
    section, _, key = dotted.rpartition(".")
    default = _schema_for(section)[key][1]
    if default is not None:
        provenance.append(f"{dotted} = {default!r} (default)")
    return default


def build_config(raw: dict[str, tuple[str, int]]) -> RunConfig:
    problems = []
    typed: dict[str, Any] = {}
    for dotted, (token, lineno) in raw.items():
        section, _, key = dotted.rpartition(".")
        kind = _schema_for(section)[key][0]
        try:
            typed[dotted] = convert(kind, token)
        except ValueError as exc:
            where = f"line {lineno}: " if lineno else ""
            problems.append(f"{where}{dotted}: {exc}")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        problems.append("missing required keys: " + ", ".join(missing))
    if problems:
        raise ConfigError(problems)

    prov: list[str] = []
    get = lambda k: _lookup(k, prov, typed)  # noqa: E731

    try:
        n = get("system.n")
        if n < 3:
            raise ConfigError(["system.n: must be >= 3"])
        tau0, v0, om0 = get("system.tau"), get("system.V"), get("system.Omega")
        drives = {}
        for j in range(2, n + 1):
            sec = f"drive.{j}"
            kind = typed.get(f"{sec}.kind", default_drive_kind(j))
            drives[j] = DriveWaveform(
                kind=kind,
                amplitude=typed.get(f"{sec}.V", v0),
                multiplier=typed.get(f"{sec}.Omega", om0),
                tau=typed.get(f"{sec}.tau", tau0),
                table_t=typed.get(f"{sec}.table_t", ()),
                table_v=typed.get(f"{sec}.table_v", ()),
            )
        stray = sorted({k.split(".")[1] for k in typed if k.startswith("drive.")} - {str(j) for j in drives})
        if stray:
            raise ConfigError([f"[drive.{j}] does not match a ground level 2..{n}" for j in stray])
        system = SystemSpec(n=n, delta_e=get("system.delta_e"), eps_base=get("system.eps_base"),
                            tunneling=get("system.t_e"), drives=drives)

        units = constants(get("bath.units"))
        hbar = typed.get("bath.hbar", units["hbar"])
        k_b = typed.get("bath.k_B", units["k_B"])
        bath = BathSpec(kind=get("bath.kind"), gamma=get("bath.gamma"), omega0=get("bath.omega0"),
                        temperature=get("bath.T"), hbar=hbar, k_b=k_b)

        dt = typed.get("integrator.dt")
        t_end = typed.get("integrator.t_end")
        if dt is None:
            prov.append(f"integrator.dt = {system.tau / 20000!r} (default tau/20000)")
        if t_end is None:
            prov.append(f"integrator.t_end = {system.tau!r} (default tau)")
        integrator = IntegratorConfig(
            dt=dt, t_end=t_end,
            hermitize=get("integrator.hermitize"),
            renormalize_trace=get("integrator.renormalize_trace"),
            positivity_tol=get("integrator.positivity_tol"),
            record_every=get("integrator.record_every"),
            lindblad_convention=get("integrator.lindblad_convention"),
            energy_reference=get("run.energy_reference"),
        )
        integrator.resolve(system.tau)

        init = get("run.initial_state")
        level = typed.get("run.initial_level")
        init_t = typed.get("run.initial_T")
        if init == "pure-level" and (level is None or not 1 <= level <= n):
            raise ConfigError([f"run.initial_level: pure-level needs 1 <= level <= {n}"])
        if init == "gibbs" and (init_t is None or init_t <= 0):
            raise ConfigError(["run.initial_T: gibbs initial state needs a positive temperature"])
        cfg = RunConfig(
            system=system, bath=bath, integrator=integrator,
            initial_state=init, initial_level=level, initial_temperature=init_t,
            omega=get("bath.omega"), rate_floor=get("bath.rate_floor"), label=get("run.label"),
            values=typed, tokens={k: v for k, (v, _) in raw.items()}, provenance=tuple(prov),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError([str(exc)]) from None
    for line in prov:
        log.info("config: %s", line)
    return cfg


def parse_config(text: str, strict: bool = True) -> RunConfig:
    """Parse and validate configuration text.

    Raises:
        ConfigError: for unknown keys (when ``strict``), duplicates, bad
            values, missing required keys or violated invariants; messages
            carry line numbers where they apply.
    """
    return build_config(tokenize(text, strict=strict))


def render_config(cfg: RunConfig) -> str:
    """Config text that parses back to ``cfg`` (tokens as given, sections in schema order)."""
    by_section: dict[str, list[str]] = {}
    for dotted, token in cfg.tokens.items():
        section, _, key = dotted.rpartition(".")
        by_section.setdefault(section, []).append(f"{key} = {token}")
    order = ["system"] + sorted(s for s in by_section if s.startswith("drive.")) + [
        "bath", "integrator", "run"]
    out = []
    for section in order:
        if section in by_section:
            out.append(f"[{section}]")
            out.extend(by_section[section])
            out.append("")
    return "\n".join(out)


__all__ = ["ConfigError", "RunConfig", "SCHEMA", "build_config", "parse_config",
           "parse_number", "render_config"]
