"""Run configuration files: sectioned key = value text with unit suffixes.

Values accept SI unit suffixes appropriate to the field (fF, pH, GHz,
dBm, ...). Everything is normalized on load: capacitances to farad,
inductances to henry, rates to rad/s, energies to joule, powers to watt.
A bare number is interpreted in the field's base unit, which is also the
form :func:`dump_config` writes, so load(dump(load(f))) is the identity.
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .circuit import CircuitParams
from .constants import PLANCK, TWO_PI, dbm_to_watts
from .errors import ParseError, ValidationError

_CAPACITANCE = {"fF": 1e-15, "pF": 1e-12, "nF": 1e-9, "uF": 1e-6, "F": 1.0}
_INDUCTANCE = {"pH": 1e-12, "nH": 1e-9, "uH": 1e-6, "mH": 1e-3, "H": 1.0}
_RATE = {"Hz": TWO_PI, "kHz": TWO_PI * 1e3, "MHz": TWO_PI * 1e6,
         "GHz": TWO_PI * 1e9, "THz": TWO_PI * 1e12, "rad/s": 1.0}
_ENERGY = {"Hz": PLANCK, "kHz": PLANCK * 1e3, "MHz": PLANCK * 1e6,
           "GHz": PLANCK * 1e9, "THz": PLANCK * 1e12, "J": 1.0}
_POWER = {"pW": 1e-12, "nW": 1e-9, "uW": 1e-6, "mW": 1e-3, "W": 1.0}
_RESISTANCE = {"ohm": 1.0, "Ohm": 1.0, "kohm": 1e3}

# (section, key) -> (kind, required type)
_SCHEMA: dict[str, dict[str, str]] = {
    "preset": {"name": "str"},
    "circuit": {
        "C_a": "capacitance", "C_a_prime": "capacitance", "C_ab": "capacitance",
        "C_aw": "capacitance", "C_b": "capacitance", "C_b_prime": "capacitance",
        "C_bw": "capacitance", "L_b": "inductance", "E_J": "energy",
        "E_J_prime": "energy", "M": "int", "N": "int", "Z_0": "resistance",
        "P_b": "power",
    },
    "run": {
        "N": "int", "seed": "int", "omega_s_over_J": "float",
        "omega_min_over_J": "float", "omega_max_over_J": "float",
        "omega_points": "int", "workers": "int",
    },
    "signal": {"flux": "rate", "input_site": "int"},
    "disorder": {
        "param": "str", "sigma_list": "floats", "realizations": "int",
        "master_seed": "int",
    },
}

_BASE_UNIT = {"capacitance": "F", "inductance": "H", "rate": "rad/s",
              "energy": "J", "power": "W", "resistance": "ohm"}


@dataclass(frozen=True)
class RunOptions:
    N: int | None = None
    seed: int = 1234
    omega_s_over_J: float = -0.5
    omega_min_over_J: float = -3.0
    omega_max_over_J: float = 3.0
    omega_points: int = 301
    workers: int | None = None


@dataclass(frozen=True)
class DisorderOptions:
    param: str = "gc"
    sigma_list: tuple[float, ...] = (0.02, 0.05, 0.08)
    realizations: int = 500
    master_seed: int = 2024


@dataclass(frozen=True)
class RunConfig:
    """Validated, unit-normalized run configuration."""

    preset: str | None = None
    circuit: CircuitParams | None = None
    run: RunOptions = field(default_factory=RunOptions)
    signal_flux: float | None = None    # |alpha_s|^2 in rad/s
    input_site: int = 1
    disorder: DisorderOptions = field(default_factory=DisorderOptions)


def _find_line(text: str, section: str, key: str) -> int | None:
    in_section = False
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            in_section = stripped[1:-1].strip() == section
        elif in_section and stripped.split("=")[0].strip() == key:
            return i
    return None


def _parse_quantity(raw: str, kind: str, section: str, key: str,
                    text: str) -> float | int | str | tuple:
    line = _find_line(text, section, key)
    raw = raw.strip()
    if kind == "str":
        return raw
    if kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"[{section}] {key}: expected an integer, got {raw!r}", line)
    if kind == "floats":
        try:
            return tuple(float(tok) for tok in raw.replace(",", " ").split())
        except ValueError:
            raise ParseError(f"[{section}] {key}: expected floats, got {raw!r}", line)

    parts = raw.split()
    if len(parts) == 1:
        try:
            return float(parts[0])
        except ValueError:
            raise ParseError(f"[{section}] {key}: expected a number, got {raw!r}", line)
    if len(parts) != 2:
        raise ParseError(f"[{section}] {key}: expected 'value [unit]', got {raw!r}", line)
    try:
        value = float(parts[0])
    except ValueError:
        raise ParseError(f"[{section}] {key}: bad numeric part {parts[0]!r}", line)
    unit = parts[1]

    if kind == "float":
        raise ParseError(f"[{section}] {key}: dimensionless field takes no unit", line)
    if kind == "power" and unit == "dBm":
        return dbm_to_watts(value)
    table = {"capacitance": _CAPACITANCE, "inductance": _INDUCTANCE, "rate": _RATE,
             "energy": _ENERGY, "power": _POWER, "resistance": _RESISTANCE}[kind]
    if unit not in table:
        raise ParseError(
            f"[{section}] {key}: unknown {kind} unit {unit!r} "
            f"(expected one of {sorted(table)})", line)
    return value * table[unit]


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a configuration file into a :class:`RunConfig`."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (C_a vs c_a)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ParseError(str(exc).splitlines()[0], line) from exc

    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValidationError(section, "unknown section")
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ValidationError(f"{section}.{key}", "unknown key")
            values[section][key] = _parse_quantity(raw, _SCHEMA[section][key], section, key, text)

    preset = values.get("preset", {}).get("name")

    circuit = None
    if "circuit" in values:
        c = values["circuit"]
        required = {"C_a", "C_a_prime", "C_ab", "C_aw", "C_b", "C_b_prime", "C_bw",
                    "L_b", "E_J", "E_J_prime"}
        missing = required - set(c)
        if missing:
            raise ValidationError("circuit", f"missing keys {sorted(missing)}")
        try:
            circuit = CircuitParams(
                C_a=c["C_a"], C_ap=c["C_a_prime"], C_ab=c["C_ab"], C_aw=c["C_aw"],
                C_b=c["C_b"], C_bp=c["C_b_prime"], C_bw=c["C_bw"], L_b=c["L_b"],
                EJ=c["E_J"], EJp=c["E_J_prime"], M=int(c.get("M", 1)),
                Z_0=c.get("Z_0", 50.0), P_b=c.get("P_b", 0.0), N=int(c.get("N", 1)),
            )
        except Exception as exc:
            raise ValidationError("circuit", str(exc)) from exc

    run = RunOptions()
    if "run" in values:
        run = replace(run, **{k: values["run"][k] for k in values["run"]})
    disorder = DisorderOptions()
    if "disorder" in values:
        disorder = replace(disorder, **{k: values["disorder"][k] for k in values["disorder"]})
        if disorder.param not in ("delta", "kappa", "J", "gs", "gc", "phi"):
            raise ValidationError("disorder.param", f"unknown family {disorder.param!r}")

    signal_flux = values.get("signal", {}).get("flux")
    input_site = int(values.get("signal", {}).get("input_site", 1))

    if preset is None and circuit is None:
        raise ValidationError("preset.name", "configuration names no preset and no circuit")

    return RunConfig(preset=preset, circuit=circuit, run=run,
                     signal_flux=signal_flux, input_site=input_site,
                     disorder=disorder)


def dump_config(cfg: RunConfig) -> str:
    """Normalized text form of ``cfg``; load(dump(cfg)) round-trips exactly."""
    from .dataio import fmt_value

    out = []
    if cfg.preset is not None:
        out += ["[preset]", f"name = {cfg.preset}", ""]
    if cfg.circuit is not None:
        c = cfg.circuit
        out += ["[circuit]"]
        for key, val in (("C_a", c.C_a), ("C_a_prime", c.C_ap), ("C_ab", c.C_ab),
                         ("C_aw", c.C_aw), ("C_b", c.C_b), ("C_b_prime", c.C_bp),
                         ("C_bw", c.C_bw), ("L_b", c.L_b), ("E_J", c.EJ),
                         ("E_J_prime", c.EJp), ("Z_0", c.Z_0), ("P_b", c.P_b)):
            out.append(f"{key} = {fmt_value(float(val))}")
        out += [f"M = {c.M}", f"N = {c.N}", ""]
    out += ["[run]"]
    for f in fields(RunOptions):
        val = getattr(cfg.run, f.name)
        if val is None:
            continue
        out.append(f"{f.name} = {fmt_value(val) if isinstance(val, float) else val}")
    out.append("")
    if cfg.signal_flux is not None or cfg.input_site != 1:
        out += ["[signal]"]
        if cfg.signal_flux is not None:
            out.append(f"flux = {fmt_value(float(cfg.signal_flux))}")
        out += [f"input_site = {cfg.input_site}", ""]
    d = cfg.disorder
    out += ["[disorder]", f"param = {d.param}",
            "sigma_list = " + " ".join(fmt_value(s) for s in d.sigma_list),
            f"realizations = {d.realizations}", f"master_seed = {d.master_seed}", ""]
    return "\n".join(out)
