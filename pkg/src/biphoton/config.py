"""
Run configuration: a sectioned key-value file with unit-suffixed numbers.

Example::

    [crystal]
    preset = ppktp-790        ; or inline pump_k0 ... idler_k2
    length = 2 cm
    period = solve            ; solve | none | <value> um
    dispersion_order = 2      ; 1 drops group-velocity dispersion

    [pump]
    wavelength = 790 nm       ; or omega = <rad/ps>
    bandwidth = 3 THz         ; Omega_p/2pi in THz, or rad/ps; or fwhm = 170 fs

    [state]
    kind = DB_L               ; TB | DB | DB_L
    flat_prefactor = false

    [grid]
    n = auto
    span = auto

    [scan]
    tau_min = auto
    tau_max = auto
    points = auto

    [analysis]
    rank_cut = 64

    [output]
    dir = out
    format = csv

Unit conversions applied at load: w = 2 pi c / lambda; a bandwidth in THz is
Omega_p = 2 pi f; a pulse FWHM gives Omega_p = 4 sqrt(ln 2) / FWHM.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

from .dispersion import C_UM_PER_PS, PRESETS, BeamDispersion, CrystalConfig, get_preset
from .errors import ConfigError

STATE_KINDS = ("TB", "DB", "DB_L")
FORMATS = ("csv", "json")
BEAMS = ("pump", "signal", "idler")
COEFFS = ("k0", "k1", "k2")

_LENGTH = {"um": 1.0, "µm": 1.0, "mm": 1e3, "cm": 1e4, "m": 1e6}
_TIME = {"ps": 1.0, "fs": 1e-3}
_WAVELENGTH = {"nm": 1e-3, "um": 1.0, "µm": 1.0}
_ANGULAR = {"rad/ps": 1.0, "thz": 2.0 * math.pi}
_BARE = {"": 1.0}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s]*)\s*$")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration in canonical units (um, ps, rad/ps)."""

    length: float
    omega_p: float
    bandwidth: float
    preset: Optional[str] = "ppktp-790"
    coefficients: Optional[dict] = None
    period: Union[str, float, None] = "solve"
    dispersion_order: int = 2
    state: str = "DB_L"
    flat_prefactor: bool = False
    grid_n: Optional[int] = None
    grid_span: Optional[float] = None
    tau_min: Optional[float] = None
    tau_max: Optional[float] = None
    points: Optional[int] = None
    rank_cut: int = 64
    out_dir: str = "."
    format: str = "csv"
    source: Optional[str] = field(default=None, compare=False)

    def crystal(self) -> CrystalConfig:
        """Crystal with the configured period; "solve" is resolved by the caller."""
        period = self.period if isinstance(self.period, float) else None
        if self.preset is not None:
            cfg = get_preset(self.preset, length=self.length, period=period)
        else:
            half = 0.5 * self.omega_p
            beams = {
                b: BeamDispersion(self.omega_p if b == "pump" else half,
                                  *(self.coefficients[f"{b}_{c}"] for c in COEFFS))
                for b in BEAMS
            }
            cfg = CrystalConfig(length=self.length, omega_p=self.omega_p, period=period, **beams)
        return cfg.first_order() if self.dispersion_order == 1 else cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("source")
        return d


def _line_of(text: str, section: str, key: str) -> Optional[int]:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip().lower()
        elif current == section and re.match(rf"^{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return lineno
    return None


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, text: str, source: str):
        self.parser = parser
        self.text = text
        self.source = source

    def error(self, section, key, msg) -> ConfigError:
        line = _line_of(self.text, section, key) if key else None
        where = f"{self.source}:{line}: " if line else f"{self.source}: "
        name = f"[{section}] {key}" if key else f"[{section}]"
        return ConfigError(f"{where}{name}: {msg}")

    def raw(self, section, key):
        if not self.parser.has_section(section):
            return None
        value = self.parser.get(section, key, fallback=None)
        return None if value is None else value.strip()

    def quantity(self, section, key, units, default_unit=""):
        raw = self.raw(section, key)
        if raw is None:
            return None
        m = _NUMBER.match(raw)
        if not m:
            raise self.error(section, key, f"expected a number, got {raw!r}")
        unit = (m.group(2) or default_unit).lower()
        if unit not in units:
            allowed = ", ".join(u for u in units if u) or "none"
            raise self.error(section, key, f"unknown unit {m.group(2)!r} (allowed: {allowed})")
        value = float(m.group(1)) * units[unit]
        if not math.isfinite(value):
            raise self.error(section, key, "value must be finite")
        return value

    def auto_or(self, section, key, units, default_unit=""):
        raw = self.raw(section, key)
        if raw is None or raw.lower() == "auto":
            return None
        return self.quantity(section, key, units, default_unit)

    def integer(self, section, key, default=None, allow_auto=False):
        raw = self.raw(section, key)
        if raw is None or (allow_auto and raw.lower() == "auto"):
            return default
        try:
            return int(raw)
        except ValueError:
            raise self.error(section, key, f"expected an integer, got {raw!r}") from None

    def boolean(self, section, key, default=False):
        if self.raw(section, key) is None:
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise self.error(section, key, "expected true or false") from None


def parse_config(text: str, source: str = "<config>", base_dir: Optional[Path] = None) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from None
    r = _Reader(parser, text, source)

    if not parser.has_section("crystal"):
        raise ConfigError(f"{source}: missing [crystal] section")
    if not parser.has_section("pump"):
        raise ConfigError(f"{source}: missing [pump] section")

    preset = r.raw("crystal", "preset")
    inline = {f"{b}_{c}": r.quantity("crystal", f"{b}_{c}", _BARE) for b in BEAMS for c in COEFFS}
    given = {k: v for k, v in inline.items() if v is not None}
    if preset is not None and given:
        raise r.error("crystal", "preset", "give either a preset or inline coefficients, not both")
    if preset is None:
        missing = [k for k, v in inline.items() if v is None and not k.endswith("k2")]
        if missing:
            raise r.error("crystal", missing[0], "missing (no preset given)")
        coefficients = {k: (0.0 if v is None else v) for k, v in inline.items()}
    else:
        if preset not in PRESETS:
            raise r.error("crystal", "preset", f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
        coefficients = None

    length = r.quantity("crystal", "length", _LENGTH, "um")
    if length is None:
        raise r.error("crystal", "length", "missing")
    if not length > 0:
        raise r.error("crystal", "length", "must be positive")

    period_raw = r.raw("crystal", "period")
    if period_raw is None or period_raw.lower() == "solve":
        period = "solve"
    elif period_raw.lower() == "none":
        period = None
    else:
        period = r.quantity("crystal", "period", _LENGTH, "um")
        if not period > 0:
            raise r.error("crystal", "period", "must be positive")

    order = r.integer("crystal", "dispersion_order", 2)
    if order not in (1, 2):
        raise r.error("crystal", "dispersion_order", "must be 1 or 2")

    wavelength = r.quantity("pump", "wavelength", _WAVELENGTH, "um")
    omega = r.quantity("pump", "omega", _ANGULAR, "rad/ps")
    if wavelength is not None and omega is not None:
        raise r.error("pump", "omega", "give exactly one of wavelength / omega")
    if wavelength is not None:
        if not wavelength > 0:
            raise r.error("pump", "wavelength", "must be positive")
        omega = 2.0 * math.pi * C_UM_PER_PS / wavelength
    if omega is None:
        if preset is None:
            raise r.error("pump", "wavelength", "missing (wavelength or omega required)")
        omega = get_preset(preset).omega_p
    if not omega > 0:
        raise r.error("pump", "omega", "must be positive")
    if preset is not None:
        center = get_preset(preset).omega_p
        if not math.isclose(omega, center, rel_tol=1e-9):
            key = "wavelength" if wavelength is not None else "omega"
            raise r.error("pump", key, f"preset {preset!r} is expanded about {center!r} rad/ps")
        omega = center

    bandwidth = r.quantity("pump", "bandwidth", _ANGULAR, "rad/ps")
    fwhm = r.quantity("pump", "fwhm", _TIME, "ps")
    if bandwidth is not None and fwhm is not None:
        raise r.error("pump", "fwhm", "give exactly one of bandwidth / fwhm")
    if fwhm is not None:
        if not fwhm > 0:
            raise r.error("pump", "fwhm", "must be positive")
        bandwidth = 4.0 * math.sqrt(math.log(2.0)) / fwhm
    if bandwidth is None:
        raise r.error("pump", "bandwidth", "missing (bandwidth or fwhm required)")
    if not bandwidth > 0:
        raise r.error("pump", "bandwidth", "must be positive")

    kind = (r.raw("state", "kind") or "DB_L").upper()
    if kind not in STATE_KINDS:
        raise r.error("state", "kind", f"must be one of {STATE_KINDS}")
    flat = r.boolean("state", "flat_prefactor", False)

    grid_n = r.integer("grid", "n", None, allow_auto=True)
    if grid_n is not None and (grid_n < 16 or grid_n & (grid_n - 1)):
        raise r.error("grid", "n", "must be a power of two >= 16")
    grid_span = r.auto_or("grid", "span", _ANGULAR, "rad/ps")
    if grid_span is not None and not grid_span > 0:
        raise r.error("grid", "span", "must be positive")

    tau_min = r.auto_or("scan", "tau_min", _TIME, "ps")
    tau_max = r.auto_or("scan", "tau_max", _TIME, "ps")
    if (tau_min is None) != (tau_max is None):
        raise r.error("scan", "tau_max", "tau_min and tau_max must both be set or both auto")
    if tau_min is not None and not tau_min < tau_max:
        raise r.error("scan", "tau_max", "must exceed tau_min")
    points = r.integer("scan", "points", None, allow_auto=True)
    if points is not None and points < 2:
        raise r.error("scan", "points", "need at least 2")

    rank_cut = r.integer("analysis", "rank_cut", 64)
    if rank_cut < 1:
        raise r.error("analysis", "rank_cut", "must be positive")

    out_dir = r.raw("output", "dir") or "."
    if base_dir is not None and not Path(out_dir).is_absolute():
        out_dir = str(base_dir / out_dir)
    fmt = (r.raw("output", "format") or "csv").lower()
    if fmt not in FORMATS:
        raise r.error("output", "format", f"must be one of {FORMATS}")

    return RunConfig(
        length=length,
        omega_p=omega,
        bandwidth=bandwidth,
        preset=preset,
        coefficients=coefficients,
        period=period,
        dispersion_order=order,
        state=kind,
        flat_prefactor=flat,
        grid_n=grid_n,
        grid_span=grid_span,
        tau_min=tau_min,
        tau_max=tau_max,
        points=points,
        rank_cut=rank_cut,
        out_dir=out_dir,
        format=fmt,
        source=source,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, source=str(path), base_dir=path.parent)


def crystal_section(cfg: CrystalConfig) -> dict:
    """Inline [crystal] coefficients reproducing ``cfg`` (e.g. a preset)."""
    out = {"length": repr(cfg.length)}
    out["period"] = "none" if cfg.period is None else repr(cfg.period)
    for b in BEAMS:
        beam = getattr(cfg, b)
        for c in COEFFS:
            out[f"{b}_{c}"] = repr(getattr(beam, c))
    return out


def dump_config(rc: RunConfig) -> str:
    """Serialize to the file format; parse_config(dump_config(rc)) == rc."""
    def auto(v):
        return "auto" if v is None else repr(v)

    crystal = {"length": repr(rc.length)}
    if rc.preset is not None:
        crystal["preset"] = rc.preset
    else:
        crystal.update({k: repr(v) for k, v in rc.coefficients.items()})
    if rc.period == "solve":
        crystal["period"] = "solve"
    elif rc.period is None:
        crystal["period"] = "none"
    else:
        crystal["period"] = repr(rc.period)
    crystal["dispersion_order"] = str(rc.dispersion_order)

    sections = {
        "crystal": crystal,
        "pump": {"omega": repr(rc.omega_p), "bandwidth": repr(rc.bandwidth)},
        "state": {"kind": rc.state, "flat_prefactor": str(rc.flat_prefactor).lower()},
        "grid": {"n": auto(rc.grid_n), "span": auto(rc.grid_span)},
        "scan": {"tau_min": auto(rc.tau_min), "tau_max": auto(rc.tau_max), "points": auto(rc.points)},
        "analysis": {"rank_cut": str(rc.rank_cut)},
        "output": {"dir": rc.out_dir, "format": rc.format},
    }
    lines = []
    for name, items in sections.items():
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {v}" for k, v in items.items())
        lines.append("")
    return "\n".join(lines)
