"""
Joint spectral amplitude of the downconverted biphoton.

The two-photon amplitude is the product of a pump envelope term ``alpha``
and the crystal phase-matching function ``phi_L``.  It is tabulated on a
square grid of detunings (nu_s, nu_i) from the degenerate frequency w_p/2
and rescaled to unit L2 norm; the overall coupling constant is dropped.

Two delta-function limits are supported without huge grids:

* ``"cw"``   -- continuous-wave pump, amplitude confined to nu_s + nu_i = 0
  (the twin-beam state, TB)
* ``"long"`` -- infinitely long crystal, amplitude confined to nu_s = nu_i
  (the difference-beam state, DB)

Both limits are built at first order in the dispersion, where the ridge
positions are exact.  They are available as one-dimensional
:class:`LimitState` objects and as bands on a :class:`JsaGrid`.

Pump convention: the field spectrum is exp(-delta^2 / (2 Omega_p^2)) in
pump detuning delta, so the DB spectral function phi(w) = alpha(w_p/2 + w,
w_p/2 + w) has |phi(w)|^2 = exp(-4 w^2 / Omega_p^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .dispersion import (
    CrystalConfig,
    _check_positive,
    delta_k_detuned,
    gamma,
    refractive_index,
)
from .errors import ResolutionError
from .phasematch import omega_f

LIMITS = (None, "cw", "long")

DEFAULT_N = 512
MAX_AUTO_N = 8192


@dataclass(frozen=True)
class PumpSpectrum:
    omega_p: float
    bandwidth: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("pump center frequency must be positive")
        if not self.bandwidth > 0:
            raise ValueError("pump bandwidth must be positive")


def pump_amplitude_detuned(p: PumpSpectrum, delta):
    delta = np.asarray(delta, dtype=float)
    return np.exp(-0.5 * (delta / p.bandwidth) ** 2) + 0j


def pump_amplitude(p: PumpSpectrum, omega):
    """Transform-limited Gaussian pump spectrum, unit peak at w_p."""
    _check_positive(omega)
    return pump_amplitude_detuned(p, np.asarray(omega, dtype=float) - p.omega_p)


def _prefactor_detuned(cfg, nu_s, nu_i, flat):
    half = 0.5 * cfg.omega_p
    if flat:
        n_s = refractive_index(cfg.signal, half)
        n_i = refractive_index(cfg.idler, half)
        return half / (n_s * n_i)
    ws = half + np.asarray(nu_s, dtype=float)
    wi = half + np.asarray(nu_i, dtype=float)
    return np.sqrt(ws * wi) / (refractive_index(cfg.signal, ws) * refractive_index(cfg.idler, wi))


def alpha_detuned(cfg, p, nu_s, nu_i, flat_prefactor=False):
    nu_s = np.asarray(nu_s, dtype=float)
    nu_i = np.asarray(nu_i, dtype=float)
    pump = pump_amplitude_detuned(p, nu_s + nu_i + (cfg.omega_p - p.omega_p))
    return _prefactor_detuned(cfg, nu_s, nu_i, flat_prefactor) * pump


def alpha(cfg: CrystalConfig, p: PumpSpectrum, omega_s, omega_i, flat_prefactor=False):
    """Pump term sqrt(w_s w_i) / (n_s n_i) * E_p(w_s + w_i).

    With ``flat_prefactor`` the slowly varying sqrt(w_s w_i)/(n_s n_i) is
    frozen at its degenerate-point value.
    """
    _check_positive(omega_s)
    _check_positive(omega_i)
    half = 0.5 * cfg.omega_p
    return alpha_detuned(cfg, p, np.asarray(omega_s, dtype=float) - half,
                         np.asarray(omega_i, dtype=float) - half, flat_prefactor)


def phi_L_detuned(cfg, nu_s, nu_i):
    dk = delta_k_detuned(cfg, nu_s, nu_i)
    # sin(dk L/2) / (dk/2) == L sinc(dk L / 2pi)
    return cfg.length * np.sinc(dk * cfg.length / (2.0 * math.pi))


def phi_L(cfg: CrystalConfig, omega_s, omega_i):
    """Phase-matching function sin(dk L/2)/(dk/2), in um."""
    _check_positive(omega_s)
    _check_positive(omega_i)
    half = 0.5 * cfg.omega_p
    return phi_L_detuned(cfg, np.asarray(omega_s, dtype=float) - half,
                         np.asarray(omega_i, dtype=float) - half)


def tb_spectral_density(cfg: CrystalConfig, omega):
    """Closed-form TB fluorescence spectrum sin^2(2pi w/W_f) / (2pi w/(W_f L))^2."""
    x = 2.0 * math.pi * np.asarray(omega, dtype=float) / omega_f(cfg)
    return cfg.length**2 * np.sinc(x / math.pi) ** 2


# -- grids -----------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform detuning axis shared by signal and idler."""

    n: int
    span: float

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 16, got {self.n}")
        if not self.span > 0:
            raise ValueError("grid span must be positive")

    @property
    def nu(self) -> np.ndarray:
        return np.linspace(-self.span, self.span, self.n)

    @property
    def dnu(self) -> float:
        return 2.0 * self.span / (self.n - 1)


def _feature_widths(cfg, pump, limit):
    widths = {}
    if limit != "cw":
        widths["pump bandwidth Omega_p"] = pump.bandwidth
    g = gamma(cfg)
    if limit != "long" and g > 0:
        widths["phase-matching width 2pi/(gamma L)"] = 2.0 * math.pi / (g * cfg.length)
    return widths


def check_resolution(cfg, pump, grid, limit=None):
    for name, width in _feature_widths(cfg, pump, limit).items():
        if not grid.dnu < width / 8.0:
            raise ResolutionError(
                f"grid step {grid.dnu:.4g} rad/ps does not resolve the {name} = "
                f"{width:.4g} rad/ps (need step < width/8)"
            )


def default_grid(cfg: CrystalConfig, pump: PumpSpectrum, limit=None) -> FrequencyGrid:
    """N = 512 over max(2 Omega_p, 8pi/(gamma L)); N doubles until resolved."""
    g = gamma(cfg)
    span = 2.0 * pump.bandwidth
    if g > 0:
        span = max(span, 8.0 * math.pi / (g * cfg.length))
    n = DEFAULT_N
    widths = _feature_widths(cfg, pump, limit).values()
    while n < MAX_AUTO_N and any(not 2.0 * span / (n - 1) < w / 8.0 for w in widths):
        n *= 2
    return FrequencyGrid(n, span)


# -- states ----------------------------------------------------------------


def _projection(index, weights, size):
    return np.bincount(index.ravel(), weights=weights.ravel(), minlength=size)


@dataclass(frozen=True, eq=False)
class JsaGrid:
    """Unit-norm amplitude; entry (a, b) sits at (w_p/2 + nu_a, w_p/2 + nu_b)."""

    grid: FrequencyGrid
    values: np.ndarray
    cfg: Optional[CrystalConfig] = None
    pump: Optional[PumpSpectrum] = None
    flat_prefactor: bool = False
    limit: Optional[str] = None

    @property
    def nu(self) -> np.ndarray:
        return self.grid.nu

    @property
    def dnu(self) -> float:
        return self.grid.dnu

    @property
    def omega_p(self) -> float:
        if self.cfg is not None:
            return self.cfg.omega_p
        if self.pump is not None:
            return self.pump.omega_p
        raise ValueError("JsaGrid carries no pump frequency")

    @property
    def kind(self) -> str:
        return {"cw": "TB", "long": "DB"}.get(self.limit, "DB_L" if self.cfg is not None else "generic")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dnu**2)

    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def projection(self, axis: str):
        """Joint intensity summed along lines of constant nu_s -/+ nu_i.

        Returns (coordinate, weight) where the coordinate is nu_s - nu_i for
        ``axis="difference"`` and nu_s + nu_i for ``axis="sum"``; weights
        integrate to the norm.
        """
        n = self.grid.n
        a, b = np.indices((n, n))
        w = self.intensity() * self.dnu**2
        if axis == "difference":
            weights = _projection(a - b + n - 1, w, 2 * n - 1)
            coords = (np.arange(2 * n - 1) - (n - 1)) * self.dnu
        elif axis == "sum":
            weights = _projection(a + b, w, 2 * n - 1)
            coords = -2.0 * self.grid.span + np.arange(2 * n - 1) * self.dnu
        else:
            raise ValueError(f"axis must be 'difference' or 'sum', got {axis!r}")
        return coords, weights

    def ridge_widths(self) -> dict:
        """RMS widths of the joint intensity along nu_s + nu_i and nu_s - nu_i."""
        out = {}
        for axis in ("sum", "difference"):
            x, w = self.projection(axis)
            total = w.sum()
            mean = np.dot(x, w) / total
            out[axis] = float(np.sqrt(np.dot((x - mean) ** 2, w) / total))
        return out

    def is_symmetric(self, rtol: float = 1e-8) -> bool:
        scale = np.max(np.abs(self.values))
        return bool(np.max(np.abs(self.values - self.values.T)) <= rtol * scale)

    def summary(self) -> dict:
        widths = self.ridge_widths()
        return {
            "kind": self.kind,
            "n": self.grid.n,
            "span": self.grid.span,
            "dnu": self.dnu,
            "norm": self.norm(),
            "flat_prefactor": self.flat_prefactor,
            "sum_width_rms": widths["sum"],
            "difference_width_rms": widths["difference"],
        }

    def rows(self) -> Iterator[tuple]:
        nu = self.nu
        for a in range(self.grid.n):
            for b in range(self.grid.n):
                v = self.values[a, b]
                yield nu[a], nu[b], v.real, v.imag


def _tb_amplitude(cfg, nu):
    # TB spectral function phi(w) ~ Phi_L(w_p/2 - w, w_p/2 + w)
    cfg1 = cfg.first_order()
    return phi_L_detuned(cfg1, -nu, nu) + 0j


def _db_amplitude(cfg, pump, nu, flat_prefactor):
    return alpha_detuned(cfg, pump, nu, nu, flat_prefactor)


def build_jsa(
    cfg: CrystalConfig,
    pump: PumpSpectrum,
    grid: Optional[FrequencyGrid] = None,
    *,
    flat_prefactor: bool = False,
    limit: Optional[str] = None,
) -> JsaGrid:
    """Tabulate alpha * phi_L on ``grid`` and normalize to unit L2 norm.

    ``limit="cw"`` places the TB amplitude on the antidiagonal and
    ``limit="long"`` the DB amplitude on the diagonal, one cell per row.
    """
    if limit not in LIMITS:
        raise ValueError(f"limit must be one of {LIMITS}, got {limit!r}")
    if not math.isclose(pump.omega_p, cfg.omega_p, rel_tol=1e-12):
        raise ValueError("pump center frequency differs from the crystal's expansion center")
    if grid is None:
        grid = default_grid(cfg, pump, limit)
    check_resolution(cfg, pump, grid, limit)
    nu = grid.nu
    n = grid.n
    if limit is None:
        ns, ni = np.meshgrid(nu, nu, indexing="ij")
        values = alpha_detuned(cfg, pump, ns, ni, flat_prefactor) * phi_L_detuned(cfg, ns, ni)
    else:
        values = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        if limit == "cw":
            # nu_a + nu_{n-1-a} == 0 on a symmetric axis
            values[idx, idx[::-1]] = _tb_amplitude(cfg, -nu)
        else:
            values[idx, idx] = _db_amplitude(cfg, pump, nu, flat_prefactor)
    values = np.asarray(values, dtype=complex)
    norm = np.sqrt(np.sum(np.abs(values) ** 2)) * grid.dnu
    if norm == 0:
        raise ResolutionError("amplitude vanishes everywhere on the grid")
    return JsaGrid(grid, values / norm, cfg, pump, flat_prefactor, limit)


def marginal_spectra(j: JsaGrid):
    """Signal and idler spectra; each integrates to one with weight dnu."""
    inten = j.intensity()
    return inten.sum(axis=1) * j.dnu, inten.sum(axis=0) * j.dnu


@dataclass(frozen=True, eq=False)
class LimitState:
    """One-dimensional TB or DB amplitude phi(w) on a uniform detuning axis.

    TB places the photons at (w_p/2 - w, w_p/2 + w); DB at (w_p/2 + w,
    w_p/2 + w).
    """

    kind: str
    omega: np.ndarray
    amplitude: np.ndarray
    omega_p: float
    cfg: Optional[CrystalConfig] = None
    pump: Optional[PumpSpectrum] = None
    flat_prefactor: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("TB", "DB"):
            raise ValueError(f"limit kind must be 'TB' or 'DB', got {self.kind!r}")

    @property
    def domega(self) -> float:
        return float(self.omega[1] - self.omega[0])

    def density(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def projection(self, axis: str):
        w = self.density() * self.domega
        collapsed = (np.zeros(1), np.array([w.sum()]))
        if axis == "difference":
            return (-2.0 * self.omega, w) if self.kind == "TB" else collapsed
        if axis == "sum":
            return collapsed if self.kind == "TB" else (2.0 * self.omega, w)
        raise ValueError(f"axis must be 'difference' or 'sum', got {axis!r}")

    def is_symmetric(self, rtol: float = 1e-8) -> bool:
        if self.kind == "DB":
            return True
        scale = np.max(np.abs(self.amplitude))
        axis_ok = np.allclose(self.omega, -self.omega[::-1], rtol=0, atol=1e-9 * abs(self.domega))
        diff = np.max(np.abs(self.amplitude - self.amplitude[::-1]))
        return bool(axis_ok and diff <= rtol * scale)


def _limit_axis(half_width, n_points, omega_p):
    half_width = min(half_width, 0.9 * 0.5 * omega_p)
    return np.linspace(-half_width, half_width, n_points)


def tb_limit(cfg: CrystalConfig, n_points: int = 2**15 + 1, n_lobes: int = 320) -> LimitState:
    """cw-pumped twin-beam amplitude covering ``n_lobes`` sinc zeros per side."""
    w_f = omega_f(cfg)
    omega = _limit_axis(0.5 * n_lobes * w_f, n_points, cfg.omega_p)
    amp = _tb_amplitude(cfg, omega)
    amp = amp / np.sqrt(np.sum(np.abs(amp) ** 2) * (omega[1] - omega[0]))
    return LimitState("TB", omega, amp, cfg.omega_p, cfg, None, True, {"omega_f": w_f})


def db_limit(
    cfg: CrystalConfig,
    pump: PumpSpectrum,
    n_points: int = 2**12 + 1,
    n_widths: float = 4.0,
    flat_prefactor: bool = False,
) -> LimitState:
    """Infinite-crystal difference-beam amplitude phi(w) = alpha(w_p/2+w, w_p/2+w)."""
    omega = _limit_axis(n_widths * pump.bandwidth, n_points, cfg.omega_p)
    amp = _db_amplitude(cfg, pump, omega, flat_prefactor)
    amp = amp / np.sqrt(np.sum(np.abs(amp) ** 2) * (omega[1] - omega[0]))
    return LimitState("DB", omega, amp, cfg.omega_p, cfg, pump, flat_prefactor)

