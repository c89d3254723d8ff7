"""
Per-beam dispersion and the downconversion phase mismatch.

Each beam (pump, signal, idler) carries a second-order Taylor model of its
wavenumber about a reference frequency::

    k(w) = k0 + k1 (w - w_ref) + k2/2 (w - w_ref)**2

Units are fixed across the package: angular frequency in rad/ps, time in
ps, length in um.  Wavenumbers are therefore rad/um, group slowness k1 is
ps/um and group-velocity dispersion k2 is ps^2/um.

The mismatch is evaluated in detuning form (offsets from the degenerate
point w_p/2) so that the large zeroth-order wavenumbers never cancel
inside a finite-difference stencil.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DomainError

C_UM_PER_PS = 299.792458  # speed of light, exact


@dataclass(frozen=True)
class BeamDispersion:
    omega_ref: float
    k0: float
    k1: float
    k2: float = 0.0

    def __post_init__(self):
        for name in ("omega_ref", "k0", "k1", "k2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega_ref <= 0:
            raise ValueError("omega_ref must be positive")
        if self.k0 <= 0:
            raise ValueError("k0 must be positive (refractive index > 0)")

    def offset(self, delta):
        """Wavenumber change k(w_ref + delta) - k0."""
        return self.k1 * delta + 0.5 * self.k2 * delta * delta

    def first_order(self) -> "BeamDispersion":
        return replace(self, k2=0.0)


def _check_positive(omega):
    if np.any(np.asarray(omega) <= 0):
        raise DomainError("angular frequency must be positive")


def wavenumber(d: BeamDispersion, omega):
    _check_positive(omega)
    return d.k0 + d.offset(np.asarray(omega, dtype=float) - d.omega_ref)


def refractive_index(d: BeamDispersion, omega):
    _check_positive(omega)
    return C_UM_PER_PS * wavenumber(d, omega) / np.asarray(omega, dtype=float)


def vacuum(omega_ref: float) -> BeamDispersion:
    """Dispersion of free space, k = w/c."""
    return BeamDispersion(omega_ref, omega_ref / C_UM_PER_PS, 1.0 / C_UM_PER_PS, 0.0)


@dataclass(frozen=True)
class CrystalConfig:
    """Three beam dispersions, crystal length and optional poling period.

    ``period`` is None for an unpoled crystal.  Signal and idler are
    expanded about ``omega_p / 2`` and the pump about ``omega_p``.
    """

    pump: BeamDispersion
    signal: BeamDispersion
    idler: BeamDispersion
    length: float
    omega_p: float
    period: Optional[float] = None

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError("crystal length must be positive")
        if self.period is not None and not (self.period > 0 and math.isfinite(self.period)):
            raise ValueError("grating period must be positive")
        half = 0.5 * self.omega_p
        refs_ok = (
            math.isclose(self.pump.omega_ref, self.omega_p, rel_tol=1e-12)
            and math.isclose(self.signal.omega_ref, half, rel_tol=1e-12)
            and math.isclose(self.idler.omega_ref, half, rel_tol=1e-12)
        )
        if not refs_ok:
            raise ValueError("pump must be expanded about omega_p and signal/idler about omega_p/2")

    def with_period(self, period: Optional[float]) -> "CrystalConfig":
        return replace(self, period=period)

    def with_length(self, length: float) -> "CrystalConfig":
        return replace(self, length=length)

    def first_order(self) -> "CrystalConfig":
        """Copy with every group-velocity-dispersion term dropped."""
        return replace(
            self,
            pump=self.pump.first_order(),
            signal=self.signal.first_order(),
            idler=self.idler.first_order(),
        )

    def swapped(self) -> "CrystalConfig":
        """Copy with signal and idler dispersions exchanged."""
        return replace(self, signal=self.idler, idler=self.signal)


def zeroth_order_mismatch(cfg: CrystalConfig) -> float:
    """Unpoled mismatch k_p(w_p) - k_s(w_p/2) - k_i(w_p/2)."""
    return cfg.pump.k0 - cfg.signal.k0 - cfg.idler.k0


def grating_term(cfg: CrystalConfig) -> float:
    """Grating wavevector added to the mismatch.

    The poling of a real crystal supplies both +2pi/Lambda and -2pi/Lambda
    Fourier orders; the one opposing the unpoled zeroth-order mismatch is
    used (a negative mismatch receives +2pi/Lambda).
    """
    if cfg.period is None:
        return 0.0
    sign = -1.0 if zeroth_order_mismatch(cfg) > 0 else 1.0
    return sign * 2.0 * math.pi / cfg.period


def delta_k_detuned(cfg: CrystalConfig, nu_s, nu_i):
    """Phase mismatch (rad/um) at detunings nu_s, nu_i from w_p/2."""
    nu_s = np.asarray(nu_s, dtype=float)
    nu_i = np.asarray(nu_i, dtype=float)
    half = 0.5 * cfg.omega_p
    ds = nu_s + (half - cfg.signal.omega_ref)
    di = nu_i + (half - cfg.idler.omega_ref)
    dp = nu_s + nu_i + (cfg.omega_p - cfg.pump.omega_ref)
    const = zeroth_order_mismatch(cfg) + grating_term(cfg)
    return const + cfg.pump.offset(dp) - cfg.signal.offset(ds) - cfg.idler.offset(di)


def delta_k(cfg: CrystalConfig, omega_s, omega_i):
    """k_p(w_s + w_i) - k_s(w_s) - k_i(w_i), plus the grating term if poled."""
    _check_positive(omega_s)
    _check_positive(omega_i)
    half = 0.5 * cfg.omega_p
    return delta_k_detuned(cfg, np.asarray(omega_s, dtype=float) - half,
                           np.asarray(omega_i, dtype=float) - half)


def gamma(cfg: CrystalConfig) -> float:
    """|k1_p - k1_s|, the pump/signal group-slowness mismatch (ps/um)."""
    return abs(cfg.pump.k1 - cfg.signal.k1)


def slowness_gap(cfg: CrystalConfig) -> float:
    """|k1_s - k1_i| (ps/um); zero for a type-I crystal."""
    return abs(cfg.signal.k1 - cfg.idler.k1)


def hessian(cfg: CrystalConfig) -> np.ndarray:
    """Second partial derivatives of the mismatch in (w_s, w_i)."""
    a = cfg.pump.k2
    return np.array([[a - cfg.signal.k2, a], [a, a - cfg.idler.k2]])


def hessian_mu(cfg: CrystalConfig) -> float:
    """Largest-magnitude eigenvalue of the mismatch Hessian (ps^2/um)."""
    return float(np.max(np.abs(np.linalg.eigvalsh(hessian(cfg)))))


# -- presets ---------------------------------------------------------------

PPKTP_WAVELENGTH_UM = 0.790
PPKTP_PERIOD_UM = 47.7
PPKTP_GAMMA = 1.4e-4  # ps/um
PPKTP_MU = 3.6e-7  # ps^2/um
PPKTP_INDEX_SI = 1.80
PPKTP_SIGNAL_SLOWNESS = 6.0e-3  # ps/um, group index ~1.8


def ppktp_790(length: float = 2.0e4, period: Optional[float] = None) -> CrystalConfig:
    """Type-II PPKTP pumped at 790 nm, built to the quoted design point.

    Signal and idler share n = 1.80 at w_p/2; the pump index is set so the
    unpoled mismatch is -2pi/47.7 rad/um.  Group slownesses satisfy
    k1_p = (k1_s + k1_i)/2 with k1_p - k1_s = 1.4e-4 ps/um.  The second-order
    terms obey k2_s = k2_i = k2_p/2, whose Hessian eigenvalues are
    {3/2, -1/2} k2_p, so k2_p = 2 mu / 3.
    """
    omega_p = 2.0 * math.pi * C_UM_PER_PS / PPKTP_WAVELENGTH_UM
    half = 0.5 * omega_p
    k0_si = PPKTP_INDEX_SI * half / C_UM_PER_PS
    k0_p = 2.0 * k0_si - 2.0 * math.pi / PPKTP_PERIOD_UM
    k1_s = PPKTP_SIGNAL_SLOWNESS
    k1_p = k1_s + PPKTP_GAMMA
    k1_i = 2.0 * k1_p - k1_s
    k2_p = 2.0 * PPKTP_MU / 3.0
    return CrystalConfig(
        pump=BeamDispersion(omega_p, k0_p, k1_p, k2_p),
        signal=BeamDispersion(half, k0_si, k1_s, 0.5 * k2_p),
        idler=BeamDispersion(half, k0_si, k1_i, 0.5 * k2_p),
        length=length,
        omega_p=omega_p,
        period=period,
    )


PRESETS = {"ppktp-790": ppktp_790}


def get_preset(name: str, length: float = 2.0e4, period: Optional[float] = None) -> CrystalConfig:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown crystal preset {name!r}; known: {sorted(PRESETS)}") from None
    return factory(length=length, period=period)
