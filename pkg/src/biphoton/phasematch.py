"""Extended phase-matching design: grating period, residuals, length window."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .dispersion import (
    C_UM_PER_PS,
    CrystalConfig,
    gamma,
    grating_term,
    hessian_mu,
    refractive_index,
    slowness_gap,
    zeroth_order_mismatch,
)
from .errors import AlreadyPhaseMatchedError, DegenerateDesignError, TypeIError

DEFAULT_TOL_INDEX = 1e-9
DEFAULT_TOL_SLOWNESS = 1e-9  # ps/um


@dataclass(frozen=True)
class PhaseMatchReport:
    residual_index: float
    residual_slowness: float
    type_ii_gap: float
    gamma: float
    mu: float
    satisfied: dict

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LengthWindow:
    L_min: float
    L_max: float
    omega_bandwidth: float

    def contains(self, length: float, margin: float = 1.0) -> bool:
        return self.L_min * margin < length < self.L_max / margin

    def to_dict(self) -> dict:
        return {"L_min": self.L_min, "L_max": self.L_max, "Omega_p": self.omega_bandwidth}


def solve_grating_period(cfg: CrystalConfig) -> float:
    """Poling period (um) that cancels the unpoled zeroth-order mismatch."""
    dk0 = zeroth_order_mismatch(cfg)
    if dk0 == 0.0:
        raise AlreadyPhaseMatchedError("unpoled mismatch is zero; no grating needed")
    return 2.0 * math.pi / abs(dk0)


def check_extended_pm(
    cfg: CrystalConfig,
    tol_index: float = DEFAULT_TOL_INDEX,
    tol_slowness: float = DEFAULT_TOL_SLOWNESS,
) -> PhaseMatchReport:
    half = 0.5 * cfg.omega_p
    n_p = float(refractive_index(cfg.pump, cfg.omega_p))
    n_s = float(refractive_index(cfg.signal, half))
    n_i = float(refractive_index(cfg.idler, half))
    # grating_term carries the sign of the Fourier order in use
    grating_index = C_UM_PER_PS * grating_term(cfg) / cfg.omega_p
    residual_index = abs(n_p - 0.5 * (n_s + n_i) + grating_index)
    residual_slowness = abs(cfg.pump.k1 - 0.5 * (cfg.signal.k1 + cfg.idler.k1))
    gap = slowness_gap(cfg)
    flags = {
        "index": residual_index <= tol_index,
        "slowness": residual_slowness <= tol_slowness,
        "type_ii": gap > tol_slowness,
    }
    flags["overall"] = all(flags.values())
    return PhaseMatchReport(
        residual_index=residual_index,
        residual_slowness=residual_slowness,
        type_ii_gap=gap,
        gamma=gamma(cfg),
        mu=hessian_mu(cfg),
        satisfied=flags,
    )


def length_window(cfg: CrystalConfig, omega_bandwidth: float) -> LengthWindow:
    """Crystal lengths for which the long-crystal limit holds.

    L_min = 2pi / (gamma Omega_p) keeps the phase-matching ridge narrow
    compared to the pump; L_max = 8pi / (mu Omega_p^2) keeps the quadratic
    mismatch negligible across the pump band.
    """
    if not omega_bandwidth > 0:
        raise ValueError("pump bandwidth must be positive")
    g = gamma(cfg)
    mu = hessian_mu(cfg)
    if g == 0.0 or mu == 0.0:
        raise DegenerateDesignError(
            f"length window undefined: gamma={g:g} ps/um, mu={mu:g} ps^2/um must both be nonzero"
        )
    return LengthWindow(
        L_min=2.0 * math.pi / (g * omega_bandwidth),
        L_max=8.0 * math.pi / (mu * omega_bandwidth**2),
        omega_bandwidth=omega_bandwidth,
    )


def omega_f(cfg: CrystalConfig) -> float:
    """Fluorescence bandwidth 4pi / (L |k1_s - k1_i|) in rad/ps."""
    gap = slowness_gap(cfg)
    if gap == 0.0:
        raise TypeIError("k1_s == k1_i (type-I crystal): fluorescence bandwidth undefined")
    return 4.0 * math.pi / (cfg.length * gap)
