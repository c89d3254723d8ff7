"""Frequency entanglement and time-domain structure of a tabulated biphoton."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import delta_k_detuned
from .errors import NormalizationError
from .jsa import JsaGrid

NORM_TOL = 1e-6
DEFAULT_RANK_CUT = 64


def _require_normalized(j: JsaGrid):
    norm = j.norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"amplitude norm is {norm:.6g}, expected 1")


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Schmidt weights p_n (descending, summing to one) of a biphoton.

    ``truncation_mass`` is the weight discarded by the rank cut before the
    kept coefficients were renormalized.
    """

    coefficients: np.ndarray
    schmidt_number: float
    entropy: float
    truncation_mass: float

    def to_dict(self, n_coefficients: int = 16) -> dict:
        return {
            "schmidt_number": self.schmidt_number,
            "entropy": self.entropy,
            "truncation_mass": self.truncation_mass,
            "rank": int(self.coefficients.size),
            "coefficients": [float(p) for p in self.coefficients[:n_coefficients]],
        }


def schmidt_from_matrix(m: np.ndarray, rank_cut: int) -> SchmidtSpectrum:
    sigma = np.linalg.svd(m, compute_uv=False)
    p = sigma**2 / np.sum(sigma**2)
    kept = p[:rank_cut]
    truncation = float(max(0.0, 1.0 - kept.sum()))
    kept = kept / kept.sum()
    nz = kept[kept > 0]
    return SchmidtSpectrum(
        coefficients=kept,
        schmidt_number=float(1.0 / np.sum(kept**2)),
        entropy=float(-np.sum(nz * np.log(nz))),
        truncation_mass=truncation,
    )


def schmidt_decompose(j: JsaGrid, rank_cut: int = DEFAULT_RANK_CUT) -> SchmidtSpectrum:
    """Singular-value spectrum of the amplitude with dnu weights folded in."""
    _require_normalized(j)
    if not 1 <= rank_cut <= j.grid.n:
        raise ValueError(f"rank_cut must lie in [1, {j.grid.n}]")
    m = j.values * j.dnu
    if not np.any(m.imag):
        m = m.real
    return schmidt_from_matrix(m, rank_cut)


@dataclass(frozen=True, eq=False)
class TimeDomainAmplitude:
    """Biphoton amplitude versus signal and idler arrival times (ps).

    Widths are RMS widths of |psi|^2 along (t_s - t_i)/sqrt2 ("difference")
    and (t_s + t_i)/sqrt2 ("sum").  ``T0`` is the centroid of (t_s + t_i)/2.
    """

    t: np.ndarray
    values: np.ndarray
    width_difference: float
    width_sum: float
    T0: float

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dt**2)

    def to_dict(self) -> dict:
        return {
            "width_difference_rms": self.width_difference,
            "width_sum_rms": self.width_sum,
            "T0": self.T0,
            "dt": self.dt,
            "n": int(self.t.size),
        }

    def rows(self):
        inten = np.abs(self.values) ** 2
        for a, ts in enumerate(self.t):
            for b, ti in enumerate(self.t):
                yield ts, ti, inten[a, b]


def time_domain(j: JsaGrid, exit_face: bool = True) -> TimeDomainAmplitude:
    """psi(t_s, t_i) = integral A(nu_s, nu_i) exp(-i(nu_s t_s + nu_i t_i)) / 2pi.

    With ``exit_face`` the amplitude is referred to the crystal output face
    in the frame of the pump-pulse peak, by applying the propagation phase
    exp(-i dk L / 2); otherwise the crystal center is the reference.
    """
    _require_normalized(j)
    n = j.grid.n
    nu = j.nu
    dnu = j.dnu
    values = j.values
    if exit_face and j.cfg is not None:
        ns, ni = np.meshgrid(nu, nu, indexing="ij")
        values = values * np.exp(-0.5j * j.cfg.length * delta_k_detuned(j.cfg, ns, ni))
    dt = 2.0 * math.pi / (n * dnu)
    t = (np.arange(n) - n // 2) * dt
    psi = np.fft.fftshift(np.fft.fft2(values))
    # the axis starts at -span rather than 0
    shift = np.exp(-1j * nu[0] * t)
    psi = psi * np.outer(shift, shift) * dnu**2 / (2.0 * math.pi)

    inten = np.abs(psi) ** 2 * dt**2
    ts, ti = np.meshgrid(t, t, indexing="ij")
    total = inten.sum()

    def rms(coord):
        mean = np.sum(coord * inten) / total
        return float(np.sqrt(np.sum((coord - mean) ** 2 * inten) / total)), float(mean)

    w_diff, _ = rms((ts - ti) / math.sqrt(2.0))
    w_sum, mean_sum = rms((ts + ti) / math.sqrt(2.0))
    return TimeDomainAmplitude(t, psi, w_diff, w_sum, mean_sum / math.sqrt(2.0))
