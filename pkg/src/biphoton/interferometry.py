"""
Two-photon coincidence signatures versus relative delay.

For an exchange-symmetric amplitude A(w1, w2) the coincidence probability,
normalized to its non-interfering baseline, is

    P_hom(tau) = 1 - <cos[(w1 - w2) tau]>
    P_mz(tau)  = 1 + <cos[(w1 + w2) tau]>

with <.> the average over |A|^2.  Both reduce to one-dimensional sums over
the intensity projected onto w1 - w2 or w1 + w2, which is how they are
evaluated here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.signal import hilbert

from .errors import AsymmetricStateError
from .formatting import write_csv
from .dispersion import CrystalConfig
from .jsa import JsaGrid, LimitState
from .phasematch import omega_f

HOM = "HOM"
MZ = "MZ"
MODES = (HOM, MZ)

SYMMETRY_RTOL = 1e-8
# cap on the (tau x spectrum) work array
_CHUNK_ELEMENTS = 4_000_000

State = Union[JsaGrid, LimitState]


def _mode(mode: str) -> str:
    m = str(mode).upper()
    if m not in MODES:
        raise ValueError(f"mode must be HOM or MZ, got {mode!r}")
    return m


def _check_symmetric(state: State, rtol: float):
    if not state.is_symmetric(rtol):
        raise AsymmetricStateError(
            "coincidence formula requires an amplitude symmetric under w1 <-> w2; "
            "use first-order dispersion with a flat prefactor or a symmetric design"
        )


def _weighted_cos(x, w, tau, offset=0.0):
    keep = w > 0
    x = x[keep]
    w = w[keep] / w[keep].sum()
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty(tau.shape)
    step = max(1, _CHUNK_ELEMENTS // max(1, x.size))
    flat = tau.ravel()
    res = out.ravel()
    for start in range(0, flat.size, step):
        t = flat[start:start + step]
        res[start:start + step] = np.cos(np.outer(t, x + offset)) @ w
    return out


def coincidence(state: State, mode: str, tau, sym_rtol: float = SYMMETRY_RTOL):
    """Baseline-normalized coincidence probability at delay(s) ``tau`` (ps)."""
    mode = _mode(mode)
    _check_symmetric(state, sym_rtol)
    scalar = np.ndim(tau) == 0
    if mode == HOM:
        x, w = state.projection("difference")
        p = 1.0 - _weighted_cos(x, w, tau)
    else:
        x, w = state.projection("sum")
        p = 1.0 + _weighted_cos(x, w, tau, offset=state.omega_p)
    return float(p[0]) if scalar else p


def analytic_reference(kind: str, mode: str, cfg: CrystalConfig, pump, tau):
    """Closed-form coincidence curves of the TB and DB limits."""
    mode = _mode(mode)
    tau = np.asarray(tau, dtype=float)
    if kind == "TB" and mode == HOM:
        return np.minimum(np.abs(tau) * omega_f(cfg) / (2.0 * math.pi), 1.0)
    if kind == "TB" and mode == MZ:
        return 1.0 + np.cos(cfg.omega_p * tau)
    if kind == "DB" and mode == HOM:
        return np.zeros_like(tau)
    if kind == "DB" and mode == MZ:
        if pump is None:
            raise ValueError("DB Mach-Zehnder reference needs the pump bandwidth")
        envelope = np.exp(-(pump.bandwidth * tau) ** 2 / 4.0)
        return 1.0 + envelope * np.cos(cfg.omega_p * tau)
    raise ValueError(f"no closed form for state kind {kind!r}")


@dataclass(frozen=True, eq=False)
class ScanResult:
    mode: str
    tau: np.ndarray
    P: np.ndarray
    state_kind: str
    omega_p: float
    meta: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        return float(self.tau[1] - self.tau[0])

    def visibility(self) -> float:
        hi, lo = float(self.P.max()), float(self.P.min())
        return (hi - lo) / (hi + lo) if hi + lo > 0 else 0.0

    def dip_width(self, threshold: float = 0.01):
        """Full width between the first returns to within ``threshold`` of 1.

        Walks outward from the minimum; crossings are linearly interpolated.
        Returns None when the baseline is never recovered on one side.
        """
        dev = np.abs(self.P - 1.0)
        center = int(np.argmin(self.P))
        edges = []
        for direction in (1, -1):
            i = center
            while 0 <= i + direction < self.tau.size and dev[i + direction] > threshold:
                i += direction
            j = i + direction
            if not 0 <= j < self.tau.size:
                return None
            frac = (dev[i] - threshold) / (dev[i] - dev[j]) if dev[i] != dev[j] else 0.0
            edges.append(self.tau[i] + frac * (self.tau[j] - self.tau[i]))
        return float(edges[0] - edges[1])

    def envelope(self) -> np.ndarray:
        """Modulus of the analytic signal of P - 1."""
        period = 2.0 * math.pi / self.omega_p
        if period / self.step < 40:
            raise ValueError(
                f"envelope extraction needs >= 40 samples per pump period, have {period / self.step:.1f}"
            )
        return np.abs(hilbert(self.P - 1.0))

    def envelope_fwhm(self):
        env = self.envelope()
        peak = int(np.argmax(env))
        half = 0.5 * env[peak]
        edges = []
        for direction in (1, -1):
            i = peak
            while 0 <= i + direction < env.size and env[i + direction] > half:
                i += direction
            j = i + direction
            if not 0 <= j < env.size:
                return None
            frac = (env[i] - half) / (env[i] - env[j])
            edges.append(self.tau[i] + frac * (self.tau[j] - self.tau[i]))
        return float(edges[0] - edges[1])

    def observables(self) -> dict:
        obs = {"visibility": self.visibility(), "P_min": float(self.P.min())}
        if self.mode == HOM:
            obs["dip_width"] = self.dip_width()
            zero = int(np.argmin(np.abs(self.tau)))
            obs["P_at_zero"] = float(self.P[zero])
        else:
            try:
                obs["envelope_fwhm"] = self.envelope_fwhm()
            except ValueError:
                obs["envelope_fwhm"] = None
        return obs

    def header(self) -> dict:
        return {"mode": self.mode, "state_kind": self.state_kind, **self.meta, **self.observables()}

    def to_csv(self, path):
        """(tau, P) table preceded by a one-line JSON header comment."""
        write_csv(path, ["tau_ps", "P"], zip(self.tau, self.P), comment=self.header())

def scan(state: State, mode: str, tau_min: float, tau_max: float, n_points: int,
         sym_rtol: float = SYMMETRY_RTOL) -> ScanResult:
    if n_points < 2:
        raise ValueError("scan needs at least two delay points")
    if not tau_min < tau_max:
        raise ValueError("tau_min must be below tau_max")
    mode = _mode(mode)
    tau = np.linspace(tau_min, tau_max, n_points)
    p = coincidence(state, mode, tau, sym_rtol)
    meta = {}
    if state.cfg is not None:
        meta["length_um"] = state.cfg.length
    if state.pump is not None:
        meta["Omega_p"] = state.pump.bandwidth
    return ScanResult(mode, tau, np.asarray(p), state.kind, state.omega_p, meta)

