"""Pulsed parametric downconversion under extended phase matching."""
from .dispersion import (
    C_UM_PER_PS,
    BeamDispersion,
    CrystalConfig,
    delta_k,
    delta_k_detuned,
    gamma,
    get_preset,
    hessian_mu,
    ppktp_790,
    refractive_index,
    wavenumber,
)
from .phasematch import (
    LengthWindow,
    PhaseMatchReport,
    check_extended_pm,
    length_window,
    omega_f,
    solve_grating_period,
)
from .jsa import (
    FrequencyGrid,
    JsaGrid,
    LimitState,
    PumpSpectrum,
    alpha,
    build_jsa,
    db_limit,
    default_grid,
    marginal_spectra,
    phi_L,
    pump_amplitude,
    tb_limit,
    tb_spectral_density,
)
from .interferometry import ScanResult, analytic_reference, coincidence, scan
from .analysis import SchmidtSpectrum, TimeDomainAmplitude, schmidt_decompose, time_domain

__version__ = "0.1.0"
