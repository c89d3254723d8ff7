import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from biphoton.errors import AsymmetricStateError
from biphoton.interferometry import HOM, MZ, analytic_reference, coincidence, scan
from biphoton.jsa import FrequencyGrid, JsaGrid, build_jsa, db_limit, tb_limit
from biphoton.phasematch import omega_f


@pytest.fixture(scope="module")
def tb(poled):
    return tb_limit(poled)


@pytest.fixture(scope="module")
def db(poled, pump):
    return db_limit(poled, pump, flat_prefactor=True)


def tb_hom_quad(w_f, tau):
    # 1 - int sinc^2(2pi w/W_f) cos(2 w tau) / int sinc^2(2pi w/W_f)
    f = lambda w: (np.sinc(2 * w / w_f)) ** 2
    num = quad(f, 0, np.inf, weight="cos", wvar=2 * abs(tau))[0]
    den = w_f / 4
    return 1 - num / den


def test_tb_hom_closed_form_against_quad(poled):
    w_f = omega_f(poled)
    # the Fourier-weighted quadrature degenerates at tau = 0, which is checked exactly
    assert analytic_reference("TB", HOM, poled, None, 0.0) == 0.0
    for tau in (0.4, math.pi / w_f, 2.5, -1.1):
        assert analytic_reference("TB", HOM, poled, None, tau) == pytest.approx(tb_hom_quad(w_f, tau), abs=1e-6)
    assert analytic_reference("TB", HOM, poled, None, math.pi / w_f) == pytest.approx(0.5)


def test_tb_hom_numeric(tb, poled):
    tau = np.linspace(-6, 6, 241)
    p = coincidence(tb, HOM, tau)
    assert np.max(np.abs(p - analytic_reference("TB", HOM, poled, None, tau))) < 2e-3
    assert coincidence(tb, HOM, 0.0) < 1e-3


def test_db_hom_null(db):
    p = coincidence(db, HOM, np.linspace(-10, 10, 101))
    assert np.max(np.abs(p)) < 1e-12


def test_db_mz_quad_oracle(db, poled, pump):
    b = pump.bandwidth
    tau = 0.07
    # <cos((w_p + 2w) tau)> with weight exp(-4 w^2/b^2)
    num = quad(lambda w: math.exp(-4 * w**2 / b**2) * math.cos((poled.omega_p + 2 * w) * tau), -4 * b, 4 * b,
               limit=400)[0]
    den = b * math.sqrt(math.pi) / 2
    assert coincidence(db, MZ, tau) == pytest.approx(1 + num / den, abs=1e-6)
    assert analytic_reference("DB", MZ, poled, pump, tau) == pytest.approx(1 + num / den, abs=1e-6)


def test_tb_mz(tb, poled):
    tau = np.linspace(0, 5 * 2 * math.pi / poled.omega_p, 201)
    p = coincidence(tb, MZ, tau)
    np.testing.assert_allclose(p, 1 + np.cos(poled.omega_p * tau), atol=1e-12)


def test_brute_force_grid_sum(linear, pump):
    j = build_jsa(linear.with_length(1e4), pump, FrequencyGrid(64, 15.0), flat_prefactor=True)
    ws = j.omega_p / 2 + j.nu
    inten = j.intensity()
    inten = inten / inten.sum()
    d = np.subtract.outer(ws, ws)
    s = np.add.outer(ws, ws)
    for tau in (0.0, 0.13, 0.9):
        assert coincidence(j, HOM, tau) == pytest.approx(1 - np.sum(inten * np.cos(d * tau)), abs=1e-12)
        assert coincidence(j, MZ, tau) == pytest.approx(1 + np.sum(inten * np.cos(s * tau)), abs=1e-12)


def test_asymmetric_state_rejected(poled, pump):
    j = build_jsa(poled, pump)
    with pytest.raises(AsymmetricStateError):
        coincidence(j, HOM, 0.0)
    with pytest.raises(ValueError):
        coincidence(j, "michelson", 0.0)


def test_manual_asymmetric_grid():
    g = FrequencyGrid(16, 1.0)
    v = np.zeros((16, 16), complex)
    v[3, 5] = 1.0
    j = JsaGrid(g, v / (g.dnu), pump=None)
    assert not j.is_symmetric()


@settings(max_examples=25, deadline=None)
@given(tau=st.floats(-20, 20))
def test_coincidence_bounds(tb, db, tau):
    for state in (tb, db):
        for mode in (HOM, MZ):
            p = coincidence(state, mode, tau)
            assert -1e-12 <= p <= 2 + 1e-12


@settings(max_examples=25, deadline=None)
@given(tau=st.floats(0.01, 20))
def test_hom_even_in_tau(tb, tau):
    assert coincidence(tb, HOM, tau) == pytest.approx(coincidence(tb, HOM, -tau), abs=1e-12)


def test_scan_tb_width(tb, poled):
    w_f = omega_f(poled)
    r = scan(tb, HOM, -3 * 2 * math.pi / w_f, 3 * 2 * math.pi / w_f, 1201)
    assert r.dip_width() == pytest.approx(4 * math.pi / w_f, rel=0.03)
    obs = r.observables()
    assert obs["P_at_zero"] < 1e-3
    assert r.visibility() > 0.99


def test_scan_db_envelope(db, pump, poled):
    half = 12 / pump.bandwidth
    n = int(2 * half / (2 * math.pi / poled.omega_p) * 50) + 1
    r = scan(db, MZ, -half, half, n)
    assert r.envelope_fwhm() == pytest.approx(4 * math.sqrt(math.log(2)) / pump.bandwidth, rel=0.02)
    coarse = scan(db, MZ, -half, half, 101)
    with pytest.raises(ValueError):
        coarse.envelope()
    assert coarse.observables()["envelope_fwhm"] is None


def test_dip_width_none_without_recovery(tb):
    r = scan(tb, HOM, -0.5, 0.5, 101)
    assert r.dip_width() is None


def test_scan_validation(tb):
    with pytest.raises(ValueError):
        scan(tb, HOM, 1.0, -1.0, 10)
    with pytest.raises(ValueError):
        scan(tb, HOM, -1.0, 1.0, 1)


def test_csv_output(tmp_path, db):
    r = scan(db, HOM, -1, 1, 5)
    path = tmp_path / "hom.csv"
    r.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "tau_ps,P"
    assert len(lines) == 7


def test_analytic_reference_unknown(poled):
    with pytest.raises(ValueError):
        analytic_reference("DB_L", HOM, poled, None, 0.0)
    with pytest.raises(ValueError):
        analytic_reference("DB", MZ, poled, None, 0.0)
