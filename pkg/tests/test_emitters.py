import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c
from scipy.sparse.linalg import expm_multiply

from diamondsps.emitters import (
    bare_center_p1,
    dipole_moment,
    excitation_bounds,
    ideal_emission_probability,
    optimal_q,
    pulse_energy,
    pump_intensity,
    purcell_factor,
    purcell_factor_qv,
    rabi_frequency,
    wavelength_sized_volume,
    zpl_coupling,
)
from diamondsps.presets import CENTERS, cavity_preset

TWO_PI = 2 * np.pi
NE8, SIV, NV = CENTERS["ne8"], CENTERS["siv"], CENTERS["nv"]


# --- dipole moments and couplings -------------------------------------------

def test_dipole_moment_ne8():
    d = dipole_moment(NE8.gamma_0, NE8.omega_zpl, 2.4)
    assert d == pytest.approx(2.1e-29, rel=0.10)


def test_dipole_moment_siv():
    d = dipole_moment(SIV.gamma_0, SIV.omega_zpl, 2.4)
    assert d == pytest.approx(4.2e-29, rel=0.10)


def test_dipole_moment_rate_scaling():
    d1 = dipole_moment(1e8, 2.4e15, 2.4)
    d4 = dipole_moment(4e8, 2.4e15, 2.4)
    assert d4 / d1 == pytest.approx(2.0, rel=1e-12)


def test_dipole_moment_rejects_nonpositive():
    with pytest.raises(ValueError):
        dipole_moment(0.0, 2.4e15, 2.4)


def test_rabi_frequency_ne8():
    cav = cavity_preset("ne8")
    d = dipole_moment(NE8.gamma_0, NE8.omega_zpl, 2.4)
    assert rabi_frequency(d, cav.omega_c, cav.mode_volume) == pytest.approx(127e9, rel=0.10)


def test_rabi_frequency_siv():
    cav = cavity_preset("siv")
    d = dipole_moment(SIV.gamma_0, SIV.omega_zpl, 2.4)
    assert rabi_frequency(d, cav.omega_c, cav.mode_volume) == pytest.approx(290e9, rel=0.10)


def test_rabi_volume_scaling():
    base = rabi_frequency(2e-29, 2.4e15, 1e-20)
    assert rabi_frequency(2e-29, 2.4e15, 4e-20) == pytest.approx(base / 2, rel=1e-12)


def test_nv_chain_from_tabulated_dipole():
    # the published moment reproduces the pinned coupling and quality factor
    cav = cavity_preset("nv")
    om = rabi_frequency(1.0e-30, cav.omega_c, cav.mode_volume)
    assert om == pytest.approx(9.3e9, rel=0.10)
    assert optimal_q(om, cav.omega_c) == pytest.approx(64000, rel=0.10)


# --- Purcell factor -----------------------------------------------------------

def test_purcell_ne8():
    cav = cavity_preset("ne8")
    fp = purcell_factor(zpl_coupling(NE8, cav), NE8.gamma_total, cav.kappa)
    assert fp == pytest.approx(311, rel=0.05)


def test_purcell_siv():
    cav = cavity_preset("siv")
    fp = purcell_factor(zpl_coupling(SIV, cav), SIV.gamma_total, cav.kappa)
    assert fp == pytest.approx(10, rel=0.10)


def test_purcell_kappa_inverse():
    assert purcell_factor(1e11, 1e9, 2e11) == pytest.approx(
        purcell_factor(1e11, 1e9, 1e11) / 2, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    gamma=st.floats(1e6, 1e12),
    q=st.floats(1e2, 1e6),
    lam=st.floats(400e-9, 2e-6),
    scale=st.floats(0.3, 3.0),
)
def test_purcell_two_forms_agree(gamma, q, lam, scale):
    vol = wavelength_sized_volume(lam) * scale
    omega_c = TWO_PI * c / lam
    d = 2e-29
    om = rabi_frequency(d, omega_c, vol)
    f1 = purcell_factor(om, gamma, omega_c / (2 * q))
    f2 = purcell_factor_qv(d, gamma, q, vol)
    assert f1 == pytest.approx(f2, rel=1e-12)


def test_ideal_emission_probability():
    assert ideal_emission_probability(311) == pytest.approx(0.9968, abs=2e-4)
    assert ideal_emission_probability(10) == pytest.approx(0.909, abs=1e-3)
    assert ideal_emission_probability(0) == 0.0


def test_optimal_q_values():
    assert optimal_q(1.27e11, 2.37e15) == pytest.approx(3732, rel=0.02)
    assert optimal_q(2.9e11, 2.55e15) == pytest.approx(1759, rel=0.02)
    assert optimal_q(2e11, 2.4e15) == pytest.approx(optimal_q(1e11, 2.4e15) / 2, rel=1e-12)


# --- excitation bounds vs a decoherence-free oracle ---------------------------

def _pumped_two_level_oracle(width, rate, omega):
    """Manifold populations of the pump + single-mode coupling model.

    Brute-force master equation on {g, e} x Fock, no decay channels;
    propagated with a sparse matrix exponential.
    """
    mean = rate * width
    nf = max(6, int(np.ceil(mean + 8 * np.sqrt(mean + 1) + 4)))
    a = sp.diags(np.sqrt(np.arange(1, nf)), 1, format="csr").astype(complex)
    # atomic basis order (g, e): sigma_ge = |g><e|
    sigma_ge = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))
    eye_f = sp.identity(nf, format="csr")

    lower = sp.kron(sigma_ge, a.conj().T)      # e,n -> g,n+1
    h = omega * (lower + lower.conj().T)
    pump = sp.kron(sigma_ge.T, eye_f)          # g,n -> e,n
    dim = 2 * nf
    eye = sp.identity(dim, format="csr")
    lv = -1j * (sp.kron(h, eye) - sp.kron(eye, h.T))
    ada = (pump.conj().T @ pump).tocsr()
    lv = lv + rate * (sp.kron(pump, pump.conj())
                      - 0.5 * (sp.kron(ada, eye) + sp.kron(eye, ada.T)))

    rho0 = np.zeros(dim * dim, dtype=complex)
    idx = lambda atom, n: atom * nf + n   # atom 0 = g, 1 = e
    rho0[idx(0, 0) * dim + idx(0, 0)] = 1.0
    vec = expm_multiply(lv.tocsc() * width, rho0)
    rho = vec.reshape(dim, dim)

    pops = {(atom, n): rho[idx(atom, n), idx(atom, n)].real
            for atom in (0, 1) for n in range(nf)}
    p0 = pops[(0, 0)]
    p1 = pops[(1, 0)] + pops[(0, 1)]
    pm = 1.0 - p0 - p1
    return p0, p1, pm


OMEGA_REF = 1.2570e11


@pytest.mark.parametrize("width", np.geomspace(0.01e-12, 0.33e-12, 4))
@pytest.mark.parametrize("rate", np.geomspace(1e11, 3e13, 4))
def test_bounds_match_oracle_spot(width, rate):
    p1, pm = excitation_bounds(width, rate, OMEGA_REF)
    _, p1_ref, pm_ref = _pumped_two_level_oracle(width, rate, OMEGA_REF)
    assert p1 == pytest.approx(p1_ref, abs=1e-6)
    assert pm == pytest.approx(pm_ref, abs=1e-6)


def test_bounds_zero_pump():
    assert excitation_bounds(1e-13, 0.0, OMEGA_REF) == (0.0, 0.0)


def test_bounds_probability_identity():
    for width in (0.05e-12, 0.2e-12):
        for rate in (5e11, 2e13):
            p1, pm = excitation_bounds(width, rate, OMEGA_REF)
            assert p1 + pm + np.exp(-rate * width) == pytest.approx(1.0, abs=1e-9)


def test_bounds_branch_point_continuity():
    r0 = 4 * OMEGA_REF
    width = 0.1e-12
    lo = excitation_bounds(width, r0 * (1 - 5e-7), OMEGA_REF)[0]
    hi = excitation_bounds(width, r0 * (1 + 5e-7), OMEGA_REF)[0]
    assert abs(hi - lo) < 1e-6


def test_bounds_monotone_in_rate():
    width = 0.15 / OMEGA_REF
    rates = np.geomspace(1e10, 5e13, 40)
    p1s = [excitation_bounds(width, r, OMEGA_REF)[0] for r in rates]
    assert all(b >= a - 1e-12 for a, b in zip(p1s, p1s[1:]))


def test_bounds_extreme_pumping_no_overflow():
    p1, pm = excitation_bounds(1e-12, 1e15, OMEGA_REF)
    assert np.isfinite(p1) and np.isfinite(pm)
    assert 0 <= p1 <= 1


# --- pump intensity and pulse energy ------------------------------------------

def test_pump_intensity_quadratic():
    assert pump_intensity(4e13, 2.1e-29) == pytest.approx(
        4 * pump_intensity(2e13, 2.1e-29), rel=1e-12)


def test_pump_intensity_optical_operating_point():
    # full-transition dipole with the optical (angular) pump reading
    intensity = pump_intensity(TWO_PI * 20e12, NE8.total_dipole)
    assert intensity == pytest.approx(40e9 * 1e4, rel=0.25)   # ~40 GW/cm^2


def test_photostability_warning():
    with pytest.warns(UserWarning):
        pump_intensity(TWO_PI * 40e12, SIV.total_dipole * 0.5)


def test_pulse_energy_below_damage_budget():
    spot = np.pi * (0.5e-6) ** 2   # micron-scale focus
    intensity = pump_intensity(TWO_PI * 20e12, NE8.total_dipole)
    assert pulse_energy(intensity, 0.16e-12, spot) <= 50e-12


def test_excitation_point_invariants():
    from diamondsps.emitters import ExcitationPoint

    p1, pm = excitation_bounds(0.16e-12, 2e13, OMEGA_REF)
    point = ExcitationPoint(pulse_width=0.16e-12, pump_rate=2e13,
                            p1_bound=p1, pm_bound=pm)
    assert 0 <= point.pm_bound <= 1 - point.p1_bound
    with pytest.raises(ValueError):
        ExcitationPoint(1e-13, 1e13, p1_bound=0.9, pm_bound=0.2)
    with pytest.raises(ValueError):
        ExcitationPoint(1e-13, 1e13, p1_bound=0.5, pm_bound=0.0, intensity=-1.0)


# --- bare centers --------------------------------------------------------------

def test_bare_p1_siv():
    assert bare_center_p1(SIV) == pytest.approx(0.05, abs=0.002)


def test_bare_p1_ne8():
    assert bare_center_p1(NE8) == pytest.approx(0.84, abs=0.005)


def test_bare_p1_unit_quantum_yield():
    from dataclasses import replace

    perfect = replace(NE8, gamma_e=0.0, gamma_nr=0.0)
    assert bare_center_p1(perfect) == pytest.approx(1.0, abs=1e-12)
