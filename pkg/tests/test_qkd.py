import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, settings
from hypothesis import strategies as st

from diamondsps.channels import LinkBudget, assemble_link_budget
from diamondsps.presets import (
    DEFAULT_PROTOCOL,
    ETA_O_FIBER,
    decoy_row,
    detector_for,
    fiber_channel,
    qkd_source_rows,
)
from diamondsps.qkd import (
    SourceSpec,
    compression_tau,
    cutoff_search,
    eta_to_db,
    key_rate,
    key_rate_decoy,
    key_rate_sps,
    key_rate_wcs,
    loss_cutoff_sps,
    loss_cutoff_wcs,
    optimize_attenuation,
    scaled_budget,
    shannon_entropy,
)

ROWS = qkd_source_rows()
PROTO = DEFAULT_PROTOCOL


def flat_budget(eta, noise):
    return scaled_budget(LinkBudget(1.0, 1.0, 1.0, 1.0, noise), eta_to_db(eta))


def fiber_budget(key, km):
    row = ROWS[key]
    det = detector_for(row.wavelength, row.gate)
    return assemble_link_budget(fiber_channel(row, km), det, ETA_O_FIBER)


# --- entropy and compression -----------------------------------------------------

def test_entropy_endpoints():
    assert shannon_entropy(0.0) == 0.0
    assert shannon_entropy(1.0) == 0.0
    assert shannon_entropy(0.5) == 1.0


def test_entropy_two_percent():
    assert shannon_entropy(0.02) == pytest.approx(0.1414, abs=1e-4)


def test_tau_limits():
    assert compression_tau(0.0, 1.0) == 1.0
    assert compression_tau(0.4999999, 1.0) == pytest.approx(0.0, abs=1e-5)
    assert compression_tau(0.6, 1.0) == 0.0


def test_tau_two_percent():
    assert compression_tau(0.02, 1.0) == pytest.approx(0.891, abs=1e-3)


@settings(max_examples=80, deadline=None)
@given(e=st.floats(0.0, 0.6), beta=st.floats(1e-6, 1.0))
def test_tau_clamped(e, beta):
    assert 0.0 <= compression_tau(e, beta) <= 1.0


# --- single-photon-source rates ------------------------------------------------------

def test_ne8_fiber_5km_rate():
    point = key_rate_sps(ROWS["ne8_enhanced"].source, fiber_budget("ne8_enhanced", 5.0),
                         PROTO)
    assert point.rate == pytest.approx(62e6, rel=0.25)


def test_nv_fiber_5km_rate():
    point = key_rate_sps(ROWS["nv_enhanced"].source, fiber_budget("nv_enhanced", 5.0),
                         PROTO)
    assert point.rate == pytest.approx(0.08e6, rel=0.25)


def test_siv_fiber_5km_rate_order_of_magnitude():
    # known irreproducible published value (7 Mbit/s); same order only
    point = key_rate_sps(ROWS["siv_enhanced"].source, fiber_budget("siv_enhanced", 5.0),
                         PROTO)
    assert 0.7e6 < point.rate < 70e6


def test_sps_rate_zero_below_cutoff():
    src = ROWS["ne8_enhanced"].source
    budget = fiber_budget("ne8_enhanced", 1.0)
    cutoff = loss_cutoff_sps(src.p1, src.g2, budget.noise)
    deep = scaled_budget(budget, eta_to_db(cutoff) + 10.0)
    point = key_rate_sps(src, deep, PROTO)
    assert point.rate == 0.0
    assert not point.secure


# --- closed-form cutoffs ---------------------------------------------------------------

def test_sps_cutoff_ne8():
    db = eta_to_db(loss_cutoff_sps(0.565, 1e-7, 3.3e-9))
    assert db == pytest.approx(74, abs=1.0)


def test_sps_cutoff_bare_siv():
    db = eta_to_db(loss_cutoff_sps(0.04, 0.0, 3.4e-7))
    assert db == pytest.approx(50, abs=1.0)


def test_sps_cutoff_noiseless_unbounded():
    assert loss_cutoff_sps(0.5, 0.0, 0.0) == 0.0


def test_wcs_cutoff_closed_form():
    # direct evaluation of sqrt(2N)/(1 - 4 e0) at the near-IR noise level
    assert eta_to_db(loss_cutoff_wcs(2.1e-11)) == pytest.approx(51.5, abs=0.1)


# --- laser-source rates --------------------------------------------------------------------

def test_wcs_rate_quadratic_scaling():
    src = SourceSpec(kind="wcs", repetition_rate=10e9)
    ratios = []
    for eta in (1e-3, 1e-4, 1e-5):
        g1 = key_rate_wcs(src, flat_budget(eta, 0.0), PROTO).rate
        g2 = key_rate_wcs(src, flat_budget(eta / 2, 0.0), PROTO).rate
        ratios.append(g1 / g2)
    assert ratios[-1] == pytest.approx(4.0, rel=0.01)


def test_wcs_zero_photon_number():
    src = SourceSpec(kind="wcs", repetition_rate=10e9, nbar=0.0)
    assert key_rate_wcs(src, flat_budget(1e-3, 1e-9), PROTO).rate == 0.0


def test_decoy_fiber_5km_rate():
    row = decoy_row(ROWS["wcs_1550"])
    point = key_rate_decoy(row.source, fiber_budget("wcs_1550", 5.0), PROTO)
    assert point.rate == pytest.approx(200e6, rel=0.25)


def test_decoy_cutoff_92db():
    row = decoy_row(ROWS["wcs_1550"])
    budget = fiber_budget("wcs_1550", 1.0)

    def secure(db):
        return key_rate_decoy(row.source, scaled_budget(budget, db), PROTO).secure

    assert cutoff_search(secure) == pytest.approx(92, abs=2.0)


def test_decoy_range_420km():
    row = decoy_row(ROWS["wcs_1550"])
    budget = fiber_budget("wcs_1550", 1.0)

    def secure(db):
        return key_rate_decoy(row.source, scaled_budget(budget, db), PROTO).secure

    cutoff_db = cutoff_search(secure)
    fixed_db = -10 * np.log10(budget.eta_optics * budget.eta_detector)
    assert (cutoff_db - fixed_db) / 0.2 == pytest.approx(420, abs=20)


# --- attenuation optimization ------------------------------------------------------------------

def test_optimize_attenuation_no_multiphoton():
    src = replace(ROWS["ne8_enhanced"].source, g2=0.0)
    xi, _ = optimize_attenuation(src, fiber_budget("ne8_enhanced", 10.0), PROTO)
    assert xi == 1.0


def test_optimize_attenuation_far_from_cutoff():
    src = ROWS["ne8_enhanced"].source
    budget = fiber_budget("ne8_enhanced", 5.0)
    xi, rate = optimize_attenuation(src, budget, PROTO)
    grid = np.linspace(1e-3, 1.0, 1001)
    rates = [key_rate_sps(replace(src, xi=x), budget, PROTO).rate for x in grid]
    assert xi == pytest.approx(grid[int(np.argmax(rates))], abs=1e-3)
    assert xi == pytest.approx(1.0, abs=1e-3)


def test_optimize_attenuation_near_cutoff_prefers_less():
    # multi-photon-dominated cutoff: backing off the source beats full brightness
    src = replace(ROWS["ne8_enhanced"].source, g2=1e-4)
    budget = flat_budget(4e-5, 1e-11)
    xi, rate = optimize_attenuation(src, budget, PROTO)
    grid = np.linspace(1e-3, 1.0, 2001)
    rates = [key_rate_sps(replace(src, xi=x), budget, PROTO).rate for x in grid]
    best = grid[int(np.argmax(rates))]
    assert best < 1.0
    assert xi == pytest.approx(best, abs=2e-3)
    assert rate >= max(rates) * (1 - 1e-6)


# --- bisection vs closed forms -------------------------------------------------------------------

@pytest.mark.parametrize("key", ["nv_enhanced", "nv_bare", "ne8_enhanced",
                                 "ne8_bare", "siv_enhanced", "siv_bare"])
def test_sps_bisection_matches_closed_form(key):
    row = ROWS[key]
    budget = fiber_budget(key, 1.0)

    def secure(db):
        return key_rate_sps(row.source, scaled_budget(budget, db), PROTO).secure

    closed = eta_to_db(loss_cutoff_sps(row.source.p1, row.source.g2, budget.noise))
    assert cutoff_search(secure) == pytest.approx(closed, abs=0.5)


def test_wcs_bisection_matches_closed_form():
    budget = fiber_budget("wcs_1550", 1.0)
    src = ROWS["wcs_1550"].source

    def secure(db):
        return key_rate_wcs(src, scaled_budget(budget, db), PROTO).secure

    closed = eta_to_db(loss_cutoff_wcs(budget.noise))
    assert cutoff_search(secure) == pytest.approx(closed, abs=0.5)


def test_error_reaches_quarter_beta_at_closed_form_cutoff():
    row = ROWS["ne8_enhanced"]
    budget = fiber_budget("ne8_enhanced", 1.0)
    eta_min = loss_cutoff_sps(row.source.p1, row.source.g2, budget.noise)
    point = key_rate_sps(row.source, scaled_budget(budget, eta_to_db(eta_min)), PROTO)
    assert point.error_rate == pytest.approx(point.single_fraction / 4, rel=1e-3)


def test_cutoff_monotone_in_noise():
    cuts = [eta_to_db(loss_cutoff_sps(0.5, 1e-7, n)) for n in (1e-9, 1e-8, 1e-7)]
    assert cuts[0] > cuts[1] > cuts[2]


def test_uplink_cutoff_ne8():
    from diamondsps.channels import free_space_noise
    from diamondsps.presets import slant_path

    row = ROWS["ne8_enhanced"]
    det = detector_for(row.wavelength, row.gate)
    noise = free_space_noise(slant_path("uplink", row.wavelength), row.filter_width, det)
    assert eta_to_db(loss_cutoff_sps(row.source.p1, row.source.g2, noise)) == \
        pytest.approx(73, abs=1.0)


# --- generic rate properties -----------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(loss=st.floats(0.0, 90.0), noise_exp=st.floats(-11, -6))
def test_rates_nonnegative(loss, noise_exp):
    budget = flat_budget(10 ** (-loss / 10), 10**noise_exp)
    for key in ("ne8_enhanced", "wcs_650"):
        src = ROWS[key].source
        assert key_rate(src, budget, PROTO).rate >= 0.0
    drow = decoy_row(ROWS["wcs_1550"])
    assert key_rate(drow.source, budget, PROTO).rate >= 0.0


def test_rate_monotone_in_loss_and_noise():
    src = ROWS["ne8_enhanced"].source
    rates_eta = [key_rate_sps(src, flat_budget(10 ** (-d / 10), 3.3e-9), PROTO).rate
                 for d in np.linspace(0, 80, 33)]
    assert all(b <= a + 1e-9 for a, b in zip(rates_eta, rates_eta[1:]))
    rates_noise = [key_rate_sps(src, flat_budget(1e-5, n), PROTO).rate
                   for n in np.geomspace(1e-11, 1e-6, 21)]
    assert all(b <= a + 1e-9 for a, b in zip(rates_noise, rates_noise[1:]))


def test_sps_rate_linear_in_eta_when_noiseless():
    src = replace(ROWS["ne8_enhanced"].source, g2=0.0)
    vals = []
    for eta in np.geomspace(1e-6, 1e-2, 9):
        point = key_rate_sps(src, flat_budget(eta, 0.0), PROTO)
        vals.append(point.rate / eta)
    assert np.ptp(vals) <= 1e-9 * max(vals)
