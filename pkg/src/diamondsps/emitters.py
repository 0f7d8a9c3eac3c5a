"""Closed-form emitter and cavity physics.

Rate convention: every decay rate on :class:`CenterSpec` is stored as an
angular frequency (rad/s).  A lifetime tau enters as 2*pi/tau, and quoted
"gamma/2pi = 17 MHz" values enter as 2*pi*17e6.  Conversion from config
units happens once at ingestion, nowhere else.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c, epsilon_0, hbar

TWO_PI = 2.0 * np.pi

# Intensities above this trigger a photostability warning (W/m^2).
PHOTOSTABILITY_CEILING = 50e9 * 1e4  # 50 GW/cm^2


@dataclass(frozen=True)
class CenterSpec:
    """Vibronic-level parameters of one color center.

    Decay channels: radiative decay splits between the zero-phonon line
    (fraction ``zpl_fraction``) and the phonon sideband; ``gamma_e`` shelves
    the excited state into the metastable level, ``gamma_h`` returns it,
    ``gamma_nr`` collects nonradiative loss and ``gamma_g`` is the fast
    phononic relaxation inside the ground manifold.
    """

    name: str
    lambda_zpl: float          # m
    tau: float                 # s, photoluminescence lifetime
    zpl_fraction: float        # relative ZPL integrated intensity
    gamma_e: float             # rad/s, shelving
    gamma_h: float             # rad/s, deshelving
    gamma_nr: float            # rad/s, nonradiative
    gamma_g: float = TWO_PI * 1e12      # rad/s, ground-manifold relaxation
    refractive_index: float = 2.4
    sideband_offset: float = 25e-9      # m, ZPL -> sideband wavelength shift
    total_dipole: float | None = None   # C*m, across all phonon transitions
    coupling_override: float | None = None  # rad/s, pins Omega_0 when set

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("lifetime must be positive")
        if not 0 < self.zpl_fraction <= 1:
            raise ValueError("zpl_fraction must lie in (0, 1]")
        for r in (self.gamma_e, self.gamma_h, self.gamma_nr, self.gamma_g):
            if r < 0 or not np.isfinite(r):
                raise ValueError("rates must be finite and nonnegative")

    @property
    def gamma_rad(self) -> float:
        """Total radiative rate 2*pi/tau (rad/s)."""
        return TWO_PI / self.tau

    @property
    def gamma_0(self) -> float:
        """ZPL radiative rate (rad/s)."""
        return self.zpl_fraction * self.gamma_rad

    @property
    def gamma_1(self) -> float:
        """Sideband radiative rate (rad/s)."""
        return (1.0 - self.zpl_fraction) * self.gamma_rad

    @property
    def gamma_total(self) -> float:
        """Total decay rate out of the excited state (rad/s).

        Ground-manifold relaxation does not deplete the excited state and
        is excluded.
        """
        return self.gamma_rad + self.gamma_nr + self.gamma_e

    @property
    def lambda_sideband(self) -> float:
        return self.lambda_zpl + self.sideband_offset

    @property
    def omega_zpl(self) -> float:
        return TWO_PI * c / self.lambda_zpl

    @property
    def sideband_detuning(self) -> float:
        """Energy of the upper ground sublevel above g0 (rad/s)."""
        return TWO_PI * c * (1.0 / self.lambda_zpl - 1.0 / self.lambda_sideband)


@dataclass(frozen=True)
class CavitySpec:
    """Single-sided cavity mode; kappa is always derived, never stored."""

    lambda_c: float            # m
    quality_factor: float
    mode_volume: float         # m^3

    def __post_init__(self):
        if self.quality_factor <= 0 or self.mode_volume <= 0 or self.lambda_c <= 0:
            raise ValueError("cavity parameters must be positive")

    @property
    def omega_c(self) -> float:
        return TWO_PI * c / self.lambda_c

    @property
    def kappa(self) -> float:
        """Cavity loss rate omega_c / (2 Q) (rad/s)."""
        return self.omega_c / (2.0 * self.quality_factor)


def wavelength_sized_volume(lambda_c: float, refractive_index: float = 2.4) -> float:
    """(lambda/n)^3, the mode volume of a wavelength-sized dielectric cavity."""
    return (lambda_c / refractive_index) ** 3


@dataclass(frozen=True)
class ExcitationPoint:
    """One operating point of the trigger pulse."""

    pulse_width: float         # s
    pump_rate: float           # rad/s
    p1_bound: float
    pm_bound: float
    intensity: float = 0.0     # W/m^2
    pulse_energy: float = 0.0  # J

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be nonnegative")
        if not -1e-12 <= self.pm_bound <= 1.0 - self.p1_bound + 1e-12:
            raise ValueError("multi-photon bound outside [0, 1 - P1]")


def dipole_moment(gamma_i: float, omega_i: float, refractive_index: float) -> float:
    """Transition dipole moment from the radiative rate of that line.

    ``gamma_i`` follows the angular-rate convention (rad/s); the underlying
    Einstein coefficient is gamma_i / 2pi, giving
    d^2 = 3 pi hbar epsilon_0 c^3 (gamma_i / 2pi) / (n omega_i^3).
    """
    if gamma_i <= 0 or omega_i <= 0 or refractive_index <= 0:
        raise ValueError("dipole_moment requires positive inputs")
    rate = gamma_i / TWO_PI
    return float(np.sqrt(3 * np.pi * hbar * epsilon_0 * c**3 * rate
                         / (refractive_index * omega_i**3)))


def rabi_frequency(dipole: float, omega_c: float, mode_volume: float) -> float:
    """Single-photon Rabi frequency d * sqrt(omega_c / (2 hbar epsilon_0 V))."""
    if dipole <= 0 or omega_c <= 0 or mode_volume <= 0:
        raise ValueError("rabi_frequency requires positive inputs")
    return float(dipole * np.sqrt(omega_c / (2 * hbar * epsilon_0 * mode_volume)))


def zpl_coupling(center: CenterSpec, cavity: CavitySpec) -> float:
    """Omega_0 of the ZPL transition, honoring any per-center override."""
    if center.coupling_override is not None:
        return center.coupling_override
    d0 = dipole_moment(center.gamma_0, center.omega_zpl, center.refractive_index)
    return rabi_frequency(d0, cavity.omega_c, cavity.mode_volume)


def sideband_coupling(center: CenterSpec, cavity: CavitySpec) -> float:
    """Omega_1 of the phonon-sideband transition."""
    if center.zpl_fraction >= 1.0:
        return 0.0
    omega_1 = TWO_PI * c / center.lambda_sideband
    d1 = dipole_moment(center.gamma_1, omega_1, center.refractive_index)
    return rabi_frequency(d1, cavity.omega_c, cavity.mode_volume)


def purcell_factor(omega_0: float, gamma_total: float, kappa: float) -> float:
    """Emission-rate enhancement 4 Omega_0^2 / (gamma_total kappa)."""
    if gamma_total <= 0 or kappa <= 0:
        raise ValueError("purcell_factor requires positive decay rates")
    return 4.0 * omega_0**2 / (gamma_total * kappa)


def purcell_factor_qv(dipole: float, gamma_total: float, quality_factor: float,
                      mode_volume: float) -> float:
    """Equivalent Q/V form, (4 d^2 / hbar epsilon_0 gamma_total) * Q / V."""
    if gamma_total <= 0 or mode_volume <= 0:
        raise ValueError("purcell_factor_qv requires positive inputs")
    return 4.0 * dipole**2 * quality_factor / (hbar * epsilon_0 * gamma_total * mode_volume)


def ideal_emission_probability(purcell: float) -> float:
    """F_p / (1 + F_p): emission routed into the cavity mode under ideal excitation."""
    if purcell < 0:
        raise ValueError("Purcell factor must be nonnegative")
    return purcell / (1.0 + purcell)


def cascade_emission_probability(omega_0: float, gamma_total: float, kappa: float) -> float:
    """Probability that one excitation leaves through the cavity-waveguide port.

    Exact for the three-stage amplitude cascade excited -> cavity photon ->
    waveguide photon; reduces to F_p/(1+F_p) in the overdamped weak-coupling
    limit.
    """
    num = omega_0**2 * kappa
    den = (gamma_total + kappa) * (gamma_total * kappa / 4.0 + omega_0**2)
    return num / den


def optimal_q(omega_0: float, omega_c: float) -> float:
    """Quality factor at the kappa = 2.5 Omega_0 operating point."""
    if omega_0 <= 0 or omega_c <= 0:
        raise ValueError("optimal_q requires positive inputs")
    return omega_c / (2.0 * 2.5 * omega_0)


def excitation_bounds(pulse_width: float, pump_rate: float,
                      omega_0: float) -> tuple[float, float]:
    """Decoherence-free upper bounds (P1, Pm) for a top-hat trigger pulse.

    Evaluated in a form whose exponents are all nonpositive, so arbitrarily
    hard pumping (large r*T) cannot overflow; the r = 4*Omega_0 branch point
    is crossed smoothly through complex arithmetic with a series fallback.
    """
    T, r = float(pulse_width), float(pump_rate)
    if T < 0 or r < 0:
        raise ValueError("pulse width and pump rate must be nonnegative")
    if r == 0.0 or T == 0.0:
        return 0.0, 0.0

    rt = r * T
    s2 = complex(r * r - 16.0 * omega_0**2)
    s = np.sqrt(s2)
    z = s * T / 2.0

    if abs(s2) * T * T / 4.0 < 1e-8 * (r * T / 2.0) ** 2 + 1e-12:
        # near the branch point: [r^2 cosh(z) - 16 Om^2]/s^2 -> 1 + r^2 T^2/8 (1 + z^2/12)
        core = 1.0 + r * r * T * T / 8.0 * (1.0 + (z * z / 12.0).real)
        p1 = 2.0 * np.exp(-rt / 2.0) * core - 2.0 * np.exp(-rt)
    elif z.real > 30.0:
        # deep overdamped pumping: keep only the surviving exponential
        decay = 16.0 * omega_0**2 * T / (r + s.real) / 2.0  # (r - s) T / 2
        p1 = float((r * r / s2).real) * np.exp(-decay)
    else:
        core = (r * r * np.cosh(z) - 16.0 * omega_0**2) / s2
        p1 = float((2.0 * np.exp(-rt / 2.0) * core).real) - 2.0 * np.exp(-rt)

    p1 = min(max(p1, 0.0), 1.0)
    pm = max(1.0 - p1 - np.exp(-rt), 0.0)
    return p1, pm


def pump_intensity(pump_rate: float, dipole: float) -> float:
    """Optical intensity driving absorption at rate r (W/m^2).

    I = hbar^2 c epsilon_0 r^2 / (2 d^2); warns above the 50 GW/cm^2
    photostability ceiling instead of failing.
    """
    if dipole <= 0:
        raise ValueError("dipole must be positive")
    intensity = hbar**2 * c * epsilon_0 * pump_rate**2 / (2.0 * dipole**2)
    if intensity > PHOTOSTABILITY_CEILING:
        warnings.warn(
            f"pump intensity {intensity / 1e13:.1f} GW/cm^2 exceeds the "
            "50 GW/cm^2 photostability ceiling",
            stacklevel=2,
        )
    return intensity


def pulse_energy(intensity: float, pulse_width: float, spot_area: float) -> float:
    """Energy delivered per trigger pulse (J)."""
    return intensity * pulse_width * spot_area


def bare_center_p1(center: CenterSpec, zpl_only: bool = False) -> float:
    """Emission probability of the uncavitied center, (2 pi / tau) / gamma_total.

    With ``zpl_only`` the result is restricted to the zero-phonon line, the
    relevant figure when narrowband filtering keeps only that transition.
    """
    p = center.gamma_rad / center.gamma_total
    return p * center.zpl_fraction if zpl_only else p
