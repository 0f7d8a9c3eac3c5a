"""Transmittance and noise models for fiber, terrestrial and satellite links."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c, h
from scipy.integrate import quad


@dataclass(frozen=True)
class DetectorSpec:
    """Gated single-photon detector."""

    efficiency: float          # quantum efficiency
    dark_rate: float           # counts/s
    gate: float                # s
    diameter: float = 0.5e-3   # m

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ValueError("detector efficiency must lie in (0, 1]")
        if self.dark_rate < 0 or self.gate <= 0:
            raise ValueError("dark rate must be >= 0 and gate > 0")


@dataclass(frozen=True)
class FiberChannel:
    alpha: float               # dB/km
    length: float              # km
    coupling: float            # source-to-fiber coupling efficiency

    def __post_init__(self):
        if self.alpha < 0 or self.length < 0:
            raise ValueError("attenuation and length must be nonnegative")
        if not 0 < self.coupling <= 1:
            raise ValueError("coupling must lie in (0, 1]")


@dataclass(frozen=True)
class FreeSpacePath:
    """Geometry, turbulence and background of one free-space scenario.

    Terrestrial paths use a flat turbulence profile (``cn2_flat``); slant
    paths use the altitude profile parameterized by wind speed and ground
    turbulence.  The collimated beam waist is fixed at 0.35 x the
    transmitter diameter.
    """

    kind: str                  # terrestrial | uplink | downlink
    length: float              # m
    wavelength: float          # m
    transmitter_diameter: float
    receiver_diameter: float
    focal_ratio: float
    detector_diameter: float
    background: float          # W m^-2 Sr^-1 um^-1
    scatter_loss_db: float = 0.0
    absorption_loss_db: float = 0.0
    cn2_flat: float = 4e-16    # m^-2/3
    ground_altitude: float = 0.0
    top_altitude: float = 0.0
    wind_speed: float = 10.0   # m/s
    cn2_ground: float = 1.7e-14

    def __post_init__(self):
        if self.kind not in ("terrestrial", "uplink", "downlink"):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.kind != "terrestrial" and self.top_altitude <= self.ground_altitude:
            raise ValueError("slant paths need top_altitude > ground_altitude")
        if self.waist >= self.receiver_diameter and self.kind == "terrestrial":
            raise ValueError("beam waist must be smaller than the receiver aperture")

    @property
    def waist(self) -> float:
        return 0.35 * self.transmitter_diameter


@dataclass(frozen=True)
class LinkBudget:
    """Multiplicative transmittance components and per-pulse noise."""

    eta_optics: float
    eta_coupling: float
    eta_link: float
    eta_detector: float
    noise: float               # counts/pulse
    breakdown_db: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("eta_optics", "eta_coupling", "eta_link", "eta_detector"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} = {v} outside (0, 1]")

    @property
    def eta(self) -> float:
        return self.eta_optics * self.eta_coupling * self.eta_link * self.eta_detector

    @property
    def eta_db(self) -> float:
        return -10.0 * np.log10(self.eta)


def fiber_transmittance(alpha: float, length: float) -> float:
    """10^(-alpha l / 10) for attenuation in dB/km and length in km."""
    if alpha < 0 or length < 0:
        raise ValueError("alpha and length must be nonnegative")
    return 10.0 ** (-alpha * length / 10.0)


def fov_geometry(detector_diameter: float, receiver_diameter: float,
                 focal_ratio: float) -> tuple[float, float]:
    """Angular field of view D_d/(D_R a) and its solid angle pi theta^2."""
    if detector_diameter <= 0 or receiver_diameter <= 0 or focal_ratio <= 0:
        raise ValueError("fov_geometry requires positive inputs")
    theta = detector_diameter / (receiver_diameter * focal_ratio)
    return theta, np.pi * theta**2


def background_noise(brightness: float, solid_angle: float, receiver_area: float,
                     filter_width: float, wavelength: float, dark_rate: float,
                     gate: float) -> float:
    """Gated noise counts per pulse from sky background and dark counts.

    ``brightness`` is spectral radiance per micron of wavelength; the
    collected radiant power is divided by the photon energy h c / lambda to
    count photons (the product H_b * Omega * A * B is a power, not a rate).
    """
    power = brightness * 1e6 * solid_angle * receiver_area * filter_width
    photon_rate = power * wavelength / (h * c)
    return (photon_rate + 4.0 * dark_rate) * gate


def beam_divergence(wavelength: float, waist: float) -> float:
    """Diffraction half-angle lambda / (pi w0) of a collimated Gaussian beam."""
    if wavelength <= 0 or waist <= 0:
        raise ValueError("beam_divergence requires positive inputs")
    return wavelength / (np.pi * waist)


def terrestrial_weff(theta: float, length: float, waist: float,
                     wavelength: float, cn2: float) -> float:
    """Long-term beam radius with beam wander over a flat turbulence profile."""
    spot = theta * length
    if cn2 == 0.0:
        return spot
    k = 2.0 * np.pi / wavelength
    p = (0.55 * k**2 * length * cn2) ** (-3.0 / 5.0)
    return spot * np.sqrt(1.0 + (waist / p) ** 2)


def hv_cn2(altitude: float, wind_speed: float, cn2_ground: float) -> float:
    """Altitude profile of the refractive-index structure parameter.

    Three-term empirical model: a wind-driven high-altitude bump, a
    mid-altitude exponential and the ground layer.
    """
    altitude = np.asarray(altitude, dtype=float) if np.ndim(altitude) else altitude
    if np.any(np.asarray(altitude) < 0):
        raise ValueError("altitude must be nonnegative")
    hkm = 1e-5 * altitude
    return (0.00594 * (wind_speed / 27.0) ** 2 * hkm**10 * np.exp(-altitude / 1000.0)
            + 2.7e-16 * np.exp(-altitude / 1500.0)
            + cn2_ground * np.exp(-altitude / 100.0))


def turbulence_moment(kind: str, ground_altitude: float, top_altitude: float,
                      wind_speed: float, cn2_ground: float) -> float:
    """Path-weighted integral of the turbulence profile (m^1/3).

    Uplink weights the ground layer, (1 - (h-h0)/(H-h0))^(5/3); downlink
    weights the top of the path.
    """
    if top_altitude <= ground_altitude:
        raise ValueError("need top_altitude > ground_altitude")
    span = top_altitude - ground_altitude

    def weight(hh: float) -> float:
        x = (hh - ground_altitude) / span
        return (1.0 - x) ** (5.0 / 3.0) if kind == "uplink" else x ** (5.0 / 3.0)

    if kind not in ("uplink", "downlink"):
        raise ValueError("kind must be 'uplink' or 'downlink'")

    def integrand(hh: float) -> float:
        return hv_cn2(hh, wind_speed, cn2_ground) * weight(hh)

    # split at the profile's knee altitudes so quadrature converges quickly
    pts = [hh for hh in (1e3, 3e3, 10e3, 20e3, 50e3)
           if ground_altitude < hh < top_altitude]
    total = 0.0
    edges = [ground_altitude] + pts + [top_altitude]
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = quad(integrand, a, b, epsrel=1e-8, epsabs=1e-30, limit=200)
        if not np.isfinite(val):
            raise ArithmeticError("turbulence moment quadrature failed")
        total += val
    return total


def satellite_weff(theta: float, length: float, moment: float,
                   wavelength: float) -> float:
    """Effective slant-path spot radius theta l sqrt(1 + 7.75 mu (k/theta^5)^(1/3))."""
    spot = theta * length
    if moment == 0.0:
        return spot
    k = 2.0 * np.pi / wavelength
    return spot * np.sqrt(1.0 + 7.75 * moment * (k / theta**5) ** (1.0 / 3.0))


def collection_efficiency(receiver_diameter: float, weff: float) -> float:
    """Fraction of a Gaussian spot of radius w_eff captured by the aperture."""
    if receiver_diameter <= 0 or weff <= 0:
        raise ValueError("collection_efficiency requires positive inputs")
    return 1.0 - np.exp(-(receiver_diameter**2) / (2.0 * weff**2))


def effective_spot_radius(path: FreeSpacePath) -> float:
    """Long-term spot radius at the receiver for any path kind."""
    theta = beam_divergence(path.wavelength, path.waist)
    if path.kind == "terrestrial":
        return terrestrial_weff(theta, path.length, path.waist, path.wavelength,
                                path.cn2_flat)
    mu = turbulence_moment(path.kind, path.ground_altitude, path.top_altitude,
                           path.wind_speed, path.cn2_ground)
    return satellite_weff(theta, path.length, mu, path.wavelength)


def free_space_noise(path: FreeSpacePath, filter_width: float,
                     detector: DetectorSpec) -> float:
    theta, omega = fov_geometry(path.detector_diameter, path.receiver_diameter,
                                path.focal_ratio)
    area = np.pi * path.receiver_diameter**2 / 4.0
    return background_noise(path.background, omega, area, filter_width,
                            path.wavelength, detector.dark_rate, detector.gate)


def assemble_link_budget(channel: FiberChannel | FreeSpacePath,
                         detector: DetectorSpec, eta_optics: float,
                         filter_width: float | None = None) -> LinkBudget:
    """Combine optics, coupling, channel and detector transmittances.

    Fiber links take their fixed coupling efficiency and dark-count noise;
    free-space links compute collection from the broadened spot and add the
    filtered sky background.
    """
    if isinstance(channel, FiberChannel):
        eta_link = fiber_transmittance(channel.alpha, channel.length)
        eta_coupling = channel.coupling
        noise = 4.0 * detector.dark_rate * detector.gate
    else:
        if filter_width is None:
            raise ValueError("free-space budgets need the filter width")
        weff = effective_spot_radius(channel)
        eta_coupling = collection_efficiency(channel.receiver_diameter, weff)
        eta_link = 10.0 ** (-(channel.scatter_loss_db + channel.absorption_loss_db) / 10.0)
        noise = free_space_noise(channel, filter_width, detector)

    budget = LinkBudget(
        eta_optics=eta_optics, eta_coupling=eta_coupling, eta_link=eta_link,
        eta_detector=detector.efficiency, noise=noise,
        breakdown_db={
            "optics": -10.0 * np.log10(eta_optics),
            "coupling": -10.0 * np.log10(eta_coupling),
            "link": -10.0 * np.log10(eta_link),
            "detector": -10.0 * np.log10(detector.efficiency),
        },
    )
    return budget
