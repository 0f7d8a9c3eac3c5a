"""BB84 secure key rates and loss cutoffs for single-photon and laser sources."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .channels import LinkBudget


@dataclass(frozen=True)
class SourceSpec:
    """Photon source feeding the protocol.

    ``sps``: triggered single-photon source with emission probability
    ``p1``, attenuation-free autocorrelation ``g2`` and optional extra
    attenuation ``xi``.  ``wcs``: Poissonian laser pulses of mean photon
    number ``nbar`` (defaults to the loss-matched optimum).  ``wcs_decoy``:
    laser pulses with decoy-state estimation, ``nbar`` defaulting to 0.7.
    """

    kind: str                          # sps | wcs | wcs_decoy
    repetition_rate: float             # Hz
    p1: float | None = None
    g2: float | None = None
    xi: float = 1.0
    nbar: float | None = None
    spectral_width: float | None = None  # m

    def __post_init__(self):
        if self.kind not in ("sps", "wcs", "wcs_decoy"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "sps":
            if self.p1 is None or self.g2 is None:
                raise ValueError("sps sources need p1 and g2")
            if not 0 < self.p1 <= 1 or self.g2 < 0:
                raise ValueError("need 0 < p1 <= 1 and g2 >= 0")
            if not 0 < self.xi <= 1:
                raise ValueError("extra attenuation xi must lie in (0, 1]")
        elif self.p1 is not None or self.g2 is not None:
            raise ValueError("p1/g2 are single-photon-source fields")
        if self.nbar is not None and self.nbar < 0:
            raise ValueError("mean photon number must be nonnegative")


@dataclass(frozen=True)
class ProtocolParams:
    """Sifting fraction, baseline error and error-correction inefficiency."""

    sifting: float = 0.5
    baseline_error: float = 0.02
    ec_inefficiency: float = 1.1

    def __post_init__(self):
        if not 0 < self.sifting <= 1:
            raise ValueError("sifting fraction must lie in (0, 1]")
        if not 0 <= self.baseline_error < 0.25:
            raise ValueError("baseline error must lie in [0, 0.25)")
        if self.ec_inefficiency < 1:
            raise ValueError("error-correction inefficiency must be >= 1")


@dataclass(frozen=True)
class KeyRatePoint:
    """One evaluated operating point of the rate formulas.

    ``secure`` tracks the allowable-error criterion e <= beta/4 (whose
    crossing defines the closed-form loss cutoffs); for decoy operation,
    where no such closed form exists, it tracks a positive rate instead.
    """

    eta: float
    noise: float
    p_detect: float
    error_rate: float
    single_fraction: float      # beta
    compression: float          # privacy-amplification fraction retained
    rate: float                 # bits/s, clamped at 0
    secure: bool


def shannon_entropy(e: float) -> float:
    """Binary entropy in bits, with h(0) = h(1) = 0 by continuity."""
    if not 0 <= e <= 1:
        raise ValueError("entropy argument must lie in [0, 1]")
    if e in (0.0, 1.0):
        return 0.0
    return float(-e * np.log2(e) - (1 - e) * np.log2(1 - e))


def compression_tau(e: float, beta: float) -> float:
    """Privacy-amplification compression, -log2[1/2 + 2e/b - 2(e/b)^2].

    Once the single-photon error e/beta reaches 1/2 no privacy is left and
    the compression is zero (the rate is forced to zero upstream through the
    security flag).  Clamped to [0, 1].
    """
    if beta <= 0:
        return 0.0
    x = e / beta
    if x <= 0:
        return 1.0
    if x >= 0.5:
        return 0.0
    return float(min(1.0, max(0.0, -np.log2(0.5 + 2 * x - 2 * x * x))))


def _clamp_rate(raw: float) -> float:
    return max(raw, 0.0)


def key_rate_sps(source: SourceSpec, budget: LinkBudget,
                 protocol: ProtocolParams) -> KeyRatePoint:
    """Secure rate of a triggered sub-Poissonian source.

    Detection combines attenuated signal and noise; the multi-photon weight
    xi^2 P1^2 g2 / 2 dilutes the single-photon fraction beta.  The point is
    flagged insecure when the error rate exceeds beta/4, the allowable-error
    threshold that also defines the closed-form loss cutoff.
    """
    if source.kind != "sps":
        raise ValueError("key_rate_sps needs an sps source")
    eta, n = budget.eta, budget.noise
    xi, p1, g2 = source.xi, source.p1, source.g2
    p_det = xi * eta * p1 + n
    if p_det <= 0:
        return KeyRatePoint(eta, n, 0.0, 0.0, 0.0, 0.0, 0.0, False)
    pm = xi**2 * p1**2 * g2 / 2.0
    beta = max((p_det - pm) / p_det, 0.0)
    e = (protocol.baseline_error * xi * eta * p1 + n / 2.0) / p_det
    tau = compression_tau(e, beta)
    raw = source.repetition_rate * protocol.sifting * p_det * (
        beta * tau - protocol.ec_inefficiency * shannon_entropy(e))
    rate = _clamp_rate(raw)
    secure = beta > 0 and e <= beta / 4.0
    return KeyRatePoint(eta, n, p_det, e, beta, tau, rate, secure)


def key_rate_wcs(source: SourceSpec, budget: LinkBudget,
                 protocol: ProtocolParams) -> KeyRatePoint:
    """Secure rate of an attenuated laser without decoy states.

    The mean photon number defaults to the transmittance itself, the
    optimum that leaves the rate quadratic in the loss.
    """
    if source.kind != "wcs":
        raise ValueError("key_rate_wcs needs a wcs source")
    eta, n = budget.eta, budget.noise
    nbar = source.nbar if source.nbar is not None else eta
    if nbar <= 0:
        return KeyRatePoint(eta, n, n, 0.0, 0.0, 0.0, 0.0, False)
    signal = 1.0 - np.exp(-eta * nbar)
    p_det = signal + n
    pm = 1.0 - (1.0 + nbar) * np.exp(-nbar)
    beta = max((p_det - pm) / p_det, 0.0)
    e = (protocol.baseline_error * signal + n / 2.0) / p_det
    if beta <= 0:
        return KeyRatePoint(eta, n, p_det, e, 0.0, 0.0, 0.0, False)
    tau = compression_tau(e, beta)
    raw = source.repetition_rate * protocol.sifting * p_det * (
        beta * tau - protocol.ec_inefficiency * shannon_entropy(e))
    rate = _clamp_rate(raw)
    secure = beta > 0 and e <= beta / 4.0
    return KeyRatePoint(eta, n, p_det, e, beta, tau, rate, secure)


def key_rate_decoy(source: SourceSpec, budget: LinkBudget,
                   protocol: ProtocolParams) -> KeyRatePoint:
    """Secure rate of a decoy-state laser with ideal decoy estimation.

    Yields: Y0 = noise, Y1 = eta + Y0; the single-photon gain fraction
    replaces the compression function by 1 - h(e/beta).
    """
    if source.kind != "wcs_decoy":
        raise ValueError("key_rate_decoy needs a wcs_decoy source")
    eta, n = budget.eta, budget.noise
    nbar = source.nbar if source.nbar is not None else 0.7
    if nbar <= 0:
        return KeyRatePoint(eta, n, n, 0.0, 0.0, 0.0, 0.0, False)
    signal = 1.0 - np.exp(-eta * nbar)
    q_total = signal + n
    y1 = eta + n
    q1 = nbar * np.exp(-nbar) * y1
    beta = q1 / q_total
    e = (protocol.baseline_error * signal + n / 2.0) / q_total
    x = e / beta
    pa = beta * (1.0 - shannon_entropy(min(x, 1.0))) if x < 1.0 else 0.0
    raw = source.repetition_rate * protocol.sifting * q_total * (
        pa - protocol.ec_inefficiency * shannon_entropy(e))
    rate = _clamp_rate(raw)
    return KeyRatePoint(eta, n, q_total, e, beta, pa, rate, rate > 0)


def key_rate(source: SourceSpec, budget: LinkBudget,
             protocol: ProtocolParams) -> KeyRatePoint:
    dispatch = {"sps": key_rate_sps, "wcs": key_rate_wcs, "wcs_decoy": key_rate_decoy}
    return dispatch[source.kind](source, budget, protocol)


def loss_cutoff_sps(p1: float, g2: float, noise: float,
                    baseline_error: float = 0.02) -> float:
    """Closed-form minimum transmittance (N/P1 + P1 g2/2) / (1 - 4 e0)."""
    if not 0 < p1 <= 1 or g2 < 0 or noise < 0:
        raise ValueError("need 0 < p1 <= 1, g2 >= 0, noise >= 0")
    return (noise / p1 + p1 * g2 / 2.0) / (1.0 - 4.0 * baseline_error)


def loss_cutoff_wcs(noise: float, baseline_error: float = 0.02) -> float:
    """Closed-form minimum transmittance sqrt(2 N) / (1 - 4 e0)."""
    if noise < 0:
        raise ValueError("noise must be nonnegative")
    return np.sqrt(2.0 * noise) / (1.0 - 4.0 * baseline_error)


def eta_to_db(eta: float) -> float:
    return -10.0 * np.log10(eta) if eta > 0 else float("inf")


def optimize_attenuation(source: SourceSpec, budget: LinkBudget,
                         protocol: ProtocolParams,
                         tol: float = 1e-4) -> tuple[float, float]:
    """Golden-section maximization of the sub-Poissonian rate over xi.

    A coarse pre-scan checks the rate is unimodal on (0, 1] before the
    search narrows the bracket; returns (xi*, rate at xi*).
    """
    if source.kind != "sps":
        raise ValueError("attenuation optimization applies to sps sources")

    def rate_at(xi: float) -> float:
        return key_rate_sps(replace(source, xi=xi), budget, protocol).rate

    grid = np.linspace(1e-4, 1.0, 65)
    vals = np.array([rate_at(x) for x in grid])
    rises = np.flatnonzero(np.diff(vals) > 1e-9 * max(vals.max(), 1.0))
    if rises.size and rises.max() > np.argmax(vals):
        raise ValueError("key rate is not unimodal in the attenuation")

    lo, hi = 1e-6, 1.0
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c_ = b - invphi * (b - a)
    d_ = a + invphi * (b - a)
    fc, fd = rate_at(c_), rate_at(d_)
    while b - a > tol:
        if fc >= fd:
            b, d_, fd = d_, c_, fc
            c_ = b - invphi * (b - a)
            fc = rate_at(c_)
        else:
            a, c_, fc = c_, d_, fd
            d_ = a + invphi * (b - a)
            fd = rate_at(d_)
    xi_star = 0.5 * (a + b)
    # the boundary xi = 1 wins whenever the interior stationary point doesn't
    if rate_at(1.0) >= rate_at(xi_star):
        xi_star = 1.0
    return xi_star, rate_at(xi_star)


def cutoff_search(is_secure, lo_db: float = 0.0, hi_db: float = 150.0,
                  tol_db: float = 0.05) -> float:
    """Largest channel loss (dB) at which ``is_secure(loss_db)`` still holds.

    Bisection to ``tol_db``; the predicate is the security criterion of the
    relevant formula (error threshold for sps/wcs, positive rate for decoy).
    """
    if not is_secure(lo_db):
        return float("nan")
    if is_secure(hi_db):
        return float("inf")
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if is_secure(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scaled_budget(budget: LinkBudget, loss_db: float) -> LinkBudget:
    """Budget whose link transmittance realizes the requested total loss."""
    eta_target = 10.0 ** (-loss_db / 10.0)
    fixed = budget.eta_optics * budget.eta_coupling * budget.eta_detector
    eta_link = min(eta_target / fixed, 1.0)
    return replace(budget, eta_link=eta_link)
