"""Monte-Carlo wavefunction unraveling and photon-coincidence statistics.

Each excitation cycle evolves a pure state under the non-Hermitian effective
Hamiltonian; piecewise-constant generators make every propagator an exact
matrix exponential, with dyadically halved versions used to bisect jump
times.  Cycles draw from counter-based substreams keyed by (seed, cycle), so
results are reproducible regardless of execution order or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .hilbert import GROUND0, HilbertSpace
from .lindblad import DissipatorTerm, PulseSchedule

DYADIC_LEVELS = 12   # jump times resolved to dt / 4096 < 1e-3 dt
NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class JumpOperator:
    operator: np.ndarray
    rate: float
    channel: str


@dataclass(frozen=True)
class JumpRecord:
    """Quantum jumps of one excitation cycle, times relative to the trigger."""

    cycle_index: int
    events: tuple[tuple[float, str], ...]
    seed: int

    def channel_times(self, channel: str) -> list[float]:
        return [t for t, ch in self.events if ch == channel]

    @property
    def photon_times(self) -> list[float]:
        return self.channel_times("cavity_outcoupling")


@dataclass
class CoincidenceHistogram:
    """Signed-delay coincidence counts behind a balanced splitter."""

    bin_width: float
    counts: np.ndarray
    offset: int                 # bin index whose left edge is delay 0
    total_cycles: int
    repetition_period: float

    def delays(self) -> np.ndarray:
        """Bin-center delays."""
        idx = np.arange(self.counts.size) - self.offset
        return (idx + 0.5) * self.bin_width

    def peak_totals(self, half_window: float | None = None) -> tuple[float, float]:
        """(zero-delay counts, mean side-peak counts), peaks summed over a window."""
        if half_window is None:
            half_window = self.repetition_period / 4.0
        d = self.delays()
        central = float(self.counts[np.abs(d) < half_window].sum())
        side = []
        k = 1
        while k * self.repetition_period < d.max():
            for s in (-1, 1):
                m = np.abs(d - s * k * self.repetition_period) < half_window
                side.append(self.counts[m].sum())
            k += 1
        return central, float(np.mean(side)) if side else float("nan")

    def normalized(self) -> np.ndarray:
        """Counts scaled by the mean side-peak total."""
        _, side = self.peak_totals()
        scale = side if np.isfinite(side) and side > 0 else 1.0
        return self.counts / scale


def unravel(hamiltonian: np.ndarray, terms: list[DissipatorTerm],
            include_pump: bool = True) -> tuple[np.ndarray, list[JumpOperator]]:
    """Effective Hamiltonian H - (i/2) sum_k rate_k A_k^dag A_k and the jump set."""
    h_eff = hamiltonian.astype(complex).copy()
    jumps = []
    for term in terms:
        if term.time_dependent and not include_pump:
            continue
        if term.rate == 0.0:
            continue
        a = term.operator
        h_eff = h_eff - 0.5j * term.rate * (a.conj().T @ a)
        jumps.append(JumpOperator(operator=a, rate=term.rate, channel=term.label))
    return h_eff, jumps


class _Segment:
    """Constant-generator stretch with dyadic propagators.

    Time is handled in integer ticks of dt / 2**levels, so compositions of
    halved propagators land on grid points exactly.
    """

    def __init__(self, h_eff: np.ndarray, jumps: list[JumpOperator],
                 duration: float, n_coarse: int, levels: int = DYADIC_LEVELS):
        self.jumps = jumps
        self.levels = levels
        self.dt = duration / n_coarse
        self.tick = self.dt / 2**levels
        self.total_ticks = n_coarse * 2**levels
        # ladder[k] propagates 2**(levels - k) ticks
        self.ladder = [expm(-1j * h_eff * (self.dt / 2**k)) for k in range(levels + 1)]
        self.h_eff = h_eff

    def propagator_for(self, ticks: int) -> list[np.ndarray]:
        """Dyadic pieces (largest first) composing ``ticks`` tick steps."""
        pieces = []
        for k in range(self.levels + 1):
            size = 2 ** (self.levels - k)
            while ticks >= size:
                pieces.append(self.ladder[k])
                ticks -= size
        return pieces

    def jump_weights(self, psi: np.ndarray) -> np.ndarray:
        return np.array([j.rate * np.vdot(j.operator @ psi, j.operator @ psi).real
                         for j in self.jumps])

    def is_dark(self, psi: np.ndarray) -> bool:
        if self.jumps and self.jump_weights(psi).sum() > 1e-30:
            return False
        hpsi = self.h_eff @ psi
        overlap = np.vdot(psi, hpsi) / np.vdot(psi, psi)
        return bool(np.linalg.norm(hpsi - overlap * psi) < 1e-12 * np.linalg.norm(psi))


@dataclass
class TrajectoryScenario:
    """Frozen inputs of a trajectory ensemble (one scenario, many cycles)."""

    schedule: PulseSchedule
    space: HilbertSpace
    pulse_segment: _Segment
    tail_segment: _Segment

    @classmethod
    def from_model(cls, hamiltonian: np.ndarray, terms: list[DissipatorTerm],
                   schedule: PulseSchedule, space: HilbertSpace,
                   tail_steps: int = 512) -> "TrajectoryScenario":
        h_on, j_on = unravel(hamiltonian, terms, include_pump=True)
        h_off, j_off = unravel(hamiltonian, terms, include_pump=False)
        period = 1.0 / schedule.repetition_rate
        pulse = _Segment(h_on, j_on, schedule.pulse_width, n_coarse=4)
        tail = _Segment(h_off, j_off, period - schedule.pulse_width, n_coarse=tail_steps)
        return cls(schedule, space, pulse, tail)


def _choose_channel(psi: np.ndarray, jumps: list[JumpOperator],
                    weights: np.ndarray, rng: np.random.Generator):
    total = weights.sum()
    if total <= 0:
        raise RuntimeError("jump fired with zero total jump weight")
    pick = int(np.searchsorted(np.cumsum(weights) / total, rng.random()))
    pick = min(pick, len(jumps) - 1)
    phi = jumps[pick].operator @ psi
    return phi / np.linalg.norm(phi), jumps[pick].channel


class _CheckpointSink:
    """Collects normalized states at requested absolute times."""

    def __init__(self, times: np.ndarray | None):
        self.times = times
        self.states: list[np.ndarray] = []

    def pending(self, t_start: float, t_end: float) -> list[float]:
        if self.times is None:
            return []
        done = len(self.states)
        return [t for t in self.times[done:] if t_start <= t <= t_end]

    def record(self, psi: np.ndarray):
        self.states.append(psi / np.linalg.norm(psi))

    def finalize(self, psi: np.ndarray):
        if self.times is None:
            return
        while len(self.states) < len(self.times):
            self.record(psi)


def _march(psi: np.ndarray, seg: _Segment, t_offset: float,
           rng: np.random.Generator, threshold: list[float],
           events: list, sink: _CheckpointSink) -> np.ndarray:
    """Advance through one segment, detecting jumps on the survival norm."""
    duration = seg.total_ticks * seg.tick
    stops = sorted({round((t - t_offset) / seg.tick) for t in
                    sink.pending(t_offset, t_offset + duration)})
    stops = [min(max(s, 0), seg.total_ticks) for s in stops] + [seg.total_ticks]

    pos = 0
    dark = seg.is_dark(psi)          # only jumps can change darkness
    for target in stops:
        while pos < target:
            if dark:
                pos = target
                break
            span = min(target - pos, 2**seg.levels)
            # largest dyadic piece not exceeding the remaining span
            size = 2 ** min(int(np.log2(span)), seg.levels)
            k = seg.levels - int(np.log2(size))
            cand = seg.ladder[k] @ psi
            norm2 = np.vdot(cand, cand).real
            if norm2 < NORM_FLOOR:
                raise RuntimeError(f"state norm collapsed below {NORM_FLOOR}")
            if norm2 > threshold[0]:
                psi = cand
                pos += size
                continue
            # jump inside this piece: halve until single-tick resolution
            for kk in range(k + 1, seg.levels + 1):
                half = seg.ladder[kk] @ psi
                if np.vdot(half, half).real > threshold[0]:
                    psi = half
                    pos += 2 ** (seg.levels - kk)
            weights = seg.jump_weights(psi)
            psi, channel = _choose_channel(psi, seg.jumps, weights, rng)
            events.append((t_offset + pos * seg.tick, channel))
            threshold[0] = rng.random()
            dark = seg.is_dark(psi)
        if target < seg.total_ticks:
            sink.record(psi)
    return psi


def run_single_cycle(scenario: TrajectoryScenario, cycle_index: int, seed: int,
                     checkpoints: np.ndarray | None = None):
    """One trigger-to-trigger trajectory; returns (record, checkpoint states)."""
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [seed % 2**64, cycle_index], dtype=np.uint64)))
    psi = scenario.space.basis_state(GROUND0, 0, 0)
    events: list[tuple[float, str]] = []
    threshold = [rng.random()]
    sink = _CheckpointSink(checkpoints)

    psi = _march(psi, scenario.pulse_segment, 0.0, rng, threshold, events, sink)
    psi = _march(psi, scenario.tail_segment, scenario.schedule.pulse_width,
                 rng, threshold, events, sink)
    sink.finalize(psi)

    record = JumpRecord(cycle_index=cycle_index, events=tuple(events), seed=seed)
    states = np.array(sink.states) if checkpoints is not None else None
    return record, states


def run_cycles(scenario: TrajectoryScenario, n_cycles: int, seed: int,
               checkpoints: np.ndarray | None = None, workers: int = 1):
    """Simulate ``n_cycles`` independent excitation cycles.

    Deterministic for a given seed: cycle substreams are independent, so the
    worker count only affects scheduling, never the records.
    """
    if n_cycles < 1:
        raise ValueError("need at least one cycle")

    def batch(indices):
        return [run_single_cycle(scenario, int(i), seed, checkpoints) for i in indices]

    if workers <= 1:
        results = batch(range(n_cycles))
    else:
        chunks = [c for c in np.array_split(np.arange(n_cycles), workers * 4) if c.size]
        results = []
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(batch, chunks):
                results.extend(part)
        results.sort(key=lambda rs: rs[0].cycle_index)

    records = [r for r, _ in results]
    states = np.stack([s for _, s in results]) if checkpoints is not None else None
    return records, states


def ensemble_population(states: np.ndarray, space: HilbertSpace,
                        atom: int, n_cavity: int, n_waveguide: int) -> np.ndarray:
    """Trajectory-averaged population of one basis state at each checkpoint."""
    idx = space.index(atom, n_cavity, n_waveguide)
    return (np.abs(states[:, :, idx]) ** 2).mean(axis=0)


def classify_cycles(records: list[JumpRecord]) -> dict[str, int]:
    """Partition cycles by fate; the categories sum to the cycle count."""
    fates = {"waveguide": 0, "radiative": 0, "nonradiative": 0, "other": 0}
    for rec in records:
        channels = {ch for _, ch in rec.events}
        if "cavity_outcoupling" in channels:
            fates["waveguide"] += 1
        elif channels & {"radiative_zpl", "radiative_sideband"}:
            fates["radiative"] += 1
        elif "nonradiative" in channels:
            fates["nonradiative"] += 1
        else:
            fates["other"] += 1
    return fates


def hbt_histogram(records: list[JumpRecord], bin_width: float,
                  repetition_rate: float, splitter_seed: int,
                  max_lag_periods: int = 8,
                  detector_efficiency: float = 1.0) -> CoincidenceHistogram:
    """Coincidence histogram of waveguide photons behind a 50/50 splitter.

    Every photon is routed to detector A or B by a per-cycle substream of
    ``splitter_seed``; all A-B pairs within the lag window are tallied at the
    signed delay t_B - t_A.  Left-edge binning (floor) makes doubling the bin
    width an exact pairwise sum.
    """
    if not records:
        raise ValueError("no jump records supplied")
    period = 1.0 / repetition_rate
    times_a, times_b = [], []
    for rec in records:
        photons = rec.photon_times
        if not photons:
            continue
        rng = np.random.Generator(np.random.Philox(key=np.array(
            [splitter_seed % 2**64, rec.cycle_index], dtype=np.uint64)))
        for t in photons:
            if detector_efficiency < 1.0 and rng.random() > detector_efficiency:
                continue
            absolute = rec.cycle_index * period + t
            (times_a if rng.random() < 0.5 else times_b).append(absolute)

    window = max_lag_periods * period
    n_half = int(np.ceil(window / bin_width)) + 1
    counts = np.zeros(2 * n_half, dtype=np.int64)
    offset = n_half
    tb = np.sort(np.array(times_b))
    for ta in times_a:
        lo = np.searchsorted(tb, ta - window)
        hi = np.searchsorted(tb, ta + window)
        for delay in tb[lo:hi] - ta:
            idx = int(np.floor(delay / bin_width)) + offset
            if 0 <= idx < counts.size:
                counts[idx] += 1
    return CoincidenceHistogram(bin_width=bin_width, counts=counts, offset=offset,
                                total_cycles=len(records), repetition_period=period)
