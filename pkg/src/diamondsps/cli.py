"""Command-line entry points: emit, sweep-q, sweep-excitation, hbt, keyrate, tables."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .channels import assemble_link_budget, free_space_noise, LinkBudget
from .config import ConfigError, emission_from_config, load_config, protocol_from_config
from .emitters import (
    bare_center_p1,
    dipole_moment,
    excitation_bounds,
    ideal_emission_probability,
    optimal_q,
    purcell_factor,
    zpl_coupling,
)
from .hilbert import GROUND0
from .lindblad import NumericalError, build_dissipators, build_hamiltonian, evolve
from .output import ResultTable, provenance
from .presets import (
    CENTERS,
    ETA_O_FIBER,
    ETA_O_FREE_SPACE,
    HBT_PRESETS,
    EmissionScenario,
    cavity_preset,
    decoy_row,
    detector_for,
    emission_scenario,
    fiber_channel,
    qkd_source_rows,
    slant_path,
    terrestrial_path,
)
from .qkd import (
    cutoff_search,
    eta_to_db,
    key_rate,
    key_rate_decoy,
    loss_cutoff_sps,
    scaled_budget,
)
from .trajectories import TrajectoryScenario, hbt_histogram, run_cycles


def simulate_emission(scenario: EmissionScenario, n_out: int = 600,
                      keep_states: bool = False):
    """Run one excitation cycle of a prepared scenario."""
    space = scenario.space
    h = build_hamiltonian(scenario.center, scenario.cavity, space)
    terms = build_dissipators(scenario.center, scenario.cavity, scenario.schedule, space)
    rho0 = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    i0 = space.index(GROUND0, 0, 0)
    rho0[i0, i0] = 1.0
    return evolve(rho0, h, terms, scenario.schedule, scenario.t_end,
                  scenario.dt_max(), space, n_out=n_out, keep_states=keep_states)


def emission_spectral_width(result, lambda_c: float) -> float:
    """FWHM (m) of the power spectrum of the outcoupled pulse amplitude.

    The width convention is the FWHM of |FT|^2 of sqrt(flux); recorded in
    output metadata since other conventions are in circulation.
    """
    amp = np.sqrt(np.clip(result.waveguide_flux, 0.0, None))
    if amp.max() == 0:
        return float("nan")
    dt = result.times[1] - result.times[0]
    n = 8 * len(amp)
    spec = np.abs(np.fft.rfft(amp, n)) ** 2
    freq = np.fft.rfftfreq(n, dt)
    half = spec.max() / 2.0
    above = np.flatnonzero(spec >= half)
    f_hi = freq[above[-1]]
    from scipy.constants import c as c0
    return float(2.0 * f_hi * lambda_c**2 / c0)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_emit(config: dict, seed: int, threads: int) -> list[ResultTable]:
    scenario = emission_from_config(config)
    n_out = (config.get("sim") or {}).get("output_points", 600)
    res = simulate_emission(scenario, n_out=n_out)
    table = ResultTable(
        title=f"single excitation cycle: {scenario.name}",
        columns=["time_ps", "waveguide_flux_per_ps", "p1", "shelf_population",
                 "sideband_photon_population"],
        units=["ps", "1/ps", "1", "1", "1"],
        provenance=provenance(config, seed),
    )
    for k in range(len(res.times)):
        table.add_row(res.times[k] * 1e12, res.waveguide_flux[k] * 1e-12,
                      res.p1[k], res.shelf_population[k], res.sideband_photon[k])
    table.provenance["final_p1"] = format(res.final_p1, ".6g")
    return [("emit", table)]


def _sweep_values(block: dict) -> np.ndarray:
    points = block["points"]
    if points == 0:
        return np.array([])
    if block.get("log"):
        return np.geomspace(block["start"], block["stop"], points)
    return np.linspace(block["start"], block["stop"], points)


def cmd_sweep_q(config: dict, seed: int, threads: int) -> list[ResultTable]:
    scenario = emission_from_config(config)
    sweep = config.get("sweep") or {"variable": "quality_factor", "start": 200.0,
                                    "stop": 2e6, "points": 25, "log": True}
    if sweep["variable"] != "quality_factor":
        raise ConfigError("sweep-q requires sweep.variable == 'quality_factor'")
    qs = _sweep_values(sweep)

    def run(q):
        cav = replace(scenario.cavity, quality_factor=float(q))
        return simulate_emission(replace(scenario, cavity=cav), n_out=400).final_p1

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        p1s = list(pool.map(run, qs))
    table = ResultTable(
        title=f"single-photon probability vs cavity quality factor: {scenario.name}",
        columns=["quality_factor", "p1"], units=["1", "1"],
        provenance=provenance(config, seed),
    )
    for q, p in zip(qs, p1s):
        table.add_row(q, p)
    return [("sweep_q", table)]


def cmd_sweep_excitation(config: dict, seed: int, threads: int) -> list[ResultTable]:
    scenario = emission_from_config(config)
    grid = config.get("excitation_grid") or {
        "width_ps": {"start": 0.02, "stop": 0.4, "points": 12, "log": True},
        "pump_rate_rad_per_s": {"start": 2e12, "stop": 4e13, "points": 12, "log": True},
    }
    widths = _sweep_values(grid["width_ps"]) * 1e-12
    rates = _sweep_values(grid["pump_rate_rad_per_s"])
    omega0 = zpl_coupling(scenario.center, scenario.cavity)

    cells = [(w, r) for w in widths for r in rates]

    def run(cell):
        w, r = cell
        sched = replace(scenario.schedule, pulse_width=w, pump_rate=r)
        sc = replace(scenario, schedule=sched)
        res = simulate_emission(sc, n_out=300)
        return res.final_p1, res.final_pm

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        sims = list(pool.map(run, cells))

    table = ResultTable(
        title=f"emission vs excitation parameters: {scenario.name}",
        columns=["pulse_width_ps", "pump_rate_rad_per_s", "p1", "pm",
                 "p1_bound", "pm_bound"],
        units=["ps", "rad/s", "1", "1", "1", "1"],
        provenance=provenance(config, seed),
    )
    for (w, r), (p1, pm) in zip(cells, sims):
        b1, bm = excitation_bounds(w, r, omega0)
        table.add_row(w * 1e12, r, p1, pm, b1, bm)
    return [("sweep_excitation", table)]


def cmd_hbt(config: dict, seed: int, threads: int) -> list[ResultTable]:
    preset = config.get("scenario", "ne8")
    base_key = preset.split("_")[0]
    hbt_cfg = dict(HBT_PRESETS.get(base_key, HBT_PRESETS["ne8"]))
    hbt_cfg.update(config.get("hbt") or {})
    n_cycles = hbt_cfg.get("cycles", hbt_cfg.get("n_cycles", 5000))
    bin_width = hbt_cfg.get("bin_width_ps", hbt_cfg["bin_width"] * 1e12) * 1e-12
    rep = hbt_cfg.get("repetition_rate_ghz",
                      hbt_cfg["repetition_rate"] / 1e9) * 1e9
    splitter = hbt_cfg.get("splitter_seed", seed + 1)
    lags = hbt_cfg.get("max_lag_periods", 8)

    scenario = emission_from_config(config)
    schedule = replace(scenario.schedule, repetition_rate=rep)
    h = build_hamiltonian(scenario.center, scenario.cavity, scenario.space)
    terms = build_dissipators(scenario.center, scenario.cavity, schedule, scenario.space)
    traj = TrajectoryScenario.from_model(h, terms, schedule, scenario.space)
    records, _ = run_cycles(traj, n_cycles, seed, workers=threads)
    hist = hbt_histogram(records, bin_width, rep, splitter, max_lag_periods=lags)

    prov = provenance(config, seed)
    prov["splitter_seed"] = splitter
    hist_table = ResultTable(
        title=f"photon coincidence histogram: {preset} at {rep/1e9:.0f} GHz",
        columns=["delay_ps", "counts", "normalized"], units=["ps", "counts", "1"],
        provenance=prov,
    )
    norm = hist.normalized()
    for d, n_, nn in zip(hist.delays(), hist.counts, norm):
        hist_table.add_row(d * 1e12, int(n_), nn)

    jumps_table = ResultTable(
        title=f"quantum jump events: {preset}",
        columns=["cycle", "time_ps", "channel"], units=["1", "ps", "label"],
        provenance=prov,
    )
    for rec in records:
        for t, channel in rec.events:
            jumps_table.add_row(rec.cycle_index, t * 1e12, channel)
    return [("hbt_histogram", hist_table), ("hbt_jumps", jumps_table)]


def _source_table(keys):
    rows = qkd_source_rows()
    out = {}
    for key in keys:
        if key.endswith("_decoy"):
            out[key] = decoy_row(rows[key[:-6]])
        else:
            out[key] = rows[key]
    return out


def _budget_for(row, channel_cfg: dict, value: float) -> LinkBudget:
    kind = channel_cfg.get("type", "loss")
    det = detector_for(row.wavelength, row.gate)
    if kind == "loss":
        noise = 4.0 * det.dark_rate * det.gate
        base = LinkBudget(eta_optics=1.0, eta_coupling=1.0, eta_link=1.0,
                          eta_detector=1.0, noise=noise)
        return scaled_budget(base, value)
    if kind == "fiber":
        return assemble_link_budget(fiber_channel(row, value), det, ETA_O_FIBER)
    bright = channel_cfg.get("brightness_w_m2_sr_um")
    if kind == "terrestrial":
        path = terrestrial_path(row.wavelength, length=value * 1e3)
        if bright is not None:
            path = replace(path, background=bright)
        return assemble_link_budget(path, det, ETA_O_FREE_SPACE, row.filter_width)
    sat = channel_cfg.get("satellite_altitude_km", 2000.0) * 1e3
    ground = value * 1e3 if kind == "uplink" else channel_cfg.get(
        "ground_altitude_km", 0.0) * 1e3
    path = slant_path(kind, row.wavelength, ground_altitude=ground,
                      satellite_altitude=sat)
    if bright is not None:
        path = replace(path, background=bright)
    return assemble_link_budget(path, det, ETA_O_FREE_SPACE, row.filter_width)


def cmd_keyrate(config: dict, seed: int, threads: int) -> list[ResultTable]:
    qkd_cfg = config.get("qkd") or {}
    keys = qkd_cfg.get("sources", ["ne8_enhanced", "siv_enhanced", "nv_enhanced",
                                   "wcs_1550_decoy"])
    sources = _source_table(keys)
    channel_cfg = qkd_cfg.get("channel") or {"type": "loss"}
    protocol = protocol_from_config(config)
    sweep = config.get("sweep") or {"variable": "loss_db", "start": 0.0,
                                    "stop": 100.0, "points": 101}
    values = _sweep_values(sweep)

    columns = [sweep["variable"]]
    units = [{"loss_db": "dB", "distance_km": "km", "altitude_km": "km"}[sweep["variable"]]]
    for key in keys:
        columns += [f"rate_bps_{key}", f"secure_{key}"]
        units += ["bit/s", "bool"]
    table = ResultTable(
        title="secure key rate sweep",
        columns=columns, units=units, provenance=provenance(config, seed),
    )

    def evaluate(value):
        row_out = [value]
        for key in keys:
            row = sources[key]
            budget = _budget_for(row, channel_cfg, float(value))
            point = key_rate(row.source, budget, protocol)
            rate = point.rate if point.rate >= 1.0 else 0.0
            row_out += [rate, point.secure and rate > 0]
        return row_out

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        for row_out in pool.map(evaluate, values):
            table.add_row(*row_out)
    return [("keyrate", table)]


def cmd_tables(config: dict, seed: int, threads: int) -> list[ResultTable]:
    prov = provenance(config, seed)

    src = ResultTable(
        title="single-photon source parameters",
        columns=["center", "dipole_cm", "coupling_rad_per_s", "optimal_q",
                 "purcell_factor", "ideal_p1", "simulated_p1", "mean_photon_time_ps",
                 "spectral_width_nm_fwhm", "repetition_rate_ghz", "bare_p1"],
        units=["label", "C*m", "rad/s", "1", "1", "1", "1", "ps", "nm", "GHz", "1"],
        provenance=dict(prov, spectral_width_convention="fwhm_of_power_spectrum"),
    )
    for name in ("nv", "ne8", "siv"):
        center = CENTERS[name]
        cavity = cavity_preset(name)
        omega0 = zpl_coupling(center, cavity)
        d0 = dipole_moment(center.gamma_0, center.omega_zpl, center.refractive_index)
        fp = purcell_factor(omega0, center.gamma_total, cavity.kappa)
        scenario = emission_scenario(name)
        res = simulate_emission(scenario, n_out=500)
        src.add_row(name, d0, omega0, optimal_q(omega0, cavity.omega_c), fp,
                    ideal_emission_probability(fp), res.final_p1,
                    res.mean_photon_time() * 1e12,
                    emission_spectral_width(res, cavity.lambda_c) * 1e9,
                    scenario.schedule.repetition_rate / 1e9,
                    bare_center_p1(center))

    fiber = ResultTable(
        title="fiber link parameters and loss cutoffs",
        columns=["source", "gate_ns", "alpha_db_per_km", "coupling",
                 "noise_per_pulse", "loss_cutoff_db"],
        units=["label", "ns", "dB/km", "1", "1/pulse", "dB"],
        provenance=prov,
    )
    rows = qkd_source_rows()
    protocol = protocol_from_config(config)
    for key, row in rows.items():
        det = detector_for(row.wavelength, row.gate)
        budget = assemble_link_budget(fiber_channel(row, 1.0), det, ETA_O_FIBER)
        if row.source.kind == "sps":
            cutoff = eta_to_db(loss_cutoff_sps(row.source.p1, row.source.g2,
                                               budget.noise, protocol.baseline_error))
        else:
            drow = decoy_row(row)

            def secure(db, drow=drow, budget=budget):
                return key_rate_decoy(drow.source, scaled_budget(budget, db),
                                      protocol).secure

            cutoff = cutoff_search(secure)
        fiber.add_row(key, row.gate * 1e9, row.fiber_alpha, row.fiber_coupling,
                      budget.noise, cutoff)

    free = ResultTable(
        title="free-space noise and loss cutoffs (night)",
        columns=["source", "path", "noise_per_pulse", "loss_cutoff_db"],
        units=["label", "label", "1/pulse", "dB"],
        provenance=prov,
    )
    for key, row in rows.items():
        det = detector_for(row.wavelength, row.gate)
        for kind in ("terrestrial", "uplink", "downlink"):
            path = (terrestrial_path(row.wavelength) if kind == "terrestrial"
                    else slant_path(kind, row.wavelength))
            noise = free_space_noise(path, row.filter_width, det)
            if row.source.kind == "sps":
                cutoff = eta_to_db(loss_cutoff_sps(row.source.p1, row.source.g2,
                                                   noise, protocol.baseline_error))
            else:
                drow = decoy_row(row)
                budget = assemble_link_budget(path, det, ETA_O_FREE_SPACE,
                                              row.filter_width)

                def secure(db, drow=drow, budget=budget):
                    return key_rate_decoy(drow.source, scaled_budget(budget, db),
                                          protocol).secure

                cutoff = cutoff_search(secure)
            free.add_row(key, kind, noise, cutoff)

    return [("source_parameters", src), ("fiber_links", fiber),
            ("free_space_links", free)]


# ---------------------------------------------------------------------------

COMMANDS = {
    "emit": cmd_emit,
    "sweep-q": cmd_sweep_q,
    "sweep-excitation": cmd_sweep_excitation,
    "hbt": cmd_hbt,
    "keyrate": cmd_keyrate,
    "tables": cmd_tables,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diamondsps",
        description="Cavity-enhanced diamond single-photon sources and QKD links",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="JSON scenario configuration")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=Path("out"))
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        results = COMMANDS[args.command](config, args.seed, args.threads)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (NumericalError, ArithmeticError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    for name, table in results:
        ext = "csv" if args.format == "csv" else "json"
        path = table.write(args.out / f"{name}.{ext}", args.format)
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
