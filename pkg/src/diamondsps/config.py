"""Configuration ingestion: JSON with explicit unit suffixes in key names.

Every physical quantity enters with its unit spelled out (tau_ns,
width_ps, gamma_e_over_2pi_mhz, ...) and is converted to SI/angular form
exactly once, here.  Unknown keys are rejected by the shipped JSON schema.
"""

from __future__ import annotations

import importlib.resources
import json
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np

from .emitters import CavitySpec, CenterSpec, wavelength_sized_volume
from .hilbert import HilbertSpace
from .lindblad import PulseSchedule
from .presets import CENTERS, EmissionScenario, cavity_preset, emission_scenario
from .qkd import ProtocolParams

TWO_PI = 2.0 * np.pi


class ConfigError(ValueError):
    """The configuration failed validation."""


def _schema() -> dict:
    ref = importlib.resources.files("diamondsps") / "schema" / "scenario.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def validate_config(config: dict) -> dict:
    try:
        jsonschema.validate(config, _schema())
    except jsonschema.ValidationError as err:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {path}: {err.message}") from err
    return config


def load_config(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: not valid JSON ({err})") from err
    return validate_config(raw)


def dump_config(config: dict) -> str:
    """Serialized form whose parse is identical to the input mapping."""
    return json.dumps(config, sort_keys=True, indent=2) + "\n"


def center_from_config(block: dict | None, fallback: str = "ne8") -> CenterSpec:
    if block is None:
        return CENTERS[fallback]
    base = CENTERS[block.get("preset", fallback)]
    updates = {}
    direct = {
        "name": "name",
        "zpl_fraction": "zpl_fraction",
        "refractive_index": "refractive_index",
        "gamma_nr_rad_per_s": "gamma_nr",
        "total_dipole_cm": "total_dipole",
        "coupling_override_rad_per_s": "coupling_override",
    }
    scaled = {
        "lambda_zpl_nm": ("lambda_zpl", 1e-9),
        "tau_ns": ("tau", 1e-9),
        "sideband_offset_nm": ("sideband_offset", 1e-9),
        "gamma_e_over_2pi_mhz": ("gamma_e", TWO_PI * 1e6),
        "gamma_h_over_2pi_mhz": ("gamma_h", TWO_PI * 1e6),
        "gamma_g_over_2pi_thz": ("gamma_g", TWO_PI * 1e12),
    }
    for key, attr in direct.items():
        if key in block:
            updates[attr] = block[key]
    for key, (attr, scale) in scaled.items():
        if key in block:
            updates[attr] = block[key] * scale
    return replace(base, **updates) if updates else base


def cavity_from_config(block: dict | None, center: CenterSpec,
                       preset_name: str) -> CavitySpec:
    base = cavity_preset(preset_name)
    if block is None:
        return base
    lam = block.get("lambda_c_nm", base.lambda_c * 1e9) * 1e-9
    q = block.get("quality_factor", base.quality_factor)
    vol = block.get("mode_volume_m3",
                    wavelength_sized_volume(lam, center.refractive_index))
    return CavitySpec(lambda_c=lam, quality_factor=q, mode_volume=vol)


def emission_from_config(config: dict) -> EmissionScenario:
    """Build a single-cycle scenario from a validated config mapping."""
    preset = config.get("scenario", "ne8")
    base = emission_scenario(preset)
    center = center_from_config(config.get("center"), preset.split("_")[0])
    cavity = cavity_from_config(config.get("cavity"), center, preset.split("_")[0])

    pulse = config.get("pulse", {})
    schedule = PulseSchedule(
        pulse_width=pulse.get("width_ps", base.schedule.pulse_width * 1e12) * 1e-12,
        pump_rate=pulse.get("pump_rate_rad_per_s", base.schedule.pump_rate),
        repetition_rate=pulse.get("repetition_rate_ghz",
                                  base.schedule.repetition_rate / 1e9) * 1e9,
    )
    fock = config.get("fock", {})
    space = HilbertSpace(fock.get("cavity_photons", 2) + 1,
                         fock.get("waveguide_photons", 2) + 1)
    sim = config.get("sim", {})
    return EmissionScenario(
        name=preset, center=center, cavity=cavity, schedule=schedule,
        space=space, t_end=sim.get("t_end_ps", base.t_end * 1e12) * 1e-12,
    )


def protocol_from_config(config: dict) -> ProtocolParams:
    block = (config.get("qkd") or {}).get("protocol") or {}
    return ProtocolParams(
        sifting=block.get("sifting", 0.5),
        baseline_error=block.get("baseline_error", 0.02),
        ec_inefficiency=block.get("ec_inefficiency", 1.1),
    )
