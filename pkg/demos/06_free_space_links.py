"""Open-air and satellite QKD link budgets through atmospheric turbulence.

Beam wander broadens the received spot far beyond the diffraction limit on
long horizontal paths and on uplinks (where the beam crosses the turbulent
ground layer while still narrow).  Downlinks arrive pre-broadened and stay
close to diffraction.  The budgets below combine collection, scattering,
absorption and filtered sky background for a clear night.
"""

import numpy as np

from diamondsps.channels import (
    assemble_link_budget,
    collection_efficiency,
    effective_spot_radius,
)
from diamondsps.presets import (
    DEFAULT_PROTOCOL,
    ETA_O_FREE_SPACE,
    detector_for,
    qkd_source_rows,
    slant_path,
    terrestrial_path,
)
from diamondsps.qkd import key_rate_sps

print("Effective spot radii (m):")
for label, path in [
    ("terrestrial 150 km, 794 nm", terrestrial_path(794e-9)),
    ("uplink to 2000 km, sea level", slant_path("uplink", 650e-9)),
    ("uplink to 2000 km, 3 km site", slant_path("uplink", 650e-9, ground_altitude=3e3)),
    ("downlink 637 nm", slant_path("downlink", 637e-9)),
    ("downlink 1550 nm", slant_path("downlink", 1.55e-6)),
]:
    w = effective_spot_radius(path)
    loss = -10 * np.log10(collection_efficiency(path.receiver_diameter, w))
    print(f"  {label:32s} w_eff = {w:7.2f}  collection {loss:5.1f} dB")

print()
rows = qkd_source_rows()
print("Night-time key rates with the enhanced NE8 source (30 GHz clock):")
row = rows["ne8_enhanced"]
det = detector_for(row.wavelength, row.gate)
for label, path in [
    ("terrestrial 150 km", terrestrial_path(row.wavelength)),
    ("uplink from sea level", slant_path("uplink", row.wavelength)),
    ("uplink from 3 km", slant_path("uplink", row.wavelength, ground_altitude=3e3)),
    ("downlink to ground", slant_path("downlink", row.wavelength)),
]:
    budget = assemble_link_budget(path, det, ETA_O_FREE_SPACE, row.filter_width)
    point = key_rate_sps(row.source, budget, DEFAULT_PROTOCOL)
    print(f"  {label:24s} loss {budget.eta_db:5.1f} dB, N = {budget.noise:.1e}"
          f" -> {point.rate / 1e3:10.1f} kbit/s")

print()
print("Daytime sky (1000x brighter) against the same links:")
from dataclasses import replace

for label, path in [("terrestrial 150 km", terrestrial_path(row.wavelength)),
                    ("downlink to ground", slant_path("downlink", row.wavelength))]:
    bright = replace(path, background=1.5)
    budget = assemble_link_budget(bright, det, ETA_O_FREE_SPACE, row.filter_width)
    point = key_rate_sps(row.source, budget, DEFAULT_PROTOCOL)
    print(f"  {label:24s} N = {budget.noise:.1e} -> {point.rate / 1e3:10.1f} kbit/s")
