"""How the cavity quality factor shapes the emission probability.

Weak cavities (small Q) give little Purcell enhancement; very strong ones
trap the photon longer than the competing atomic decay channels.  Between
the two sits a broad optimum around kappa = 2.5 Omega_0.
"""

from dataclasses import replace

import numpy as np

from diamondsps.cli import simulate_emission
from diamondsps.emitters import optimal_q, zpl_coupling
from diamondsps.presets import emission_scenario

scenario = emission_scenario("ne8")
omega0 = zpl_coupling(scenario.center, scenario.cavity)
q_opt = optimal_q(omega0, scenario.cavity.omega_c)
print(f"NE8 coupling {omega0 / 1e9:.0f} GHz, analytic optimum Q = {q_opt:.0f}")
print(f"{'Q':>10s} {'P1':>8s}")

qs = np.geomspace(200, 2e6, 17)
p1s = []
for q in qs:
    sc = replace(scenario, cavity=replace(scenario.cavity, quality_factor=float(q)))
    p1s.append(simulate_emission(sc, n_out=300).final_p1)
    print(f"{q:10.0f} {p1s[-1]:8.4f}")

best = qs[int(np.argmax(p1s))]
print(f"\nsweep maximum near Q = {best:.0f} "
      f"(P1 = {max(p1s):.4f}); the plateau around the optimum is wide, so a")
print("fabricated cavity a factor of two off in Q barely costs any emission.")
