"""Adaptive-optics feasibility of a LEO-to-ground downlink.

Computes Greenwood frequency, Fried coherence length and scintillation
index across zenith angles for 810 nm and 1550 nm, highlighting where a
1.5 kHz control loop stops keeping up at the shorter wavelength.
"""

import math
import warnings

from skyqlink.atmosphere import (
    SlantPath,
    fried_r0,
    greenwood_frequency,
    scintillation_index,
)
from skyqlink.scenario import parse_scenario
from skyqlink.scenarios import bundled_path
from skyqlink.studies import build_turbulence_profile

scenario = parse_scenario(bundled_path("fig4_leo_ground"))
profile = build_turbulence_profile(scenario)
print(f"profile: Cn2(0) ground term {profile.ground_cn2:.2e}, "
      f"rms upper wind {profile.rms_upper_wind:.0f} m/s, "
      f"slew {profile.slew_rate * 1e3:.2f} mrad/s\n")

print("zenith(deg)   f_G 810(Hz)   f_G 1550(Hz)   r0 810(cm)   r0 1550(cm)   SI 810")
for zen_deg in range(0, 81, 10):
    z = math.radians(zen_deg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # SI leaves the weak regime near 80 deg
        row = []
        for wl in (810e-9, 1550e-9):
            path = SlantPath(z, 0.0, 535e3, wl)
            row.append((greenwood_frequency(profile, path),
                        fried_r0(profile, path)))
        si = scintillation_index(profile, SlantPath(z, 0.0, 535e3, 810e-9))
    (f810, r810), (f1550, r1550) = row
    flag = "  <- 1.5 kHz exceeded at 810 nm" if f810 > 1500 else ""
    print(f"{zen_deg:11d}   {f810:11.0f}   {f1550:12.0f}   {r810 * 100:10.2f}"
          f"   {r1550 * 100:11.2f}   {si:6.2f}{flag}")
