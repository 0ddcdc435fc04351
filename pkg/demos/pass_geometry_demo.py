"""Walk through one LEO-to-HAPS overhead pass.

Propagates a 535 km circular orbit over a 20 km quasi-static platform,
prints the culmination geometry and a coarse table of the pass, and
checks the peak slew rate against the analytic overhead-pass value.
"""

import math

from skyqlink.constants import EARTH_RADIUS, GM_EARTH
from skyqlink.geometry import PlatformKind, PlatformSpec, propagate_pass

leo = PlatformSpec(535e3, PlatformKind.LEO_ORBITER)
haps = PlatformSpec(20e3, PlatformKind.QUASI_STATIC)

pass_geometry = propagate_pass(leo, haps, max_elevation_rad=math.pi / 2,
                               sample_interval_s=1.0,
                               horizon_elevation_rad=math.radians(10.0))

print(f"samples above 10 deg elevation: {len(pass_geometry)}")
print(f"pass duration: {pass_geometry.duration_s:.0f} s")

mid = pass_geometry.sample(len(pass_geometry) // 2)
print(f"culmination: elevation {math.degrees(mid.elevation_rad):.1f} deg, "
      f"range {mid.range_m / 1e3:.1f} km, slew {mid.slew_rad_s * 1e3:.2f} mrad/s")

v_orb = math.sqrt(GM_EARTH / (EARTH_RADIUS + 535e3))
print(f"analytic overhead slew v/L = {v_orb / (535e3 - 20e3) * 1e3:.2f} mrad/s")

print("\n   t(s)   elev(deg)   range(km)   slew(mrad/s)")
for i in range(0, len(pass_geometry), len(pass_geometry) // 10):
    s = pass_geometry.sample(i)
    print(f"{s.t_s:7.0f}   {math.degrees(s.elevation_rad):9.2f}   "
          f"{s.range_m / 1e3:9.1f}   {s.slew_rad_s * 1e3:10.3f}")
