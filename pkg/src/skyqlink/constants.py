"""Physical constants shared across the package (SI units)."""

GM_EARTH = 3.986004418e14
"""Geocentric gravitational constant, m^3/s^2."""

EARTH_RADIUS = 6371.0e3
"""Mean Earth radius, m (spherical, non-rotating Earth model)."""

PLANCK = 6.62607015e-34
"""Planck constant, J*s."""

LIGHT_SPEED = 299792458.0
"""Speed of light in vacuum, m/s."""
