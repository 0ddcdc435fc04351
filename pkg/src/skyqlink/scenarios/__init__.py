"""Bundled scenario fixtures for the three reproduction recipes."""

from importlib import resources
from pathlib import Path

BUNDLED = ("fig2_leo_haps", "fig3_haps_laps", "fig4_leo_ground")


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled scenario, by bare name or filename."""
    stem = name.removesuffix(".scn")
    if stem not in BUNDLED:
        raise KeyError(f"no bundled scenario {name!r}; available: {BUNDLED}")
    with resources.as_file(resources.files(__name__) / f"{stem}.scn") as path:
        return Path(path)
