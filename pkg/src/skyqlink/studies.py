"""Study orchestration: scenario wiring, sweeps, CSV reports, plot recipes.

Each ``run_*`` function turns a resolved scenario into a deterministic
:class:`StudyReport`: fixed column order, rows in sweep order, and
metadata lines that echo every resolved configuration value (so a report
header replayed as a scenario reproduces the report byte for byte).
Thread counts only change wall time, never output bytes.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .atmosphere import (
    SlantPath,
    TurbulenceProfile,
    fried_r0,
    greenwood_frequency,
    scintillation_index,
)
from .channel import LinkBudget, NoiseEnvironment, link_timeseries, system_loss
from .entanglement import DownlinkArm, DualDownlink, fidelity_sweep
from .finitekey import BoundsBox, SecurityParams, optimize_params
from .geometry import (
    PassGeometry,
    PlatformKind,
    PlatformSpec,
    propagate_pass,
    static_pass,
)
from .scenario import CM, KM, MHZ, NM, NS, URAD, Scenario, deg2rad
from .svg import AxesSpec


class StudyNumericalError(RuntimeError):
    """Numerical failure inside a sweep, naming the offending point."""


@dataclass(frozen=True)
class StudyReport:
    study: str
    digest: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    warnings: tuple[str, ...] = ()
    config_lines: tuple[str, ...] = field(default_factory=tuple)

    def metadata_lines(self) -> list[str]:
        lines = [f"# skyqlink {__version__} study={self.study}",
                 f"# digest sha256:{self.digest}"]
        lines += [f"# config {line}" for line in self.config_lines]
        lines += [f"# warning {w}" for w in self.warnings]
        return lines

    def to_csv(self) -> str:
        out = self.metadata_lines()
        out.append(",".join(self.columns))
        for row in self.rows:
            out.append(",".join(_csv_cell(v) for v in row))
        return "\n".join(out) + "\n"

    def row_dicts(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


# ---------------------------------------------------------------------------
# Scenario wiring


def build_pass(scenario: Scenario) -> PassGeometry:
    sec = scenario.values["pass"]
    if sec["geometry"] == "orbital":
        orbiter = PlatformSpec(sec["tx_altitude_km"] * KM, PlatformKind.LEO_ORBITER)
        station = PlatformSpec(sec["rx_altitude_km"] * KM, PlatformKind.QUASI_STATIC)
        return propagate_pass(
            orbiter, station,
            max_elevation_rad=deg2rad(sec["max_elevation_deg"]),
            sample_interval_s=sec["sample_interval_s"],
            horizon_elevation_rad=deg2rad(sec["horizon_elevation_deg"]))
    high = PlatformSpec(sec["tx_altitude_km"] * KM, PlatformKind.QUASI_STATIC)
    low = PlatformSpec(sec["rx_altitude_km"] * KM, PlatformKind.QUASI_STATIC)
    return static_pass(high, low, deg2rad(sec["static_zenith_deg"]),
                       duration_s=sec["static_duration_s"],
                       sample_interval_s=sec["sample_interval_s"])


def pointing_levels(scenario: Scenario) -> list[tuple[str, float]]:
    link = scenario.values["link"]
    return [(label, link[f"{label}_sigma_urad"] * URAD)
            for label in link["pointing_levels"]]


def build_budget(scenario: Scenario, sigma_rad: float,
                 divergence_rad: float | None = None) -> LinkBudget:
    link = scenario.values["link"]
    return LinkBudget(
        wavelength=link["wavelength_nm"] * NM,
        divergence_full=divergence_rad if divergence_rad is not None
        else link["divergence_urad"] * URAD,
        tx_aperture=link["tx_aperture_cm"] * CM,
        rx_aperture=link["rx_aperture_cm"] * CM,
        pointing_sigma=sigma_rad,
        eta_tx=link["eta_tx"], eta_rx=link["eta_rx"],
        eta_det=link["eta_det"], eta_atm=link["eta_atm"])


def build_noise(scenario: Scenario) -> NoiseEnvironment:
    noise = scenario.values["noise"]
    return NoiseEnvironment(
        spectral_radiance=noise["radiance_w_m2_nm_sr"],
        fov=noise["fov_sr"],
        filter_bandwidth=noise["filter_nm"],
        gate_time=noise["gate_ns"] * NS,
        dark_count_rate=noise["dark_hz"])


def build_security(scenario: Scenario) -> SecurityParams:
    sec = scenario.values["security"]
    return SecurityParams(eps_sec=sec["eps_sec"], eps_cor=sec["eps_cor"],
                          f_ec=sec["f_ec"], e_intrinsic=sec["e_intrinsic"])


def build_bounds_box(scenario: Scenario) -> BoundsBox:
    opt = scenario.values["optimizer"]
    return BoundsBox(
        mu1=(opt["mu1_min"], opt["mu1_max"]),
        mu2=(opt["mu2_min"], opt["mu2_max"]),
        px=(opt["px_min"], opt["px_max"]),
        p1=(opt["p1_min"], opt["p1_max"]),
        p2=(opt["p2_min"], opt["p2_max"]))


def build_turbulence_profile(scenario: Scenario) -> TurbulenceProfile:
    turb = scenario.values["turbulence"]
    if turb["slew_mode"] == "pass_peak":
        slew = build_pass(scenario).peak_slew_rad_s
    else:
        slew = turb["slew_rad_s"]
    return TurbulenceProfile(
        ground_cn2=turb["ground_cn2"],
        rms_upper_wind=turb["rms_wind_ms"],
        ground_wind=turb["ground_wind_ms"],
        slew_rate=slew)


def _report(scenario: Scenario, study: str, columns: tuple[str, ...],
            rows: list[tuple], warns: Sequence[str] = ()) -> StudyReport:
    return StudyReport(study=study, digest=scenario.digest, columns=columns,
                       rows=tuple(rows), warnings=tuple(warns),
                       config_lines=tuple(scenario.config_lines()))


# ---------------------------------------------------------------------------
# Studies


def run_pass(scenario: Scenario) -> StudyReport:
    """Pass geometry and per-sample system loss for the first PE level."""
    label, sigma = pointing_levels(scenario)[0]
    pass_geometry = build_pass(scenario)
    budget = build_budget(scenario, sigma)
    columns = ("t_s", "elevation_deg", "range_km", "slew_rad_s", "eta_sys_db")
    rows = []
    for i in range(len(pass_geometry)):
        try:
            loss = system_loss(budget, float(pass_geometry.range_m[i]))
        except (ValueError, ArithmeticError) as exc:
            raise StudyNumericalError(
                f"pass study failed at sample t={pass_geometry.t_s[i]} s: {exc}"
            ) from exc
        rows.append((float(pass_geometry.t_s[i]),
                     math.degrees(float(pass_geometry.elevation_rad[i])),
                     float(pass_geometry.range_m[i]) / KM,
                     float(pass_geometry.slew_rad_s[i]),
                     loss.db))
    return _report(scenario, "pass", columns, rows)


def run_skl(scenario: Scenario, threads: int = 1) -> StudyReport:
    """Optimised secret-key length per window half-width and PE level."""
    pass_geometry = build_pass(scenario)
    env = build_noise(scenario)
    security = build_security(scenario)
    box = build_bounds_box(scenario)
    proto = scenario.values["protocol"]
    source_rate = proto["source_rate_mhz"] * MHZ
    mu3 = proto["mu3"]
    dt_values = scenario.values["skl"]["dt_values_s"]

    jobs = []
    for label, sigma in pointing_levels(scenario):
        link = link_timeseries(pass_geometry, build_budget(scenario, sigma), env)
        for dt_half in dt_values:
            jobs.append((label, dt_half, link))

    def solve(job):
        label, dt_half, link = job
        try:
            params, result = optimize_params(
                link, dt_half, security, box, mu3=mu3, source_rate=source_rate)
        except (ValueError, ArithmeticError) as exc:
            raise StudyNumericalError(
                f"skl study failed at pe={label} dt_s={dt_half}: {exc}") from exc
        return (dt_half, label, float(result.skl), result.qber_key_basis,
                result.phase_error_bound, params.mu1, params.mu2, params.px,
                params.p1, params.p2)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(solve, jobs))
    else:
        rows = [solve(job) for job in jobs]

    columns = ("dt_s", "pe_label", "skl_bits", "qber", "phase_err",
               "mu1", "mu2", "px", "p1", "p2")
    return _report(scenario, "skl", columns, rows)


def run_fidelity(scenario: Scenario, threads: int = 1) -> StudyReport:
    """Entanglement fidelity vs background radiance, PE level, divergence."""
    sec_pass = scenario.values["pass"]
    link = scenario.values["link"]
    ent = scenario.values["entanglement"]
    fid = scenario.values["fidelity"]
    if sec_pass["geometry"] != "static":
        raise StudyNumericalError(
            "fidelity study requires [pass] geometry = static")
    range_m = (sec_pass["tx_altitude_km"] - sec_pass["rx_altitude_km"]) * KM \
        / math.cos(deg2rad(sec_pass["static_zenith_deg"]))
    env = build_noise(scenario)
    grid = list(np.logspace(math.log10(fid["radiance_min_w_m2_nm_sr"]),
                            math.log10(fid["radiance_max_w_m2_nm_sr"]),
                            fid["radiance_points"]))
    divergences = (link["divergence_urad"] * URAD,
                   link["compare_divergence_urad"] * URAD)

    columns = ("radiance", "pe_label", "divergence_rad", "fidelity", "q_a", "q_b")
    rows = []
    for label, sigma in pointing_levels(scenario):
        for divergence in divergences:
            budget = build_budget(scenario, sigma, divergence_rad=divergence)
            arm = DownlinkArm(budget, range_m, env)
            dual = DualDownlink(arm, arm, pair_rate=ent["pair_rate_mhz"] * MHZ,
                                pair_mean=ent["pair_mean"])
            try:
                swept = fidelity_sweep(dual, grid)
            except (ValueError, ArithmeticError) as exc:
                raise StudyNumericalError(
                    f"fidelity study failed at pe={label} "
                    f"divergence={divergence}: {exc}") from exc
            for h_b, res in swept:
                rows.append((h_b, label, divergence, res.fidelity,
                             res.q_a, res.q_b))
    return _report(scenario, "fidelity", columns, rows)


def run_turbulence(scenario: Scenario, threads: int = 1) -> StudyReport:
    """Greenwood frequency, Fried length and SI versus zenith angle."""
    turb = scenario.values["turbulence"]
    sec_pass = scenario.values["pass"]
    profile = build_turbulence_profile(scenario)
    h_low = sec_pass["rx_altitude_km"] * KM
    h_high = sec_pass["tx_altitude_km"] * KM
    h_cap = turb["h_cap_km"] * KM
    zeniths = np.linspace(turb["zenith_min_deg"], turb["zenith_max_deg"],
                          turb["zenith_points"])

    columns = ("zenith_deg", "wavelength_nm", "greenwood_hz", "fried_m", "si")
    rows = []
    warns: list[str] = []
    si_warned = False
    for zen_deg in zeniths:
        for wl_nm in turb["wavelengths_nm"]:
            path = SlantPath(deg2rad(float(zen_deg)), h_low, h_high, wl_nm * NM)
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    f_g = greenwood_frequency(profile, path, h_cap_m=h_cap)
                    r0 = fried_r0(profile, path, h_cap_m=h_cap)
                    si = scintillation_index(profile, path, h_cap_m=h_cap)
            except (ValueError, ArithmeticError) as exc:
                raise StudyNumericalError(
                    f"turbulence study failed at zenith_deg={zen_deg:.6g} "
                    f"wavelength_nm={wl_nm:.6g}: {exc}") from exc
            if caught and not si_warned:
                warns.append(
                    f"scintillation index leaves the weak-fluctuation regime "
                    f"from zenith_deg={zen_deg:.6g} wavelength_nm={wl_nm:.6g}")
                si_warned = True
            rows.append((float(zen_deg), float(wl_nm), f_g, r0, si))
    return _report(scenario, "turbulence", columns, rows, warns)


STUDIES = {
    "pass": run_pass,
    "skl": run_skl,
    "fidelity": run_fidelity,
    "turbulence": run_turbulence,
}

PLOT_RECIPES = {
    "pass": AxesSpec(
        x="t_s", ys=("elevation_deg", "range_km"),
        title="Pass geometry over the culmination window",
        x_label="time from culmination (s)",
        y_label="elevation (deg) / range (km)"),
    "skl": AxesSpec(
        x="dt_s", ys=("skl_bits",), series_by="pe_label",
        title="Secret-key length vs acquisition half-window",
        x_label="half-window (s)", y_label="secret-key length (bits)"),
    "fidelity": AxesSpec(
        x="radiance", ys=("fidelity",),
        series_by=("pe_label", "divergence_rad"), x_log=True,
        title="Entanglement fidelity vs background radiance",
        x_label="spectral radiance (W m^-2 nm^-1 sr^-1)", y_label="fidelity"),
    "turbulence": AxesSpec(
        x="zenith_deg", ys=("greenwood_hz", "fried_m"),
        series_by="wavelength_nm", y_log=True, hlines=(1500.0,),
        title="Adaptive-optics metrics vs zenith angle",
        x_label="zenith angle (deg)",
        y_label="Greenwood frequency (Hz) / Fried length (m)"),
}


def run_study(study: str, scenario: Scenario, threads: int = 1) -> StudyReport:
    if study not in STUDIES:
        raise ValueError(f"unknown study {study!r}; expected one of {sorted(STUDIES)}")
    fn = STUDIES[study]
    if study == "pass":
        return fn(scenario)
    return fn(scenario, threads=threads)
