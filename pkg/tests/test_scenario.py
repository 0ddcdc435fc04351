"""Scenario parsing, defaults, diagnostics, digest, metadata round-trip."""

import pytest

from skyqlink.scenario import (
    ScenarioError,
    parse_scenario,
    parse_scenario_text,
    scenario_from_config_lines,
)
from skyqlink.scenarios import BUNDLED, bundled_path


class TestParsing:
    def test_empty_file_resolves_to_all_defaults(self):
        scn = parse_scenario_text("")
        assert scn.get("pass", "tx_altitude_km") == 535.0
        assert scn.get("link", "divergence_urad") == 33.0
        assert all((section, key) in scn.defaulted
                   for section in scn.values for key in scn.values[section])

    def test_values_override_defaults(self):
        scn = parse_scenario_text("[pass]\ntx_altitude_km = 400\n")
        assert scn.get("pass", "tx_altitude_km") == 400.0
        assert ("pass", "tx_altitude_km") not in scn.defaulted
        assert ("pass", "rx_altitude_km") in scn.defaulted

    def test_comments_and_blank_lines_ignored(self):
        text = "# heading\n\n[link]\n  wavelength_nm = 1550  # telecom band\n"
        scn = parse_scenario_text(text)
        assert scn.get("link", "wavelength_nm") == 1550.0

    def test_lists(self):
        scn = parse_scenario_text(
            "[link]\npointing_levels = weak, strong\n"
            "[skl]\ndt_values_s = 5, 10, 50\n")
        assert scn.get("link", "pointing_levels") == ("weak", "strong")
        assert scn.get("skl", "dt_values_s") == (5.0, 10.0, 50.0)


class TestDiagnostics:
    def test_unknown_section(self):
        with pytest.raises(ScenarioError, match=r"unknown section.*line 3"):
            parse_scenario_text("# x\n\n[warp_drive]\n")

    def test_unknown_key_is_an_error(self):
        with pytest.raises(ScenarioError, match=r"unknown key 'colour'.*line 2"):
            parse_scenario_text("[link]\ncolour = blue\n")

    def test_negative_sigma_rejected(self):
        with pytest.raises(ScenarioError, match="weak_sigma_urad"):
            parse_scenario_text("[link]\nweak_sigma_urad = -1\n")

    def test_malformed_line(self):
        with pytest.raises(ScenarioError, match="key = value"):
            parse_scenario_text("[link]\nwavelength_nm\n")

    def test_key_outside_section(self):
        with pytest.raises(ScenarioError, match="outside"):
            parse_scenario_text("wavelength_nm = 810\n")

    def test_duplicate_key(self):
        with pytest.raises(ScenarioError, match="duplicate"):
            parse_scenario_text("[link]\neta_tx = 0.5\neta_tx = 0.6\n")

    def test_bad_number(self):
        with pytest.raises(ScenarioError, match="cannot parse"):
            parse_scenario_text("[link]\nwavelength_nm = eight-ten\n")

    def test_cross_key_validation(self):
        with pytest.raises(ScenarioError, match="tx_altitude_km"):
            parse_scenario_text("[pass]\ntx_altitude_km = 5\nrx_altitude_km = 20\n")

    def test_unknown_pointing_level(self):
        with pytest.raises(ScenarioError, match="pointing level"):
            parse_scenario_text("[link]\npointing_levels = weak, wobbly\n")

    def test_missing_file(self):
        with pytest.raises(ScenarioError, match="cannot read"):
            parse_scenario("/nonexistent/path.scn")


class TestDigestAndRoundTrip:
    def test_digest_stable_across_formatting(self):
        a = parse_scenario_text("[link]\nwavelength_nm = 1550\n")
        b = parse_scenario_text("# comment\n[link]\n  wavelength_nm =   1550.0\n")
        assert a.digest == b.digest

    def test_digest_changes_with_values(self):
        a = parse_scenario_text("")
        b = parse_scenario_text("[link]\nwavelength_nm = 1550\n")
        assert a.digest != b.digest

    def test_config_lines_mark_defaults_exactly_once(self):
        scn = parse_scenario_text("[link]\nwavelength_nm = 1550\n")
        lines = scn.config_lines()
        entry = [ln for ln in lines if ln.startswith("link.wavelength_nm")]
        assert len(entry) == 1
        assert "# default" not in entry[0]
        defaulted = [ln for ln in lines if ln.startswith("link.eta_tx")]
        assert len(defaulted) == 1
        assert defaulted[0].endswith("# default")

    def test_round_trip_reproduces_scenario(self):
        scn = parse_scenario(bundled_path("fig2_leo_haps"))
        rebuilt = scenario_from_config_lines(scn.config_lines())
        assert rebuilt.values == scn.values
        assert rebuilt.digest == scn.digest

    def test_round_trip_through_csv_metadata_prefix(self):
        scn = parse_scenario_text("[noise]\nradiance_w_m2_nm_sr = 2.5e-3\n")
        lines = [f"# config {ln}" for ln in scn.config_lines()]
        rebuilt = scenario_from_config_lines(lines)
        assert rebuilt.digest == scn.digest


class TestBundledScenarios:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_resolve_cleanly(self, name):
        scn = parse_scenario(bundled_path(name))
        assert scn.digest  # parse + validation succeeded

    def test_fig2_values(self):
        scn = parse_scenario(bundled_path("fig2_leo_haps"))
        assert scn.get("pass", "tx_altitude_km") == 535.0
        assert scn.get("pass", "rx_altitude_km") == 20.0
        assert scn.get("link", "divergence_urad") == 33.0
        assert scn.get("link", "rx_aperture_cm") == 35.0
        assert scn.get("protocol", "source_rate_mhz") == 200.0
        assert scn.get("link", "pointing_levels") == ("weak", "moderate", "strong")
        # No atmosphere between a 535 km orbit and a 20 km platform.
        assert scn.get("link", "eta_atm") == 1.0

    def test_unknown_bundled_name(self):
        with pytest.raises(KeyError):
            bundled_path("fig9_warpcore")
