"""Finite-key decoy-state BB84: tallies, bounds, SKL, optimisation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skyqlink.channel import LinkSample
from skyqlink.finitekey import (
    BASIS_X,
    BASIS_Z,
    BoundsBox,
    ProtocolParams,
    SecurityParams,
    TallyCounts,
    binary_entropy,
    decoy_bounds,
    optimize_params,
    phase_error,
    simulate_tallies,
    skl,
)

SEC = SecurityParams()
PARAMS = ProtocolParams(mu1=0.8, mu2=0.1, mu3=0.0, p1=0.7, p2=0.2, p3=0.1, px=0.7)


def flat_link(eta, n_b=0.0, n_samples=201, dt=1.0):
    half = (n_samples - 1) // 2
    return [LinkSample((i - half) * dt, eta, n_b) for i in range(n_samples)]


def poisson_tallies(params, eta_ch, n_pulses_per_basis=1e12, p_noise=0.0,
                    e_int=0.0, n_max=60):
    """Oracle tallies from an explicit Poisson photon-number expansion.

    Yields Y_n = 1 - (1 - 2 p_noise)(1 - eta_ch)^n; error counts follow the
    same signal/noise split as the production model.
    """
    sent = np.zeros((2, 3))
    detected = np.zeros((2, 3))
    errored = np.zeros((2, 3))
    for k, (mu, p_k) in enumerate(zip(params.intensities, params.probabilities)):
        n_sent = n_pulses_per_basis * p_k
        q = 0.0
        err = 0.0
        for n in range(n_max):
            pois = math.exp(-mu) * mu**n / math.factorial(n)
            s_n = 1.0 - (1.0 - eta_ch) ** n
            y_n = 1.0 - (1.0 - 2.0 * p_noise) * (1.0 - s_n)
            q += pois * y_n
            err += pois * (s_n * e_int + (1.0 - s_n) * p_noise)
        for b in (BASIS_X, BASIS_Z):
            sent[b, k] = n_sent
            detected[b, k] = n_sent * q
            errored[b, k] = n_sent * err
    return TallyCounts(sent=sent, detected=detected, errored=errored)


class TestBinaryEntropy:
    def test_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_maximum(self):
        assert binary_entropy(0.5) == pytest.approx(1.0, rel=1e-12)

    def test_reference_point(self):
        # Direct high-precision evaluation of h(0.11).
        expected = -0.11 * math.log2(0.11) - 0.89 * math.log2(0.89)
        assert binary_entropy(0.11) == pytest.approx(expected, rel=1e-12)
        assert binary_entropy(0.11) == pytest.approx(0.4999, abs=1e-4)

    def test_domain(self):
        with pytest.raises(ValueError):
            binary_entropy(-0.1)
        with pytest.raises(ValueError):
            binary_entropy(1.1)

    @given(st.floats(min_value=1e-6, max_value=0.5))
    @settings(max_examples=50, deadline=None)
    def test_symmetry(self, x):
        assert binary_entropy(x) == pytest.approx(binary_entropy(1.0 - x), rel=1e-9)


class TestSimulateTallies:
    def test_dead_channel_detects_nothing(self):
        tal = simulate_tallies(PARAMS, flat_link(0.0, 0.0), 100.0, SEC)
        assert np.all(tal.detected == 0)
        assert np.all(tal.errored == 0)

    def test_noiseless_intrinsicless_has_no_errors(self):
        sec = SecurityParams(e_intrinsic=0.0)
        tal = simulate_tallies(PARAMS, flat_link(1e-3, 0.0), 100.0, sec)
        assert np.all(tal.errored == 0)
        # Vacuum pulses cannot click without noise; the lit intensities do.
        assert np.all(tal.detected[:, :2] > 0)
        assert np.all(tal.detected[:, 2] == 0)

    def test_single_sample_closed_form(self):
        # mu = 0.5 at eta = 1e-3: D = 1 - exp(-5e-4), no noise.
        params = ProtocolParams(mu1=0.5, mu2=0.1, mu3=0.0, p1=0.7, p2=0.2,
                                p3=0.1, px=0.7, source_rate=1e6)
        link = [LinkSample(-1.0, 1e-3, 0.0), LinkSample(0.0, 1e-3, 0.0),
                LinkSample(1.0, 1e-3, 0.0)]
        tal = simulate_tallies(params, link, 1.0, SEC)
        d = 1.0 - math.exp(-5e-4)
        expected = 1e6 * 3 * 0.49 * 0.7 * d
        assert tal.detected[BASIS_X, 0] == pytest.approx(expected, rel=1e-12)
        assert d == pytest.approx(4.99875e-4, rel=1e-4)

    def test_deterministic(self):
        link = flat_link(2e-4, 3e-7)
        t1 = simulate_tallies(PARAMS, link, 50.0, SEC)
        t2 = simulate_tallies(PARAMS, link, 50.0, SEC)
        assert np.array_equal(t1.detected, t2.detected)
        assert np.array_equal(t1.errored, t2.errored)
        assert np.array_equal(t1.sent, t2.sent)

    def test_window_beyond_support_rejected(self):
        with pytest.raises(ValueError, match="support"):
            simulate_tallies(PARAMS, flat_link(1e-3, 0.0, n_samples=21), 100.0, SEC)

    def test_tally_invariants(self):
        tal = simulate_tallies(PARAMS, flat_link(5e-4, 1e-6), 100.0, SEC)
        assert np.all(tal.errored <= tal.detected)
        assert np.all(tal.detected <= tal.sent)


class TestDecoyBounds:
    def test_asymptotic_recovers_poisson_single_yield(self):
        # Infinite-key limit on a noiseless channel: the single-photon
        # bound must sit within 1% below the true Poisson-expansion yield.
        # Bound slack grows like mu1*mu2/2, so probe the small-intensity
        # regime where 1% tightness is expected.
        params = ProtocolParams(mu1=0.3, mu2=0.04, mu3=0.0,
                                p1=0.5, p2=0.3, p3=0.2, px=0.7)
        eta_ch = 1e-3
        tal = poisson_tallies(params, eta_ch)
        bounds = decoy_bounds(tal, params, SEC, BASIS_X, hoeffding=False)
        n_basis = 1e12
        true_s1 = n_basis * params.tau(1) * eta_ch
        assert bounds.feasible
        assert bounds.s1 <= true_s1 * (1.0 + 1e-9)
        assert bounds.s1 == pytest.approx(true_s1, rel=1e-2)

    def test_asymptotic_vacuum_bound(self):
        tal = poisson_tallies(PARAMS, 1e-3, p_noise=1e-6)
        bounds = decoy_bounds(tal, PARAMS, SEC, BASIS_X, hoeffding=False)
        true_s0 = 1e12 * PARAMS.tau(0) * 2e-6  # vacuum clicks: 2 p_noise
        assert bounds.s0 == pytest.approx(true_s0, rel=1e-2)

    def test_hoeffding_width_scales_as_sqrt(self):
        # Scaling all counts x4 at fixed rates halves the relative width
        # of the finite-sample correction.
        def rel_gap(scale):
            tal = poisson_tallies(PARAMS, 1e-3, n_pulses_per_basis=1e10 * scale)
            finite = decoy_bounds(tal, PARAMS, SEC, BASIS_X).s1
            asym = decoy_bounds(tal, PARAMS, SEC, BASIS_X, hoeffding=False).s1
            return (asym - finite) / asym

        ratio = rel_gap(1) / rel_gap(4)
        assert ratio == pytest.approx(2.0, rel=0.05)

    def test_zero_detections_infeasible(self):
        tal = simulate_tallies(PARAMS, flat_link(0.0, 0.0), 100.0, SEC)
        bounds = decoy_bounds(tal, PARAMS, SEC, BASIS_X)
        assert not bounds.feasible


class TestPhaseError:
    def test_vanishes_with_huge_clean_samples(self):
        assert phase_error(1e15, 0.0, 1e15, SEC) < 1e-6

    def test_capped_at_half(self):
        assert phase_error(1e6, 5e5, 1e6, SEC) == 0.5

    def test_gamma_reference_value(self):
        # Direct evaluation oracle at c = d = 1e6, b = 0.02, a = 1e-9.
        a, b, c, d = 1e-9, 0.02, 1e6, 1e6
        spread = (c + d) * (1.0 - b) * b
        expected_gamma = math.sqrt(
            spread / (c * d * math.log(2.0))
            * math.log2((c + d) / (c * d * (1.0 - b) * b) * (21.0 / a) ** 2))
        got = phase_error(c, b * c, d, SecurityParams(eps_sec=a))
        assert got == pytest.approx(b + expected_gamma, rel=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            phase_error(0.0, 0.0, 1e6, SEC)
        with pytest.raises(ValueError):
            phase_error(1e6, -1.0, 1e6, SEC)
        with pytest.raises(ValueError):
            phase_error(1e6, 2e6, 1e6, SEC)


class TestSKL:
    def test_zero_transmittance_gives_zero(self):
        tal = simulate_tallies(PARAMS, flat_link(0.0, 0.0), 100.0, SEC)
        res = skl(tal, PARAMS, SEC)
        assert res.skl == 0
        assert not res.feasible

    def test_skl_bounded_by_sifted_key(self):
        for eta in (1e-5, 1e-4, 1e-3):
            tal = simulate_tallies(PARAMS, flat_link(eta, 1e-7), 100.0, SEC)
            res = skl(tal, PARAMS, SEC)
            assert res.skl <= tal.n_basis(BASIS_X)

    def test_high_qber_kills_key(self):
        # Half the detections errored: QBER = 0.5.
        sent = np.full((2, 3), 1e9)
        detected = np.full((2, 3), 1e6)
        errored = detected * 0.5
        tal = TallyCounts(sent=sent, detected=detected, errored=errored)
        res = skl(tal, PARAMS, SEC)
        assert res.qber_key_basis == pytest.approx(0.5)
        assert res.skl == 0

    def test_monotone_in_window(self):
        link = flat_link(2e-4, 1e-7, n_samples=401)
        values = []
        for half in (25.0, 50.0, 100.0, 200.0):
            tal = simulate_tallies(PARAMS, link, half, SEC)
            values.append(skl(tal, PARAMS, SEC).skl)
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_monotone_in_pointing_loss(self):
        # More jitter -> lower transmittance -> no larger SKL at fixed params.
        values = []
        for eta in (4e-4, 2e-4, 1e-4):
            tal = simulate_tallies(PARAMS, flat_link(eta, 1e-7), 100.0, SEC)
            values.append(skl(tal, PARAMS, SEC).skl)
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestOptimizeParams:
    def test_degenerate_link_infeasible(self):
        params, res = optimize_params(flat_link(0.0, 0.0), 50.0, SEC)
        assert res.skl == 0
        assert not res.feasible

    def test_beats_seeding_grid(self):
        link = flat_link(2e-4, 1e-7)
        box = BoundsBox()
        _, best = optimize_params(link, 100.0, SEC, box)
        grid_best = 0
        for mu1 in np.linspace(*box.mu1, 5):
            for mu2 in np.linspace(*box.mu2, 5):
                for px in np.linspace(*box.px, 5):
                    for p1 in np.linspace(*box.p1, 5):
                        for p2 in np.linspace(*box.p2, 5):
                            p3 = 1.0 - p1 - p2
                            if p3 <= 0 or mu1 <= mu2:
                                continue
                            params = ProtocolParams(
                                mu1=float(mu1), mu2=float(mu2), mu3=0.0,
                                p1=float(p1), p2=float(p2), p3=float(p3),
                                px=float(px))
                            tal = simulate_tallies(params, link, 100.0, SEC)
                            grid_best = max(grid_best, skl(tal, params, SEC).skl)
        assert best.skl >= grid_best

    def test_beats_hand_picked_parameters(self):
        link = flat_link(2e-4, 1e-7)
        hand = ProtocolParams(mu1=0.8, mu2=0.1, mu3=0.0, p1=0.7, p2=0.2,
                              p3=0.1, px=0.7)
        tal = simulate_tallies(hand, link, 100.0, SEC)
        hand_skl = skl(tal, hand, SEC).skl
        _, best = optimize_params(link, 100.0, SEC)
        assert best.skl >= hand_skl

    def test_deterministic(self):
        link = flat_link(3e-4, 1e-7, n_samples=101)
        p1, r1 = optimize_params(link, 50.0, SEC)
        p2, r2 = optimize_params(link, 50.0, SEC)
        assert (p1.mu1, p1.mu2, p1.px, p1.p1, p1.p2) == \
            (p2.mu1, p2.mu2, p2.px, p2.p1, p2.p2)
        assert r1.skl == r2.skl


class TestProtocolParams:
    def test_intensity_ordering_enforced(self):
        with pytest.raises(ValueError):
            ProtocolParams(mu1=0.1, mu2=0.5, mu3=0.0)
        with pytest.raises(ValueError):
            ProtocolParams(mu1=0.5, mu2=0.3, mu3=0.3)

    def test_probability_validation(self):
        with pytest.raises(ValueError):
            ProtocolParams(mu1=0.5, mu2=0.1, p1=0.5, p2=0.5, p3=0.5)
        with pytest.raises(ValueError):
            ProtocolParams(mu1=0.5, mu2=0.1, px=1.0)

    def test_tau_is_poisson_mixture(self):
        p = ProtocolParams(mu1=0.5, mu2=0.1, mu3=0.0, p1=0.5, p2=0.3, p3=0.2)
        expected = 0.5 * math.exp(-0.5) * 0.5 + 0.3 * math.exp(-0.1) * 0.1
        assert p.tau(1) == pytest.approx(expected, rel=1e-12)
