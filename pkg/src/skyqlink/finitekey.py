"""Finite-key decoy-state efficient BB84 secret-key length.

The transmitter interleaves three pulse intensities (signal, decoy,
vacuum by default) and biases the basis choice toward the key basis X.
Detection statistics accumulated over an acquisition window are turned
into vacuum/single-photon bounds via Hoeffding-corrected decoy-state
linear programs, a phase-error bound with a finite-sample correction
term, and finally the extractable secret-key length

    l = s_X0 + s_X1 (1 - h(phi_X)) - lambda_EC
        - 6 log2(21 / eps_sec) - log2(2 / eps_cor)

with error-correction leakage lambda_EC = f_EC n_X h(QBER_X).  Tallies
are deterministic expected values, which keeps the whole pipeline
reproducible and matches the smooth key-length curves this model is
meant to generate; no per-pulse sampling is performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .channel import LinkSample

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ProtocolParams:
    """Decoy-state BB84 source settings.

    ``mu1 > mu2 > mu3 >= 0`` with ``mu1 > mu2 + mu3``; ``p1 + p2 + p3 = 1``
    are the intensity probabilities and ``px`` the probability that either
    party picks the key basis X.
    """

    mu1: float
    mu2: float
    mu3: float = 0.0
    p1: float = 0.6
    p2: float = 0.25
    p3: float = 0.15
    px: float = 0.65
    source_rate: float = 2e8

    def __post_init__(self) -> None:
        if not (self.mu1 > self.mu2 > self.mu3 >= 0.0):
            raise ValueError(
                f"need mu1 > mu2 > mu3 >= 0, got {self.mu1}, {self.mu2}, {self.mu3}")
        if not self.mu1 > self.mu2 + self.mu3:
            raise ValueError("need mu1 > mu2 + mu3 for the decoy bounds")
        probs = (self.p1, self.p2, self.p3)
        if any(not 0.0 < p < 1.0 for p in probs):
            raise ValueError(f"intensity probabilities must be in (0,1), got {probs}")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"intensity probabilities must sum to 1, got {sum(probs)}")
        if not 0.0 < self.px < 1.0:
            raise ValueError(f"px must be in (0,1), got {self.px}")
        if self.source_rate <= 0:
            raise ValueError(f"source rate must be > 0, got {self.source_rate}")

    @property
    def intensities(self) -> tuple[float, float, float]:
        return (self.mu1, self.mu2, self.mu3)

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p3)

    def tau(self, n: int) -> float:
        """Probability that an emitted pulse carries n photons."""
        return sum(p * math.exp(-mu) * mu**n / math.factorial(n)
                   for p, mu in zip(self.probabilities, self.intensities))


@dataclass(frozen=True)
class SecurityParams:
    """Security failure budgets and error-correction model."""

    eps_sec: float = 1e-9
    eps_cor: float = 1e-15
    f_ec: float = 1.16
    e_intrinsic: float = 0.01

    def __post_init__(self) -> None:
        if not 0.0 < self.eps_sec < 1.0 or not 0.0 < self.eps_cor < 1.0:
            raise ValueError("failure probabilities must be in (0,1)")
        if self.f_ec < 1.0:
            raise ValueError(f"f_ec must be >= 1, got {self.f_ec}")
        if not 0.0 <= self.e_intrinsic < 0.5:
            raise ValueError(f"e_intrinsic must be in [0, 0.5), got {self.e_intrinsic}")


BASIS_X, BASIS_Z = 0, 1


@dataclass(frozen=True)
class TallyCounts:
    """Expected sent/detected/errored counts per basis (X, Z) and intensity.

    Arrays have shape (2, 3): axis 0 is the sifted basis (X = key basis,
    Z = phase-estimation basis), axis 1 the intensity index.
    """

    sent: np.ndarray
    detected: np.ndarray
    errored: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.sent, self.detected, self.errored):
            if arr.shape != (2, 3):
                raise ValueError(f"tally arrays must have shape (2, 3), got {arr.shape}")
            arr.flags.writeable = False
        if np.any(self.errored < -1e-9) or np.any(self.errored > self.detected + 1e-9) \
                or np.any(self.detected > self.sent + 1e-9):
            raise ValueError("tallies must satisfy 0 <= errored <= detected <= sent")

    def n_basis(self, basis: int) -> float:
        return float(np.sum(self.detected[basis]))

    def m_basis(self, basis: int) -> float:
        return float(np.sum(self.errored[basis]))


class DecoyBounds(NamedTuple):
    s0: float
    s1: float
    v1: float
    feasible: bool


@dataclass(frozen=True)
class FiniteKeyResult:
    """Secret-key length and the bounds it was built from."""

    skl: int
    qber_key_basis: float
    phase_error_bound: float
    s0_lower: float
    s1_lower: float
    v1_upper: float
    feasible: bool


def binary_entropy(x: float) -> float:
    """Binary entropy h(x) in bits, with h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument must be in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _window_arrays(link: Sequence[LinkSample],
                   window_half: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Extract (eta, p_noise) arrays for |t| <= window_half and the step."""
    if window_half <= 0:
        raise ValueError(f"window_half must be > 0, got {window_half}")
    t = np.array([s.t_s for s in link])
    if len(t) < 2:
        raise ValueError("link must contain at least two samples")
    steps = np.diff(t)
    dt = float(steps[0])
    if np.any(np.abs(steps - dt) > 1e-9 * max(1.0, dt)):
        raise ValueError("link samples must be uniformly spaced in time")
    if window_half > float(t[-1]) + dt / 2 or -window_half < float(t[0]) - dt / 2:
        raise ValueError(
            f"window_half {window_half} s exceeds the link support "
            f"[{t[0]}, {t[-1]}] s")
    keep = np.abs(t) <= window_half + 1e-9
    eta = np.array([s.eta_sys for s in link])[keep]
    n_b = np.array([s.background_per_gate for s in link])[keep]
    p_noise = 1.0 - np.exp(-n_b)
    return eta, p_noise, dt


def _tallies_from_arrays(params: ProtocolParams, eta: np.ndarray,
                         p_noise: np.ndarray, dt: float,
                         security: SecurityParams) -> TallyCounts:
    pulses_per_sample = params.source_rate * dt

    sent = np.zeros((2, 3))
    detected = np.zeros((2, 3))
    errored = np.zeros((2, 3))
    basis_prob = (params.px**2, (1.0 - params.px) ** 2)

    for k, (mu, p_k) in enumerate(zip(params.intensities, params.probabilities)):
        no_signal = np.exp(-eta * mu)
        signal = 1.0 - no_signal
        click = 1.0 - (1.0 - 2.0 * p_noise) * no_signal
        err = signal * security.e_intrinsic + no_signal * p_noise
        click_sum = float(np.sum(click))
        err_sum = float(np.sum(err))
        for b in (BASIS_X, BASIS_Z):
            weight = pulses_per_sample * basis_prob[b] * p_k
            sent[b, k] = weight * len(eta)
            detected[b, k] = weight * click_sum
            errored[b, k] = weight * err_sum
    return TallyCounts(sent=sent, detected=detected, errored=errored)


def simulate_tallies(params: ProtocolParams, link: Sequence[LinkSample],
                     window_half: float, security: SecurityParams) -> TallyCounts:
    """Expected detection tallies accumulated over [-window_half, +window_half].

    Per sample and intensity mu the click probability is

        D_mu = 1 - (1 - 2 p_noise) exp(-eta_sys mu)

    (two detectors per basis, each with per-gate noise-click probability
    ``p_noise`` from the background/dark counts).  A click is signal-borne
    with probability S = 1 - exp(-eta_sys mu) and errs with probability
    ``e_intrinsic``; a noise-only click errs half the time.  Sifting keeps
    the px^2 / (1-px)^2 fractions where both parties chose X / Z.
    """
    eta, p_noise, dt = _window_arrays(link, window_half)
    return _tallies_from_arrays(params, eta, p_noise, dt, security)


def decoy_bounds(tallies: TallyCounts, params: ProtocolParams,
                 security: SecurityParams, basis: int = BASIS_X,
                 hoeffding: bool = True) -> DecoyBounds:
    """Vacuum and single-photon bounds for one basis.

    Observed per-intensity counts are first Hoeffding-corrected with the
    concentration budget eps_sec / 21 (matching the composability terms in
    the key-length formula), then combined into the standard two-decoy
    bounds

        s0 >= tau0 (mu2 n3^- - mu3 n2^+) / (mu2 - mu3)
        s1 >= tau1 mu1 [n2^- - n3^+ - (mu2^2 - mu3^2)/mu1^2 (n1^+ - s0/tau0)]
              / (mu1 (mu2 - mu3) - mu2^2 + mu3^2)
        v1 <= tau1 (m2^+ - m3^-) / (mu2 - mu3)

    with n_k^+- = (e^mu_k / p_k)(n_k +- sqrt(n/2 ln(1/eps1))).  The vacuum
    bound is clamped at zero when statistics cannot support it; the result
    is flagged infeasible when the single-photon bound dies.

    Passing ``hoeffding=False`` drops the concentration terms, giving the
    asymptotic (infinite-sample) bounds used by the test oracles.
    """
    mu = params.intensities
    prob = params.probabilities
    n_cells = tallies.detected[basis]
    m_cells = tallies.errored[basis]
    n_tot = float(np.sum(n_cells))
    m_tot = float(np.sum(m_cells))
    if n_tot <= 0.0:
        return DecoyBounds(0.0, 0.0, 0.0, False)

    if hoeffding:
        eps1 = security.eps_sec / 21.0
        delta_n = math.sqrt(n_tot / 2.0 * math.log(1.0 / eps1))
        delta_m = math.sqrt(m_tot / 2.0 * math.log(1.0 / eps1)) if m_tot > 0 else 0.0
    else:
        delta_n = delta_m = 0.0

    scale = [math.exp(mu[k]) / prob[k] for k in range(3)]
    n_plus = [scale[k] * (n_cells[k] + delta_n) for k in range(3)]
    n_minus = [scale[k] * (n_cells[k] - delta_n) for k in range(3)]
    m_plus = [scale[k] * (m_cells[k] + delta_m) for k in range(3)]
    m_minus = [scale[k] * (m_cells[k] - delta_m) for k in range(3)]

    tau0, tau1 = params.tau(0), params.tau(1)
    mu12, mu23 = mu[0], mu[1] - mu[2]

    s0 = tau0 * (mu[1] * n_minus[2] - mu[2] * n_plus[1]) / mu23
    s0 = max(0.0, s0)

    denom = mu12 * mu23 - mu[1] ** 2 + mu[2] ** 2
    s1 = (tau1 * mu12
          * (n_minus[1] - n_plus[2]
             - (mu[1] ** 2 - mu[2] ** 2) / mu12**2 * (n_plus[0] - s0 / tau0))
          / denom)

    v1 = max(0.0, tau1 * (m_plus[1] - m_minus[2]) / mu23)
    return DecoyBounds(float(s0), float(s1), float(v1), bool(s1 > 0.0))


def _gamma_correction(a: float, b: float, c: float, d: float) -> float:
    """Finite-sample correction of the measured-to-unmeasured error transfer."""
    if b <= 0.0:
        return 0.0
    spread = (c + d) * (1.0 - b) * b
    log_arg = (c + d) / (c * d * (1.0 - b) * b) * (21.0 / a) ** 2
    if log_arg <= 1.0:
        return 0.0
    return math.sqrt(spread / (c * d * _LN2) * math.log2(log_arg))


def phase_error(s_z1: float, v_z1: float, s_x1: float,
                security: SecurityParams) -> float:
    """Upper bound on the X-basis single-photon phase-error rate.

    Transfers the Z-basis single-photon error ratio to the key basis with
    a finite-sample penalty; capped at 1/2.
    """
    if s_z1 <= 0.0 or s_x1 <= 0.0:
        raise ValueError("single-photon counts must be positive")
    if not 0.0 <= v_z1 <= s_z1:
        raise ValueError(f"need 0 <= v_z1 <= s_z1, got {v_z1}, {s_z1}")
    b = v_z1 / s_z1
    if b >= 0.5:
        return 0.5
    return min(0.5, b + _gamma_correction(security.eps_sec, b, s_z1, s_x1))


def skl(tallies: TallyCounts, params: ProtocolParams,
        security: SecurityParams) -> FiniteKeyResult:
    """Secret-key length for one acquisition window.

    The key is drawn from the X basis; the Z basis feeds the phase-error
    estimate.  Returns a zero-length infeasible result whenever the decoy
    bounds cannot certify a positive single-photon contribution.
    """
    n_x = tallies.n_basis(BASIS_X)
    qber = tallies.m_basis(BASIS_X) / n_x if n_x > 0 else 0.0

    bx = decoy_bounds(tallies, params, security, BASIS_X)
    bz = decoy_bounds(tallies, params, security, BASIS_Z)
    if n_x <= 0 or not (bx.feasible and bz.feasible):
        return FiniteKeyResult(0, qber, 0.5, max(0.0, bx.s0), max(0.0, bx.s1),
                               bz.v1, False)

    phi = phase_error(bz.s1, min(bz.v1, bz.s1), bx.s1, security)
    leak_ec = security.f_ec * n_x * binary_entropy(qber)
    length = (bx.s0 + bx.s1 * (1.0 - binary_entropy(phi)) - leak_ec
              - 6.0 * math.log2(21.0 / security.eps_sec)
              - math.log2(2.0 / security.eps_cor))
    bits = max(0, min(int(math.floor(length)), int(math.floor(n_x))))
    return FiniteKeyResult(bits, qber, phi, bx.s0, bx.s1, bz.v1, True)


@dataclass(frozen=True)
class BoundsBox:
    """Closed search ranges for the five optimised protocol parameters."""

    mu1: tuple[float, float] = (0.3, 1.0)
    mu2: tuple[float, float] = (0.05, 0.35)
    px: tuple[float, float] = (0.5, 0.9)
    p1: tuple[float, float] = (0.3, 0.8)
    p2: tuple[float, float] = (0.1, 0.5)

    def as_list(self) -> list[tuple[float, float]]:
        return [self.mu1, self.mu2, self.px, self.p1, self.p2]


def _params_from_vector(vec: Sequence[float], mu3: float,
                        source_rate: float) -> ProtocolParams | None:
    mu1, mu2, px, p1, p2 = (float(v) for v in vec)
    p3 = 1.0 - p1 - p2
    if p3 <= 0.0 or p3 >= 1.0:
        return None
    try:
        return ProtocolParams(mu1=mu1, mu2=mu2, mu3=mu3, p1=p1, p2=p2, p3=p3,
                              px=px, source_rate=source_rate)
    except ValueError:
        return None


def optimize_params(link: Sequence[LinkSample], window_half: float,
                    security: SecurityParams,
                    bounds_box: BoundsBox | None = None,
                    mu3: float = 0.0, source_rate: float = 2e8,
                    grid_points: int = 5,
                    n_starts: int = 3) -> tuple[ProtocolParams, FiniteKeyResult]:
    """Maximise the window SKL over (mu1, mu2, px, p1, p2).

    A deterministic ``grid_points``-per-axis seeding grid is evaluated
    first; the ``n_starts`` best grid points seed bounded Nelder-Mead
    descents.  The reported result is the best of all probes, so it can
    never fall below the best grid value.  Ties break toward lower mu1,
    then lexicographic parameter order, keeping the outcome independent
    of evaluation order.
    """
    box = (bounds_box or BoundsBox()).as_list()
    eta, p_noise, dt = _window_arrays(link, window_half)

    def evaluate(vec: Sequence[float]) -> tuple[int, ProtocolParams | None,
                                                FiniteKeyResult | None]:
        params = _params_from_vector(vec, mu3, source_rate)
        if params is None:
            return -1, None, None
        tallies = _tallies_from_arrays(params, eta, p_noise, dt, security)
        result = skl(tallies, params, security)
        return result.skl, params, result

    def better(cand: tuple, best: tuple) -> bool:
        # (skl, vector) ordering: higher skl, then lower mu1, then lexicographic.
        if cand[0] != best[0]:
            return cand[0] > best[0]
        return tuple(cand[1]) < tuple(best[1])

    axes = [np.linspace(lo, hi, grid_points) for lo, hi in box]
    grid_scores: list[tuple[int, tuple[float, ...]]] = []
    for i1 in axes[0]:
        for i2 in axes[1]:
            for i3 in axes[2]:
                for i4 in axes[3]:
                    for i5 in axes[4]:
                        vec = (float(i1), float(i2), float(i3), float(i4), float(i5))
                        score, _, _ = evaluate(vec)
                        grid_scores.append((score, vec))

    ranked = sorted(grid_scores, key=lambda sv: (-sv[0], sv[1]))
    best_score, best_vec = ranked[0]

    if best_score <= 0:
        params = _params_from_vector(best_vec, mu3, source_rate)
        if params is None:
            mid = [0.5 * (lo + hi) for lo, hi in box]
            params = _params_from_vector(mid, mu3, source_rate)
        if params is None:
            raise ValueError(
                "bounds box contains no valid protocol-parameter combination")
        tallies = simulate_tallies(params, link, window_half, security)
        return params, skl(tallies, params, security)

    def objective(vec: np.ndarray) -> float:
        score, _, _ = evaluate(np.clip(vec, [lo for lo, _ in box],
                                       [hi for _, hi in box]))
        return -float(score)

    fatol = max(1.0, 1e-3 * best_score)
    for _, start in ranked[:n_starts]:
        res = minimize(objective, np.array(start), method="Nelder-Mead",
                       bounds=box,
                       options={"fatol": fatol, "xatol": 1e-4,
                                "maxiter": 400, "disp": False})
        refined = tuple(float(v) for v in np.clip(
            res.x, [lo for lo, _ in box], [hi for _, hi in box]))
        score, _, _ = evaluate(refined)
        if better((score, refined), (best_score, best_vec)):
            best_score, best_vec = score, refined

    params = _params_from_vector(best_vec, mu3, source_rate)
    tallies = simulate_tallies(params, link, window_half, security)
    return params, skl(tallies, params, security)
