"""Stable carrier: conditional draws for a subordinator with jump density
``gamma * x**(-1-alpha)``.

All public methods take real (unscaled) time; internally times are rescaled
by ``time_scale`` so unit-time marginals are the standard stable law of
:mod:`levyfp.stable`.  The four operations are the passage time across a
non-increasing boundary, the pair (left value, jump) at that passage time,
the marginal conditioned below a level, and the tilted-component value given
the carrier's left value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln
from scipy.special import gamma as gamma_fn

from ._rootfind import solve_increasing
from .errors import LowAcceptanceWarning, ParameterError, UnsupportedModelError
from .events import CrossingDraw
from .rng import RngStream
from .stable import StableIntegrand, sample_standard_stable

_BIG = 1e300
_LOG_HALF = -math.log(2.0)
# rejection count after which a value_below loop warns (acceptance ~ 1e-6)
_WARN_REJECTIONS = 1_000_000


def _log_psi(y: float) -> float:
    """log of psi(y) = (1 - exp(-y))/y on y > 0, psi(0) = 1."""
    if y == 0.0:
        return 0.0
    return math.log(-math.expm1(-y)) - math.log(y)


@dataclass(frozen=True)
class StableCarrier:
    """Stable subordinator with index ``alpha`` and intensity ``gamma``."""

    alpha: float
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.gamma > 0.0:
            raise ParameterError(f"gamma must be > 0, got {self.gamma}")
        object.__setattr__(self, "_integrand", StableIntegrand(self.alpha))

    @property
    def integrand(self) -> StableIntegrand:
        return self._integrand

    @property
    def time_scale(self) -> float:
        """rho = gamma * Gamma(1-alpha) / alpha; S(t) here ~ S_std(rho * t)."""
        return self.gamma * gamma_fn(1.0 - self.alpha) / self.alpha

    def levy_density(self, x: float) -> float:
        return self.gamma * x ** (-1.0 - self.alpha) if x > 0 else 0.0

    def truncated_moment(self, k: int, q: float, r: float) -> float:
        """integral of x**k * exp(-q x) over the jump measure on (0, r]."""
        p = k - self.alpha
        if q > 0.0:
            tail = gammainc(p, q * r) if math.isfinite(r) else 1.0
            return self.gamma * q**-p * gamma_fn(p) * tail
        if not math.isfinite(r):
            raise UnsupportedModelError(
                "moments diverge for an untilted stable measure with no cutoff"
            )
        return self.gamma * r**p / p

    # -- passage time --------------------------------------------------------

    def passage_time(self, boundary, stream: RngStream):
        """First time S crosses a non-increasing boundary.

        Returns ``(t1, sigma)`` where sigma is the standard unit-time draw the
        scaling construction consumed: t1 solves (rho*t)**(1/alpha) * sigma
        = boundary(t), the unique root of an increasing-vs-nonincreasing pair.
        """
        sigma = float(sample_standard_stable(self.alpha, stream))
        rho = self.time_scale
        a = self.alpha
        level = boundary.constant_level()
        if level is not None:
            return (level / sigma) ** a / rho, sigma

        log_sigma = math.log(sigma)
        log_rho = math.log(rho)

        def g(u: float) -> float:
            val = boundary.value(math.exp(u))
            if val <= 0.0:
                return _BIG
            return (log_rho + u) / a + log_sigma - math.log(val)

        return solve_increasing(g), sigma

    # -- crossing pair -------------------------------------------------------

    def crossing(self, t: float, z: float, w0: float, stream: RngStream) -> CrossingDraw:
        """(S(tau-), jump) given that the passage time across the boundary is t.

        ``z`` is the boundary value at t and ``w0`` the negated boundary slope
        there (0 for constant boundaries, which therefore never creep).

        The conditional law has density proportional to
        ``h(x_s, theta) * [w0 * creep-atom + gamma * v**(-1-alpha) * 1{0 <= z-s < v}]``
        over (s, theta, v) with x_s the standardized left value.  It is drawn
        by composition over three dominating pieces: the creep atom, left
        values at or below z/2 (proposed from the exact kernel law given the
        angle, which is an exponential shift), and left values above z/2
        (proposed from the overshoot power law).  Each piece uses a tight
        kernel bound, ``m_bound`` or 1/(e*x), so acceptance stays bounded away
        from zero uniformly in t, unlike a single global-bound rejection loop
        whose acceptance degenerates like t**(1/alpha) at early crossings.
        """
        if not (t > 0.0 and z > 0.0):
            raise ParameterError(f"need t, z > 0, got ({t}, {z})")
        if w0 < 0.0:
            raise ParameterError(f"w0 must be >= 0, got {w0}")
        a = self.alpha
        itg = self._integrand
        q_exp = a / (1.0 - a)  # exponent inside the kernel's exponential
        tau = self.time_scale * t
        ts = tau ** (1.0 / a)  # standardized spatial scale tau**(1/alpha)
        x_z = z / ts
        x_half = 0.5 * z / ts
        w_shift = itg.h0_floor * x_half**-q_exp  # may overflow to inf; exp(-inf) = 0 below

        h_creep = itg.h_sup(x_z)
        mass_creep = math.pi * w0 * h_creep
        mass_a = (
            (self.gamma / a**2)
            * (0.5 * z) ** -a
            * (1.0 - a)
            * ts
            * math.pi
            * math.exp(-w_shift)
        )
        h_b = itg.h_sup_range(x_half, x_z)
        mass_b = (self.gamma / a) * h_b * math.pi * (0.5 * z) ** (1.0 - a) / (1.0 - a)
        weights = (mass_creep, mass_a, mass_b)
        while True:
            branch = stream.weighted_index(weights)
            theta = stream.uniform(0.0, math.pi)
            if branch == 0:
                if math.log1p(-stream.uniform()) + math.log(h_creep) <= itg.log_h(x_z, theta):
                    return CrossingDraw(s_left=z, jump=0.0, creep=True)
                continue
            if branch == 1:
                h0 = itg.h0(theta)
                w = h0 * x_half**-q_exp + stream.exponential()
                x = (h0 / w) ** ((1.0 - a) / a)
                s = ts * x
                if not 0.0 < s <= 0.5 * z:
                    continue  # float edge of the shifted-exponential draw
                log_acc = a * (math.log(0.5 * z) - math.log(z - s)) - (
                    h0 * x_half**-q_exp - w_shift
                )
            else:
                u = 0.5 * z * stream.uniform() ** (1.0 / (1.0 - a))
                s = z - u
                if not 0.0 < u < z:
                    continue
                log_acc = itg.log_h(s / ts, theta) - math.log(h_b)
            if math.log1p(-stream.uniform()) <= log_acc:
                v = (z - s) / stream.beta(a, 1.0)
                if not math.isfinite(v):
                    continue
                return CrossingDraw(s_left=s, jump=v, creep=False)

    # -- conditioned marginal --------------------------------------------------

    def marginal(self, t: float, stream: RngStream) -> float:
        """Unconditioned value S(t)."""
        if not t > 0.0:
            raise ParameterError(f"need t > 0, got {t}")
        sigma = float(sample_standard_stable(self.alpha, stream))
        return (self.time_scale * t) ** (1.0 / self.alpha) * sigma

    def value_below(self, t: float, z: float, stream: RngStream) -> float:
        """S(t) conditional on S(t) <= z, by plain rejection."""
        if not t > 0.0:
            raise ParameterError(f"need t > 0, got {t}")
        if z <= 0.0:
            raise ParameterError(f"need z > 0, got {z}")
        rejections = 0
        while True:
            s = self.marginal(t, stream)
            if s <= z:
                return s
            rejections += 1
            if rejections == _WARN_REJECTIONS:
                warnings.warn(
                    f"conditioning S({t}) <= {z} has acceptance below 1e-6",
                    LowAcceptanceWarning,
                    stacklevel=2,
                )

    # -- tilted component given the carrier value -----------------------------

    def tilted_given_sum(self, t: float, s: float, q: float, r: float, stream: RngStream) -> float:
        """Tilted-component value X1(t) given X1(t) + X2(t) = s.

        X1 has jump density gamma * exp(-q x) * x**(-1-alpha) on (0, r] and X2
        the complementary (1 - exp(-q x)) part.  The jump-count variable kappa
        is drawn from the normalized series C_k by inversion; the series is
        truncated only after its geometric tail bound is negligible.
        """
        if not t > 0.0:
            raise ParameterError(f"need t > 0, got {t}")
        if not 0.0 < s <= r:
            raise ParameterError(f"need 0 < s <= r, got s={s}, r={r}")
        if q < 0.0:
            raise ParameterError(f"need q >= 0, got {q}")
        if q == 0.0:
            return s  # the complementary part vanishes, so X1(t) = s

        a = self.alpha
        b = 1.0 - a
        log_b_term = math.log(s) * b + math.log(t * self.gamma * q * gamma_fn(b))
        log_c = [0.0]
        k = 0
        while True:
            nxt = (k + 1) * log_b_term - gammaln(k + 2) - gammaln(1.0 + (k + 1) * b)
            if nxt - log_c[-1] < _LOG_HALF and nxt < max(log_c) - 40.0:
                break
            log_c.append(nxt)
            k += 1
        peak = max(log_c)
        weights = np.exp(np.array(log_c) - peak)
        # ratios are decreasing, so once below 1/2 the tail is geometric
        tail_bound = 2.0 * math.exp(nxt - peak)
        assert tail_bound <= 1e-12 * weights.sum()

        tau = self.time_scale * t
        scale = tau ** (-1.0 / a)
        itg = self._integrand
        m = itg.m_bound
        # per-branch kernel bounds: the zero-jump atom proposes x = s only,
        # so its envelope uses the bound at that point; the jump branches
        # propose over (0, s], so theirs uses the bound over that range.
        # With the single global bound the loop stalls whenever the
        # standardized left value sits far out in either kernel tail.
        h_atom = itg.h_sup(scale * s)
        h_jump = itg.h_sup(min(itg.x_peak, scale * s))
        log_h_atom = math.log(h_atom)
        log_h_jump = math.log(h_jump)
        weights[0] *= math.exp(-q * s) * h_atom / m
        weights[1:] *= h_jump / m
        while True:
            kappa = stream.weighted_index(weights)
            theta = stream.uniform(0.0, math.pi)
            if kappa == 0:
                log_acc = itg.log_h(scale * s, theta) - log_h_atom
                x = s
            else:
                x = s * stream.beta(1.0, kappa * b)
                if x <= 0.0:
                    continue  # float underflow; the proposal is a.s. interior
                omega = stream.dirichlet(np.full(kappa, b))
                qgap = q * (s - x)
                log_rho = sum(_log_psi(qgap * w) for w in omega)
                log_acc = log_rho - q * x + itg.log_h(scale * x, theta) - log_h_jump
            if math.log1p(-stream.uniform()) <= log_acc:
                return x

    def recover(self, t: float, state, q: float, r: float, stream: RngStream) -> float:
        """Target-component left value from the carrier's left value."""
        s = float(state)
        if s == 0.0:
            return 0.0
        if q == 0.0:
            return s
        return self.tilted_given_sum(t, s, q, r, stream)
