"""Gamma carrier: conditional draws for the standard Gamma subordinator.

The standard form has jump density ``exp(-x)/x``, so S(t) ~ Gamma(t, 1) and
exponential tilting is built into the process: the crossing draw's left value
already is the target component and no recovery step exists.  General
``(gamma, q, r)`` Gamma models are first rescaled to this form (see
:func:`levyfp.models.reduce_gamma_model`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.special import beta as beta_fn
from scipy.special import gammainc, gammaincc
from scipy.special import gamma as gamma_fn

from ._rootfind import solve_increasing
from .errors import LowAcceptanceWarning, ParameterError
from .events import CrossingDraw
from .rng import RngStream

_WARN_REJECTIONS = 1_000_000


def crossing_weights(t: float, z: float, w0: float) -> tuple[float, float, float]:
    """Branch weights (creep, jump-below-z, jump-above-z) of the crossing draw."""
    if not (t > 0.0 and z > 0.0):
        raise ParameterError(f"need t, z > 0, got ({t}, {z})")
    if w0 < 0.0:
        raise ParameterError(f"w0 must be >= 0, got {w0}")
    w1 = 2.0 * beta_fn(t, 0.5) * z / math.e
    w2 = 1.0 / t
    return w0, w1, w2


def accept_h1(z: float, x: float, v: float) -> float:
    """Acceptance for the v <= z proposal branch; bounded by 1."""
    if not (0.0 <= z - x < v <= z) or not 0.0 < x < z:
        return 0.0  # sqrt(u)*log(1/u) -> 0 at both edges of x
    u = 1.0 - x / z
    return math.exp(z - x - v) * math.sqrt(u) * -math.log1p(-x / z) * (math.e / 2.0)


def accept_h2(z: float, x: float, v: float) -> float:
    """Acceptance for the v > z proposal branch; bounded by 1."""
    if not (0.0 <= z - x < z < v):
        return 0.0
    return z * math.exp(-x) / v


def proposal_rho1(t: float, z: float, x: float, v: float) -> float:
    """Density of the (Beta(t,1/2), log-uniform overshoot) proposal pair."""
    if not (0.0 < x < z and 0.0 <= z - x < v <= z):
        return 0.0
    u = 1.0 - x / z
    return (x / z) ** (t - 1.0) * u**-0.5 / (beta_fn(t, 0.5) * z) / (v * (-math.log1p(-x / z)))


def proposal_rho2(t: float, z: float, x: float, v: float) -> float:
    """Density of the (Beta(t,1), shifted-exponential overshoot) proposal pair."""
    if not (0.0 < x <= z and 0.0 <= z - x < z <= v):
        return 0.0
    return t * (x / z) ** (t - 1.0) * math.exp(z - v) / z


@dataclass(frozen=True)
class GammaCarrier:
    """Standard Gamma subordinator; unit shape and rate, built-in tilt."""

    builtin_tilt = True

    def levy_density(self, x: float) -> float:
        return math.exp(-x) / x if x > 0 else 0.0

    def truncated_moment(self, k: int, q: float, r: float) -> float:
        if q != 0.0:
            raise ParameterError("the Gamma carrier carries its own tilt; q must be 0")
        tail = gammainc(k, r) if math.isfinite(r) else 1.0
        return gamma_fn(k) * tail

    # -- passage time --------------------------------------------------------

    def passage_time(self, boundary, stream: RngStream):
        """First time S crosses a non-increasing boundary, by inversion.

        Returns ``(t1, u)`` where t1 solves Q(t1, boundary(t1)) = u for the
        regularized upper incomplete gamma Q; the left side is continuous and
        strictly increasing in t.
        """
        u = stream.uniform()
        while u == 0.0:  # open-interval hygiene for the inversion
            u = stream.uniform()

        def g(w: float) -> float:
            t = math.exp(w)
            a = boundary.value(t)
            return gammaincc(t, a if a > 0.0 else 0.0) - u

        return solve_increasing(g), u

    # -- crossing pair -------------------------------------------------------

    def crossing(self, t: float, z: float, w0: float, stream: RngStream) -> CrossingDraw:
        """(S(tau-), jump) given that the passage time across the boundary is t.

        Three proposal branches: creep (weight w0), a jump ending at or below
        z, and a jump overshooting z; the jump branches are thinned by the
        acceptance functions above, both bounded by 1.
        """
        weights = crossing_weights(t, z, w0)
        while True:
            branch = stream.weighted_index(weights)
            if branch == 0:
                return CrossingDraw(s_left=z, jump=0.0, creep=True)
            if branch == 1:
                b = stream.beta(t, 0.5)
                xi = stream.uniform()
                x = z * b
                v = z * math.exp(xi * math.log1p(-b)) if b < 1.0 else 0.0
                eta = accept_h1(z, x, v)
            else:
                b = stream.beta(t, 1.0)
                xi = stream.exponential()
                x = z * b
                v = z + xi
                eta = accept_h2(z, x, v)
            if eta > 0.0 and stream.uniform() <= eta:
                return CrossingDraw(s_left=x, jump=v, creep=False)

    # -- conditioned marginal --------------------------------------------------

    def marginal(self, t: float, stream: RngStream) -> float:
        if not t > 0.0:
            raise ParameterError(f"need t > 0, got {t}")
        return stream.gamma(t, 1.0)

    def value_below(self, t: float, z: float, stream: RngStream) -> float:
        """Gamma(t, 1) conditional on the draw being <= z, by rejection."""
        if not t > 0.0:
            raise ParameterError(f"need t > 0, got {t}")
        if z <= 0.0:
            raise ParameterError(f"need z > 0, got {z}")
        rejections = 0
        while True:
            s = stream.gamma(t, 1.0)
            if s <= z:
                return s
            rejections += 1
            if rejections == _WARN_REJECTIONS:
                warnings.warn(
                    f"conditioning Gamma({t},1) <= {z} has acceptance below 1e-6",
                    LowAcceptanceWarning,
                    stacklevel=2,
                )

    def recover(self, t: float, state, q: float, r: float, stream: RngStream) -> float:
        """The crossing/marginal left value already is the target component."""
        return float(state)
