"""Mixture carrier: finite sums of stable jump densities.

The carrier is the vector of independent stable subordinators S_i with jump
densities ``gamma_i * x**(-1-alpha_i)``; their sum crosses the boundary, and
every conditional draw keeps the per-component split so each component's
tilted part can be recovered independently afterwards.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaln

from ._rootfind import solve_increasing
from .errors import LowAcceptanceWarning, ParameterError
from .events import CrossingDraw
from .rng import RngStream
from .stable import sample_standard_stable
from .stable_carrier import StableCarrier

_BIG = 1e300
_WARN_REJECTIONS = 1_000_000


@dataclass(frozen=True)
class MixtureCarrier:
    """Sum of independent stable subordinators, one per (alpha_i, gamma_i).

    ``unit_scales[i]`` maps a unit-time component draw to the standard law:
    unit_scales[i] * S_i(1) is standard stable with index alpha_i.
    """

    components: tuple[tuple[float, float], ...]

    def __post_init__(self):
        comps = tuple((float(a), float(g)) for a, g in self.components)
        if len(comps) < 1:
            raise ParameterError("mixture needs at least one component")
        object.__setattr__(self, "components", comps)
        parts = tuple(StableCarrier(a, g) for a, g in comps)
        object.__setattr__(self, "_parts", parts)
        scales = np.array([p.time_scale ** (-1.0 / p.alpha) for p in parts])
        object.__setattr__(self, "unit_scales", scales)

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def parts(self) -> tuple[StableCarrier, ...]:
        return self._parts

    def levy_density(self, x: float) -> float:
        return sum(p.levy_density(x) for p in self._parts)

    def truncated_moment(self, k: int, q: float, r: float) -> float:
        return sum(p.truncated_moment(k, q, r) for p in self._parts)

    def _unit_draws(self, stream: RngStream) -> np.ndarray:
        """One S_i(1) per component."""
        return np.array(
            [sample_standard_stable(p.alpha, stream) / d for p, d in zip(self._parts, self.unit_scales)]
        )

    # -- passage time --------------------------------------------------------

    def passage_time(self, boundary, stream: RngStream):
        """First time the component sum crosses a non-increasing boundary.

        Returns ``(t1, draws)`` with draws the unit-time component values;
        t1 is the unique root of sum_i t**(1/alpha_i) * draws_i = boundary(t),
        evaluated in log-sum-exp form so widely split exponents coexist.
        """
        draws = self._unit_draws(stream)
        log_draws = np.log(draws)
        inv_alphas = np.array([1.0 / p.alpha for p in self._parts])

        def g(u: float) -> float:
            val = boundary.value(math.exp(u))
            if val <= 0.0:
                return _BIG
            terms = u * inv_alphas + log_draws
            peak = terms.max()
            lhs = peak + math.log(np.exp(terms - peak).sum())
            return lhs - math.log(val)

        return solve_increasing(g), draws

    # -- crossing pair -------------------------------------------------------

    def crossing_weights(self, z: float, w0: float) -> np.ndarray:
        """Creep weight (slope over Gamma(I)) followed by one weight per component."""
        n = self.size
        w = [w0 / gamma_fn(n)]
        for p in self._parts:
            a = p.alpha
            w.append(
                p.gamma
                * z ** (1.0 - a)
                * math.exp(gammaln(1.0 - a) - gammaln(n + 1.0 - a))
                / a
            )
        return np.array(w)

    def crossing(self, t: float, z: float, w0: float, stream: RngStream) -> CrossingDraw:
        """Component left values and the sum's jump, given passage at time t."""
        if not (t > 0.0 and z > 0.0):
            raise ParameterError(f"need t, z > 0, got ({t}, {z})")
        if w0 < 0.0:
            raise ParameterError(f"w0 must be >= 0, got {w0}")
        n = self.size
        weights = self.crossing_weights(z, w0)
        scales = np.array(
            [(p.time_scale * t) ** (-1.0 / p.alpha) for p in self._parts]
        )
        log_ms = [math.log(p.integrand.m_bound) for p in self._parts]
        ones = np.ones(n)
        while True:
            pick = stream.weighted_index(weights)
            omega = stream.dirichlet(ones)
            if pick == 0:
                s = z * omega
                v, creep = 0.0, True
            else:
                a_pick = self._parts[pick - 1].alpha
                b = stream.beta(float(n), 1.0 - a_pick)
                s = z * b * omega
                v = (z - s.sum()) / stream.beta(a_pick, 1.0)
                creep = False
                if not math.isfinite(v):
                    continue
            if np.any(s <= 0.0):
                continue  # Dirichlet underflow; proposals are a.s. interior
            log_u = math.log1p(-stream.uniform())
            acc = 0.0
            for i, p in enumerate(self._parts):
                acc += p.integrand.log_h(scales[i] * s[i], stream.uniform(0.0, math.pi)) - log_ms[i]
                if acc == -math.inf:
                    break
            if log_u <= acc:
                return CrossingDraw(s_left=float(s.sum()), jump=v, creep=creep, components=s)

    # -- conditioned marginal --------------------------------------------------

    def marginal(self, t: float, stream: RngStream) -> np.ndarray:
        if not t > 0.0:
            raise ParameterError(f"need t > 0, got {t}")
        inv_alphas = np.array([1.0 / p.alpha for p in self._parts])
        return t**inv_alphas * self._unit_draws(stream)

    def value_below(self, t: float, z: float, stream: RngStream) -> np.ndarray:
        """Component values at t conditional on their sum being <= z."""
        if z <= 0.0:
            raise ParameterError(f"need z > 0, got {z}")
        rejections = 0
        while True:
            s = self.marginal(t, stream)
            if s.sum() <= z:
                return s
            rejections += 1
            if rejections == _WARN_REJECTIONS:
                warnings.warn(
                    f"conditioning the mixture sum at t={t} below {z} has acceptance below 1e-6",
                    LowAcceptanceWarning,
                    stacklevel=2,
                )

    def recover(self, t: float, state, q: float, r: float, stream: RngStream) -> float:
        """Sum of per-component tilted values given each component's left value."""
        s = np.asarray(state, dtype=float)
        return sum(p.recover(t, si, q, r, stream) for p, si in zip(self._parts, s))
