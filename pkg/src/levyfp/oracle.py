"""Independent approximate simulation and the statistical test kit.

The oracle replaces a model's small jumps (below ``epsilon``) by nothing or
by their mean drift and simulates the remaining compound Poisson process
jump by jump with exact exponential event times, so its only bias is the
epsilon cutoff.  It shares no sampling code with the exact engines beyond
the model definitions, which is what makes the agreement tests meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaincc
from scipy.stats import kstest, ks_2samp

from .errors import ConfigError, DegenerateSampleError, ParameterError, UnsupportedModelError
from .events import BVExitEvent, FirstPassageEvent
from .gamma_carrier import GammaCarrier
from .mixture_carrier import MixtureCarrier
from .models import Boundary, TiltedTruncatedModel
from .rng import RngStream
from .stable_carrier import StableCarrier

_MAX_CANDIDATES = 1e8


@dataclass(frozen=True)
class TruncationScheme:
    """Small-jump cutoff, optionally compensated by the removed mean drift."""

    epsilon: float
    compensate_drift: bool = False

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")


# ---------------------------------------------------------------------------
# envelope decomposition of the truncated target measure
# ---------------------------------------------------------------------------


class _Part:
    """One thinnable envelope piece of the truncated jump measure."""

    __slots__ = ("mass", "sample", "accept")

    def __init__(self, mass, sample, accept):
        self.mass = mass
        self.sample = sample
        self.accept = accept


def _power_part(coeff, exponent, lo, hi, accept):
    """Envelope coeff * x**(-1-exponent) on (lo, hi], exponent > 0."""
    lo_e = lo**-exponent
    hi_e = 0.0 if math.isinf(hi) else hi**-exponent
    mass = coeff * (lo_e - hi_e) / exponent

    def sample(stream):
        return (lo_e - stream.uniform() * (lo_e - hi_e)) ** (-1.0 / exponent)

    return _Part(mass, sample, accept)


def _carrier_parts(model: TiltedTruncatedModel, eps: float) -> list[_Part]:
    carrier, q, r = model.carrier, model.tilt, model.cutoff
    if carrier is None:
        return []
    if eps >= r:
        raise ParameterError(f"epsilon {eps} must sit below the carrier cutoff {r}")
    if isinstance(carrier, StableCarrier):
        comps = [(carrier.alpha, carrier.gamma)]
    elif isinstance(carrier, MixtureCarrier):
        comps = list(carrier.components)
    elif isinstance(carrier, GammaCarrier):
        hi = r if math.isfinite(r) else 1.0
        parts = [
            _Part(
                math.log(hi / eps),
                lambda stream, lo=eps, h=hi: lo * (h / lo) ** stream.uniform(),
                lambda x: math.exp(-x),
            )
        ]
        if math.isinf(r):
            # tail beyond 1: envelope exp(-x) dx, thinned by 1/x
            parts.append(
                _Part(
                    math.exp(-1.0),
                    lambda stream: 1.0 + stream.exponential(),
                    lambda x: 1.0 / x,
                )
            )
        return parts
    else:
        raise UnsupportedModelError(f"no oracle decomposition for carrier {carrier!r}")
    return [
        _power_part(g, a, eps, r, lambda x, q=q: math.exp(-q * x)) for a, g in comps
    ]


def _chi_parts(model: TiltedTruncatedModel) -> list[_Part]:
    chi = model.finite_part
    parts = [
        _Part(mass, lambda stream, s=size: s, lambda x: 1.0) for size, mass in chi.atoms
    ]
    if chi.density is not None:
        parts.append(_Part(chi.density.envelope_mass, chi.density.sample, chi.density.accept))
    return parts


def small_jump_mean(model: TiltedTruncatedModel, eps: float) -> float:
    """Mean drift of the jumps the truncation removes: integral of x over (0, eps]."""
    carrier, q, r = model.carrier, model.tilt, model.cutoff
    if carrier is None:
        return 0.0
    hi = min(eps, r)
    val, _ = quad(lambda x: x * carrier.levy_density(x) * math.exp(-q * x), 0.0, hi, limit=200)
    return val


class _JumpStream:
    """Accepted jumps of one truncated compound Poisson process, in time order."""

    __slots__ = ("parts", "weights", "rate", "stream", "clock", "candidates")

    def __init__(self, parts, stream):
        self.parts = parts
        self.weights = np.array([p.mass for p in parts])
        self.rate = float(self.weights.sum())
        self.stream = stream
        self.clock = 0.0
        self.candidates = 0

    def next_jump(self):
        """The next accepted (time, size), or None when the rate is 0."""
        if self.rate == 0.0:
            return None
        while True:
            self.clock += self.stream.exponential(1.0 / self.rate)
            self.candidates += 1
            if self.candidates > _MAX_CANDIDATES:
                raise ParameterError(
                    "oracle path exceeded 1e8 candidate jumps; epsilon is too small"
                )
            part = self.parts[self.stream.weighted_index(self.weights)]
            x = part.sample(self.stream)
            if self.stream.uniform() <= part.accept(x):
                return self.clock, x


def _check_budget(rate: float, horizon: float) -> None:
    if math.isfinite(horizon) and rate * horizon > _MAX_CANDIDATES:
        raise ParameterError(
            f"expected jump count {rate * horizon:.3g} exceeds 1e8; epsilon is too small"
        )


def _first_touch(gap, lo: float, hi: float) -> float:
    """Bisect the nondecreasing ``gap`` for its first positive point in (lo, hi]."""
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def oracle_fpe(
    model: TiltedTruncatedModel,
    boundary: Boundary | None,
    horizon: float,
    scheme: TruncationScheme,
    stream: RngStream,
) -> FirstPassageEvent:
    """Approximate passage event of the epsilon-truncated target.

    Exact in distribution when the model is pure compound Poisson; otherwise
    biased by the removed small jumps, with the bias vanishing as epsilon
    goes to 0.
    """
    if model.drift != 0.0:
        raise ConfigError("oracle targets are pure-jump; drift rides on the two-sided oracles")
    if boundary is None and not math.isfinite(horizon):
        raise ConfigError("an infinite boundary requires a finite horizon")
    parts = _carrier_parts(model, scheme.epsilon) + _chi_parts(model)
    drift = small_jump_mean(model, scheme.epsilon) if scheme.compensate_drift else 0.0
    jumps = _JumpStream(parts, stream)
    _check_budget(jumps.rate, horizon)
    # between jumps the value moves at `drift` and the boundary only falls,
    # so the value-boundary gap is nondecreasing on every segment
    may_touch = boundary is not None and (drift > 0.0 or boundary.constant_level() is None)
    z = 0.0
    t_prev = 0.0
    while True:
        nxt = jumps.next_jump()
        t_next = horizon if nxt is None else min(nxt[0], horizon)
        if may_touch:
            def gap(u, base=z):
                return base + drift * u - boundary.value(u)

            if gap(t_next) > 0.0:
                touch = _first_touch(gap, t_prev, t_next)
                return FirstPassageEvent(T=touch, z_left=z + drift * touch, jump=0.0, censored=False)
        if nxt is None or nxt[0] >= horizon:
            return FirstPassageEvent(
                T=horizon, z_left=z + drift * horizon, jump=0.0, censored=True
            )
        t_jump, size = nxt
        z += size
        val = z + drift * t_jump
        if boundary is not None and val > boundary.value(t_jump):
            return FirstPassageEvent(T=t_jump, z_left=val - size, jump=size, censored=False)
        t_prev = t_jump


class _MergedSides:
    """Plus/minus jump streams merged into one time-ordered signed stream."""

    __slots__ = ("plus", "minus", "pend_p", "pend_m")

    def __init__(self, plus: _JumpStream, minus: _JumpStream):
        self.plus = plus
        self.minus = minus
        self.pend_p = plus.next_jump()
        self.pend_m = minus.next_jump()

    def peek_time(self) -> float:
        tp = self.pend_p[0] if self.pend_p is not None else math.inf
        tm = self.pend_m[0] if self.pend_m is not None else math.inf
        return min(tp, tm)

    def pop(self):
        """Consume the earlier pending jump: (time, size_plus, size_minus)."""
        tp = self.pend_p[0] if self.pend_p is not None else math.inf
        tm = self.pend_m[0] if self.pend_m is not None else math.inf
        if tp <= tm:
            t, size = self.pend_p
            self.pend_p = self.plus.next_jump()
            return t, size, 0.0
        t, size = self.pend_m
        self.pend_m = self.minus.next_jump()
        return t, 0.0, size


def oracle_level_crossing(
    model_plus: TiltedTruncatedModel,
    model_minus: TiltedTruncatedModel,
    level: float,
    horizon: float,
    scheme: TruncationScheme,
    stream: RngStream,
) -> BVExitEvent:
    """Approximate level-crossing event of truncated Z = Z+ - Z-."""
    if model_plus.drift != 0.0:
        raise ConfigError("the increasing side must be driftless")
    comp_p = small_jump_mean(model_plus, scheme.epsilon) if scheme.compensate_drift else 0.0
    comp_m = small_jump_mean(model_minus, scheme.epsilon) if scheme.compensate_drift else 0.0
    drift_m = comp_m + model_minus.drift  # deterministic rate on the minus side
    net_drift = comp_p - drift_m
    merged = _MergedSides(
        _JumpStream(_carrier_parts(model_plus, scheme.epsilon) + _chi_parts(model_plus), stream),
        _JumpStream(_carrier_parts(model_minus, scheme.epsilon) + _chi_parts(model_minus), stream),
    )
    _check_budget(merged.plus.rate + merged.minus.rate, horizon)
    zp = zm = 0.0  # jump sums per side
    t_prev = 0.0
    while True:
        t_next = min(merged.peek_time(), horizon)
        if net_drift > 0.0:
            def gap(u, base=zp - zm):
                return base + net_drift * u - level

            if gap(t_next) > 0.0:
                touch = _first_touch(gap, t_prev, t_next)
                return BVExitEvent(
                    T=touch,
                    zp_left=zp + comp_p * touch,
                    zm_left=zm + drift_m * touch,
                    jp=0.0,
                    jm=0.0,
                    censored=False,
                )
        if t_next >= horizon:
            return BVExitEvent(
                T=horizon,
                zp_left=zp + comp_p * horizon,
                zm_left=zm + drift_m * horizon,
                jp=0.0,
                jm=0.0,
                censored=True,
            )
        t, jp, jm = merged.pop()
        zp += jp
        zm += jm
        net = (zp + comp_p * t) - (zm + drift_m * t)
        if jp > 0.0 and net > level:
            return BVExitEvent(
                T=t,
                zp_left=zp - jp + comp_p * t,
                zm_left=zm + drift_m * t,
                jp=jp,
                jm=0.0,
                censored=False,
            )
        t_prev = t


def oracle_interval_exit(
    model_plus: TiltedTruncatedModel,
    model_minus: TiltedTruncatedModel,
    a_minus: float,
    a_plus: float,
    horizon: float,
    scheme: TruncationScheme,
    stream: RngStream,
) -> BVExitEvent:
    """Approximate interval-exit event of truncated, driftless Z = Z+ - Z-."""
    if model_plus.drift != 0.0 or model_minus.drift != 0.0:
        raise ConfigError("interval exit requires both sides driftless")
    comp_p = small_jump_mean(model_plus, scheme.epsilon) if scheme.compensate_drift else 0.0
    comp_m = small_jump_mean(model_minus, scheme.epsilon) if scheme.compensate_drift else 0.0
    net_drift = comp_p - comp_m
    merged = _MergedSides(
        _JumpStream(_carrier_parts(model_plus, scheme.epsilon) + _chi_parts(model_plus), stream),
        _JumpStream(_carrier_parts(model_minus, scheme.epsilon) + _chi_parts(model_minus), stream),
    )
    _check_budget(merged.plus.rate + merged.minus.rate, horizon)
    zp = zm = 0.0
    t_prev = 0.0
    while True:
        t_next = min(merged.peek_time(), horizon)
        if net_drift != 0.0:
            sign = 1.0 if net_drift > 0.0 else -1.0

            def gap(u, base=zp - zm):
                net = base + net_drift * u
                return net - a_plus if sign > 0.0 else -a_minus - net

            if gap(t_next) > 0.0:
                touch = _first_touch(gap, t_prev, t_next)
                return BVExitEvent(
                    T=touch,
                    zp_left=zp + comp_p * touch,
                    zm_left=zm + comp_m * touch,
                    jp=0.0,
                    jm=0.0,
                    censored=False,
                )
        if t_next >= horizon:
            return BVExitEvent(
                T=horizon,
                zp_left=zp + comp_p * horizon,
                zm_left=zm + comp_m * horizon,
                jp=0.0,
                jm=0.0,
                censored=True,
            )
        t, jp, jm = merged.pop()
        zp += jp
        zm += jm
        net = (zp + comp_p * t) - (zm + comp_m * t)
        if net < -a_minus or net > a_plus:
            return BVExitEvent(
                T=t,
                zp_left=zp - jp + comp_p * t,
                zm_left=zm - jm + comp_m * t,
                jp=jp,
                jm=jm,
                censored=False,
            )
        t_prev = t


# ---------------------------------------------------------------------------
# closed-form / quadrature passage-time CDFs for constant levels
# ---------------------------------------------------------------------------


def eval_fpt_cdf(carrier, level: float, t: float) -> float:
    """P{passage time across the constant level <= t} for a bare carrier.

    Equals P{S(t) >= level}: the regularized upper incomplete gamma for the
    Gamma carrier, and the angle-quadrature stable CDF for the stable one.
    """
    if not level > 0.0:
        raise ParameterError(f"level must be > 0, got {level}")
    if t <= 0.0:
        return 0.0
    if isinstance(carrier, GammaCarrier):
        return float(gammaincc(t, level))
    if isinstance(carrier, StableCarrier):
        tau = carrier.time_scale * t
        return 1.0 - carrier.integrand.cdf(tau ** (-1.0 / carrier.alpha) * level)
    raise UnsupportedModelError(f"no passage-time CDF for carrier {carrier!r}")


# ---------------------------------------------------------------------------
# test statistics
# ---------------------------------------------------------------------------


def _check_sample(xs, name="sample"):
    arr = np.asarray(xs, dtype=float)
    if arr.size < 100:
        raise ParameterError(f"{name} needs at least 100 points, got {arr.size}")
    if np.ptp(arr) == 0.0:
        raise DegenerateSampleError(f"{name} is constant at {arr.flat[0]}")
    return arr


def ks_two_sample(xs, ys) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic with asymptotic p-value."""
    a = _check_sample(xs, "first sample")
    b = _check_sample(ys, "second sample")
    res = ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def ks_one_sample(xs, cdf) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test against a callable CDF."""
    a = _check_sample(xs)
    res = kstest(a, np.vectorize(cdf))
    return float(res.statistic), float(res.pvalue)


def moment_check(samples, mean: float, var: float) -> tuple[float, float]:
    """Z-scores of the sample mean and variance against analytic values.

    Standard errors are estimated from the sample itself (the variance one
    through the empirical fourth moment), so the scores are asymptotically
    standard normal under the null.
    """
    a = _check_sample(samples)
    n = a.size
    m = a.mean()
    centered = a - m
    s2 = float(np.dot(centered, centered)) / (n - 1)
    z_mean = (m - mean) / math.sqrt(s2 / n)
    m4 = float(np.mean(centered**4))
    se_var = math.sqrt(max(m4 - s2 * s2, 1e-300) / n)
    z_var = (s2 - var) / se_var
    return float(z_mean), float(z_var)
