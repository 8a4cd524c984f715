"""Declarative model layer: boundaries, finite measures, target models.

A target model is a carrier family (stable, stable mixture, or Gamma) whose
jump measure is exponentially tilted by ``exp(-tilt * x)`` and upper
truncated at ``cutoff``, plus a finite measure of extra jumps and an optional
nonnegative drift that only the two-sided engines consume.  Boundaries are
non-increasing and absolutely continuous with a right-derivative available
off a null set of kink points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, ParameterError, UnsupportedModelError
from .gamma_carrier import GammaCarrier
from .mixture_carrier import MixtureCarrier
from .rng import RngStream
from .stable_carrier import StableCarrier

__all__ = [
    "Boundary",
    "ConstantBoundary",
    "LinearBoundary",
    "PiecewiseLinearBoundary",
    "CallbackBoundary",
    "cap_boundary",
    "boundary_shift",
    "DensityPart",
    "FiniteMeasure",
    "EMPTY_MEASURE",
    "TiltedTruncatedModel",
    "UnitConversion",
    "id_moments",
    "reduce_gamma_model",
    "tempered_mixture_model",
]


# ---------------------------------------------------------------------------
# boundaries
# ---------------------------------------------------------------------------


class Boundary:
    """Non-increasing boundary with value, a.e. slope, shift, and rescale."""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def slope(self, t: float) -> float:
        """Right derivative at t (the kink set is null for passage times)."""
        raise NotImplementedError

    def shift(self, t0: float, z0: float) -> "Boundary":
        """The boundary u -> value(u + t0) - z0."""
        raise NotImplementedError

    def scale(self, time_factor: float, value_factor: float) -> "Boundary":
        """The boundary u -> value_factor * value(u / time_factor)."""
        raise NotImplementedError

    def constant_level(self) -> float | None:
        """The level if this boundary is constant, else None (enables fast paths)."""
        return None


def boundary_shift(boundary: Boundary, t0: float, z0: float) -> Boundary:
    """Restart view of a boundary from time t0 and accumulated level z0."""
    if t0 < 0.0:
        raise ParameterError(f"shift time must be >= 0, got {t0}")
    if not z0 < boundary.value(t0):
        raise ParameterError(
            f"z0={z0} is not below the boundary value {boundary.value(t0)} at t0={t0}; "
            "the iteration should have stopped"
        )
    return boundary.shift(t0, z0)


@dataclass(frozen=True)
class ConstantBoundary(Boundary):
    level: float

    def __post_init__(self):
        if not self.level > 0.0:
            raise ParameterError(f"constant boundary level must be > 0, got {self.level}")

    def value(self, t):
        return self.level

    def slope(self, t):
        return 0.0

    def shift(self, t0, z0):
        return ConstantBoundary(self.level - z0)

    def scale(self, time_factor, value_factor):
        return ConstantBoundary(self.level * value_factor)

    def constant_level(self):
        return self.level


@dataclass(frozen=True)
class LinearBoundary(Boundary):
    intercept: float
    gradient: float

    def __post_init__(self):
        if not self.intercept > 0.0:
            raise ParameterError(f"boundary value at 0+ must be > 0, got {self.intercept}")
        if self.gradient > 0.0:
            raise ParameterError(f"boundary must be non-increasing, got slope {self.gradient}")

    def value(self, t):
        return self.intercept + self.gradient * t

    def slope(self, t):
        return self.gradient

    def shift(self, t0, z0):
        return LinearBoundary(self.intercept + self.gradient * t0 - z0, self.gradient)

    def scale(self, time_factor, value_factor):
        return LinearBoundary(
            self.intercept * value_factor, self.gradient * value_factor / time_factor
        )

    def constant_level(self):
        return self.intercept if self.gradient == 0.0 else None


@dataclass(frozen=True)
class PiecewiseLinearBoundary(Boundary):
    """Knot interpolation; constant extension before the first and after the
    last knot, right-derivative at the knots themselves."""

    times: tuple
    values: tuple

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size == 0:
            raise ParameterError("knot times and values must be equal-length 1-d sequences")
        if np.any(np.diff(times) <= 0.0) or times[0] < 0.0:
            raise ParameterError("knot times must be strictly increasing and >= 0")
        if np.any(np.diff(values) > 0.0):
            raise ParameterError("knot values must be non-increasing")
        if not values[0] > 0.0:
            raise ParameterError(f"boundary value at 0+ must be > 0, got {values[0]}")
        object.__setattr__(self, "times", tuple(times))
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "_t", times)
        object.__setattr__(self, "_v", values)

    def value(self, t):
        return float(np.interp(t, self._t, self._v))

    def slope(self, t):
        i = int(np.searchsorted(self._t, t, side="right")) - 1
        if i < 0 or i >= self._t.size - 1:
            return 0.0
        return (self._v[i + 1] - self._v[i]) / (self._t[i + 1] - self._t[i])

    def shift(self, t0, z0):
        keep = self._t > t0
        times = np.concatenate(([0.0], self._t[keep] - t0))
        values = np.concatenate(([self.value(t0)], self._v[keep])) - z0
        return PiecewiseLinearBoundary(tuple(times), tuple(values))

    def scale(self, time_factor, value_factor):
        return PiecewiseLinearBoundary(
            tuple(np.asarray(self._t) * time_factor),
            tuple(np.asarray(self._v) * value_factor),
        )


class CallbackBoundary(Boundary):
    """Caller-supplied (value, slope) pair.

    Monotonicity is the caller's responsibility; construction only
    spot-checks a coarse grid and the positivity of the value at 0+.
    """

    _PROBE = (1e-6, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)

    def __init__(self, fn: Callable[[float], float], slope_fn: Callable[[float], float]):
        self._fn = fn
        self._slope = slope_fn
        probes = [fn(t) for t in self._PROBE]
        if not probes[0] > 0.0:
            raise ParameterError(f"boundary value at 0+ must be > 0, got {probes[0]}")
        if any(b > a + 1e-12 for a, b in zip(probes, probes[1:])):
            raise ParameterError("callback boundary increases on the probe grid")

    def value(self, t):
        return self._fn(t)

    def slope(self, t):
        return self._slope(t)

    def shift(self, t0, z0):
        fn, slope = self._fn, self._slope
        return CallbackBoundary(lambda u: fn(u + t0) - z0, lambda u: slope(u + t0))

    def scale(self, time_factor, value_factor):
        fn, slope = self._fn, self._slope
        return CallbackBoundary(
            lambda u: value_factor * fn(u / time_factor),
            lambda u: value_factor / time_factor * slope(u / time_factor),
        )


@dataclass(frozen=True)
class _CappedBoundary(Boundary):
    inner: Boundary
    cap: float

    def value(self, t):
        return min(self.inner.value(t), self.cap)

    def slope(self, t):
        # min(b, r): where b sits at or below r the right derivative is b's
        return self.inner.slope(t) if self.inner.value(t) <= self.cap else 0.0

    def shift(self, t0, z0):
        return cap_boundary(self.inner.shift(t0, z0), self.cap - z0)

    def scale(self, time_factor, value_factor):
        return cap_boundary(
            self.inner.scale(time_factor, value_factor), self.cap * value_factor
        )


def cap_boundary(boundary: Boundary | None, r: float) -> Boundary | None:
    """min(boundary, r); None stands for the boundary that is identically infinite."""
    if not r > 0.0:
        raise ParameterError(f"cap must be > 0, got {r}")
    if not math.isfinite(r):
        return boundary
    if boundary is None:
        return ConstantBoundary(r)
    level = boundary.constant_level()
    if level is not None:
        return ConstantBoundary(min(level, r))
    return _CappedBoundary(boundary, r)


# ---------------------------------------------------------------------------
# finite measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityPart:
    """Thinning description of an absolutely continuous finite part.

    ``sample`` draws from the normalized envelope measure, ``accept`` gives
    the pointwise density ratio (bounded by 1) of the target against the
    envelope, and ``envelope_mass`` is the envelope's total mass.
    """

    envelope_mass: float
    sample: Callable[[RngStream], float]
    accept: Callable[[float], float]

    def __post_init__(self):
        if not self.envelope_mass > 0.0 or not math.isfinite(self.envelope_mass):
            raise ParameterError(f"envelope mass must be finite and > 0, got {self.envelope_mass}")


@dataclass(frozen=True)
class FiniteMeasure:
    """Finite jump measure: point masses plus an optional density part."""

    atoms: tuple = ()
    density: DensityPart | None = None

    def __post_init__(self):
        atoms = tuple((float(s), float(m)) for s, m in self.atoms)
        for size, mass in atoms:
            if not (size > 0.0 and mass > 0.0):
                raise ParameterError(f"atoms need positive size and mass, got {(size, mass)}")
        object.__setattr__(self, "atoms", atoms)

    @property
    def envelope_mass(self) -> float:
        mass = sum(m for _, m in self.atoms)
        if self.density is not None:
            mass += self.density.envelope_mass
        return mass

    @property
    def is_empty(self) -> bool:
        return not self.atoms and self.density is None


EMPTY_MEASURE = FiniteMeasure()


# ---------------------------------------------------------------------------
# the target model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TiltedTruncatedModel:
    """Target jump measure exp(-tilt*x) * 1{x <= cutoff} * carrier + finite part.

    ``carrier`` is a StableCarrier, MixtureCarrier, GammaCarrier, or None for
    a pure compound-Poisson target.  The Gamma carrier has its tilt built in,
    so ``tilt`` must stay 0 there.  ``drift`` is a nonnegative deterministic
    rate consumed only on the decreasing side of the two-sided engines.
    """

    carrier: object | None
    tilt: float = 0.0
    cutoff: float = math.inf
    finite_part: FiniteMeasure = field(default_factory=lambda: EMPTY_MEASURE)
    drift: float = 0.0

    def __post_init__(self):
        if self.tilt < 0.0:
            raise ParameterError(f"tilt must be >= 0, got {self.tilt}")
        if not self.cutoff > 0.0:
            raise ParameterError(f"cutoff must be > 0, got {self.cutoff}")
        if self.drift < 0.0:
            raise ParameterError(f"drift must be >= 0, got {self.drift}")
        if self.carrier is not None and getattr(self.carrier, "builtin_tilt", False):
            if self.tilt != 0.0:
                raise ConfigError("the Gamma carrier carries its own tilt; set tilt=0")

    @property
    def is_empty(self) -> bool:
        return self.carrier is None and self.finite_part.is_empty

    def without_drift(self) -> "TiltedTruncatedModel":
        if self.drift == 0.0:
            return self
        return TiltedTruncatedModel(self.carrier, self.tilt, self.cutoff, self.finite_part, 0.0)


def id_moments(model: TiltedTruncatedModel, t: float) -> tuple[float, float]:
    """Mean and variance of the model's value at time t.

    Both are t times the first/second moment of the jump measure; atoms
    contribute in closed form, the carrier part through its truncated-moment
    integrals.  A finite part with a density component has no computable
    moments here.
    """
    if not t > 0.0:
        raise ParameterError(f"need t > 0, got {t}")
    if model.finite_part.density is not None:
        raise UnsupportedModelError("moments of a density finite part are not available")
    if model.drift != 0.0:
        raise UnsupportedModelError("id_moments describes the pure-jump part; strip drift first")
    mean = sum(m * s for s, m in model.finite_part.atoms)
    var = sum(m * s * s for s, m in model.finite_part.atoms)
    if model.carrier is not None:
        mean += model.carrier.truncated_moment(1, model.tilt, model.cutoff)
        var += model.carrier.truncated_moment(2, model.tilt, model.cutoff)
    return t * mean, t * var


# ---------------------------------------------------------------------------
# reductions to standard form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitConversion:
    """Maps events of a standardized model back to the original units.

    Standard-model times divide by ``time_divisor`` and values by
    ``value_divisor`` to recover the original process.
    """

    time_divisor: float
    value_divisor: float

    def time(self, t: float) -> float:
        return t / self.time_divisor

    def value(self, x: float) -> float:
        return x / self.value_divisor

    def event(self, ev):
        from .events import FirstPassageEvent

        return FirstPassageEvent(
            T=self.time(ev.T),
            z_left=self.value(ev.z_left),
            jump=self.value(ev.jump),
            censored=ev.censored,
        )


def reduce_gamma_model(
    intensity: float,
    tilt: float,
    cutoff: float,
    finite_part: FiniteMeasure = EMPTY_MEASURE,
    boundary: Boundary | None = None,
):
    """Rescale a general Gamma-type model to the standard Gamma carrier.

    A target with jump density ``intensity * exp(-tilt*x)/x`` on (0, cutoff]
    equals, after speeding time up by ``intensity`` and values by ``tilt``,
    the standard model with cutoff ``tilt*cutoff``; the boundary transforms
    to u -> tilt * c(u / intensity).  Returns (model, boundary, conversion);
    apply ``conversion`` to sampled events to recover original units.
    """
    if not (intensity > 0.0 and tilt > 0.0):
        raise ParameterError(f"need intensity, tilt > 0, got ({intensity}, {tilt})")
    if not cutoff > 0.0:
        raise ParameterError(f"cutoff must be > 0, got {cutoff}")
    atoms = tuple((s * tilt, m) for s, m in finite_part.atoms)
    density = finite_part.density
    if density is not None:
        inner_sample, inner_accept = density.sample, density.accept
        density = DensityPart(
            envelope_mass=density.envelope_mass,
            sample=lambda stream: tilt * inner_sample(stream),
            accept=lambda x: inner_accept(x / tilt),
        )
    model = TiltedTruncatedModel(
        carrier=GammaCarrier(),
        tilt=0.0,
        cutoff=tilt * cutoff,
        finite_part=FiniteMeasure(atoms=atoms, density=density),
    )
    std_boundary = None if boundary is None else boundary.scale(intensity, tilt)
    return model, std_boundary, UnitConversion(time_divisor=intensity, value_divisor=tilt)


def tempered_mixture_model(
    components,
    finite_part: FiniteMeasure = EMPTY_MEASURE,
) -> TiltedTruncatedModel:
    """Normalize per-component (alpha, gamma, tilt_i, cutoff_i) to one model.

    Heterogeneous tilts and cutoffs are brought to the common pair
    (max tilt, min cutoff); whatever jump mass that removes is finite and is
    pushed into the finite part as a thinned density.
    """
    comps = [(float(a), float(g), float(q), float(r)) for a, g, q, r in components]
    if not comps:
        raise ParameterError("need at least one component")
    for a, g, q, r in comps:
        if q < 0.0 or not r > 0.0:
            raise ParameterError(f"tilt must be >= 0 and cutoff > 0, got ({q}, {r})")
    q_max = max(q for _, _, q, _ in comps)
    r_min = min(r for _, _, _, r in comps)
    carrier = MixtureCarrier(tuple((a, g) for a, g, _, _ in comps))

    leftovers = [(a, g, q, r) for a, g, q, r in comps if q < q_max or r > r_min]
    density = finite_part.density
    if leftovers:
        if density is not None:
            raise UnsupportedModelError(
                "cannot combine a caller-supplied density part with the normalization topup"
            )
        density = _mixture_topup(leftovers, q_max, r_min)
    return TiltedTruncatedModel(
        carrier=carrier,
        tilt=q_max,
        cutoff=r_min,
        finite_part=FiniteMeasure(atoms=finite_part.atoms, density=density),
    )


def _mixture_topup(leftovers, q_max: float, r_min: float) -> DensityPart:
    """Thinned envelope for sum_i gamma_i x**(-1-a_i) (e^{-q_i x}1{x<=r_i} - e^{-q_max x}1{x<=r_min}).

    The envelope replaces e^{-q_i x} - e^{-q_max x} by (q_max - q_i) x below
    r_min and drops the exponential above it, so each piece has a closed-form
    inverse CDF and the density ratio stays within [0, 1].
    """
    pieces = []  # (mass, sampler)
    for a, g, q, r in leftovers:
        if q < q_max:
            mass_low = g * (q_max - q) * r_min ** (1.0 - a) / (1.0 - a)
            pieces.append((mass_low, _power_sampler(a - 1.0, 0.0, r_min)))
        if r > r_min:
            mass_tail = g * (r_min**-a - (0.0 if math.isinf(r) else r**-a)) / a
            pieces.append((mass_tail, _power_sampler(a, r_min, r)))
    masses = np.array([m for m, _ in pieces])
    samplers = [s for _, s in pieces]
    total = float(masses.sum())

    def envelope_density(x: float) -> float:
        out = 0.0
        for a, g, q, r in leftovers:
            if q < q_max and x <= r_min:
                out += g * (q_max - q) * x**-a
            if r > r_min and r_min < x <= r:
                out += g * x ** (-1.0 - a)
        return out

    def target_density(x: float) -> float:
        out = 0.0
        for a, g, q, r in leftovers:
            if x <= min(r, r_min):
                out += g * x ** (-1.0 - a) * (math.exp(-q * x) - math.exp(-q_max * x))
            elif r_min < x <= r:
                out += g * x ** (-1.0 - a) * math.exp(-q * x)
        return out

    def sample(stream: RngStream) -> float:
        return samplers[stream.weighted_index(masses)](stream)

    def accept(x: float) -> float:
        env = envelope_density(x)
        return target_density(x) / env if env > 0.0 else 0.0

    return DensityPart(envelope_mass=total, sample=sample, accept=accept)


def _power_sampler(exponent: float, lo: float, hi: float):
    """Inverse-CDF sampler for density prop. to x**(-1-exponent) on (lo, hi].

    Positive exponents are true power-law tails (then lo must be > 0 and hi
    may be inf); negative exponents are integrable at 0 (then hi must be
    finite and lo may be 0).
    """
    if exponent > 0.0:
        lo_e = lo**-exponent
        hi_e = 0.0 if math.isinf(hi) else hi**-exponent

        def draw(stream: RngStream) -> float:
            return (lo_e - stream.uniform() * (lo_e - hi_e)) ** (-1.0 / exponent)

    else:
        p = -exponent  # density x**(p-1), p > 0
        lo_p = lo**p
        hi_p = hi**p

        def draw(stream: RngStream) -> float:
            return (lo_p + stream.uniform() * (hi_p - lo_p)) ** (1.0 / p)

    return draw
