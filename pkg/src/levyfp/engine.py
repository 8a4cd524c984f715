"""Passage-event engines: subordinator vs boundary, level crossing, interval exit.

Each engine iterates a renewal step: sample the carrier's passage event
against the capped current boundary, recover the target's share of it, fold
in the finite part's first jump, then either stop (crossing or horizon) or
shift the boundary and continue.  Every draw comes from one stream, so runs
are reproducible from (seed, stream id, model, boundary).
"""

from __future__ import annotations

import math
from collections import deque

from .errors import ConfigError, GuardTripError, ParameterError
from .events import BVExitEvent, FirstPassageEvent, IterationRecord, IterationTrace
from .models import (
    Boundary,
    ConstantBoundary,
    FiniteMeasure,
    TiltedTruncatedModel,
    boundary_shift,
    cap_boundary,
)
from .rng import RngStream

DEFAULT_GUARD = 1_000_000
_TIE_RETRIES = 8
_TAIL_KEEP = 64


class _NullCarrier:
    """Stand-in for a pure compound-Poisson target: the carrier never crosses."""

    def passage_time(self, boundary, stream):
        return math.inf, None

    def value_below(self, t, z, stream):
        return 0.0

    def recover(self, t, state, q, r, stream):
        return 0.0


_NULL_CARRIER = _NullCarrier()


# ---------------------------------------------------------------------------
# first jump of the finite part
# ---------------------------------------------------------------------------


def first_jump_cp(chi: FiniteMeasure, horizon: float, stream: RngStream):
    """Time and size of the finite part's first jump, censored at the horizon.

    Returns ``(D, J)`` with D = min(first jump time, horizon) and J the jump
    size (0 when the horizon arrives first).  Atoms are sampled directly;
    a density part is thinned against its envelope, which preserves exact
    event times.
    """
    if horizon <= 0.0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")
    if chi.is_empty:
        return horizon, 0.0
    weights = [m for _, m in chi.atoms]
    if chi.density is not None:
        weights.append(chi.density.envelope_mass)
    rate = sum(weights)
    t = 0.0
    while True:
        t += stream.exponential(1.0 / rate)
        if t >= horizon:
            return horizon, 0.0
        pick = stream.weighted_index(weights)
        if pick < len(chi.atoms):
            return t, chi.atoms[pick][0]
        x = chi.density.sample(stream)
        if stream.uniform() <= chi.density.accept(x):
            return t, x


def _first_jump_two_sided(chi_plus, chi_minus, horizon, stream):
    """First jump of the joint plus/minus finite part: (D, J_plus, J_minus)."""
    parts = []
    for sign, chi in ((0, chi_plus), (1, chi_minus)):
        for size, mass in chi.atoms:
            parts.append((mass, sign, size, None))
        if chi.density is not None:
            parts.append((chi.density.envelope_mass, sign, None, chi.density))
    if not parts:
        return horizon, 0.0, 0.0
    weights = [p[0] for p in parts]
    rate = sum(weights)
    t = 0.0
    while True:
        t += stream.exponential(1.0 / rate)
        if t >= horizon:
            return horizon, 0.0, 0.0
        _, sign, size, density = parts[stream.weighted_index(weights)]
        if density is None:
            return (t, size, 0.0) if sign == 0 else (t, 0.0, size)
        x = density.sample(stream)
        if stream.uniform() <= density.accept(x):
            return (t, x, 0.0) if sign == 0 else (t, 0.0, x)


# ---------------------------------------------------------------------------
# Table-1 style single-subordinator iteration
# ---------------------------------------------------------------------------


def _classify_jump(v: float, q: float, r: float, stream: RngStream) -> float:
    """Keep a carrier jump with probability exp(-q v) if v <= r, else drop it."""
    if v <= 0.0:
        return 0.0
    u = stream.uniform()
    return v if (v <= r and u <= math.exp(-q * v)) else 0.0


def _run_passage(model, boundary, horizon, stream, guard, trace):
    """Core renewal loop shared by the public engines.

    ``boundary`` may be None, which stands for the boundary that is
    identically infinite (then the horizon must be finite).
    """
    carrier = model.carrier if model.carrier is not None else _NULL_CARRIER
    q, r, chi = model.tilt, model.cutoff, model.finite_part
    remaining = horizon
    b_cur = boundary
    T = 0.0
    H = 0.0
    D = 0.0
    J = 0.0
    tail = deque(maxlen=_TAIL_KEEP)
    iteration = 0
    while True:
        iteration += 1
        if iteration > guard:
            raise GuardTripError(
                f"passage loop exceeded the {guard}-iteration guard",
                iterations=iteration,
                trace_tail=tail,
            )
        if D == 0.0:
            D, J = first_jump_cp(chi, remaining, stream) if not chi.is_empty else (remaining, 0.0)
        capped = cap_boundary(b_cur, r)
        if capped is None:
            t1 = math.inf
        else:
            t1, _ = carrier.passage_time(capped, stream)
            retries = 0
            while t1 == D:  # probability-zero float tie; redraw the carrier clock
                retries += 1
                if retries > _TIE_RETRIES:
                    raise ConfigError(f"carrier passage time kept tying the jump clock at {D}")
                t1, _ = carrier.passage_time(capped, stream)
        if t1 < D:
            branch = "cross"
            t = t1
            z = capped.value(t)
            w0 = max(0.0, -capped.slope(t))
            draw = carrier.crossing(t, z, w0, stream)
            state, v_raw, creep = draw.state, draw.jump, draw.creep
        else:
            branch = "marginal"
            t = D
            z = capped.value(t) if capped is not None else math.inf
            state = carrier.value_below(t, z, stream)
            v_raw, creep = 0.0, False
        x = carrier.recover(t, state, q, r, stream)
        v = _classify_jump(v_raw, q, r, stream)
        T += t
        delta = v + (J if branch == "marginal" else 0.0)
        z_val = x + delta
        H += z_val
        b_t = b_cur.value(t) if b_cur is not None else math.inf
        assert x <= z or math.isinf(z)  # left values never overshoot the target boundary
        record = IterationRecord(
            index=iteration,
            branch=branch,
            t=t,
            s=float(state if not hasattr(state, "sum") else state.sum()),
            v_raw=v_raw,
            v=v,
            x=x,
            delta=delta,
            z=z_val,
            T=T,
            H=H,
            creep=creep,
            boundary=b_cur,
        )
        tail.append(record)
        if trace is not None:
            trace.append(record)
        if z_val < b_t and t < remaining:
            remaining -= t
            D = 0.0 if branch == "marginal" else D - t
            if b_cur is not None:
                b_cur = boundary_shift(b_cur, t, z_val)
            continue
        censored = z_val < b_t
        return FirstPassageEvent(
            T=horizon if censored else T,
            z_left=H - delta,
            jump=delta,
            censored=censored,
        )


def _check_target(model: TiltedTruncatedModel, boundary, horizon) -> None:
    if model.drift != 0.0:
        raise ConfigError(
            "passage sampling needs a pure-jump target; drift belongs to the "
            "decreasing side of the two-sided engines"
        )
    if boundary is None and not math.isfinite(horizon):
        raise ConfigError("an infinite boundary requires a finite horizon")
    if model.is_empty and not math.isfinite(horizon) and boundary is not None:
        raise ConfigError("an identically-zero target never crosses; set a finite horizon")
    if not horizon > 0.0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")


def sample_subordinator_fpe(
    model: TiltedTruncatedModel,
    boundary: Boundary | None,
    horizon: float,
    stream: RngStream,
    *,
    guard: int = DEFAULT_GUARD,
):
    """Exact draw of (T, Z(T-), jump) for the target subordinator.

    ``boundary`` None means no boundary (sampling the value at the horizon);
    ``horizon`` may be inf when a boundary is present.  Returns the event and
    the full per-iteration trace.
    """
    _check_target(model, boundary, horizon)
    trace = IterationTrace()
    event = _run_passage(model, boundary, horizon, stream, guard, trace)
    return event, trace


def sample_id(
    model: TiltedTruncatedModel,
    t: float,
    stream: RngStream,
    *,
    guard: int = DEFAULT_GUARD,
) -> float:
    """Value at time t of the infinitely divisible law the model describes.

    Runs the passage engine with no boundary and horizon t; the model's
    drift contributes ``drift * t`` deterministically.
    """
    if not (t > 0.0 and math.isfinite(t)):
        raise ParameterError(f"need a finite t > 0, got {t}")
    pure = model.without_drift()
    event = _run_passage(pure, None, t, stream, guard, None)
    return event.z_final + model.drift * t


# ---------------------------------------------------------------------------
# Table-2 style: level crossing of Z = Z+ - Z-
# ---------------------------------------------------------------------------


def sample_level_crossing(
    model_plus: TiltedTruncatedModel,
    model_minus: TiltedTruncatedModel,
    level: float,
    horizon: float,
    stream: RngStream,
    *,
    assert_divergence: bool = False,
    guard: int = DEFAULT_GUARD,
) -> BVExitEvent:
    """Exact draw of the first passage of Z = Z+ - Z- above a constant level.

    Z+ must be driftless; any nonpositive drift of Z rides on ``model_minus``
    as a nonnegative rate.  With an infinite horizon the caller must assert
    that Z diverges (limsup Z = inf a.s.), which cannot be checked here.
    """
    if model_plus.drift != 0.0:
        raise ConfigError("the increasing side must be driftless")
    if not level > 0.0:
        raise ParameterError(f"level must be > 0, got {level}")
    if not horizon > 0.0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")
    if not math.isfinite(horizon) and not assert_divergence:
        raise ConfigError(
            "an infinite horizon needs assert_divergence=True (limsup Z = inf "
            "is a hypothesis on the model, not a checkable property)"
        )
    remaining = horizon
    b = level
    T = 0.0
    Hp = 0.0
    Hm = 0.0
    iteration = 0
    while True:
        iteration += 1
        if iteration > guard:
            raise GuardTripError(
                f"level-crossing loop exceeded the {guard}-iteration guard",
                iterations=iteration,
            )
        inner = _run_passage(model_plus, ConstantBoundary(b), remaining, stream, guard, None)
        t = inner.T
        v = inner.jump
        x = inner.z_final
        zm = sample_id(model_minus, t, stream, guard=guard)
        T += t
        Hp += x
        Hm += zm
        if x - zm < b and t < remaining:
            remaining -= t
            b += zm - x
            continue
        censored = x - zm < b
        return BVExitEvent(
            T=horizon if censored else T,
            zp_left=Hp - v,
            zm_left=Hm,
            jp=0.0 if censored else v,
            jm=0.0,
            censored=censored,
        )


# ---------------------------------------------------------------------------
# Table-3 style: first exit of driftless Z = Z+ - Z- from an interval
# ---------------------------------------------------------------------------


def sample_interval_exit(
    model_plus: TiltedTruncatedModel,
    model_minus: TiltedTruncatedModel,
    a_minus: float,
    a_plus: float,
    horizon: float,
    stream: RngStream,
    *,
    guard: int = DEFAULT_GUARD,
) -> BVExitEvent:
    """Exact draw of the first exit of Z = Z+ - Z- from [-a_minus, a_plus].

    Both sides must be driftless and at least one must have a carrier (a
    two-sided compound Poisson target needs no embedding machinery and is
    rejected here).
    """
    if model_plus.drift != 0.0 or model_minus.drift != 0.0:
        raise ConfigError("interval exit requires both sides driftless")
    if model_plus.carrier is None and model_minus.carrier is None:
        raise ConfigError("both sides are compound Poisson; no carrier to embed into")
    if not (a_minus > 0.0 and a_plus > 0.0):
        raise ParameterError(f"interval ends must be > 0, got (-{a_minus}, {a_plus})")
    if not horizon > 0.0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")
    sides = (model_plus, model_minus)
    carriers = tuple(m.carrier if m.carrier is not None else _NULL_CARRIER for m in sides)
    remaining = horizon
    b = [a_plus, a_minus]  # current distance to the top / bottom end
    T = 0.0
    H = [0.0, 0.0]
    D = 0.0
    Jp = Jm = 0.0
    iteration = 0
    while True:
        iteration += 1
        if iteration > guard:
            raise GuardTripError(
                f"interval-exit loop exceeded the {guard}-iteration guard",
                iterations=iteration,
            )
        if D == 0.0:
            D, Jp, Jm = _first_jump_two_sided(
                model_plus.finite_part, model_minus.finite_part, remaining, stream
            )
        capped = [cap_boundary(ConstantBoundary(b[i]), sides[i].cutoff) for i in range(2)]
        times = [math.inf, math.inf]
        for i in range(2):
            if sides[i].carrier is None:
                continue
            ti, _ = carriers[i].passage_time(capped[i], stream)
            retries = 0
            while ti == D or ti == times[1 - i]:  # probability-zero float ties
                retries += 1
                if retries > _TIE_RETRIES:
                    raise ConfigError("carrier passage times kept tying the other clocks")
                ti, _ = carriers[i].passage_time(capped[i], stream)
            times[i] = ti
        t = min(times[0], times[1], D)
        z_val = [0.0, 0.0]
        delta = [0.0, 0.0]
        joint_jumps = (Jp, Jm)
        for i in range(2):
            z_cap = capped[i].value(t)
            if times[i] == t:
                draw = carriers[i].crossing(t, z_cap, 0.0, stream)
                state, v_raw = draw.state, draw.jump
            else:
                state = carriers[i].value_below(t, z_cap, stream) if sides[i].carrier is not None else 0.0
                v_raw = 0.0
            x = carriers[i].recover(t, state, sides[i].tilt, sides[i].cutoff, stream)
            v = _classify_jump(v_raw, sides[i].tilt, sides[i].cutoff, stream)
            delta[i] = v + (joint_jumps[i] if t == D else 0.0)
            z_val[i] = x + delta[i]
        T += t
        H[0] += z_val[0]
        H[1] += z_val[1]
        net = z_val[0] - z_val[1]
        if -b[1] < net < b[0] and t < remaining:
            remaining -= t
            D = 0.0 if t == D else D - t
            b[0] -= net
            b[1] += net
            continue
        censored = -b[1] < net < b[0]
        return BVExitEvent(
            T=horizon if censored else T,
            zp_left=H[0] - delta[0],
            zm_left=H[1] - delta[1],
            jp=delta[0],
            jm=delta[1],
            censored=censored,
        )
