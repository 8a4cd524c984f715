"""Monotone scalar root finding in log-time, shared by the carriers."""

from __future__ import annotations

import math

from scipy.optimize import brentq

from .errors import RootBracketError

_LOG2 = math.log(2.0)
_MAX_EXPAND = 1000
# brentq tolerance on u = log(t) gives ~1e-13 *relative* precision on t
_XTOL = 1e-13


def solve_increasing(g, u0: float = 0.0) -> float:
    """Return t = exp(u) with g(u) = 0 for a nondecreasing g over u = log t.

    Brackets by doubling t (unit steps in u/log 2) from exp(u0), then runs
    Brent's method.  g must be finite on the bracket it returns sign changes
    in; large sentinel values are fine.
    """
    lo = hi = u0
    g_lo = g_hi = g(u0)
    expansions = 0
    while g_lo > 0.0:
        lo -= _LOG2
        g_lo = g(lo)
        expansions += 1
        if expansions > _MAX_EXPAND:
            raise RootBracketError(f"no sign change after {expansions} downward expansions")
    expansions = 0
    while g_hi < 0.0:
        hi += _LOG2
        g_hi = g(hi)
        expansions += 1
        if expansions > _MAX_EXPAND:
            raise RootBracketError(f"no sign change after {expansions} upward expansions")
    if g_lo == 0.0:
        return math.exp(lo)
    if g_hi == 0.0:
        return math.exp(hi)
    u = brentq(g, lo, hi, xtol=_XTOL)
    return math.exp(u)
