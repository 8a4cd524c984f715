"""Record types produced by the carriers and the passage engines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CrossingDraw:
    """Carrier state at its own passage time, conditional on that time.

    ``s_left`` is the carrier's left limit; on the creep branch it equals the
    boundary value and ``jump`` is 0, otherwise ``0 <= z - s_left < jump``.
    ``components`` carries the per-component split for mixture carriers
    (summing to ``s_left``); it is None for scalar carriers.
    """

    s_left: float
    jump: float
    creep: bool
    components: np.ndarray | None = None

    @property
    def state(self):
        return self.components if self.components is not None else self.s_left


@dataclass(frozen=True)
class FirstPassageEvent:
    """Sampled triple (T, Z(T-), jump at T) with censoring at the horizon.

    ``censored`` means the terminal point was reached without a crossing;
    then ``T`` equals the terminal point exactly and ``jump`` is 0.
    """

    T: float
    z_left: float
    jump: float
    censored: bool

    @property
    def z_final(self) -> float:
        return self.z_left + self.jump


@dataclass(frozen=True)
class BVExitEvent:
    """Two-sided record for level crossing / interval exit of Z = Z+ - Z-."""

    T: float
    zp_left: float
    zm_left: float
    jp: float
    jm: float
    censored: bool

    @property
    def z_left(self) -> float:
        return self.zp_left - self.zm_left

    @property
    def z_final(self) -> float:
        return (self.zp_left + self.jp) - (self.zm_left + self.jm)


@dataclass(frozen=True)
class IterationRecord:
    """One engine iteration, in the iteration's own (shifted) coordinates.

    ``t``/``z`` are the local passage time and displacement; ``T``/``H`` are
    the cumulative time and cumulative target value after the iteration.
    ``v_raw`` is the carrier jump before the keep/drop classification, ``v``
    after it.  ``boundary`` is the boundary object the iteration ran against.
    """

    index: int
    branch: str  # "cross" | "marginal"
    t: float
    s: float
    v_raw: float
    v: float
    x: float
    delta: float
    z: float
    T: float
    H: float
    creep: bool
    boundary: object


@dataclass
class IterationTrace:
    """Full per-iteration diagnostics for one engine run."""

    records: list[IterationRecord] = field(default_factory=list)

    def append(self, record: IterationRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]
