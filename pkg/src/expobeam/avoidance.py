"""Exposure-avoidance decision engine.

Builds the disabled beam set around the head beam and reselects the
transmission beam as the feasible beam closest (in index distance) to
the initial beam, subject to a minimum index distance d0 from the head
beam. d0 comes from a range-banded policy: closer pedestrians get a
larger d0, and beyond the last band d0 is zero (never triggered).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codebook import BeamId, Codebook, beam_distance


class AvoidanceError(RuntimeError):
    """Raised when every feasible beam is disabled; caller must mute."""


@dataclass(frozen=True)
class AvoidancePolicy:
    """Stepped d0 table keyed by 3-D head-to-array range, meters.

    ``bands`` is an ordered list of (max_range_m, d0); the first band
    whose max range covers the head range (inclusive) applies.
    """

    bands: tuple[tuple[float, float], ...]
    tie_break: str = "max-head-distance-lex"

    def __post_init__(self) -> None:
        ranges = [r for r, _ in self.bands]
        if ranges != sorted(ranges):
            raise ValueError("bands must be sorted ascending by max range")
        d0s = [d for _, d in self.bands]
        if any(d < 0 for d in d0s):
            raise ValueError("d0 must be non-negative")
        if any(a < b for a, b in zip(d0s, d0s[1:])):
            raise ValueError("d0 must be non-increasing with range")


# Default band tables: one step for half-power codebooks, three steps
# for the fine 0.5 dB codebooks.
DEFAULT_POLICY_FINE = AvoidancePolicy(bands=((4.0, 3.0), (5.0, 2.0), (6.7, 1.0)))
DEFAULT_POLICY_COARSE = AvoidancePolicy(bands=((6.7, 1.0),))


@dataclass(frozen=True)
class BeamDecision:
    initial: BeamId
    head_beam: BeamId
    d0_applied: float
    disabled_count: int
    selected: BeamId
    triggered: bool

    def to_json(self) -> str:
        return json.dumps({
            "initial": [self.initial.m, self.initial.n],
            "head_beam": [self.head_beam.m, self.head_beam.n],
            "d0_applied": self.d0_applied,
            "disabled_count": self.disabled_count,
            "selected": [self.selected.m, self.selected.n],
            "triggered": self.triggered,
        })


def d0_for_range(policy: AvoidancePolicy, head_range_m: float) -> float:
    """d0 of the first band covering ``head_range_m``; 0 beyond all bands."""
    if head_range_m <= 0.0:
        raise ValueError("head range must be positive")
    for max_range, d0 in policy.bands:
        if head_range_m <= max_range:
            return d0
    return 0.0


_GRID_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _index_grids(cb: Codebook) -> tuple[np.ndarray, np.ndarray]:
    key = (cb.az_count, cb.tilt_count)
    grids = _GRID_CACHE.get(key)
    if grids is None:
        m, n = np.indices(key)
        grids = (m, n)
        _GRID_CACHE[key] = grids
    return grids


def disabled_set(cb: Codebook, head_beam: BeamId, d0: float) -> set[BeamId]:
    """All beams strictly within index distance d0 of the head beam."""
    if d0 < 0.0:
        raise ValueError("d0 must be non-negative")
    cb.validate(head_beam)
    if d0 == 0.0:
        return set()
    m, n = _index_grids(cb)
    sq = (m - head_beam.m) ** 2 + (n - head_beam.n) ** 2
    ms, ns = np.nonzero(np.sqrt(sq) < d0)
    return {BeamId(int(a), int(b)) for a, b in zip(ms, ns)}


def select_beam(cb: Codebook, initial: BeamId, head_beam: BeamId, d0: float) -> BeamDecision:
    """Constrained reselection: nearest feasible beam to the initial beam.

    Ties on initial-beam distance prefer the larger head-beam distance
    (lower exposure), then the lexicographically smallest (m, n).
    Raises AvoidanceError when no beam satisfies the constraint.
    """
    if d0 < 0.0:
        raise ValueError("d0 must be non-negative")
    cb.validate(initial)
    cb.validate(head_beam)

    m, n = _index_grids(cb)
    sq_head = (m - head_beam.m) ** 2 + (n - head_beam.n) ** 2
    feasible = np.sqrt(sq_head) >= d0
    disabled_count = int(feasible.size - np.count_nonzero(feasible))

    triggered = beam_distance(head_beam, initial) < d0
    if not triggered:
        return BeamDecision(initial, head_beam, d0, disabled_count, initial, False)

    if not feasible.any():
        raise AvoidanceError("exposure limited: no feasible beam")

    sq_init = (m - initial.m) ** 2 + (n - initial.n) ** 2
    best_sq = int(sq_init[feasible].min())
    cand = feasible & (sq_init == best_sq)
    ms, ns = np.nonzero(cand)
    # max head distance first, then lexicographic smallest index
    order = sorted(zip(ms.tolist(), ns.tolist()),
                   key=lambda mn: (-sq_head[mn[0], mn[1]], mn[0], mn[1]))
    selected = BeamId(*order[0])
    return BeamDecision(initial, head_beam, d0, disabled_count, selected, True)


def union_disabled_set(cb: Codebook, head_beams: list[tuple[BeamId, float]]) -> set[BeamId]:
    """Union of disabled sets over several (head beam, d0) constraints."""
    out: set[BeamId] = set()
    for head_beam, d0 in head_beams:
        out |= disabled_set(cb, head_beam, d0)
    return out


def write_decision_trace(path, decisions) -> None:
    """Append decisions to a JSON-lines audit file."""
    with open(path, "a", encoding="utf-8") as fh:
        for d in decisions:
            fh.write(d.to_json() + "\n")


def selected_or_none(cb: Codebook, initial: BeamId, head_beam: BeamId,
                     d0: float) -> Optional[BeamDecision]:
    """select_beam variant returning None instead of raising when muted."""
    try:
        return select_beam(cb, initial, head_beam, d0)
    except AvoidanceError:
        return None
