"""Exact loop counts via interval Jacobian non-singularity.

The displacement map f(t1, t2) = integral of the velocity from t1 to t2
has the Jacobian

    [ -v1(t1)   v1(t2) ]
    [ -v2(t1)   v2(t2) ]

(differentiating the integral bounds), which the tube encloses entrywise.
If the Jacobian is provably nonsingular on every box of a detection set,
the set holds exactly |degree| loops.  Boxes whose determinant enclosure
straddles zero are bisected and retested with fresh, tighter tube
evaluations; if some piece still cannot be cleared within the bisection
budget, no count is certified (which is not a disproof).
"""

from __future__ import annotations

from dataclasses import dataclass

from .intervals import Interval, det2
from .paving import Subpaving
from .topology import PartialSubpavingError, degree_of
from .tube import VelocityTube

__all__ = ["IntervalJacobian", "jacobian_inclusion", "loops_number"]


@dataclass(frozen=True, slots=True)
class IntervalJacobian:
    """Entrywise enclosure of the displacement Jacobian on a t-plane box."""

    j11: Interval
    j12: Interval
    j21: Interval
    j22: Interval

    def det(self) -> Interval:
        return det2(self.j11, self.j12, self.j21, self.j22)


def jacobian_inclusion(tube: VelocityTube, t1: Interval, t2: Interval) -> IntervalJacobian:
    """Jacobian enclosure from tube evaluations at [t1] and [t2]."""
    v_at_t1 = tube.eval(t1)
    v_at_t2 = tube.eval(t2)
    return IntervalJacobian(
        j11=-v_at_t1.x,
        j12=v_at_t2.x,
        j21=-v_at_t1.y,
        j22=v_at_t2.y,
    )


def _nonsingular_on(tube: VelocityTube, t1: Interval, t2: Interval, budget: int) -> bool:
    if 0.0 not in jacobian_inclusion(tube, t1, t2).det():
        return True
    if budget <= 0:
        return False
    if t1.width >= t2.width:
        m = t1.mid
        return _nonsingular_on(tube, Interval(t1.lo, m), t2, budget - 1) and \
            _nonsingular_on(tube, Interval(m, t1.hi), t2, budget - 1)
    m = t2.mid
    return _nonsingular_on(tube, t1, Interval(t2.lo, m), budget - 1) and \
        _nonsingular_on(tube, t1, Interval(m, t2.hi), budget - 1)


def loops_number(
    sp: Subpaving,
    tube: VelocityTube,
    max_bisect: int = 8,
    max_depth: int = 12,
) -> int | None:
    """Certified number of loops in one detection set, or None.

    Verifies 0 not in det(J) on every box of the set (bisecting up to
    max_bisect levels where the enclosure is too coarse), then returns the
    absolute degree.  None means the count cannot be certified with the
    given data; it never contradicts a positive existence verdict.
    """
    if sp.partial:
        raise PartialSubpavingError("cannot count loops on a partial detection set")
    for b in sp.boxes:
        if not _nonsingular_on(tube, b.t1, b.t2, max_bisect):
            return None
    d = degree_of(sp, tube.integral, max_depth)
    if d is None:
        return None
    return abs(d)
