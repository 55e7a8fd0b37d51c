"""Outer approximation of the loop set in the t-plane.

A loop candidate is a time pair (t1, t2), t1 < t2, whose net displacement
integral can vanish given the measurement uncertainty.  ``sivia`` bisects
the t-plane and keeps every box on which the displacement enclosure
contains zero, discarding boxes that prove displacement away from zero and
boxes at or below the no-delay band t2 <= t1 + delta_diag (pairs closer to
the diagonal than delta_diag are trivial "loops" of near-zero delay and
cannot carry a closed detection boundary anyway).

``cluster`` groups the retained boxes into edge-connected components, the
detection sets.  Components touching the domain border or coming within
delta_diag of the diagonal are flagged partial: their boundary is not
fully contained in the domain, so no existence verdict can be attempted
on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .intervals import Interval
from .tube import VelocityTube

__all__ = ["TPlaneBox", "Subpaving", "sivia", "cluster"]

NO_LOOP = "no_loop"
POSSIBLE = "possible"
PARTIAL = "partial"


@dataclass(frozen=True, slots=True)
class TPlaneBox:
    """One t-plane box with its classification."""

    t1: Interval
    t2: Interval
    status: str = POSSIBLE

    @property
    def min_delay(self) -> float:
        """Smallest t2 - t1 over the box (negative if it straddles the diagonal)."""
        return self.t2.lo - self.t1.hi


@dataclass
class Subpaving:
    """Edge-connected union of non-overlapping possible boxes: one detection set."""

    boxes: list[TPlaneBox]
    partial: bool = False
    index: int = -1

    @property
    def t1_hull(self) -> Interval:
        lo = min(b.t1.lo for b in self.boxes)
        hi = max(b.t1.hi for b in self.boxes)
        return Interval(lo, hi)

    @property
    def t2_hull(self) -> Interval:
        lo = min(b.t2.lo for b in self.boxes)
        hi = max(b.t2.hi for b in self.boxes)
        return Interval(lo, hi)

    def __len__(self) -> int:
        return len(self.boxes)

    def contains_pair(self, t1: float, t2: float) -> bool:
        return any(t1 in b.t1 and t2 in b.t2 for b in self.boxes)


def _sivia_worklist(tube: VelocityTube, work: list[tuple[Interval, Interval]],
                    eps: float, delta_diag: float, keep_excluded: bool,
                    grow_to: int | None = None):
    """Classify/bisect until done; with grow_to, stop once the stack holds
    that many open boxes and return them for parallel distribution."""
    feasible = tube.integral_contains_zero
    possible: list[TPlaneBox] = []
    excluded: list[TPlaneBox] = []
    stack = list(work)
    while stack:
        if grow_to is not None and len(stack) >= grow_to:
            return possible, excluded, stack
        t1, t2 = stack.pop()
        if t2.hi <= t1.lo + delta_diag:
            if keep_excluded:
                excluded.append(TPlaneBox(t1, t2, NO_LOOP))
            continue
        # test the displacement on the box clipped to delay >= delta_diag:
        # every pair with real delay stays covered, and boxes that merely
        # straddle the no-delay band stop reading as feasible loops
        t1c = Interval(t1.lo, min(t1.hi, t2.hi - delta_diag))
        t2c = Interval(max(t2.lo, t1.lo + delta_diag), t2.hi)
        if not feasible(t1c, t2c):
            if keep_excluded:
                excluded.append(TPlaneBox(t1, t2, NO_LOOP))
            continue
        w1 = t1.width
        w2 = t2.width
        if max(w1, w2) <= eps:
            possible.append(TPlaneBox(t1, t2, POSSIBLE))
            continue
        if w1 >= w2:  # tie splits t1
            m = t1.mid
            stack.append((Interval(t1.lo, m), t2))
            stack.append((Interval(m, t1.hi), t2))
        else:
            m = t2.mid
            stack.append((t1, Interval(t2.lo, m)))
            stack.append((t1, Interval(m, t2.hi)))
    return possible, excluded, []


def sivia(
    tube: VelocityTube,
    eps: float,
    domain: tuple[Interval, Interval] | None = None,
    delta_diag: float | None = None,
    keep_excluded: bool = True,
    jobs: int = 1,
) -> list[TPlaneBox]:
    """Pave the t-plane domain, classifying boxes against the loop test.

    Returns all leaf boxes in canonical order (sorted by lower corner):
    status ``possible`` for boxes that may contain loop pairs (these cover
    every feasible loop with delay > delta_diag) and ``no_loop`` for boxes
    proven free of loops, omitted when keep_excluded is False.  Retained
    boxes have sides <= eps.

    jobs > 1 pre-splits the domain and processes chunks in worker
    processes; the canonical ordering makes the output independent of the
    schedule.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if domain is None:
        dom = Interval(tube.t0, tube.tf)
        domain = (dom, dom)
    if delta_diag is None:
        delta_diag = eps
    work = [(domain[0], domain[1])]

    if jobs > 1:
        possible, excluded = _sivia_parallel(tube, work, eps, delta_diag,
                                             keep_excluded, jobs)
    else:
        possible, excluded, _ = _sivia_worklist(tube, work, eps, delta_diag,
                                                keep_excluded)

    leaves = possible + excluded
    leaves.sort(key=lambda b: (b.t1.lo, b.t2.lo, b.t1.hi, b.t2.hi))
    return leaves


def _sivia_parallel(tube, work, eps, delta_diag, keep_excluded, jobs):
    from concurrent.futures import ProcessPoolExecutor

    # run the normal worklist until enough open boxes exist, then farm the
    # rest out; classifications made so far match a serial run exactly
    possible, excluded, open_boxes = _sivia_worklist(
        tube, work, eps, delta_diag, keep_excluded, grow_to=8 * jobs)
    if open_boxes:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_sivia_worklist, tube, [c], eps, delta_diag, keep_excluded)
                for c in open_boxes
            ]
            for fut in futures:
                p, e, _ = fut.result()
                possible.extend(p)
                excluded.extend(e)
    return possible, excluded


def cluster(
    boxes: list[TPlaneBox],
    domain: tuple[Interval, Interval],
    delta_diag: float,
) -> list[Subpaving]:
    """Group possible boxes into edge-connected detection sets.

    Adjacency requires a shared edge segment of positive length; corner
    contact does not connect.  A component is flagged partial when any of
    its boxes touches the domain border or comes within delta_diag of the
    no-delay diagonal.  Returned subpavings are canonically ordered by
    their minimum corner; member boxes of partial components carry status
    ``partial``.
    """
    boxes = [b for b in boxes if b.status != NO_LOOP]
    n = len(boxes)
    if n == 0:
        return []

    # boxes come from bisection of one domain, so faces align exactly and
    # adjacency can be keyed on the shared coordinate; bucketing the other
    # axis into cells keeps candidate lists O(1)
    cell = max(max(b.t1.width, b.t2.width) for b in boxes) or 1.0

    by_x_lo: dict[tuple[float, int], list[int]] = {}
    by_y_lo: dict[tuple[float, int], list[int]] = {}
    for i, b in enumerate(boxes):
        for c in range(math.floor(b.t2.lo / cell), math.floor(b.t2.hi / cell) + 1):
            by_x_lo.setdefault((b.t1.lo, c), []).append(i)
        for c in range(math.floor(b.t1.lo / cell), math.floor(b.t1.hi / cell) + 1):
            by_y_lo.setdefault((b.t2.lo, c), []).append(i)

    def overlaps(a: Interval, b: Interval) -> bool:
        return min(a.hi, b.hi) - max(a.lo, b.lo) > 0

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for i, b in enumerate(boxes):
        for c in range(math.floor(b.t2.lo / cell), math.floor(b.t2.hi / cell) + 1):
            for j in by_x_lo.get((b.t1.hi, c), ()):
                if overlaps(b.t2, boxes[j].t2):
                    union(i, j)
        for c in range(math.floor(b.t1.lo / cell), math.floor(b.t1.hi / cell) + 1):
            for j in by_y_lo.get((b.t2.hi, c), ()):
                if overlaps(b.t1, boxes[j].t1):
                    union(i, j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    d1, d2 = domain
    out: list[Subpaving] = []
    for ids in groups.values():
        members = [boxes[i] for i in ids]
        partial = any(
            b.t1.lo <= d1.lo or b.t1.hi >= d1.hi
            or b.t2.lo <= d2.lo or b.t2.hi >= d2.hi
            or b.min_delay < delta_diag
            for b in members
        )
        if partial:
            members = [replace(b, status=PARTIAL) for b in members]
        members.sort(key=lambda b: (b.t1.lo, b.t2.lo))
        out.append(Subpaving(boxes=members, partial=partial))

    out.sort(key=lambda sp: (sp.boxes[0].t1.lo, sp.boxes[0].t2.lo))
    for k, sp in enumerate(out):
        sp.index = k
    return out
