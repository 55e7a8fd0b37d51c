"""Randomized agreement check between the degree algorithm and the winding oracle.

Cases are random edge-connected unions of grid boxes (optionally with
holes carved out) paired with random smooth fields built as products of
complex linear factors: each factor (z - a) contributes winding +1 around
a, each (conj(z) - b) contributes -1 around b.  Roots are placed with a
safety margin from every box edge, so the field is nonvanishing on the
boundary and the expected degree is simply the signed count of roots
inside the region.

The same factor list yields both a point evaluator (for the winding
oracle) and an interval evaluator (for edge tagging), so the degree
algorithm and the oracle see one field through two independent code
paths.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .intervals import Box2, Interval
from .paving import Subpaving, TPlaneBox
from .topology import extract_contour, refine_and_tag, topo_degree, winding_number

__all__ = ["SelftestCase", "random_subpaving", "random_root_field", "run_degree_selftest"]


@dataclass
class SelftestCase:
    index: int
    n_boxes: int
    n_holes: int
    algo_degree: int | None
    oracle_degree: int
    expected_degree: int

    @property
    def ok(self) -> bool:
        return self.algo_degree == self.oracle_degree == self.expected_degree


def _grown_cells(rng: np.random.Generator, n: int) -> set[tuple[int, int]]:
    cells = {(0, 0)}
    frontier = [(0, 0)]
    while len(cells) < n:
        base = frontier[rng.integers(len(frontier))]
        dx, dy = ((1, 0), (-1, 0), (0, 1), (0, -1))[rng.integers(4)]
        cand = (base[0] + dx, base[1] + dy)
        if cand not in cells:
            cells.add(cand)
            frontier.append(cand)
    return cells


def _connected(cells: set[tuple[int, int]]) -> bool:
    if not cells:
        return False
    seen = set()
    stack = [next(iter(cells))]
    while stack:
        c = stack.pop()
        if c in seen or c not in cells:
            continue
        seen.add(c)
        x, y = c
        stack.extend([(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)])
    return len(seen) == len(cells)


def random_subpaving(
    rng: np.random.Generator,
    n_boxes: int,
    holes: bool = True,
    cell: float = 1.0,
) -> tuple[Subpaving, set[tuple[int, int]], set[tuple[int, int]]]:
    """Random connected grid-box union; returns (subpaving, cells, hole cells).

    Holes are interior cells whose removal keeps the rest edge-connected.
    """
    cells = _grown_cells(rng, n_boxes + (n_boxes // 6 if holes else 0))
    hole_cells: set[tuple[int, int]] = set()
    if holes:
        interior = [
            c for c in cells
            if all((c[0] + dx, c[1] + dy) in cells
                   for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)))
        ]
        rng.shuffle(interior)
        for c in interior[: max(len(cells) // 8, 1)]:
            trial = cells - {c}
            if _connected(trial):
                cells = trial
                hole_cells.add(c)
    boxes = [
        TPlaneBox(Interval(i * cell, (i + 1) * cell), Interval(j * cell, (j + 1) * cell))
        for i, j in sorted(cells)
    ]
    return Subpaving(boxes=boxes), cells, hole_cells


def random_root_field(
    rng: np.random.Generator,
    cells: set[tuple[int, int]],
    hole_cells: set[tuple[int, int]],
    cell: float = 1.0,
    max_inside: int = 3,
    max_outside: int = 2,
):
    """Product-of-factors field with roots jittered around cell centers.

    Returns (point_field, inclusion_map, expected_degree).  Roots inside
    the region count +1 (analytic factor) or -1 (conjugate factor); roots
    in holes or outside contribute nothing.
    """
    inside_pool = sorted(cells)
    outside_pool = sorted(hole_cells) or [
        (min(i for i, _ in cells) - 2, min(j for _, j in cells) - 2)
    ]

    def root_at(c):
        jitter = rng.uniform(-0.2, 0.2, size=2)
        return complex((c[0] + 0.5 + jitter[0]) * cell, (c[1] + 0.5 + jitter[1]) * cell)

    factors: list[tuple[complex, bool]] = []  # (root, conjugate?)
    expected = 0
    for _ in range(rng.integers(1, max_inside + 1)):
        conj = bool(rng.integers(2))
        factors.append((root_at(inside_pool[rng.integers(len(inside_pool))]), conj))
        expected += -1 if conj else 1
    for _ in range(rng.integers(0, max_outside + 1)):
        conj = bool(rng.integers(2))
        factors.append((root_at(outside_pool[rng.integers(len(outside_pool))]), conj))

    def point_field(pts: np.ndarray) -> np.ndarray:
        z = pts[:, 0] + 1j * pts[:, 1]
        w = np.ones_like(z)
        for root, conj in factors:
            # conjugate factor conj(z - root) keeps its zero at root
            # while winding -1 around it
            w = w * (np.conj(z - root) if conj else z - root)
        return np.column_stack([w.real, w.imag])

    def inclusion(t1: Interval, t2: Interval) -> Box2:
        re, im = Interval(1.0, 1.0), Interval(0.0, 0.0)
        for root, conj in factors:
            fr = t1 - Interval(root.real, root.real)
            fi = t2 - Interval(root.imag, root.imag)
            if conj:
                fi = -fi
            re, im = re * fr - im * fi, re * fi + im * fr
        return Box2(re, im)

    return point_field, inclusion, expected


def run_degree_selftest(
    n_cases: int = 200,
    seed: int = 0,
    min_boxes: int = 5,
    max_boxes: int = 60,
    max_depth: int = 16,
) -> tuple[list[SelftestCase], float]:
    """Run the oracle-agreement suite; returns (cases, elapsed seconds)."""
    rng = np.random.default_rng(seed)
    cases: list[SelftestCase] = []
    start = time.perf_counter()
    for idx in range(n_cases):
        n = int(rng.integers(min_boxes, max_boxes + 1))
        sp, cells, holes = random_subpaving(rng, n, holes=bool(rng.integers(2)))
        point_field, inclusion, expected = random_root_field(rng, cells, holes)
        contour = extract_contour(sp)
        tagged = refine_and_tag(contour, inclusion, max_depth)
        algo = topo_degree(tagged) if tagged is not None else None
        oracle = winding_number(contour, point_field)
        cases.append(SelftestCase(
            index=idx, n_boxes=len(sp.boxes),
            n_holes=len(holes),
            algo_degree=algo, oracle_degree=oracle, expected_degree=expected,
        ))
    return cases, time.perf_counter() - start
