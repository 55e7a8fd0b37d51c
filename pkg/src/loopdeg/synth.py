"""Synthetic missions with analytic ground truth.

Each mission kind provides exact position and velocity functions, plus the
set of true loop pairs (t1, t2) with p(t1) = p(t2), t1 < t2.  Isolated
crossings are derived by brute force (polyline segment intersection over a
dense time grid) and polished by Newton iteration on the pair equation;
periodic missions carry a whole family of pairs (t, t + k*period) instead,
reported as a dense sampling.

Kinds:

* ``circle``      -- laps around a circle; loop pairs form period families.
* ``figure_eight``-- one transversal self-crossing, interior to the domain.
* ``lissajous``   -- 3:2 curve with several transversal crossings.
* ``lawnmower``   -- survey pattern: parallel rows, then cross-cutting
                     columns, joined by constant-speed circular turns;
                     rows x cols perpendicular crossings.
* ``pinch``       -- hook whose exit leg cuts back through the entry leg
                     at a tiny angle: a barely transversal crossing.
* ``near_miss``   -- same hook but the legs thread past each other: a
                     loop-looking envelope with no true loop at all.

Measurement sampling adds zero-mean Gaussian noise truncated at a chosen
multiple of sigma (redrawn, not clipped), so the true velocity stays
inside every sample's error band by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .tube import VelocitySamples

__all__ = [
    "SyntheticMission",
    "make_mission",
    "synthesize",
    "find_crossings",
    "MISSION_KINDS",
]

TWO_PI = 2.0 * math.pi

MISSION_KINDS = ("circle", "figure_eight", "lissajous", "lawnmower", "pinch", "near_miss")


@dataclass
class SyntheticMission:
    kind: str
    t0: float
    tf: float
    position: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    loop_pairs: list[tuple[float, float]]
    family_period: float | None = None
    params: dict = field(default_factory=dict)

    @property
    def duration(self) -> float:
        return self.tf - self.t0

    def mean_speed(self) -> float:
        ts = np.linspace(self.t0, self.tf, 2001)
        v = self.velocity(ts)
        return float(np.hypot(v[:, 0], v[:, 1]).mean())


# ---------------------------------------------------------------------------
# analytic kinds


def _circle(radius: float = 50.0, period: float = 120.0, laps: float = 2.0,
            family_samples: int = 40) -> SyntheticMission:
    w = TWO_PI / period
    tf = laps * period

    def position(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.column_stack([radius * np.cos(w * ts), radius * np.sin(w * ts)])

    def velocity(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.column_stack([-radius * w * np.sin(w * ts), radius * w * np.cos(w * ts)])

    pairs = []
    k = 1
    while k * period <= tf + 1e-9:
        t1s = np.linspace(0.0, tf - k * period, family_samples)
        pairs.extend((float(t1), float(t1 + k * period)) for t1 in t1s)
        k += 1
    return SyntheticMission("circle", 0.0, tf, position, velocity, pairs,
                            family_period=period,
                            params=dict(radius=radius, period=period, laps=laps))


def _figure_eight(ax: float = 60.0, ay: float = 30.0, period: float = 200.0,
                  duration_frac: float = 0.95) -> SyntheticMission:
    """Lissajous 1:2 eight with its single transversal crossing interior.

    Phase is chosen so the crossing pair sits at t0 + P/4 and t0 + 3P/4,
    well away from the domain ends.
    """
    w = TWO_PI / period
    tf = duration_frac * period

    def position(ts):
        u = w * np.atleast_1d(np.asarray(ts, dtype=float)) - 0.5 * math.pi
        return np.column_stack([ax * np.sin(u), ay * np.sin(2 * u)])

    def velocity(ts):
        u = w * np.atleast_1d(np.asarray(ts, dtype=float)) - 0.5 * math.pi
        return np.column_stack([ax * w * np.cos(u), 2 * ay * w * np.cos(2 * u)])

    m = SyntheticMission("figure_eight", 0.0, tf, position, velocity, [],
                         params=dict(ax=ax, ay=ay, period=period,
                                     duration_frac=duration_frac))
    m.loop_pairs = find_crossings(m)
    return m


def _lissajous(ax: float = 60.0, ay: float = 40.0, period: float = 300.0,
               phase: float = math.pi / 3, duration_frac: float = 0.98) -> SyntheticMission:
    w = TWO_PI / period
    tf = duration_frac * period

    def position(ts):
        u = w * np.atleast_1d(np.asarray(ts, dtype=float))
        return np.column_stack([ax * np.sin(3 * u + phase), ay * np.sin(2 * u)])

    def velocity(ts):
        u = w * np.atleast_1d(np.asarray(ts, dtype=float))
        return np.column_stack([3 * ax * w * np.cos(3 * u + phase),
                                2 * ay * w * np.cos(2 * u)])

    m = SyntheticMission("lissajous", 0.0, tf, position, velocity, [],
                         params=dict(ax=ax, ay=ay, period=period, phase=phase,
                                     duration_frac=duration_frac))
    m.loop_pairs = find_crossings(m)
    return m


# ---------------------------------------------------------------------------
# piecewise line/arc missions (constant speed, velocity-continuous)


class _Turtle:
    """Builds a constant-speed path from straight legs and circular turns.

    Tangency at junctions is automatic: every segment starts at the
    current pose, so velocity is continuous along the whole path.
    """

    def __init__(self, speed: float, start=(0.0, 0.0), heading: float = 0.0):
        self.speed = speed
        self.pos = np.asarray(start, dtype=float)
        self.heading = heading
        self.segments: list[tuple] = []  # ("line"|"arc", duration, payload)

    def straight(self, dist: float) -> None:
        if dist <= 0:
            return
        d = np.array([math.cos(self.heading), math.sin(self.heading)])
        self.segments.append(("line", dist / self.speed, (self.pos.copy(), d * self.speed)))
        self.pos = self.pos + d * dist

    def arc(self, dtheta: float, radius: float) -> None:
        if dtheta == 0:
            return
        side = 1.0 if dtheta > 0 else -1.0
        normal = self.heading + side * 0.5 * math.pi
        center = self.pos + radius * np.array([math.cos(normal), math.sin(normal)])
        theta0 = math.atan2(self.pos[1] - center[1], self.pos[0] - center[0])
        duration = abs(dtheta) * radius / self.speed
        rate = dtheta / duration
        self.segments.append(("arc", duration, (center, radius, theta0, rate)))
        theta1 = theta0 + dtheta
        self.pos = center + radius * np.array([math.cos(theta1), math.sin(theta1)])
        self.heading += dtheta

    def finish(self):
        durations = np.array([s[1] for s in self.segments])
        starts = np.concatenate([[0.0], np.cumsum(durations)])
        segs = self.segments
        speed = self.speed

        def locate(ts):
            ts = np.atleast_1d(np.asarray(ts, dtype=float))
            idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, len(segs) - 1)
            return ts, idx

        def position(ts):
            ts, idx = locate(ts)
            out = np.empty((ts.size, 2))
            for k in range(len(segs)):
                mask = idx == k
                if not mask.any():
                    continue
                tau = ts[mask] - starts[k]
                kind, _, payload = segs[k]
                if kind == "line":
                    p0, v = payload
                    out[mask] = p0 + np.outer(tau, v)
                else:
                    center, radius, theta0, rate = payload
                    ang = theta0 + rate * tau
                    out[mask] = center + radius * np.column_stack([np.cos(ang), np.sin(ang)])
            return out

        def velocity(ts):
            ts, idx = locate(ts)
            out = np.empty((ts.size, 2))
            for k in range(len(segs)):
                mask = idx == k
                if not mask.any():
                    continue
                tau = ts[mask] - starts[k]
                kind, _, payload = segs[k]
                if kind == "line":
                    _, v = payload
                    out[mask] = v
                else:
                    center, radius, theta0, rate = payload
                    ang = theta0 + rate * tau
                    tangent = np.column_stack([-np.sin(ang), np.cos(ang)])
                    out[mask] = np.sign(rate) * speed * tangent
            return out

        return float(starts[-1]), position, velocity


def _lawnmower(rows: int = 5, cols: int = 0, row_length: float = 100.0,
               row_spacing: float = 25.0, loop_radius: float = 10.0,
               speed: float = 1.5) -> SyntheticMission:
    """Survey mission in two flavors.

    cols == 0 (default): serpentine rows joined by looped turns, the way
    survey vehicles often come about; every transition crosses the row
    just flown at a healthy angle, giving rows-1 well-isolated loops whose
    delay is just the turn duration.

    cols >= 1: boustrophedon rows with semicircular turns, then a second
    pass of perpendicular columns cut across them (rows x cols grid
    crossings with long delays).
    """
    if cols == 0:
        return _lawnmower_loopturns(rows, row_length, row_spacing, loop_radius, speed)
    return _lawnmower_crosshatch(rows, cols, row_length, row_spacing, speed)


def _lawnmower_loopturns(rows: int, L: float, d: float, r: float,
                         speed: float) -> SyntheticMission:
    if rows < 2:
        raise ValueError("lawnmower needs rows >= 2")
    gamma = 0.35  # exit angle of the looped turn: ~20 deg crossing
    cg, sg = math.cos(gamma), math.sin(gamma)
    # the cut-back straight must reach below the row it crosses and leave
    # room for the curl onto the next row
    descend = (d + r * (1 - cg) - r * (1 + cg)) / sg
    if descend * sg < r * (1 - cg) + 0.2 * r * sg:
        raise ValueError("row_spacing too small for the looped turns; need > ~2x loop_radius")

    t = _Turtle(speed, start=(0.0, 0.0), heading=0.0)
    for i in range(rows):
        t.straight(L)
        if i == rows - 1:
            break
        if i % 2 == 0:  # east end: counter-clockwise loop, cut back, curl west
            t.arc(TWO_PI - gamma, r)
            t.straight(descend)
            t.arc(-(math.pi - gamma), r)
        else:  # west end, mirrored
            t.arc(-(TWO_PI - gamma), r)
            t.straight(descend)
            t.arc(math.pi - gamma, r)
    tf, position, velocity = t.finish()
    m = SyntheticMission("lawnmower", 0.0, tf, position, velocity, [],
                         params=dict(rows=rows, cols=0, row_length=L,
                                     row_spacing=d, loop_radius=r, speed=speed))
    m.loop_pairs = find_crossings(m, n_grid=max(4000, 400 * rows))
    if len(m.loop_pairs) != rows - 1:
        raise ValueError(
            f"loop-turn lawnmower produced {len(m.loop_pairs)} crossings, "
            f"expected {rows - 1}")
    return m


def _lawnmower_crosshatch(rows: int, cols: int, row_length: float,
                          row_spacing: float, speed: float) -> SyntheticMission:
    if rows < 2 or cols < 1:
        raise ValueError("crosshatch lawnmower needs rows >= 2 and cols >= 1")
    L, d = row_length, row_spacing
    H = (rows - 1) * d
    dx = L / (cols + 1)
    col_x = [(j + 1) * dx for j in range(cols)]
    y_bot, y_top = -d, H + d
    rc = d / 2
    col_r = dx / 2
    y_apex = y_top + col_r + rc + 0.25 * d

    t = _Turtle(speed, start=(0.0, 0.0), heading=0.0)
    for i in range(rows):
        t.straight(L)
        if i < rows - 1:
            t.arc(math.pi if i % 2 == 0 else -math.pi, rc)

    heading_east = (rows - 1) % 2 == 0
    if heading_east:
        t.arc(math.pi / 2, rc)                      # east -> north
        t.straight(y_apex - rc - (H + rc))
        t.arc(math.pi / 2, rc)                      # north -> west
        t.straight((L + rc) - (col_x[0] + rc))
        t.arc(math.pi / 2, rc)                      # west -> south
    else:
        t.arc(-math.pi / 2, rc)                     # west -> north
        t.straight(y_apex - rc - (H + rc))
        t.arc(-math.pi / 2, rc)                     # north -> east
        t.straight((col_x[0] - rc) - (-rc))
        t.arc(-math.pi / 2, rc)                     # east -> south
    # entering the first column at (col_x[0], y_apex - rc) heading south
    t.straight((y_apex - rc) - y_bot)
    for j in range(1, cols):
        going_down = (j - 1) % 2 == 0
        t.arc(math.pi if going_down else -math.pi, col_r)
        t.straight(y_top - y_bot)

    tf, position, velocity = t.finish()
    m = SyntheticMission("lawnmower", 0.0, tf, position, velocity, [],
                         params=dict(rows=rows, cols=cols, row_length=row_length,
                                     row_spacing=row_spacing, speed=speed))
    m.loop_pairs = find_crossings(m, n_grid=max(3000, 100 * (rows + cols)))
    return m


def _hook(kind: str, radius: float, alpha: float, delta: float,
          lead: float, speed: float) -> SyntheticMission:
    """Straight lead-in, a near-full turn (2*pi - alpha), straight lead-out.

    The lead-out leaves the turn tangentially, heading alpha below the
    lead-in direction delta.  For delta < alpha/2 it cuts back through the
    lead-in at angle ~alpha (a barely transversal crossing); for
    delta > alpha/2 it passes the lead-in endpoint on the far side and the
    trajectory never closes, missing by a gap of order radius*alpha^2.
    """
    t = _Turtle(speed, start=(-lead * math.cos(delta), -lead * math.sin(delta)),
                heading=delta)
    t.straight(lead)
    t.arc(TWO_PI - alpha, radius)
    t.straight(lead)
    tf, position, velocity = t.finish()
    m = SyntheticMission(kind, 0.0, tf, position, velocity, [],
                         params=dict(radius=radius, alpha=alpha, delta=delta,
                                     lead=lead, speed=speed))
    m.loop_pairs = find_crossings(m, n_grid=4000)
    return m


def _pinch(radius: float = 30.0, alpha: float = 0.06, lead: float = 80.0,
           speed: float = 1.5) -> SyntheticMission:
    """Nearly tangential self-crossing: velocities at the loop differ by ~alpha rad."""
    m = _hook("pinch", radius, alpha, 0.0, lead, speed)
    if len(m.loop_pairs) != 1:
        raise ValueError(f"pinch geometry produced {len(m.loop_pairs)} crossings")
    return m


def _near_miss(pass_len: float = 120.0, gap: float = 2.0, flare: float = 80.0,
               eta1: float = 0.15, eta2: float = 0.30, turn_radius: float = 8.0,
               speed: float = 1.5) -> SyntheticMission:
    """Flared hairpin: two long passes ``gap`` apart that never touch.

    The robot flies in at a shallow angle, runs a straight pass, U-turns
    (radius gap/2), runs back parallel just above its own track and climbs
    away at a steeper angle.  Position uncertainty larger than the gap
    makes the parallel section read as a feasible loop, yet the true
    trajectory never crosses itself: the flares diverge (eta2 > eta1) and
    the U-turn keeps the strands gap apart.
    """
    if eta2 <= eta1:
        raise ValueError("need eta2 > eta1 so the flares diverge")
    t = _Turtle(speed, start=(-flare * math.cos(eta1), flare * math.sin(eta1)),
                heading=-eta1)
    t.straight(flare)
    t.arc(eta1, turn_radius)       # level off onto the outbound pass
    t.straight(pass_len)
    t.arc(math.pi, gap / 2)        # U-turn, return pass gap above
    t.straight(pass_len)
    t.arc(-eta2, turn_radius)      # climb away, steeper than the approach
    t.straight(flare)
    tf, position, velocity = t.finish()
    m = SyntheticMission("near_miss", 0.0, tf, position, velocity, [],
                         params=dict(pass_len=pass_len, gap=gap, flare=flare,
                                     eta1=eta1, eta2=eta2,
                                     turn_radius=turn_radius, speed=speed))
    m.loop_pairs = find_crossings(m, n_grid=4000)
    if m.loop_pairs:
        raise ValueError("near_miss parameters produced a real crossing")
    return m


_BUILDERS = {
    "circle": _circle,
    "figure_eight": _figure_eight,
    "lissajous": _lissajous,
    "lawnmower": _lawnmower,
    "pinch": _pinch,
    "near_miss": _near_miss,
}


def make_mission(kind: str, **params) -> SyntheticMission:
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown mission kind {kind!r}; known: {MISSION_KINDS}") from None
    return builder(**params)


# ---------------------------------------------------------------------------
# ground-truth crossings


def _segment_hits(P: np.ndarray) -> list[tuple[int, int]]:
    """Indices (i, j), j > i+1, whose polyline segments intersect.

    Vectorized orientation tests over all segment pairs; brute force on
    purpose, this is the independent oracle side.
    """
    n = P.shape[0] - 1
    a = P[:-1]
    b = P[1:]
    hits = []
    for i in range(n):
        j = np.arange(i + 2, n)
        if j.size == 0:
            continue
        p, r = a[i], b[i] - a[i]
        q, s = a[j], b[j] - a[j]
        qp = q - p
        rxs = r[0] * s[:, 1] - r[1] * s[:, 0]
        qpxr = qp[:, 0] * r[1] - qp[:, 1] * r[0]
        qpxs = qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            tpar = np.where(rxs != 0, qpxs / rxs, np.nan)  # along segment i
            u = np.where(rxs != 0, qpxr / rxs, np.nan)     # along segment j
        ok = (rxs != 0) & (u >= 0) & (u <= 1) & (tpar >= 0) & (tpar <= 1)
        hits.extend((i, int(jj)) for jj in j[ok])
    return hits


def find_crossings(
    mission: SyntheticMission,
    n_grid: int = 2000,
    min_delay: float | None = None,
    tol: float = 1e-10,
) -> list[tuple[float, float]]:
    """True loop pairs of a mission with isolated self-crossings.

    Dense polyline intersection proposes candidates; Newton iteration on
    p(t2) - p(t1) = 0 with the analytic Jacobian polishes each one.  Pairs
    closer than min_delay (default: a few grid steps) are artifacts of
    polyline adjacency and dropped.
    """
    ts = np.linspace(mission.t0, mission.tf, n_grid)
    dt = ts[1] - ts[0]
    if min_delay is None:
        min_delay = 4 * dt
    P = mission.position(ts)
    scale = float(np.abs(P).max()) or 1.0

    pairs = []
    for i, j in _segment_hits(P):
        t1, t2 = ts[i] + 0.5 * dt, ts[j] + 0.5 * dt
        for _ in range(50):
            F = (mission.position(np.array([t2])) - mission.position(np.array([t1])))[0]
            if max(abs(F[0]), abs(F[1])) < tol * scale:
                break
            v1 = mission.velocity(np.array([t1]))[0]
            v2 = mission.velocity(np.array([t2]))[0]
            det = -v1[0] * v2[1] + v1[1] * v2[0]
            if det == 0:
                break
            # Cramer on [-v1 | v2] [d1 d2]^T = -F
            d1 = (-F[0] * v2[1] + F[1] * v2[0]) / det
            d2 = (v1[0] * F[1] - v1[1] * F[0]) / det
            t1 = min(max(t1 + d1, mission.t0), mission.tf)
            t2 = min(max(t2 + d2, mission.t0), mission.tf)
        else:
            continue
        F = (mission.position(np.array([t2])) - mission.position(np.array([t1])))[0]
        if max(abs(F[0]), abs(F[1])) >= tol * scale:
            continue
        if t2 < t1:
            t1, t2 = t2, t1
        if t2 - t1 < min_delay:
            continue
        pairs.append((float(t1), float(t2)))

    # dedupe converged duplicates
    pairs.sort()
    unique: list[tuple[float, float]] = []
    for p in pairs:
        if unique and abs(p[0] - unique[-1][0]) < 2 * dt and abs(p[1] - unique[-1][1]) < 2 * dt:
            continue
        unique.append(p)
    return unique


# ---------------------------------------------------------------------------
# mission files


def save_mission_files(prefix, samples: VelocitySamples, mission: SyntheticMission,
                       seed: int | None) -> tuple:
    """Write <prefix>.csv (world_csv with sigma column) and <prefix>.truth.json."""
    import csv
    import json
    from pathlib import Path

    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = prefix.with_suffix(".csv")
    sig = samples.sigma
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "vx", "vy", "sigma"])
        for k in range(len(samples)):
            s = float(sig[k]) if hasattr(sig, "__len__") else float(sig)
            writer.writerow([repr(float(samples.t[k])), repr(float(samples.v[k, 0])),
                             repr(float(samples.v[k, 1])), repr(s)])
    truth_path = prefix.parent / (prefix.name + ".truth.json")
    with open(truth_path, "w") as fh:
        json.dump(
            {
                "kind": mission.kind,
                "params": mission.params,
                "t0": mission.t0,
                "tf": mission.tf,
                "sigma": float(sig) if not hasattr(sig, "__len__") else None,
                "seed": seed,
                "family_period": mission.family_period,
                "loop_pairs": [[t1, t2] for t1, t2 in mission.loop_pairs],
            },
            fh, indent=1,
        )
    return csv_path, truth_path


# ---------------------------------------------------------------------------
# measurement synthesis


def synthesize(
    mission: SyntheticMission,
    sigma: float,
    sample_rate: float = 10.0,
    seed: int | None = None,
    truncate: float = 2.0,
) -> VelocitySamples:
    """Sample the mission's velocity with truncated Gaussian noise.

    Noise components beyond truncate*sigma are redrawn, so the true
    velocity is guaranteed to lie within truncate*sigma of every sample.
    The returned samples carry sigma, ready for tube construction.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    dt = 1.0 / sample_rate
    times = np.arange(mission.t0, mission.tf, dt)
    if mission.tf - times[-1] > 1e-9 * dt:
        times = np.append(times, mission.tf)
    v = mission.velocity(times)
    if sigma > 0:
        rng = np.random.default_rng(seed)
        noise = rng.normal(0.0, sigma, size=v.shape)
        bad = np.abs(noise) > truncate * sigma
        while bad.any():
            noise[bad] = rng.normal(0.0, sigma, size=int(bad.sum()))
            bad = np.abs(noise) > truncate * sigma
        v = v + noise
    return VelocitySamples(t=times, v=v, sigma=sigma)
