"""Interval enclosures of an unknown planar velocity signal over time.

A tube is a time-sliced box enclosure: the domain [t0, tf] is partitioned
into slices and each slice carries one velocity box guaranteed to contain
the true velocity everywhere in that slice.  Tubes are built from sampled
measurements by hulling the piecewise-linear interpolant over each slice
and inflating it by a multiple of the sensor standard deviation.

Alongside the slice boxes we precompute the primitives (cumulative
integrals) of the slicewise lower and upper bound step functions at every
slice boundary, each enclosed between a rounded-down and a rounded-up
float.  Guaranteed integrals between interval-valued time bounds are then
O(width) lookups instead of fresh quadratures: the integral from [t1] to
[t2] is

    [ lb( ylo([t2]) - ylo([t1]) ),  ub( yhi([t2]) - yhi([t1]) ) ]

per component, where ylo/yhi are the primitives of the bound functions.
The returned box encloses the integral of every selection of the tube over
every ordered pair a <= b with a in [t1], b in [t2]; for interval pairs
lying entirely in reverse order the computation is mirrored so the result
stays a valid enclosure.

All rounding follows the package-wide rule: every float that feeds a bound
is pushed one ulp outward with math.nextafter.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

import numpy as np

from .intervals import Box2, Interval

__all__ = [
    "VelocitySamples",
    "VelocityTube",
    "build_tube",
    "TubeConstructionError",
    "TubeDomainError",
]

_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


class TubeConstructionError(ValueError):
    """Raised when measurement data cannot produce a valid tube."""


class TubeDomainError(ValueError):
    """Raised when a query leaves the tube's time domain."""


@dataclass(frozen=True)
class VelocitySamples:
    """Timestamped world-frame velocity measurements.

    t: strictly increasing timestamps, seconds.
    v: (n, 2) velocities, m/s.
    sigma: per-sample standard deviation (array of n) or one global value;
        None means "to be supplied by the caller at tube-build time".
    """

    t: np.ndarray
    v: np.ndarray
    sigma: np.ndarray | float | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        if t.ndim != 1 or v.shape != (t.size, 2):
            raise TubeConstructionError(
                f"need n timestamps and (n, 2) velocities, got {t.shape} and {v.shape}"
            )
        if not (np.isfinite(t).all() and np.isfinite(v).all()):
            raise TubeConstructionError("non-finite sample values")
        if t.size >= 2 and not (np.diff(t) > 0).all():
            raise TubeConstructionError("timestamps must be strictly increasing")
        if self.sigma is not None:
            sig = np.asarray(self.sigma, dtype=float)
            if sig.ndim == 0:
                sig = float(sig)
                if sig < 0:
                    raise TubeConstructionError("sigma must be >= 0")
            else:
                if sig.shape != t.shape or (sig < 0).any():
                    raise TubeConstructionError("per-sample sigma must be n non-negative values")
            object.__setattr__(self, "sigma", sig)

    def __len__(self) -> int:
        return self.t.size

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def mean_speed(self) -> float:
        return float(np.hypot(self.v[:, 0], self.v[:, 1]).mean())


@dataclass(frozen=True)
class VelocityTube:
    """Immutable slice-box enclosure of a planar velocity trajectory.

    bounds has n+1 slice boundaries; slice k covers [bounds[k], bounds[k+1]]
    and carries the velocity box [vlo[c][k], vhi[c][k]] per component c.
    prim_* are the boundary values of the primitives of the bound step
    functions, each held as a (rounded-down, rounded-up) pair of lists.
    """

    bounds: list[float]
    vlo: tuple[list[float], list[float]]
    vhi: tuple[list[float], list[float]]
    prim_lo_dn: tuple[list[float], list[float]] = field(repr=False)
    prim_lo_up: tuple[list[float], list[float]] = field(repr=False)
    prim_hi_dn: tuple[list[float], list[float]] = field(repr=False)
    prim_hi_up: tuple[list[float], list[float]] = field(repr=False)

    @property
    def t0(self) -> float:
        return self.bounds[0]

    @property
    def tf(self) -> float:
        return self.bounds[-1]

    @property
    def n_slices(self) -> int:
        return len(self.bounds) - 1

    @property
    def slices(self) -> list[tuple[float, float, Box2]]:
        """Slice view: (t_k, t_{k+1}, velocity box)."""
        b = self.bounds
        return [
            (
                b[k],
                b[k + 1],
                Box2(
                    Interval(self.vlo[0][k], self.vhi[0][k]),
                    Interval(self.vlo[1][k], self.vhi[1][k]),
                ),
            )
            for k in range(self.n_slices)
        ]

    # -- queries ---------------------------------------------------------

    def _check_domain(self, lo: float, hi: float) -> None:
        if lo < self.t0 or hi > self.tf or lo > hi:
            raise TubeDomainError(
                f"time range [{lo}, {hi}] outside tube domain [{self.t0}, {self.tf}]"
            )

    def eval(self, t: Interval | float) -> Box2:
        """Hull of the slice boxes intersecting [t]. Boundary contact counts."""
        if isinstance(t, Interval):
            a, b = t.lo, t.hi
        else:
            a = b = float(t)
        self._check_domain(a, b)
        n = self.n_slices
        ka = max(bisect_left(self.bounds, a) - 1, 0)
        kb = min(bisect_right(self.bounds, b) - 1, n - 1)
        if kb < ka:
            kb = ka
        sl = slice(ka, kb + 1)
        return Box2(
            Interval(min(self.vlo[0][sl]), max(self.vhi[0][sl])),
            Interval(min(self.vlo[1][sl]), max(self.vhi[1][sl])),
        )

    def _slice_of(self, t: float) -> int:
        return min(max(bisect_right(self.bounds, t) - 1, 0), self.n_slices - 1)

    def _prim_range(self, dn, up, v, a: float, ka: int, b: float, kb: int):
        """(rounded-down min, rounded-up max) of a primitive over [a, b].

        The primitive is piecewise linear, so extrema sit at the query
        endpoints or at slice boundaries strictly between them.  ka/kb are
        the slice indices of a and b, computed once by the caller.
        """
        bounds = self.bounds
        dt = a - bounds[ka]
        if dt == 0.0:
            da, ua = dn[ka], up[ka]
        else:
            p = dt * v[ka]
            da = _dn(dn[ka] + _dn(p))
            ua = _up(up[ka] + _up(p))
        dt = b - bounds[kb]
        if dt == 0.0:
            db, ub_ = dn[kb], up[kb]
        else:
            p = dt * v[kb]
            db = _dn(dn[kb] + _dn(p))
            ub_ = _up(up[kb] + _up(p))
        mn = da if da < db else db
        mx = ua if ua > ub_ else ub_
        if kb > ka:
            m = min(dn[ka + 1 : kb + 1])
            if m < mn:
                mn = m
            m = max(up[ka + 1 : kb + 1])
            if m > mx:
                mx = m
        return mn, mx

    def _component_integral(self, c: int, a1, ka1, b1, kb1, a2, ka2, b2, kb2):
        lo_dn, lo_up = self.prim_lo_dn[c], self.prim_lo_up[c]
        hi_dn, hi_up = self.prim_hi_dn[c], self.prim_hi_up[c]
        v_lo, v_hi = self.vlo[c], self.vhi[c]
        min_lo2, _ = self._prim_range(lo_dn, lo_up, v_lo, a2, ka2, b2, kb2)
        _, max_lo1 = self._prim_range(lo_dn, lo_up, v_lo, a1, ka1, b1, kb1)
        _, max_hi2 = self._prim_range(hi_dn, hi_up, v_hi, a2, ka2, b2, kb2)
        min_hi1, _ = self._prim_range(hi_dn, hi_up, v_hi, a1, ka1, b1, kb1)
        return _dn(min_lo2 - max_lo1), _up(max_hi2 - min_hi1)

    def _corner_slices(self, t1: Interval, t2: Interval):
        if t1.is_empty or t2.is_empty:
            raise TubeDomainError("empty time interval")
        self._check_domain(t1.lo, t1.hi)
        self._check_domain(t2.lo, t2.hi)
        return (self._slice_of(t1.lo), self._slice_of(t1.hi),
                self._slice_of(t2.lo), self._slice_of(t2.hi))

    def integral(self, t1: Interval, t2: Interval) -> Box2:
        """Guaranteed integral of the tube from [t1] to [t2].

        Encloses the integral of every velocity selection inside the tube
        over every pair a in [t1], b in [t2] with a <= b.  When [t2] lies
        entirely before [t1] the directed integral is mirrored; results
        remain valid enclosures in both cases.
        """
        if t2.hi < t1.lo and not (t1.is_empty or t2.is_empty):
            return -self.integral(t2, t1)
        ka1, kb1, ka2, kb2 = self._corner_slices(t1, t2)
        xlo, xhi = self._component_integral(0, t1.lo, ka1, t1.hi, kb1,
                                            t2.lo, ka2, t2.hi, kb2)
        ylo, yhi = self._component_integral(1, t1.lo, ka1, t1.hi, kb1,
                                            t2.lo, ka2, t2.hi, kb2)
        return Box2(Interval(xlo, xhi), Interval(ylo, yhi))

    def integral_contains_zero(self, t1: Interval, t2: Interval) -> bool:
        """contains_zero(integral(t1, t2)) with an early exit on the first
        component; the paving inner loop lives on this."""
        if t2.hi < t1.lo and not (t1.is_empty or t2.is_empty):
            t1, t2 = t2, t1
        ka1, kb1, ka2, kb2 = self._corner_slices(t1, t2)
        xlo, xhi = self._component_integral(0, t1.lo, ka1, t1.hi, kb1,
                                            t2.lo, ka2, t2.hi, kb2)
        if xlo > 0.0 or xhi < 0.0:
            return False
        ylo, yhi = self._component_integral(1, t1.lo, ka1, t1.hi, kb1,
                                            t2.lo, ka2, t2.hi, kb2)
        return ylo <= 0.0 <= yhi

    def position_envelope(self) -> np.ndarray:
        """Per-boundary enclosure of the zero-based position, (n+1, 4):
        columns x_lo, x_hi, y_lo, y_hi.  Used by the trajectory figure."""
        cols = [
            self.prim_lo_dn[0],
            self.prim_hi_up[0],
            self.prim_lo_dn[1],
            self.prim_hi_up[1],
        ]
        return np.array(cols, dtype=float).T


def _slice_edges(t0: float, tf: float, width: float) -> np.ndarray:
    n = max(int(math.ceil((tf - t0) / width)), 1)
    edges = t0 + width * np.arange(n + 1)
    edges[-1] = tf
    # a sliver of a final slice only adds bookkeeping; merge it
    if n >= 2 and edges[-1] - edges[-2] < 1e-9 * width:
        edges = np.delete(edges, -2)
    return edges


def _per_slice_extrema(ts, vals, edges):
    """Min and max of the piecewise-linear interpolant of (ts, vals) over
    each slice [edges[k], edges[k+1]].  vals is (n,) for one component."""
    edge_vals = np.interp(edges, ts, vals)
    starts = np.searchsorted(ts, edges[:-1], side="left")
    stops = np.searchsorted(ts, edges[1:], side="right")
    n = edges.size - 1
    mn = np.minimum(edge_vals[:-1], edge_vals[1:])
    mx = np.maximum(edge_vals[:-1], edge_vals[1:])
    nonempty = stops > starts
    if nonempty.any():
        # reduceat misbehaves on empty segments; mask them out afterwards
        red_min = np.minimum.reduceat(vals, np.minimum(starts, vals.size - 1))[:n]
        red_max = np.maximum.reduceat(vals, np.minimum(starts, vals.size - 1))[:n]
        mn = np.where(nonempty, np.minimum(mn, red_min), mn)
        mx = np.where(nonempty, np.maximum(mx, red_max), mx)
    return mn, mx


def build_tube(
    samples: VelocitySamples,
    slice_width: float | None = None,
    sigma: np.ndarray | float | None = None,
    sigma_multiplier: float = 2.0,
) -> VelocityTube:
    """Build a velocity tube from sampled measurements.

    Each slice box hulls the piecewise-linear interpolant of the samples
    over the slice and is inflated by sigma_multiplier times the largest
    standard deviation seen in the slice.  The default slice width groups
    roughly ten samples per slice (10x the median sample spacing).

    Raises TubeConstructionError for fewer than two samples, a missing
    sigma, or a non-positive slice width.
    """
    if len(samples) < 2:
        raise TubeConstructionError("need at least 2 samples to build a tube")
    if sigma is None:
        sigma = samples.sigma
    if sigma is None:
        raise TubeConstructionError("no sigma: samples carry none and none was given")
    ts = samples.t
    if slice_width is None:
        slice_width = 10.0 * float(np.median(np.diff(ts)))
    if slice_width <= 0:
        raise TubeConstructionError("slice width must be > 0")

    edges = _slice_edges(float(ts[0]), float(ts[-1]), float(slice_width))
    n = edges.size - 1

    sig = np.asarray(sigma, dtype=float)
    if sig.ndim == 0:
        sig_slice = np.full(n, float(sig))
    else:
        if sig.shape != ts.shape:
            raise TubeConstructionError("per-sample sigma must match sample count")
        smn, smx = _per_slice_extrema(ts, sig, edges)
        sig_slice = smx
    infl = sigma_multiplier * sig_slice

    vlo = []
    vhi = []
    for c in range(2):
        mn, mx = _per_slice_extrema(ts, samples.v[:, c], edges)
        vlo.append(np.nextafter(mn - infl, -_INF).tolist())
        vhi.append(np.nextafter(mx + infl, _INF).tolist())

    bounds = edges.tolist()
    widths = np.diff(edges).tolist()

    def accumulate(vals: list[float]):
        dn = [0.0]
        up = [0.0]
        adn = 0.0
        aup = 0.0
        for k in range(n):
            p = widths[k] * vals[k]
            adn = _dn(adn + _dn(p))
            aup = _up(aup + _up(p))
            dn.append(adn)
            up.append(aup)
        return dn, up

    plo = [accumulate(vlo[c]) for c in range(2)]
    phi = [accumulate(vhi[c]) for c in range(2)]

    return VelocityTube(
        bounds=bounds,
        vlo=(vlo[0], vlo[1]),
        vhi=(vhi[0], vhi[1]),
        prim_lo_dn=(plo[0][0], plo[1][0]),
        prim_lo_up=(plo[0][1], plo[1][1]),
        prim_hi_dn=(phi[0][0], phi[1][0]),
        prim_hi_up=(phi[0][1], phi[1][1]),
    )
