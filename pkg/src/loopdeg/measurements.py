"""Measurement ingestion: body-frame conversion and CSV loading.

Two delimited input formats are understood:

* ``world_csv``: columns ``t,vx,vy[,sigma]`` with velocities already in the
  world frame;
* ``body_csv``: columns ``t,vr1,vr2,vr3,phi,theta,psi[,sigma]`` with the
  3D velocity in the robot frame and yaw/pitch/roll attitude angles,
  converted here through the ZYX Euler rotation (yaw about z, then pitch
  about y, then roll about x -- the usual marine convention).

A header line is allowed and detected by failing to parse as numbers.
Rows must have strictly increasing, finite timestamps; a malformed row is
reported with its line number.  The optional ``sigma`` column gives a
per-sample standard deviation, otherwise the caller supplies one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .tube import TubeConstructionError, VelocitySamples

__all__ = [
    "BodyFrameSample",
    "euler_zyx",
    "body_to_world",
    "load_measurements",
    "MeasurementFormatError",
    "FORMATS",
]

FORMATS = ("world_csv", "body_csv")


class MeasurementFormatError(ValueError):
    """Malformed measurement file; the message carries the line number."""


@dataclass(frozen=True, slots=True)
class BodyFrameSample:
    """One robot-frame velocity measurement with attitude angles (radians)."""

    t: float
    vr: tuple[float, float, float]
    psi: float  # yaw
    theta: float  # pitch
    phi: float  # roll


def euler_zyx(psi: float, theta: float, phi: float) -> np.ndarray:
    """Rotation matrix body -> world for yaw psi, pitch theta, roll phi."""
    cy, sy = math.cos(psi), math.sin(psi)
    cp, sp = math.cos(theta), math.sin(theta)
    cr, sr = math.cos(phi), math.sin(phi)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def body_to_world(sample: BodyFrameSample) -> tuple[float, float, float]:
    """World-frame planar velocity (t, vx, vy) of a body-frame sample."""
    v = euler_zyx(sample.psi, sample.theta, sample.phi) @ np.asarray(sample.vr)
    return sample.t, float(v[0]), float(v[1])


def _parse_floats(row: list[str], path: str, line_no: int, expect: tuple[int, ...]):
    if len(row) not in expect:
        raise MeasurementFormatError(
            f"{path}:{line_no}: expected {' or '.join(map(str, expect))} columns, "
            f"got {len(row)}"
        )
    try:
        vals = [float(x) for x in row]
    except ValueError as exc:
        raise MeasurementFormatError(f"{path}:{line_no}: {exc}") from None
    if not all(math.isfinite(v) for v in vals):
        raise MeasurementFormatError(f"{path}:{line_no}: non-finite value")
    return vals


def _looks_like_header(row: list[str]) -> bool:
    try:
        [float(x) for x in row]
        return False
    except ValueError:
        return True


def load_measurements(
    path: str | Path,
    fmt: str = "world_csv",
    default_sigma: float | None = None,
) -> VelocitySamples:
    """Read a measurement CSV into world-frame velocity samples.

    When the file has no sigma column, default_sigma (if given) is applied
    globally; otherwise the samples carry sigma=None and the tube builder
    will demand one.
    """
    if fmt not in FORMATS:
        raise MeasurementFormatError(f"unknown measurement format {fmt!r}")
    path = Path(path)
    n_base = 3 if fmt == "world_csv" else 7

    times: list[float] = []
    vels: list[tuple[float, float]] = []
    sigmas: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            row = [c.strip() for c in row if c.strip() != ""]
            if not row:
                continue
            if line_no == 1 and _looks_like_header(row):
                continue
            vals = _parse_floats(row, str(path), line_no, (n_base, n_base + 1))
            if fmt == "world_csv":
                t, vx, vy = vals[:3]
            else:
                t = vals[0]
                sample = BodyFrameSample(
                    t=t, vr=tuple(vals[1:4]), phi=vals[4], theta=vals[5], psi=vals[6]
                )
                _, vx, vy = body_to_world(sample)
            if times and t <= times[-1]:
                raise MeasurementFormatError(
                    f"{path}:{line_no}: timestamps not strictly increasing"
                )
            times.append(t)
            vels.append((vx, vy))
            if len(vals) == n_base + 1:
                if vals[-1] < 0:
                    raise MeasurementFormatError(f"{path}:{line_no}: negative sigma")
                sigmas.append(vals[-1])

    if sigmas and len(sigmas) != len(times):
        raise MeasurementFormatError(
            f"{path}: sigma column present on some rows but not all"
        )
    if len(times) < 2:
        raise TubeConstructionError(f"{path}: need at least 2 samples")

    sigma: np.ndarray | float | None
    if sigmas:
        sigma = np.asarray(sigmas)
    else:
        sigma = default_sigma
    return VelocitySamples(t=np.asarray(times), v=np.asarray(vels), sigma=sigma)
