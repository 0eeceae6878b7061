"""Tracker-export ingestion and trajectory CSV interchange.

Marker-tracking exports arrive as (t, x, y) samples of the pendulum weight
in a y-up lab frame. The angle is measured from the positive vertical axis
at the pivot, so a marker hanging straight below the pivot reads pi.

The toolkit's own trajectory CSV dialect is `t,theta[,omega]` with SI units
and a `.` decimal point; it is both what `pendulum simulate` writes and what
the fitting commands read back.
"""

from __future__ import annotations

import csv
import math
from typing import Optional

import numpy as np

from .errors import IngestError
from .pendulum import Trajectory

JITTER_TOLERANCE = 0.01   # resample when steps deviate >1% from nominal


def read_tracker_csv(path, col_map: Optional[dict] = None):
    """Raw (t, x, y) columns from a tracker export.

    col_map renames columns, e.g. {"t": "time", "x": "x_px", "y": "y_px"}.
    Delimiter may be comma, semicolon, tab or whitespace.
    """
    wanted = {"t": "t", "x": "x", "y": "y"}
    if col_map:
        wanted.update(col_map)

    with open(path, "r", encoding="utf-8") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        try:
            dialect = csv.Sniffer().sniff(sample, delimiters=",;\t ")
        except csv.Error:
            dialect = csv.excel
        rows = [r for r in csv.reader(fh, dialect) if any(c.strip() for c in r)]
    if len(rows) < 3:
        raise IngestError("need a header and at least two data rows")

    header = [c.strip().lower() for c in rows[0]]
    try:
        idx = {k: header.index(v.lower()) for k, v in wanted.items()}
    except ValueError as exc:
        raise IngestError(f"missing column in {header}: {exc}") from exc

    data = np.empty((len(rows) - 1, 3))
    for i, row in enumerate(rows[1:]):
        try:
            data[i] = [float(row[idx["t"]]), float(row[idx["x"]]),
                       float(row[idx["y"]])]
        except (ValueError, IndexError) as exc:
            raise IngestError(f"bad data row {i + 2}: {row}") from exc
    return data[:, 0], data[:, 1], data[:, 2]


def ingest_tracker(path, pivot: tuple[float, float],
                   col_map: Optional[dict] = None) -> Trajectory:
    """Convert a tracked point into an unwrapped angle trajectory.

    Timestamps must be strictly increasing; jittery sampling is linearly
    resampled onto a uniform grid.
    """
    t, x, y = read_tracker_csv(path, col_map)
    steps = np.diff(t)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        raise IngestError(f"timestamps not strictly increasing at row "
                          f"{bad[0] + 2}")

    dx = x - pivot[0]
    dy = y - pivot[1]
    r = np.hypot(dx, dy)
    if np.any(r < 1e-12):
        k = int(np.argmin(r))
        raise IngestError(f"sample {k + 1} coincides with the pivot")
    # angle from the positive vertical axis: straight below the pivot is pi
    theta = np.unwrap(np.arctan2(dx, dy))

    nominal = float(np.median(steps))
    if float(np.max(np.abs(steps - nominal))) > JITTER_TOLERANCE * nominal:
        grid = t[0] + nominal * np.arange(int(round((t[-1] - t[0]) / nominal)) + 1)
        grid = grid[grid <= t[-1] + 1e-12]
        theta = np.interp(grid, t, theta)
        return Trajectory(t0=float(grid[0]), dt=nominal, angles=theta)
    return Trajectory(t0=float(t[0]), dt=nominal, angles=theta)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if traj.omegas is not None:
            fh.write("t,theta,omega\n")
            for t, th, om in zip(traj.times, traj.angles, traj.omegas):
                fh.write(f"{t:.9f},{th!r},{om!r}\n")
        else:
            fh.write("t,theta\n")
            for t, th in zip(traj.times, traj.angles):
                fh.write(f"{t:.9f},{th!r}\n")


def read_trajectory_csv(path) -> Trajectory:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows or rows[0][0].strip().lower() != "t":
        raise IngestError(f"{path} is not a trajectory CSV (t,theta[,omega])")
    header = [c.strip().lower() for c in rows[0]]
    has_omega = "omega" in header
    body = np.array([[float(v) for v in row] for row in rows[1:]])
    if body.shape[0] < 2:
        raise IngestError("trajectory needs at least two samples")
    t = body[:, header.index("t")]
    dt = float(np.median(np.diff(t)))
    return Trajectory(
        t0=float(t[0]), dt=dt, angles=body[:, header.index("theta")],
        omegas=body[:, header.index("omega")] if has_omega else None)
