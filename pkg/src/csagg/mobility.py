"""Synthetic peloton traces and velocity series.

The simulator moves n riders along a 1-D road coordinate s with a bounded
lateral offset d in [-5, 5] m. Each step applies, per rider:

  * relaxation towards the (piecewise-constant) target speed profile,
    plus an additive boost while a breakaway is active;
  * flocking accelerations over neighbors within neighbor_radius:
    separation (repulsion inside 1.5 m), alignment (towards the mean
    neighbor velocity) and cohesion (towards the neighbor centroid),
    with the combined flocking term clamped to +/-2 m/s^2;
  * forward Euler integration with the configured dt.

Breakaways are Poisson-triggered per rider: an additive target-speed boost
for a fixed duration, after which relaxation pulls the rider back to the
group speed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import ConfigError, DimensionError, TraceFormatError
from .graph import RiderPositions

SEPARATION_RADIUS_M = 1.5
FLOCK_ACCEL_CLAMP = 2.0  # m/s^2
SPEED_RELAX_PER_S = 0.5
LATERAL_HALFWIDTH_M = 5.0

SpeedProfile = tuple[tuple[float, float], ...]  # (start_time_s, speed_mps) pairs


@dataclass(frozen=True)
class VelocityFrame:
    """Along-road velocity of every rider at one instant."""

    time: float
    x: np.ndarray  # (n,) m/s

    def __post_init__(self):
        v = np.asarray(self.x, dtype=float)
        if not np.all(np.isfinite(v)):
            raise DimensionError("velocities must be finite")
        object.__setattr__(self, "x", v)


@dataclass(frozen=True)
class RaceTrace:
    dt: float
    frames: tuple[RiderPositions, ...]

    def __post_init__(self):
        if not self.frames:
            raise DimensionError("trace has no frames")
        n = self.frames[0].n
        if any(f.n != n for f in self.frames):
            raise DimensionError("all frames must have the same rider count")

    @property
    def n(self) -> int:
        return self.frames[0].n

    @property
    def duration(self) -> float:
        return self.dt * (len(self.frames) - 1)


@dataclass(frozen=True)
class PelotonParams:
    n: int = 130
    duration: float = 780.0
    dt: float = 1.0
    base_speed_profile: SpeedProfile = ((0.0, 10.0),)
    separation_gain: float = 1.0
    alignment_gain: float = 0.6
    cohesion_gain: float = 0.02
    neighbor_radius: float = 12.0
    breakaway_rate: float = 0.0005  # events per rider per second
    breakaway_boost: float = 3.0  # m/s
    breakaway_duration: float = 20.0  # s
    speed_jitter: float = 0.3  # m/s initial spread around the profile
    init_length: float = 200.0  # m, initial along-road column length
    seed: int = 0

    def validate(self) -> None:
        if self.n < 1 or self.dt <= 0 or self.duration <= 0:
            raise ConfigError("n, dt and duration must be positive")
        if min(self.separation_gain, self.alignment_gain, self.cohesion_gain) < 0:
            raise ConfigError("gains must be >= 0")
        if self.breakaway_rate < 0 or self.breakaway_duration < 0:
            raise ConfigError("breakaway rates must be >= 0")
        if self.neighbor_radius <= 0 or self.init_length <= 0:
            raise ConfigError("neighbor_radius and init_length must be positive")
        if not self.base_speed_profile:
            raise ConfigError("speed profile is empty")

    def speed_at(self, t: float) -> float:
        speed = self.base_speed_profile[0][1]
        for start, value in self.base_speed_profile:
            if t >= start:
                speed = value
        return speed


def simulate_race(params: PelotonParams) -> RaceTrace:
    """Run the peloton simulator; deterministic for a fixed seed."""
    params.validate()
    rng = np.random.default_rng(params.seed)
    n, dt = params.n, params.dt
    # duration/dt sampled instants: t = 0, dt, ..., duration - dt
    steps = int(round(params.duration / dt))
    if steps < 2:
        raise ConfigError("duration must cover at least 2 timesteps")

    pos = np.empty((n, 2))
    pos[:, 0] = rng.uniform(0.0, params.init_length, size=n)
    pos[:, 1] = rng.uniform(-4.0, 4.0, size=n)
    vel = np.zeros((n, 2))
    vel[:, 0] = params.speed_at(0.0) + params.speed_jitter * rng.standard_normal(n)
    boost_until = np.full(n, -1.0)

    frames = [RiderPositions(time=0.0, pos=pos.copy())]
    for step in range(steps - 1):
        t = step * dt
        target = np.full(n, params.speed_at(t))

        # breakaway triggers (only for riders not already attacking)
        draws = rng.random(n)
        starting = (draws < params.breakaway_rate * dt) & (boost_until <= t)
        boost_until[starting] = t + params.breakaway_duration
        target[boost_until > t] += params.breakaway_boost

        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        nbr = dist <= params.neighbor_radius
        counts = nbr.sum(axis=1)

        acc = np.zeros((n, 2))
        has = counts > 0
        if np.any(has):
            # cohesion: towards the neighbor centroid
            centroid = (nbr[:, :, None] * pos[None, :, :]).sum(axis=1)
            centroid[has] /= counts[has, None]
            coh = np.zeros((n, 2))
            coh[has] = params.cohesion_gain * (centroid[has] - pos[has])
            # alignment: towards the mean neighbor velocity
            meanvel = (nbr[:, :, None] * vel[None, :, :]).sum(axis=1)
            meanvel[has] /= counts[has, None]
            ali = np.zeros((n, 2))
            ali[has] = params.alignment_gain * (meanvel[has] - vel[has])
            acc += coh + ali
        # separation: repulsion inside SEPARATION_RADIUS_M
        close = dist < SEPARATION_RADIUS_M
        if np.any(close):
            safe = np.maximum(dist, 1e-6)
            safe[~np.isfinite(safe)] = 1.0
            weight = np.where(close, SEPARATION_RADIUS_M - dist, 0.0) / (SEPARATION_RADIUS_M * safe)
            acc += params.separation_gain * (weight[:, :, None] * diff).sum(axis=1)
        np.clip(acc, -FLOCK_ACCEL_CLAMP, FLOCK_ACCEL_CLAMP, out=acc)

        acc[:, 0] += SPEED_RELAX_PER_S * (target - vel[:, 0])

        vel = vel + dt * acc
        pos = pos + dt * vel
        # keep riders inside the lateral corridor
        low = pos[:, 1] < -LATERAL_HALFWIDTH_M
        high = pos[:, 1] > LATERAL_HALFWIDTH_M
        pos[low, 1] = -LATERAL_HALFWIDTH_M
        pos[high, 1] = LATERAL_HALFWIDTH_M
        vel[low | high, 1] = 0.0

        frames.append(RiderPositions(time=(step + 1) * dt, pos=pos.copy()))
    return RaceTrace(dt=dt, frames=tuple(frames))


def velocities(trace: RaceTrace) -> list[VelocityFrame]:
    """Along-road velocity frames: x_i(t) = (s_i(t) - s_i(t - dt)) / dt."""
    if len(trace.frames) < 2:
        raise DimensionError("need at least 2 frames to compute velocities")
    out = []
    for prev, cur in zip(trace.frames, trace.frames[1:]):
        x = (cur.pos[:, 0] - prev.pos[:, 0]) / trace.dt
        out.append(VelocityFrame(time=cur.time, x=x))
    return out


def ingest_trace(source: str | IO[str], dt: float) -> RaceTrace:
    """Read a position CSV (`time_s,rider_id,s_m,d_m`) into a RaceTrace.

    Riders are indexed by first appearance; timestamps must form a complete
    grid spaced by dt. Malformed rows, duplicate cells and grid gaps raise
    TraceFormatError naming the offending line.
    """
    if dt <= 0:
        raise ConfigError("dt must be positive")
    if isinstance(source, str):
        with open(source, newline="", encoding="utf-8") as fh:
            return ingest_trace(fh, dt)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [c.strip() for c in header] != ["time_s", "rider_id", "s_m", "d_m"]:
        raise TraceFormatError("line 1: expected header time_s,rider_id,s_m,d_m")

    rider_order: dict[int, int] = {}
    cells: dict[tuple[float, int], tuple[float, float]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise TraceFormatError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            t = float(row[0])
            rider = int(row[1])
            s = float(row[2])
            d = float(row[3])
        except ValueError as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from exc
        if rider < 0:
            raise TraceFormatError(f"line {lineno}: negative rider_id {rider}")
        key = (t, rider)
        if key in cells:
            raise TraceFormatError(f"line {lineno}: duplicate cell (t={t}, rider={rider})")
        if rider not in rider_order:
            rider_order[rider] = len(rider_order)
        cells[key] = (s, d)

    if not cells:
        raise TraceFormatError("trace contains no data rows")
    times = sorted({t for t, _ in cells})
    for a, b in zip(times, times[1:]):
        if not math.isclose(b - a, dt, rel_tol=0.0, abs_tol=1e-9):
            raise TraceFormatError(
                f"timestamps {a} and {b} are not spaced by dt={dt}: grid gap or wrong dt"
            )
    n = len(rider_order)
    frames = []
    for t in times:
        pos = np.empty((n, 2))
        for rider, idx in rider_order.items():
            if (t, rider) not in cells:
                raise TraceFormatError(f"missing cell for rider {rider} at t={t}")
            pos[idx] = cells[(t, rider)]
        frames.append(RiderPositions(time=t, pos=pos))
    return RaceTrace(dt=dt, frames=tuple(frames))


def write_trace_csv(trace: RaceTrace, out: IO[str]) -> None:
    """Emit the position CSV schema consumed by ingest_trace."""
    out.write("time_s,rider_id,s_m,d_m\n")
    for frame in trace.frames:
        for rider in range(trace.n):
            s, d = frame.pos[rider]
            out.write(f"{frame.time:.3f},{rider},{float(s)!r},{float(d)!r}\n")


def write_velocity_csv(frames: Sequence[VelocityFrame], out: IO[str]) -> None:
    out.write("time_s,rider_id,v_mps\n")
    for frame in frames:
        for rider, v in enumerate(frame.x):
            out.write(f"{frame.time:.3f},{rider},{float(v)!r}\n")


def read_velocity_csv(source: str | IO[str]) -> list[VelocityFrame]:
    """Read the `time_s,rider_id,v_mps` schema back into velocity frames."""
    if isinstance(source, str):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_velocity_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [c.strip() for c in header] != ["time_s", "rider_id", "v_mps"]:
        raise TraceFormatError("line 1: expected header time_s,rider_id,v_mps")
    data: dict[float, dict[int, float]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise TraceFormatError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            t, rider, v = float(row[0]), int(row[1]), float(row[2])
        except ValueError as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from exc
        data.setdefault(t, {})[rider] = v
    frames = []
    for t in sorted(data):
        by_rider = data[t]
        x = np.array([by_rider[r] for r in sorted(by_rider)])
        frames.append(VelocityFrame(time=t, x=x))
    return frames
