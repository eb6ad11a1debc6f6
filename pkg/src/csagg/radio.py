"""Per-round radio connectivity and independent per-link packet loss.

Delivery randomness is counter-based: each directed link draws one uniform
from a splitmix64 hash of (seed, timestep, round, sender, receiver) and the
packet is delivered iff the draw is >= loss_p. This makes runs reproducible,
order-independent, and monotone in loss_p (raising p only removes
deliveries).

Node ids: riders are 0..n-1, sinks are n..n+s-1. Sinks never transmit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import RiderPositions

UNREACHABLE = np.inf


@dataclass(frozen=True)
class RadioParams:
    range_m: float = 50.0
    loss_p: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.range_m <= 0:
            raise ConfigError("range_m must be positive")
        if not 0.0 <= self.loss_p <= 1.0:
            raise ConfigError("loss_p must be in [0, 1]")


@dataclass(frozen=True)
class Reachability:
    round: int
    delivered: frozenset[tuple[int, int]]  # ordered (sender, receiver) pairs


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    # array-typed (>= 1-d) throughout: numpy scalar uints warn on wraparound
    x = (np.atleast_1d(np.asarray(x, dtype=np.uint64)) + _GOLDEN).astype(np.uint64)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def link_uniforms(
    seed: int, time: float, round_index: int, senders: np.ndarray, receivers: np.ndarray
) -> np.ndarray:
    """One uniform in [0, 1) per directed link, keyed independently of call order."""
    base = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    base = _splitmix64(base ^ np.float64(time).view(np.uint64))
    base = _splitmix64(base ^ np.uint64(round_index))
    z = _splitmix64(base ^ senders.astype(np.uint64) * np.uint64(0x2545F4914F6CDD1D))
    z = _splitmix64(z ^ receivers.astype(np.uint64))
    return (z >> np.uint64(11)) * 2.0**-53


def place_sinks(positions: RiderPositions) -> np.ndarray:
    """Two sinks at the 2nd and 98th percentile of along-road position, lateral 0."""
    s = positions.pos[:, 0]
    back, front = np.percentile(s, [2.0, 98.0])
    return np.array([[back, 0.0], [front, 0.0]])


def _all_points(positions: RiderPositions, sinks: np.ndarray) -> np.ndarray:
    sinks = np.atleast_2d(np.asarray(sinks, dtype=float))
    return np.vstack([positions.pos, sinks])


def compute_reachability(
    positions: RiderPositions,
    sinks: np.ndarray,
    params: RadioParams,
    round_index: int,
) -> Reachability:
    """Delivered (sender, receiver) pairs for one broadcast round."""
    pts = _all_points(positions, sinks)
    n = positions.n
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    in_range = dist <= params.range_m
    np.fill_diagonal(in_range, False)
    in_range[n:, :] = False  # sinks do not transmit
    senders, receivers = np.nonzero(in_range)
    if params.loss_p > 0.0:
        u = link_uniforms(params.seed, positions.time, round_index, senders, receivers)
        keep = u >= params.loss_p
        senders, receivers = senders[keep], receivers[keep]
    pairs = frozenset(zip(senders.tolist(), receivers.tolist()))
    return Reachability(round=round_index, delivered=pairs)


def hop_distance_to_sinks(
    positions: RiderPositions, sinks: np.ndarray, range_m: float
) -> np.ndarray:
    """BFS hop count from each rider to the nearest sink on the loss-free graph.

    Unreachable riders get UNREACHABLE (inf).
    """
    if range_m <= 0:
        raise ConfigError("range_m must be positive")
    pts = _all_points(positions, sinks)
    n = positions.n
    total = pts.shape[0]
    diff = pts[:, None, :] - pts[None, :, :]
    adj = (diff**2).sum(axis=2) <= range_m**2
    np.fill_diagonal(adj, False)
    hops = np.full(total, UNREACHABLE)
    frontier = list(range(n, total))
    hops[frontier] = 0.0
    level = 0
    while frontier:
        level += 1
        nxt = []
        for v in frontier:
            for w in np.nonzero(adj[v])[0]:
                if hops[w] == UNREACHABLE:
                    hops[w] = level
                    nxt.append(int(w))
        frontier = nxt
    return hops[:n]
