"""Shortest forward-only paths between planar poses under a minimum turning
radius: at most three segments, each a left arc, right arc or straight.

All six candidate words are evaluated in closed form and the shortest
feasible one wins; ties break by the fixed order LSL < RSR < LSR < RSL <
RLR < LRL.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .. import kernels
from ..kernels import wrap_pi


class PathKind(Enum):
    LSL = 0
    RSR = 1
    LSR = 2
    RSL = 3
    RLR = 4
    LRL = 5


@dataclass(frozen=True)
class Pose2D:
    """Planar pose; heading normalized to (-pi, pi] on construction."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_pi(self.heading))

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def heading_error_to(self, other: "Pose2D") -> float:
        return abs(wrap_pi(other.heading - self.heading))


@dataclass(frozen=True)
class DubinsPath:
    """segment_params are the three segment lengths in metres (arc params
    already multiplied by the radius). The start pose anchors the path in
    world coordinates."""

    kind: PathKind
    segment_params: tuple
    radius: float
    total_length: float
    start: Pose2D

    def __post_init__(self):
        if any(p < 0.0 for p in self.segment_params):
            raise ValueError(f"negative segment in {self.segment_params}")


_COINCIDENT_EPS = 1e-9


def dubins_shortest(start: Pose2D, goal: Pose2D, radius: float) -> DubinsPath:
    """Shortest of the six candidate words from start to goal."""
    if radius <= 0.0:
        raise ValueError(f"turn radius must be positive, got {radius}")
    dx = goal.x - start.x
    dy = goal.y - start.y
    dist = math.hypot(dx, dy)
    if dist < _COINCIDENT_EPS and \
            abs(wrap_pi(goal.heading - start.heading)) < _COINCIDENT_EPS:
        return DubinsPath(PathKind.LSL, (0.0, 0.0, 0.0), radius, 0.0, start)

    theta = math.atan2(dy, dx)
    alpha = np.array([(start.heading - theta) % kernels.TWO_PI])
    beta = np.array([(goal.heading - theta) % kernels.TWO_PI])
    d = np.array([dist / radius])
    words = kernels.dubins_words(alpha, beta, d)[0]  # (6, 3)
    totals = words.sum(axis=1)
    idx = int(np.argmin(totals))  # first minimum wins the tie
    if not np.isfinite(totals[idx]):
        raise RuntimeError("no feasible word -- cannot happen for distinct poses")
    params = tuple(float(p) * radius for p in words[idx])
    return DubinsPath(PathKind(idx), params, radius,
                      float(totals[idx]) * radius, start)


def _segment_end(x, y, heading, kind: str, length: float, radius: float):
    if kind == "S":
        return (x + length * math.cos(heading),
                y + length * math.sin(heading), heading)
    u = length / radius
    if kind == "L":
        return (x + radius * (math.sin(heading + u) - math.sin(heading)),
                y + radius * (math.cos(heading) - math.cos(heading + u)),
                heading + u)
    return (x + radius * (math.sin(heading) - math.sin(heading - u)),
            y + radius * (math.cos(heading - u) - math.cos(heading)),
            heading - u)


def path_end(path: DubinsPath) -> Pose2D:
    """Pose after driving all three segments."""
    x, y, heading = path.start.x, path.start.y, path.start.heading
    for kind, length in zip(path.kind.name, path.segment_params):
        x, y, heading = _segment_end(x, y, heading, kind, length, path.radius)
    return Pose2D(x, y, heading)


def sample_path(path: DubinsPath, ds: float) -> np.ndarray:
    """Poses at arc-length steps <= ds over the whole path, endpoints
    included; returns an (n, 3) array of (x, y, heading)."""
    if ds <= 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    total = path.total_length
    if total <= 0.0:
        return np.array([[path.start.x, path.start.y, path.start.heading]])
    n = max(1, int(math.ceil(total / ds - 1e-12)))
    svals = np.linspace(0.0, total, n + 1)

    out = np.empty((n + 1, 3))
    bounds = np.cumsum((0.0,) + path.segment_params)
    seg_start = (path.start.x, path.start.y, path.start.heading)
    lo = 0
    for i, kind in enumerate(path.kind.name):
        # Samples belonging to segment i (the last segment takes the tail).
        hi = np.searchsorted(svals, bounds[i + 1], side="right") \
            if i < 2 else n + 1
        rel = svals[lo:hi] - bounds[i]
        x0, y0, h0 = seg_start
        if kind == "S":
            out[lo:hi, 0] = x0 + rel * math.cos(h0)
            out[lo:hi, 1] = y0 + rel * math.sin(h0)
            out[lo:hi, 2] = h0
        elif kind == "L":
            u = rel / path.radius
            out[lo:hi, 0] = x0 + path.radius * (np.sin(h0 + u) - math.sin(h0))
            out[lo:hi, 1] = y0 + path.radius * (math.cos(h0) - np.cos(h0 + u))
            out[lo:hi, 2] = h0 + u
        else:
            u = rel / path.radius
            out[lo:hi, 0] = x0 + path.radius * (math.sin(h0) - np.sin(h0 - u))
            out[lo:hi, 1] = y0 + path.radius * (np.cos(h0 - u) - math.cos(h0))
            out[lo:hi, 2] = h0 - u
        seg_start = _segment_end(x0, y0, h0, kind,
                                 path.segment_params[i], path.radius)
        lo = hi
    out[:, 2] = np.arctan2(np.sin(out[:, 2]), np.cos(out[:, 2]))
    return out
