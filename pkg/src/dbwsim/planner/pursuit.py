"""Pure-pursuit tracking of a sampled path.

Steering chases a lookahead point on the path; speed holds cruise and
ramps down proportionally on final approach so the drive lag cannot carry
the cart through the goal ring while stopping.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..geometry import MAX_WHEEL_ANGLE
from ..kernels import wrap_pi
from .dubins import DubinsPath, Pose2D, path_end, sample_path


class FollowStatus(Enum):
    RUNNING = "running"
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True)
class FollowerConfig:
    cruise_speed: float = 0.2       # supervised-lab test speed
    creep_speed: float = 0.03
    approach_gain: float = 0.6      # m/s per metre of remaining distance
    lookahead_tol_factor: float = 2.0
    lookahead_min: float = 0.3
    lookahead_max: float = 1.5
    sample_ds: float = 0.05
    abort_cross_track: float = 0.75
    wheelbase: float = 1.0
    max_wheel_angle: float = MAX_WHEEL_ANGLE
    # The steering actuator swings slowly (seconds lock to lock), so speed
    # backs off toward zero while the wheel is far from where pursuit wants
    # it; full speed returns within this alignment band.
    steer_slow_band: float = 0.35


class PurePursuitFollower:
    """Tracks one path; call update() once per control tick."""

    def __init__(self, path: DubinsPath, tol, cfg: FollowerConfig):
        self.cfg = cfg
        self.tol = tol
        self.goal = path_end(path)
        self.samples = sample_path(path, cfg.sample_ds)
        self.lookahead = min(cfg.lookahead_max,
                             max(cfg.lookahead_min,
                                 cfg.lookahead_tol_factor * tol.position))
        self._idx = 0
        self.status = FollowStatus.RUNNING
        self.diagnostic: Optional[str] = None
        self.best_position_error = float("inf")

    def _fail(self, why: str):
        self.status = FollowStatus.FAILURE
        self.diagnostic = why
        return 0.0, 0.0, self.status

    def update(self, pose: Pose2D, steer_angle: Optional[float] = None):
        """-> (speed m/s, wheel angle rad, status) for this tick.

        ``steer_angle`` is the measured wheel angle when available; it only
        moderates speed while the slow actuator catches up.
        """
        if self.status is not FollowStatus.RUNNING:
            return 0.0, 0.0, self.status

        pos_err = pose.distance_to(self.goal)
        head_err = pose.heading_error_to(self.goal)
        self.best_position_error = min(self.best_position_error, pos_err)
        if pos_err < self.tol.position and head_err < self.tol.heading:
            self.status = FollowStatus.SUCCESS
            return 0.0, 0.0, self.status

        # Progress-constrained nearest sample: search a window ahead of the
        # current index so a self-crossing path cannot yank progress back.
        window = max(4, int(3.0 * self.lookahead / self.cfg.sample_ds))
        hi = min(len(self.samples), self._idx + window)
        seg = self.samples[self._idx:hi]
        dists = np.hypot(seg[:, 0] - pose.x, seg[:, 1] - pose.y)
        rel = int(np.argmin(dists))
        self._idx += rel
        cross_track = float(dists[rel])
        if cross_track > self.cfg.abort_cross_track:
            return self._fail(
                f"cross-track error {cross_track:.2f} m exceeds "
                f"{self.cfg.abort_cross_track:.2f} m")

        if self._idx >= len(self.samples) - 1 and pos_err >= self.tol.position:
            return self._fail(
                f"overran path end {pos_err * 1000.0:.0f} mm from goal")

        # Lookahead target: first sample at least one lookahead away along
        # the path; the goal itself once we are inside the last stretch.
        target_idx = min(len(self.samples) - 1,
                         self._idx + max(1, int(round(self.lookahead
                                                      / self.cfg.sample_ds))))
        tx, ty = self.samples[target_idx, 0], self.samples[target_idx, 1]

        dx = tx - pose.x
        dy = ty - pose.y
        look = math.hypot(dx, dy)
        wheel = 0.0
        if look > 1e-9:
            lateral = -dx * math.sin(pose.heading) + dy * math.cos(pose.heading)
            curvature = 2.0 * lateral / (look * look)
            wheel = math.atan(curvature * self.cfg.wheelbase)
            wheel = max(-self.cfg.max_wheel_angle,
                        min(self.cfg.max_wheel_angle, wheel))

        speed = min(self.cfg.cruise_speed,
                    max(self.cfg.creep_speed, self.cfg.approach_gain * pos_err))
        if steer_angle is not None:
            misalign = abs(wheel - steer_angle)
            speed *= max(0.0, 1.0 - misalign / self.cfg.steer_slow_band)
        return speed, wheel, self.status
