"""Goal management around the path planner and follower.

Owns one active goal at a time: plans, follows, replans on follower
failure, preempts instantly on a new goal, and refuses to hang -- an
oscillation detector ends runs whose approach attempts stop improving,
and a hard simulated-time budget backs it up.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .dubins import Pose2D, dubins_shortest
from .pursuit import FollowerConfig, FollowStatus, PurePursuitFollower


class GoalStatus(Enum):
    IDLE = "idle"
    RUNNING = "running"
    SUCCESS = "success"
    ABORTED = "aborted"


@dataclass(frozen=True)
class GoalTolerance:
    position: float = 0.150
    heading: float = 0.15

    def __post_init__(self):
        if self.position <= 0.0 or self.heading <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class NavigatorConfig:
    # Planning radius: hardware minimum (wheelbase / tan 45 deg) plus 20%
    # steering authority so the follower can converge onto min-radius arcs.
    turn_radius: float = 1.2
    max_attempts: int = 3
    improvement_eps: float = 0.005  # m; an attempt must beat the best by this
    time_budget: float = 180.0      # simulated seconds per goal
    follower: FollowerConfig = FollowerConfig()


class Navigator:
    def __init__(self, cfg: NavigatorConfig = NavigatorConfig()):
        self.cfg = cfg
        self.status = GoalStatus.IDLE
        self.goal: Optional[Pose2D] = None
        self.tol = GoalTolerance()
        self.diagnostic: Optional[str] = None
        self._follower: Optional[PurePursuitFollower] = None
        self._attempts = 0
        self._best_err = float("inf")
        self._t_start = 0.0
        self.last_path = None
        self.path_version = 0

    @property
    def active(self) -> bool:
        return self.status is GoalStatus.RUNNING

    def set_goal(self, goal: Pose2D, tol: GoalTolerance = GoalTolerance(),
                 t: float = 0.0) -> None:
        """Accepting a goal preempts any current one, at any time."""
        self.goal = goal
        self.tol = tol
        self.status = GoalStatus.RUNNING
        self.diagnostic = None
        self._follower = None
        self._attempts = 0
        self._best_err = float("inf")
        self._t_start = t

    def cancel(self) -> None:
        if self.status is GoalStatus.RUNNING:
            self.status = GoalStatus.ABORTED
            self.diagnostic = "cancelled by operator"
        self._follower = None

    def _abort(self, why: str) -> None:
        self.status = GoalStatus.ABORTED
        self.diagnostic = why
        self._follower = None

    def _plan(self, pose: Pose2D) -> None:
        path = dubins_shortest(pose, self.goal, self.cfg.turn_radius)
        self.last_path = path
        self.path_version += 1
        self._follower = PurePursuitFollower(path, self.tol, self.cfg.follower)

    def tick(self, t: float, pose: Pose2D, steer_angle: float = None) -> tuple:
        """-> (speed m/s, wheel angle rad); zeros unless actively chasing."""
        if self.status is not GoalStatus.RUNNING:
            return 0.0, 0.0

        if t - self._t_start > self.cfg.time_budget:
            self._abort(f"time budget {self.cfg.time_budget:.0f} s exhausted")
            return 0.0, 0.0

        if self._follower is None:
            self._attempts += 1
            self._plan(pose)

        speed, wheel, status = self._follower.update(pose, steer_angle)
        if status is FollowStatus.SUCCESS:
            self.status = GoalStatus.SUCCESS
            self.diagnostic = None
            return 0.0, 0.0
        if status is FollowStatus.FAILURE:
            attempt_best = self._follower.best_position_error
            improved = attempt_best < self._best_err - self.cfg.improvement_eps
            self._best_err = min(self._best_err, attempt_best)
            if self._attempts >= self.cfg.max_attempts and not improved:
                self._abort(
                    f"oscillating around goal: {self._attempts} approach "
                    f"attempts, best position error "
                    f"{self._best_err * 1000.0:.1f} mm "
                    f"(last: {self._follower.diagnostic})")
            else:
                self._follower = None  # replan from wherever we are next tick
            return 0.0, 0.0
        return speed, wheel
