from .dubins import DubinsPath, PathKind, Pose2D, dubins_shortest, sample_path
from .navigator import GoalStatus, GoalTolerance, Navigator, NavigatorConfig
from .pursuit import FollowerConfig, FollowStatus, PurePursuitFollower

__all__ = [
    "DubinsPath", "PathKind", "Pose2D", "dubins_shortest", "sample_path",
    "GoalStatus", "GoalTolerance", "Navigator", "NavigatorConfig",
    "FollowerConfig", "FollowStatus", "PurePursuitFollower",
]
