"""Steering linkage math and actuator command calibration.

The front wheels are steered by a linear actuator pushing on a crank at the
axle. ``angle_to_extension`` maps the central wheel angle to the actuator
feedback extension through the linkage triangle; ``angle_to_command`` maps
the wheel angle to the steering controller's serial command counts.

Sign convention: positive wheel angle = left turn. All angles are radians
internally; degrees appear only in config files and on the CLI.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import RangeError

# Admissible central wheel angle. The actuator anchors are calibrated at
# +/-45 deg; commands outside the calibrated band can damage the linkage.
MAX_WHEEL_ANGLE = math.pi / 4.0

# Small slack so boundary values survive a float round trip.
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class SteeringGeometry:
    """Tape-measure quantities of the steering linkage, all in mm.

    r1 is the crank radius at the axle; (x0, y0) locate the actuator's
    chassis anchor relative to the crank pivot, with y0 negative (the
    anchor sits behind the pivot line); w and h describe the kingpin
    layout that fixes the crank's neutral direction; install_len is the
    actuator's installed length and ext_init the feedback extension
    reading at installation.

    The shipped defaults are placeholders for a bench setup -- measure
    them on the actual vehicle before driving hardware.
    """

    r1: float = 120.0
    x0: float = 320.0
    y0: float = -40.0
    w: float = 500.0
    h: float = 500.0
    install_len: float = 390.0
    ext_init: float = 230.0

    def __post_init__(self):
        for name in ("r1", "w", "h", "install_len"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.y0 >= 0.0:
            raise ValueError(f"y0 must be negative, got {self.y0}")

    def coeffs(self) -> tuple:
        return (self.r1, self.x0, self.y0, self.w, self.h,
                self.install_len, self.ext_init)


@dataclass(frozen=True)
class ActuatorCalibration:
    """Anchor points of the steering controller's command mapping.

    The two command segments have different slopes (600 counts over the
    right half, 900 over the left), so the mapping is piecewise linear
    through the center anchor, never a single affine fit.
    """

    cmd_max_right: int = 2500
    cmd_center: int = 1900
    cmd_max_left: int = 1000
    angle_max_right: float = -MAX_WHEEL_ANGLE
    angle_max_left: float = MAX_WHEEL_ANGLE
    stroke_max: float = 250.0

    def __post_init__(self):
        if not self.cmd_max_left < self.cmd_center < self.cmd_max_right:
            raise ValueError("command anchors must order left < center < right")
        if not self.angle_max_right < 0.0 < self.angle_max_left:
            raise ValueError("angle anchors must straddle zero")


def _round_half_away(x: float) -> int:
    """Round half away from zero; the one rounding rule used for commands."""
    return int(math.floor(x + 0.5)) if x >= 0.0 else int(math.ceil(x - 0.5))


def angle_to_extension(theta: float, geom: SteeringGeometry,
                       limit: float = MAX_WHEEL_ANGLE) -> float:
    """Actuator feedback extension (mm) for a wheel angle (rad).

    Raises RangeError outside the admissible angle range; clamping is the
    safety layer's job, never this function's.
    """
    if math.isnan(theta) or abs(theta) > limit + _EDGE_EPS:
        raise RangeError(f"wheel angle {theta!r} rad outside +/-{limit:.4f}")
    out = kernels.linkage_extension(np.array([float(theta)]), *geom.coeffs())
    return float(out[0])


def extensions_for_angles(thetas: np.ndarray, geom: SteeringGeometry) -> np.ndarray:
    """Vectorized forward map; no range checking (callers sweep freely)."""
    return kernels.linkage_extension(np.asarray(thetas, dtype=np.float64),
                                     *geom.coeffs())


def extension_image(geom: SteeringGeometry,
                    limit: float = MAX_WHEEL_ANGLE) -> tuple:
    """(min, max) of the extension over the admissible angle range.

    The forward map is monotone on the range, so the image endpoints are
    the range endpoints.
    """
    ends = extensions_for_angles(np.array([-limit, limit]), geom)
    return (float(min(ends)), float(max(ends)))


def extension_to_angle(ext: float, geom: SteeringGeometry,
                       limit: float = MAX_WHEEL_ANGLE) -> float:
    """Invert the linkage map by bisection; tolerance well under 1e-6 rad."""
    lo, hi = extension_image(geom, limit)
    if math.isnan(ext) or ext < lo - _EDGE_EPS or ext > hi + _EDGE_EPS:
        raise RangeError(
            f"extension {ext!r} mm outside image [{lo:.3f}, {hi:.3f}]")
    out = kernels.linkage_angle(np.array([float(ext)]), *geom.coeffs(),
                                -limit, limit)
    return float(out[0])


def angles_for_extensions(exts: np.ndarray, geom: SteeringGeometry,
                          limit: float = MAX_WHEEL_ANGLE) -> np.ndarray:
    """Vectorized inverse map; inputs must lie in the extension image."""
    return kernels.linkage_angle(np.asarray(exts, dtype=np.float64),
                                 *geom.coeffs(), -limit, limit)


def is_monotone(geom: SteeringGeometry, limit: float = MAX_WHEEL_ANGLE,
                samples: int = 1000) -> bool:
    """Numerically check strict monotonicity of the forward map."""
    thetas = np.linspace(-limit, limit, samples)
    ls = extensions_for_angles(thetas, geom)
    d = np.diff(ls)
    return bool(np.all(d > 0.0) or np.all(d < 0.0))


def toggle_angles(geom: SteeringGeometry) -> tuple:
    """Wheel angles at the linkage dead points.

    The extension is extremal exactly where the ball joint, crank pivot
    and chassis anchor line up (the actuator line tangent to the crank
    circle); there the map folds and inversion breaks down. A sound
    linkage keeps both angles outside the steering range.
    """
    base = math.atan2(geom.y0, geom.x0) + math.pi / 2.0 \
        - math.atan(geom.w / (2.0 * geom.h))
    wrap = lambda a: math.atan2(math.sin(a), math.cos(a))
    return (wrap(base), wrap(base + math.pi))


def toggle_margin(geom: SteeringGeometry,
                  limit: float = MAX_WHEEL_ANGLE) -> float:
    """Angular clearance between the dead points and the steering range
    (zero means a dead point lies inside the range)."""
    margin = math.inf
    for angle in toggle_angles(geom):
        margin = min(margin, max(0.0, abs(angle) - limit))
    return margin


def validate_stroke(geom: SteeringGeometry, cal: ActuatorCalibration) -> None:
    """Config-load check: the admissible image must fit the physical stroke
    and the linkage must stay clear of its dead points."""
    lo, hi = extension_image(geom, cal.angle_max_left)
    if lo < 0.0 or hi > cal.stroke_max:
        raise ValueError(
            f"extension image [{lo:.1f}, {hi:.1f}] mm exceeds stroke "
            f"[0, {cal.stroke_max:.0f}] mm; adjust ext_init or anchors")
    if toggle_margin(geom, cal.angle_max_left) <= 0.0:
        raise ValueError(
            "linkage dead point inside the steering range; the map folds")
    if not is_monotone(geom, cal.angle_max_left):
        raise ValueError("linkage map is not monotone over the angle range")


def angle_to_command(theta: float, cal: ActuatorCalibration = ActuatorCalibration()) -> int:
    """Wheel angle (rad) -> steering command counts, piecewise linear."""
    if math.isnan(theta) or theta < cal.angle_max_right - _EDGE_EPS \
            or theta > cal.angle_max_left + _EDGE_EPS:
        raise RangeError(f"wheel angle {theta!r} rad outside calibrated range")
    if theta < 0.0:
        frac = theta / cal.angle_max_right
        val = cal.cmd_center + frac * (cal.cmd_max_right - cal.cmd_center)
    else:
        frac = theta / cal.angle_max_left
        val = cal.cmd_center + frac * (cal.cmd_max_left - cal.cmd_center)
    cmd = _round_half_away(val)
    return max(cal.cmd_max_left, min(cal.cmd_max_right, cmd))


def command_to_angle(cmd: int, cal: ActuatorCalibration = ActuatorCalibration()) -> float:
    """Exact piecewise-linear inverse of angle_to_command (pre-rounding)."""
    if cmd < cal.cmd_max_left or cmd > cal.cmd_max_right:
        raise RangeError(
            f"steering command {cmd} outside "
            f"[{cal.cmd_max_left}, {cal.cmd_max_right}]")
    if cmd >= cal.cmd_center:
        frac = (cmd - cal.cmd_center) / (cal.cmd_max_right - cal.cmd_center)
        return frac * cal.angle_max_right
    frac = (cmd - cal.cmd_center) / (cal.cmd_max_left - cal.cmd_center)
    return frac * cal.angle_max_left
