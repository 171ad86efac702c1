"""Numeric hot loops shared by the geometry, simulator and planner modules.

Two execution paths cover every kernel:

  * loop-style functions compiled with numba's nopython JIT -- the default;
  * vectorized plain-numpy twins, selected when ``DBWSIM_NO_NUMBA=1`` is
    set or numba is unavailable.

Both paths implement identical arithmetic (the suite cross-checks them);
``benchmarks/bench_kernels.py`` compares their speed. Scalar helpers
(``vehicle_step``, ``wrap_pi``) are single-source and simply run
interpreted on the fallback path.

Angles are radians, lengths are millimetres for the linkage functions and
metres for the vehicle/Dubins functions. Callers own unit discipline.
"""

import math
import os

import numpy as np

NUMBA_ENABLED = False
if not os.environ.get("DBWSIM_NO_NUMBA"):
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        pass


def _jit(func):
    if not NUMBA_ENABLED:
        return func
    return _njit(cache=True)(func)


TWO_PI = 2.0 * math.pi

# Feasibility slack for the word solvers: p^2 and the arccos argument may
# graze their bounds by roundoff on boundary instances (e.g. a pure arc).
EDGE = 1e-12

# Bisection iteration count: bracket width pi/2 shrinks below 1e-15 rad,
# far inside the 1e-6 rad inverse tolerance. Fixed count keeps runs
# deterministic.
BISECT_ITERS = 52


# ---------------------------------------------------------------------------
# Scalar primitives (single source, jitted when numba is on)

def _ext_core_py(theta, alpha_off, r1, x0, y0, install_len, ext_init):
    """Extension with the kingpin offset angle already computed."""
    beta = theta + alpha_off - 0.5 * math.pi
    x = r1 * math.cos(beta)
    y = r1 * math.sin(beta)
    return math.sqrt((x0 - x) ** 2 + (y0 - y) ** 2) - install_len + ext_init


def _ext_scalar_py(theta, r1, x0, y0, w, h, install_len, ext_init):
    """Actuator feedback extension (mm) for one wheel angle (rad)."""
    return _ext_core(theta, math.atan(w / (2.0 * h)), r1, x0, y0,
                     install_len, ext_init)


def _angle_scalar_py(ext, r1, x0, y0, w, h, install_len, ext_init,
                     theta_lo, theta_hi):
    """Invert the linkage map by bisection on a monotone bracket."""
    alpha_off = math.atan(w / (2.0 * h))
    f_lo = _ext_core(theta_lo, alpha_off, r1, x0, y0, install_len, ext_init)
    f_hi = _ext_core(theta_hi, alpha_off, r1, x0, y0, install_len, ext_init)
    sign = 1.0 if f_hi >= f_lo else -1.0
    lo = theta_lo
    hi = theta_hi
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        f_mid = _ext_core(mid, alpha_off, r1, x0, y0, install_len, ext_init)
        if sign * (f_mid - ext) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _wrap_pi_py(a):
    """Wrap a scalar angle to (-pi, pi]; exact no-op when already inside."""
    if -math.pi < a <= math.pi:
        return a
    b = (a + math.pi) % TWO_PI - math.pi
    if b == -math.pi:
        b = math.pi
    return b


def _vehicle_step_py(x, y, heading, v, ext, steer, v_target, ext_target,
                     dt, tau, ext_rate, ext_lo, ext_hi, wheelbase,
                     r1, x0, y0, w, h, install_len, ext_init,
                     theta_lo, theta_hi):
    """One explicit-Euler step of the cart.

    Pose derivatives use the pre-step state; then speed relaxes first-order
    toward its target and the actuator slews rate-limited toward its target.
    Returns (x, y, heading, v, ext, steer) where steer is the wheel angle
    implied by the *new* extension.
    """
    x = x + v * math.cos(heading) * dt
    y = y + v * math.sin(heading) * dt
    heading = _wrap_pi(heading + v * math.tan(steer) / wheelbase * dt)

    v = v + (v_target - v) * (dt / tau)

    d = ext_target - ext
    limit = ext_rate * dt
    if d > limit:
        d = limit
    elif d < -limit:
        d = -limit
    ext = ext + d
    if ext < ext_lo:
        ext = ext_lo
    elif ext > ext_hi:
        ext = ext_hi

    steer = _angle_scalar(ext, r1, x0, y0, w, h, install_len, ext_init,
                          theta_lo, theta_hi)
    return x, y, heading, v, ext, steer


# ---------------------------------------------------------------------------
# Array kernels, loop flavor (what the JIT compiles)

def _linkage_extension_loop_py(thetas, r1, x0, y0, w, h, install_len,
                               ext_init):
    out = np.empty(thetas.shape[0])
    for i in range(thetas.shape[0]):
        out[i] = _ext_scalar(thetas[i], r1, x0, y0, w, h, install_len,
                             ext_init)
    return out


def _linkage_angle_loop_py(exts, r1, x0, y0, w, h, install_len, ext_init,
                           theta_lo, theta_hi):
    out = np.empty(exts.shape[0])
    for i in range(exts.shape[0]):
        out[i] = _angle_scalar(exts[i], r1, x0, y0, w, h, install_len,
                               ext_init, theta_lo, theta_hi)
    return out


def _dubins_words_loop_py(alpha, beta, d):
    """Normalized segment parameters for all six Dubins words.

    Inputs are arrays: start/goal headings in the chord-aligned frame and
    the chord length in turn-radius units. Returns an (n, 6, 3) array of
    (first, middle, last) segment parameters (turn params in rad, straight
    param in radius units); infeasible words are +inf.

    Word order along axis 1: LSL, RSR, LSR, RSL, RLR, LRL.
    """
    n = alpha.shape[0]
    out = np.full((n, 6, 3), np.inf)
    for i in range(n):
        a = alpha[i]
        b = beta[i]
        dd = d[i]
        sa = math.sin(a)
        sb = math.sin(b)
        ca = math.cos(a)
        cb = math.cos(b)
        cab = math.cos(a - b)

        # LSL
        p_sq = 2.0 + dd * dd - 2.0 * cab + 2.0 * dd * (sa - sb)
        if p_sq >= -EDGE:
            mid = math.atan2(cb - ca, dd + sa - sb)
            out[i, 0, 0] = (mid - a) % TWO_PI
            out[i, 0, 1] = math.sqrt(max(0.0, p_sq))
            out[i, 0, 2] = (b - mid) % TWO_PI

        # RSR
        p_sq = 2.0 + dd * dd - 2.0 * cab + 2.0 * dd * (sb - sa)
        if p_sq >= -EDGE:
            mid = math.atan2(ca - cb, dd - sa + sb)
            out[i, 1, 0] = (a - mid) % TWO_PI
            out[i, 1, 1] = math.sqrt(max(0.0, p_sq))
            out[i, 1, 2] = (mid - b) % TWO_PI

        # LSR
        p_sq = -2.0 + dd * dd + 2.0 * cab + 2.0 * dd * (sa + sb)
        if p_sq >= -EDGE:
            p = math.sqrt(max(0.0, p_sq))
            mid = math.atan2(-ca - cb, dd + sa + sb) - math.atan2(-2.0, p)
            out[i, 2, 0] = (mid - a) % TWO_PI
            out[i, 2, 1] = p
            out[i, 2, 2] = (mid - b) % TWO_PI

        # RSL
        p_sq = -2.0 + dd * dd + 2.0 * cab - 2.0 * dd * (sa + sb)
        if p_sq >= -EDGE:
            p = math.sqrt(max(0.0, p_sq))
            mid = math.atan2(ca + cb, dd - sa - sb) - math.atan2(2.0, p)
            out[i, 3, 0] = (a - mid) % TWO_PI
            out[i, 3, 1] = p
            out[i, 3, 2] = (b - mid) % TWO_PI

        # RLR
        tmp = (6.0 - dd * dd + 2.0 * cab + 2.0 * dd * (sa - sb)) / 8.0
        if abs(tmp) <= 1.0 + EDGE:
            p = (TWO_PI - math.acos(min(1.0, max(-1.0, tmp)))) % TWO_PI
            t = (a - math.atan2(ca - cb, dd - sa + sb) + 0.5 * p) % TWO_PI
            out[i, 4, 0] = t
            out[i, 4, 1] = p
            out[i, 4, 2] = (a - b - t + p) % TWO_PI

        # LRL
        tmp = (6.0 - dd * dd + 2.0 * cab + 2.0 * dd * (sb - sa)) / 8.0
        if abs(tmp) <= 1.0 + EDGE:
            p = (TWO_PI - math.acos(min(1.0, max(-1.0, tmp)))) % TWO_PI
            t = (-a + math.atan2(cb - ca, dd + sa - sb) + 0.5 * p) % TWO_PI
            out[i, 5, 0] = t
            out[i, 5, 1] = p
            out[i, 5, 2] = (b - a - t + p) % TWO_PI

    return out


# ---------------------------------------------------------------------------
# Array kernels, vectorized numpy flavor (the fallback path)

def _linkage_extension_np(thetas, r1, x0, y0, w, h, install_len, ext_init):
    alpha = thetas + np.arctan(w / (2.0 * h))
    beta = alpha - 0.5 * np.pi
    x = r1 * np.cos(beta)
    y = r1 * np.sin(beta)
    return np.sqrt((x0 - x) ** 2 + (y0 - y) ** 2) - install_len + ext_init


def _linkage_angle_np(exts, r1, x0, y0, w, h, install_len, ext_init,
                      theta_lo, theta_hi):
    lo = np.full_like(exts, theta_lo)
    hi = np.full_like(exts, theta_hi)
    f_lo = _ext_scalar_py(theta_lo, r1, x0, y0, w, h, install_len, ext_init)
    f_hi = _ext_scalar_py(theta_hi, r1, x0, y0, w, h, install_len, ext_init)
    sign = 1.0 if f_hi >= f_lo else -1.0
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        f_mid = _linkage_extension_np(mid, r1, x0, y0, w, h, install_len,
                                      ext_init)
        below = sign * (f_mid - exts) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _dubins_words_np(alpha, beta, d):
    n = alpha.shape[0]
    out = np.full((n, 6, 3), np.inf)

    sa = np.sin(alpha)
    sb = np.sin(beta)
    ca = np.cos(alpha)
    cb = np.cos(beta)
    cab = np.cos(alpha - beta)

    # LSL
    p_sq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
    ok = p_sq >= -EDGE
    p = np.sqrt(np.where(p_sq > 0.0, p_sq, 0.0))
    mid = np.arctan2(cb - ca, d + sa - sb)
    out[:, 0, 0] = np.where(ok, (mid - alpha) % TWO_PI, np.inf)
    out[:, 0, 1] = np.where(ok, p, np.inf)
    out[:, 0, 2] = np.where(ok, (beta - mid) % TWO_PI, np.inf)

    # RSR
    p_sq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
    ok = p_sq >= -EDGE
    p = np.sqrt(np.where(p_sq > 0.0, p_sq, 0.0))
    mid = np.arctan2(ca - cb, d - sa + sb)
    out[:, 1, 0] = np.where(ok, (alpha - mid) % TWO_PI, np.inf)
    out[:, 1, 1] = np.where(ok, p, np.inf)
    out[:, 1, 2] = np.where(ok, (mid - beta) % TWO_PI, np.inf)

    # LSR
    p_sq = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
    ok = p_sq >= -EDGE
    p = np.sqrt(np.where(p_sq > 0.0, p_sq, 0.0))
    mid = np.arctan2(-ca - cb, d + sa + sb) - np.arctan2(-2.0, p)
    out[:, 2, 0] = np.where(ok, (mid - alpha) % TWO_PI, np.inf)
    out[:, 2, 1] = np.where(ok, p, np.inf)
    out[:, 2, 2] = np.where(ok, (mid - beta) % TWO_PI, np.inf)

    # RSL
    p_sq = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb)
    ok = p_sq >= -EDGE
    p = np.sqrt(np.where(p_sq > 0.0, p_sq, 0.0))
    mid = np.arctan2(ca + cb, d - sa - sb) - np.arctan2(2.0, p)
    out[:, 3, 0] = np.where(ok, (alpha - mid) % TWO_PI, np.inf)
    out[:, 3, 1] = np.where(ok, p, np.inf)
    out[:, 3, 2] = np.where(ok, (beta - mid) % TWO_PI, np.inf)

    # RLR
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    ok = np.abs(tmp) <= 1.0 + EDGE
    p = (TWO_PI - np.arccos(np.minimum(1.0, np.maximum(-1.0, tmp)))) % TWO_PI
    t = (alpha - np.arctan2(ca - cb, d - sa + sb) + 0.5 * p) % TWO_PI
    out[:, 4, 0] = np.where(ok, t, np.inf)
    out[:, 4, 1] = np.where(ok, p, np.inf)
    out[:, 4, 2] = np.where(ok, (alpha - beta - t + p) % TWO_PI, np.inf)

    # LRL
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
    ok = np.abs(tmp) <= 1.0 + EDGE
    p = (TWO_PI - np.arccos(np.minimum(1.0, np.maximum(-1.0, tmp)))) % TWO_PI
    t = (-alpha + np.arctan2(cb - ca, d + sa - sb) + 0.5 * p) % TWO_PI
    out[:, 5, 0] = np.where(ok, t, np.inf)
    out[:, 5, 1] = np.where(ok, p, np.inf)
    out[:, 5, 2] = np.where(ok, (beta - alpha - t + p) % TWO_PI, np.inf)

    return out


# ---------------------------------------------------------------------------
# Path selection

_ext_core = _jit(_ext_core_py)
_ext_scalar = _jit(_ext_scalar_py)
_angle_scalar = _jit(_angle_scalar_py)
_wrap_pi = _jit(_wrap_pi_py)
vehicle_step = _jit(_vehicle_step_py)

if NUMBA_ENABLED:
    linkage_extension = _jit(_linkage_extension_loop_py)
    linkage_angle = _jit(_linkage_angle_loop_py)
    dubins_words = _jit(_dubins_words_loop_py)
else:
    linkage_extension = _linkage_extension_np
    linkage_angle = _linkage_angle_np
    dubins_words = _dubins_words_np


def wrap_pi(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    return float(_wrap_pi(float(a)))


def warmup() -> None:
    """Trigger JIT compilation of all kernels (no-op on the plain path)."""
    thetas = np.array([0.0, 0.1])
    linkage_extension(thetas, 100.0, 300.0, -50.0, 600.0, 400.0, 390.0, 190.0)
    linkage_angle(np.array([40.0]), 100.0, 300.0, -50.0, 600.0, 400.0,
                  390.0, 190.0, -0.8, 0.8)
    vehicle_step(0.0, 0.0, 0.0, 0.0, 40.0, 0.0, 0.1, 41.0, 0.01, 0.5, 8.0,
                 0.0, 250.0, 1.0, 100.0, 300.0, -50.0, 600.0, 400.0, 390.0,
                 190.0, -0.8, 0.8)
    dubins_words(np.array([0.3]), np.array([1.2]), np.array([2.0]))
