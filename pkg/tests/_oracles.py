"""Independent reference implementations used only to check the package.

Everything here is a direct scalar transcription with the math module --
no imports from dbwsim -- so the tests compare two separately written
routes to the same numbers.
"""

import math


def linkage_extension_ref(theta, r1, x0, y0, w, h, install_len, ext_init):
    """Wheel angle (rad) -> actuator feedback extension (mm), step by step."""
    alpha = theta + math.atan(w / (2.0 * h))
    beta = alpha - math.pi / 2.0
    x = r1 * math.cos(beta)
    y = r1 * math.sin(beta)
    return math.hypot(x0 - x, y0 - y) - install_len + ext_init


def steer_cmd_ref(theta_rad):
    """Piecewise-linear interpolation through the three actuator anchors."""
    deg = math.degrees(theta_rad)
    if deg < 0:
        val = 1900.0 + (deg / -45.0) * 600.0
    else:
        val = 1900.0 - (deg / 45.0) * 900.0
    return val


def voltage_ref(cmd, v_supply):
    return cmd * (3.0 / 255.0) * (v_supply / 5.0)


def dubins_word_ref(word, alpha, beta, d):
    """Closed-form (t, p, q) for one Dubins word, or None if infeasible.

    Transcribed independently of the package kernels; normalized units
    (turn radius 1).
    """
    two_pi = 2.0 * math.pi
    sa, sb = math.sin(alpha), math.sin(beta)
    ca, cb = math.cos(alpha), math.cos(beta)
    cab = math.cos(alpha - beta)

    if word == "LSL":
        p_sq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
        if p_sq < 0.0:
            return None
        mid = math.atan2(cb - ca, d + sa - sb)
        return ((mid - alpha) % two_pi, math.sqrt(p_sq), (beta - mid) % two_pi)
    if word == "RSR":
        p_sq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
        if p_sq < 0.0:
            return None
        mid = math.atan2(ca - cb, d - sa + sb)
        return ((alpha - mid) % two_pi, math.sqrt(p_sq), (mid - beta) % two_pi)
    if word == "LSR":
        p_sq = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
        if p_sq < 0.0:
            return None
        p = math.sqrt(p_sq)
        mid = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        return ((mid - alpha) % two_pi, p, (mid - beta) % two_pi)
    if word == "RSL":
        p_sq = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb)
        if p_sq < 0.0:
            return None
        p = math.sqrt(p_sq)
        mid = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        return ((alpha - mid) % two_pi, p, (beta - mid) % two_pi)
    if word == "RLR":
        tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
        if abs(tmp) > 1.0:
            return None
        p = (two_pi - math.acos(tmp)) % two_pi
        t = (alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0) % two_pi
        return (t, p, (alpha - beta - t + p) % two_pi)
    if word == "LRL":
        tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
        if abs(tmp) > 1.0:
            return None
        p = (two_pi - math.acos(tmp)) % two_pi
        t = (-alpha + math.atan2(cb - ca, d + sa - sb) + p / 2.0) % two_pi
        return (t, p, (beta - alpha - t + p) % two_pi)
    raise ValueError(word)


def apply_dubins_word(word, start, radius, t, p, q):
    """Drive the three segments from a start pose; returns the end pose.

    This is the geometric ground truth used to certify each closed form:
    a returned (t, p, q) is correct iff driving it lands on the goal.
    """
    x, y, heading = start
    for kind, param in zip(word, (t, p, q)):
        if kind == "S":
            x += radius * param * math.cos(heading)
            y += radius * param * math.sin(heading)
        elif kind == "L":
            x += radius * (math.sin(heading + param) - math.sin(heading))
            y += radius * (-math.cos(heading + param) + math.cos(heading))
            heading += param
        else:
            x += radius * (-math.sin(heading - param) + math.sin(heading))
            y += radius * (math.cos(heading - param) - math.cos(heading))
            heading -= param
    return x, y, heading


def straight_drive_ref(v_cmd, tau, dt, n_steps):
    """Closed-loop distance for a straight drive with first-order speed lag.

    Exact discrete solution of v_{k+1} = v_k + (v_cmd - v_k) * dt / tau
    starting at rest, accumulating x_{k+1} = x_k + v_k * dt (matching the
    simulator's derivative-before-update ordering).
    """
    a = dt / tau
    x = 0.0
    v = 0.0
    for _ in range(n_steps):
        x += v * dt
        v += (v_cmd - v) * a
    return x, v
