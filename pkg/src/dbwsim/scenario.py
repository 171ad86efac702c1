"""Timed operator scripts for reproducible runs and fault drills.

One event per line: ``<seconds> <verb> [args]``. Blank lines and ``#``
comments are skipped. Verbs:

    dmh press | dmh release
    ignite
    mode teleop | mode auto
    joy <x> <y>
    goto <x> <y> <heading_deg> [<tol_pos_m> <tol_heading_rad>]
    cancel
    heartbeats on | heartbeats off
    fuse
    end

While the handle is scripted as pressed, the runner re-submits the press
every tick, the way a live console streams it; ``dmh release`` stops the
stream. ``end`` pins the scenario duration (otherwise the last event time
plus a second).
"""

import math
from dataclasses import dataclass

from .errors import ConfigError
from .stack import (BlowFuse, CancelGoal, DmhState, Goto, HeartbeatsEnable,
                    Ignite, Joy, ModeSwitch, Stack, StackMode)


@dataclass(frozen=True)
class ScenarioEvent:
    t: float
    verb: str
    args: tuple


def parse_scenario(text: str) -> list:
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        try:
            t = float(parts[0])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad time {parts[0]!r}") from exc
        if len(parts) < 2:
            raise ConfigError(f"line {lineno}: missing verb")
        events.append(ScenarioEvent(t, parts[1], tuple(parts[2:])))
    events.sort(key=lambda e: e.t)
    return events


def _to_operator_event(ev: ScenarioEvent):
    verb, args = ev.verb, ev.args
    if verb == "dmh":
        if args[:1] not in (("press",), ("release",)):
            raise ConfigError(f"dmh wants press|release, got {args}")
        return DmhState(args[0] == "press")
    if verb == "ignite":
        return Ignite()
    if verb == "mode":
        return ModeSwitch(StackMode(args[0]))
    if verb == "joy":
        return Joy(float(args[0]), float(args[1]))
    if verb == "goto":
        x, y, heading_deg = (float(a) for a in args[:3])
        tol_pos = float(args[3]) if len(args) > 3 else None
        tol_heading = float(args[4]) if len(args) > 4 else None
        return Goto(x, y, math.radians(heading_deg), tol_pos, tol_heading)
    if verb == "cancel":
        return CancelGoal()
    if verb == "heartbeats":
        return HeartbeatsEnable(args[0] == "on")
    if verb == "fuse":
        return BlowFuse()
    if verb == "end":
        return None
    raise ConfigError(f"unknown scenario verb {ev.verb!r}")


def scenario_duration(events: list, extra: float = 1.0) -> float:
    if not events:
        return 0.0
    return max(e.t for e in events) + (0.0 if events[-1].verb == "end" else extra)


def run_scenario(stack: Stack, events: list, duration: float = None) -> Stack:
    """Feed events at their simulated times; DMH press auto-refreshes."""
    if duration is None:
        duration = scenario_duration(events)
    pending = list(events)
    dmh_held = False
    while stack.t < duration - 1e-9:
        while pending and pending[0].t <= stack.t + 1e-9:
            ev = pending.pop(0)
            op = _to_operator_event(ev)
            if isinstance(op, DmhState):
                dmh_held = op.pressed
            if op is not None:
                stack.submit(op)
        if dmh_held:
            stack.submit(DmhState(True))
        stack.tick()
    return stack
