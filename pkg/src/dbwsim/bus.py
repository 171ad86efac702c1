"""Minimal in-process publish-subscribe bus with per-topic schemas.

Delivery is synchronous and in publish order, so a single-threaded control
loop built on it is deterministic. Publishing to an unknown topic or with
a payload of the wrong shape is rejected and leaves the bus unchanged.
"""

from dataclasses import dataclass
from typing import Any, Callable

from .errors import BusError

# Topic names of the command interface, spelled the way the driver nodes
# expect them.
SPEED_TOPIC = "/speedcmd_meterssec"   # single float, m/s
WHEEL_TOPIC = "/wheelAngleCmd"        # single float, rad
JOY_TOPIC = "/joystick"
TELEMETRY_TOPIC = "/telemetry"
GOAL_TOPIC = "/goal"
GOAL_STATUS_TOPIC = "/goal_status"
PATH_TOPIC = "/path"


@dataclass(frozen=True)
class TopicMessage:
    topic: str
    payload: Any
    stamp: float


@dataclass(frozen=True)
class JoystickSample:
    """Normalized stick axes; y drives speed, x drives steering."""

    x_axis: float
    y_axis: float
    stamp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x_axis", max(-1.0, min(1.0, self.x_axis)))
        object.__setattr__(self, "y_axis", max(-1.0, min(1.0, self.y_axis)))


class Bus:
    def __init__(self):
        self._schemas = {}
        self._subs = {}
        self.delivered = 0

    def register(self, topic: str, schema: type) -> None:
        if topic in self._schemas:
            raise BusError(f"topic {topic} already registered")
        self._schemas[topic] = schema
        self._subs[topic] = []

    def subscribe(self, topic: str, handler: Callable) -> None:
        if topic not in self._schemas:
            raise BusError(f"unknown topic {topic}")
        self._subs[topic].append(handler)

    def _check(self, topic: str, payload: Any) -> None:
        schema = self._schemas.get(topic)
        if schema is None:
            raise BusError(f"unknown topic {topic}")
        if schema is float:
            ok = isinstance(payload, (int, float)) and not isinstance(payload, bool)
        else:
            ok = isinstance(payload, schema)
        if not ok:
            raise BusError(
                f"payload {payload!r} does not match {topic} schema "
                f"{schema.__name__}")

    def publish(self, topic: str, payload: Any, stamp: float = 0.0) -> TopicMessage:
        self._check(topic, payload)
        msg = TopicMessage(topic, payload, stamp)
        for handler in self._subs[topic]:
            handler(msg)
            self.delivered += 1
        return msg


def default_bus() -> Bus:
    """A bus with the standard topic set registered."""
    from .telemetry import TelemetryRecord

    bus = Bus()
    bus.register(SPEED_TOPIC, float)
    bus.register(WHEEL_TOPIC, float)
    bus.register(JOY_TOPIC, JoystickSample)
    bus.register(TELEMETRY_TOPIC, TelemetryRecord)
    bus.register(GOAL_TOPIC, object)
    bus.register(GOAL_STATUS_TOPIC, tuple)
    bus.register(PATH_TOPIC, object)
    return bus
