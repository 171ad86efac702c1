"""Layered safety supervisor: watchdog, dead-man's handle, ignition
interlock, steering limiter and supply-band fault handling.

The supervisor is a single state machine fed a time-ordered event stream.
Every motor command passes through ``gate``: anything but ARMED forces the
drive to the neutral byte and holds the last steering position (a powered
re-center during a fault would itself be a motion hazard).
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .drivebywire import SUPPLY_BAND, SpeedCalibration, in_ignition_dead_zone

WATCHDOG_PERIOD = 0.1
NEUTRAL_SPEED_CMD = 170
STEER_CENTER_CMD = 1900
STEER_CMD_MIN = 1000
STEER_CMD_MAX = 2500


class SafetyMode(Enum):
    POWER_OFF = "PowerOff"
    IGNITION_PENDING = "IgnitionPending"
    ARMED = "Armed"
    FAULT = "Fault"


class FaultReason(Enum):
    WATCHDOG_EXPIRED = "WatchdogExpired"
    DMH_RELEASED = "DmhReleased"
    SUPPLY_OUT_OF_BAND = "SupplyOutOfBand"
    FUSE_BLOWN = "FuseBlown"
    CLOCK_SKEW = "ClockSkew"


class Effect(Enum):
    RELAY_CLOSED = "relay_closed"
    RELAY_OPENED = "relay_opened"
    WARNING_BEEP = "warning_beep"
    OUTPUTS_NEUTRAL = "outputs_neutral"


@dataclass(frozen=True)
class SafetyState:
    mode: SafetyMode = SafetyMode.POWER_OFF
    dmh_pressed: bool = False
    last_heartbeat: float = float("-inf")
    watchdog_period: float = WATCHDOG_PERIOD
    fault_reason: Optional[FaultReason] = None

    @property
    def armed(self) -> bool:
        return self.mode is SafetyMode.ARMED


# --------------------------------------------------------------------------
# Events. Each carries the time it happened; the supervisor requires a
# non-decreasing stream and faults conservatively on clock skew.

@dataclass(frozen=True)
class Event:
    t: float


@dataclass(frozen=True)
class HeartbeatRx(Event):
    pass


@dataclass(frozen=True)
class DmhPress(Event):
    pass


@dataclass(frozen=True)
class DmhRelease(Event):
    pass


@dataclass(frozen=True)
class IgnitionRequest(Event):
    cmd: int = 164


@dataclass(frozen=True)
class Tick(Event):
    pass


@dataclass(frozen=True)
class SupplyReading(Event):
    volts: float = 5.0


@dataclass(frozen=True)
class FuseEvent(Event):
    pass


def limit_steering(cmd: int) -> int:
    """Clamp steering counts to the mechanically safe range."""
    return max(STEER_CMD_MIN, min(STEER_CMD_MAX, int(cmd)))


class SafetySupervisor:
    """One logical supervisor instance; all events serialized through step().

    ``state`` snapshots are immutable and safe to hand to telemetry.
    """

    def __init__(self, speed_cal: SpeedCalibration = SpeedCalibration(),
                 watchdog_period: float = WATCHDOG_PERIOD,
                 supply_band: tuple = SUPPLY_BAND):
        self._cal = speed_cal
        self._band = supply_band
        self._state = SafetyState(watchdog_period=watchdog_period)
        self._last_event_t = float("-inf")
        self._steer_hold = STEER_CENTER_CMD
        self.clamp_count = 0
        self.last_supply: Optional[float] = None

    @property
    def state(self) -> SafetyState:
        return self._state

    def _fault(self, reason: FaultReason) -> list:
        self._state = replace(self._state, mode=SafetyMode.FAULT,
                              fault_reason=reason)
        return [Effect.RELAY_OPENED, Effect.OUTPUTS_NEUTRAL]

    def step(self, event: Event) -> list:
        """Apply one event; returns the effects it caused."""
        s = self._state
        if math.isnan(event.t) or event.t < self._last_event_t:
            self._last_event_t = max(self._last_event_t, event.t)
            return self._fault(FaultReason.CLOCK_SKEW)
        self._last_event_t = event.t

        if isinstance(event, HeartbeatRx):
            self._state = replace(s, last_heartbeat=event.t)
            return []

        if isinstance(event, DmhPress):
            if s.mode is SafetyMode.POWER_OFF:
                self._state = replace(s, mode=SafetyMode.IGNITION_PENDING,
                                      dmh_pressed=True, fault_reason=None)
            else:
                self._state = replace(s, dmh_pressed=True)
            return []

        if isinstance(event, DmhRelease):
            effects = []
            if s.mode is SafetyMode.ARMED:
                effects = [Effect.RELAY_OPENED, Effect.OUTPUTS_NEUTRAL]
                self._state = replace(s, mode=SafetyMode.POWER_OFF,
                                      dmh_pressed=False,
                                      fault_reason=FaultReason.DMH_RELEASED)
            else:
                # From FAULT this is the only way back to POWER_OFF; from
                # the other modes it simply disarms the handle.
                self._state = replace(s, mode=SafetyMode.POWER_OFF,
                                      dmh_pressed=False)
            return effects

        if isinstance(event, IgnitionRequest):
            if s.mode is not SafetyMode.IGNITION_PENDING:
                return []
            if in_ignition_dead_zone(event.cmd, self._cal):
                self._state = replace(s, mode=SafetyMode.ARMED,
                                      last_heartbeat=event.t,
                                      fault_reason=None)
                return [Effect.RELAY_CLOSED]
            return [Effect.WARNING_BEEP]

        if isinstance(event, Tick):
            if s.mode is SafetyMode.ARMED and \
                    event.t - s.last_heartbeat > s.watchdog_period:
                return self._fault(FaultReason.WATCHDOG_EXPIRED)
            return []

        if isinstance(event, SupplyReading):
            self.last_supply = event.volts
            if not self._band[0] <= event.volts <= self._band[1]:
                return self._fault(FaultReason.SUPPLY_OUT_OF_BAND)
            return []

        if isinstance(event, FuseEvent):
            return self._fault(FaultReason.FUSE_BLOWN)

        raise TypeError(f"unknown safety event {event!r}")

    def gate(self, speed_cmd: int, steer_cmd: int) -> tuple:
        """The choke point every motor command passes through.

        ARMED passes (speed, limited steering) and remembers the steering
        position; every other mode emits the neutral byte and the held
        steering, regardless of input.
        """
        if self._state.mode is SafetyMode.ARMED:
            limited = limit_steering(steer_cmd)
            if limited != steer_cmd:
                self.clamp_count += 1
            self._steer_hold = limited
            return int(speed_cmd), limited
        return NEUTRAL_SPEED_CMD, self._steer_hold
