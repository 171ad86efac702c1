"""Driver nodes bridging bus topics to the serial links, plus the joystick
converters.

The speed driver owns the speed link: command bytes out (compensated for
the measured supply), heartbeats at a fixed cadence regardless of command
traffic, periodic BV polls, and reply parsing back into a supply estimate.
The steering driver converts wheel angles to counts. Neither talks to the
links directly for motion: the stack routes every command pair through the
safety gate first.
"""

import math
from typing import Optional

from .bus import JOY_TOPIC, SPEED_TOPIC, WHEEL_TOPIC, Bus, JoystickSample
from .drivebywire import (BatteryModel, SpeedCalibration,
                          compensate_for_supply, speed_to_command)
from .geometry import MAX_WHEEL_ANGLE, ActuatorCalibration, angle_to_command
from .protocol import Endpoint, FrameKind, WireFrame, decode, encode

HEARTBEAT_PERIOD = 0.05   # half the watchdog budget
BV_POLL_PERIOD = 1.0
JOYSTICK_DEADBAND = 0.05


class SpeedDriver:
    """Bridges /speedcmd_meterssec to the speed controller link."""

    def __init__(self, bus: Bus, link, speed_cal: SpeedCalibration,
                 battery: BatteryModel,
                 hb_period: float = HEARTBEAT_PERIOD,
                 bv_period: float = BV_POLL_PERIOD):
        self.link = link
        self.cal = speed_cal
        self.battery = battery
        self.hb_period = hb_period
        self.bv_period = bv_period
        self.hb_enabled = True   # scenario scripts flip this to test faults
        self.desired_speed = 0.0
        self.supply_estimate = speed_cal.v_supply_nominal
        self.v_battery_estimate: Optional[float] = None
        self._next_hb = 0.0
        self._next_bv = 0.0
        self._hb_sent = 0
        bus.subscribe(SPEED_TOPIC, self._on_speed)

    def _on_speed(self, msg) -> None:
        self.desired_speed = float(msg.payload)

    def byte_for(self, v: float) -> int:
        """Speed -> byte, compensated so the DAC holds its nominal output
        on the current (sagging) supply. SupplyFaultError propagates to the
        stack, which turns it into a safety event."""
        return compensate_for_supply(speed_to_command(v, self.cal),
                                     self.supply_estimate, self.cal)

    def tick_aux(self, t: float) -> list:
        """Heartbeats and BV polling; returns HB times sent this tick so the
        stack can self-confirm liveness to its own supervisor."""
        beats = []
        if self.hb_enabled and t >= self._next_hb:
            self.link.send_line(encode(WireFrame.heartbeat(
                int(round(t * 1000.0)))))
            self._hb_sent += 1
            self._next_hb = t + self.hb_period
            beats.append(t)
        if t >= self._next_bv:
            self.link.send_line(encode(WireFrame.battery_query()))
            self._next_bv = t + self.bv_period
        for line in self.link.poll_lines():
            frame = decode(line, Endpoint.SPEED_CONTROLLER)
            if frame.kind is FrameKind.BATTERY_REPLY:
                self.v_battery_estimate = frame.value / 100.0
                self.supply_estimate = self.battery.supply_voltage(
                    self.v_battery_estimate)
        return beats

    def send(self, cmd: int) -> None:
        self.link.send_line(encode(WireFrame.speed_cmd(cmd)))


class SteerDriver:
    """Bridges /wheelAngleCmd to the steering controller link."""

    def __init__(self, bus: Bus, link,
                 cal: ActuatorCalibration = ActuatorCalibration()):
        self.link = link
        self.cal = cal
        self.desired_angle = 0.0
        self.angle_clamp_count = 0
        bus.subscribe(WHEEL_TOPIC, self._on_angle)

    def _on_angle(self, msg) -> None:
        self.desired_angle = float(msg.payload)

    def counts_for(self, angle: float) -> int:
        """Wheel angle -> counts; angles beyond the calibrated range clamp
        (and are counted) rather than raise -- teleop sticks overshoot."""
        clamped = max(self.cal.angle_max_right,
                      min(self.cal.angle_max_left, angle))
        if clamped != angle:
            self.angle_clamp_count += 1
        return angle_to_command(clamped, self.cal)

    def send(self, cmd: int) -> None:
        self.link.send_line(encode(WireFrame.steer_cmd(cmd)))


class JoystickConverter:
    """y axis -> speed topic, x axis -> wheel-angle topic.

    A 5% deadband surrounds zero on both axes; outside it the response is
    rescaled to stay continuous at the deadband edge.
    """

    def __init__(self, bus: Bus, v_max: float,
                 max_angle: float = MAX_WHEEL_ANGLE,
                 deadband: float = JOYSTICK_DEADBAND):
        self.bus = bus
        self.v_max = v_max
        self.max_angle = max_angle
        self.deadband = deadband
        bus.subscribe(JOY_TOPIC, self._on_sample)

    def _shape(self, axis: float) -> float:
        if abs(axis) < self.deadband:
            return 0.0
        return math.copysign((abs(axis) - self.deadband) / (1.0 - self.deadband),
                             axis)

    def _on_sample(self, msg) -> None:
        sample: JoystickSample = msg.payload
        self.bus.publish(SPEED_TOPIC, self._shape(sample.y_axis) * self.v_max,
                         msg.stamp)
        self.bus.publish(WHEEL_TOPIC, self._shape(sample.x_axis) * self.max_angle,
                         msg.stamp)
