"""The control stack: bus, drivers, safety gate, navigator and the
simulated vehicle wired together on one fixed-rate tick.

Everything advances on a virtual clock, one ordered queue feeds operator
events in, and every command pair passes the stack supervisor's gate
before hitting the wire -- a second, independent supervisor lives inside
the vehicle, exactly as the firmware's would. Driven as fast as possible
the stack is deterministic; the realtime runner paces the same ticks
against the wall clock for interactive use.
"""

import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .bus import (GOAL_STATUS_TOPIC, JOY_TOPIC, PATH_TOPIC, SPEED_TOPIC,
                  TELEMETRY_TOPIC, WHEEL_TOPIC, JoystickSample, default_bus)
from .config import Config
from .drivers import JoystickConverter, SpeedDriver, SteerDriver
from .errors import SupplyFaultError
from .planner import GoalTolerance, Navigator, Pose2D
from .protocol import TapPipe, pipe_pair
from .safety import (DmhPress, DmhRelease, HeartbeatRx, IgnitionRequest,
                     SafetySupervisor, SupplyReading, Tick)
from .simulator import VehicleSim
from .telemetry import TelemetryWriter


class StackMode(Enum):
    TELEOP = "teleop"
    AUTO = "auto"


# --------------------------------------------------------------------------
# Operator events; network threads append them, the tick drains them.

@dataclass(frozen=True)
class OperatorEvent:
    pass


@dataclass(frozen=True)
class DmhState(OperatorEvent):
    pressed: bool


@dataclass(frozen=True)
class Ignite(OperatorEvent):
    pass


@dataclass(frozen=True)
class ModeSwitch(OperatorEvent):
    mode: StackMode


@dataclass(frozen=True)
class Joy(OperatorEvent):
    x: float
    y: float


@dataclass(frozen=True)
class Goto(OperatorEvent):
    x: float
    y: float
    heading: float
    tol_position: Optional[float] = None
    tol_heading: Optional[float] = None


@dataclass(frozen=True)
class CancelGoal(OperatorEvent):
    pass


@dataclass(frozen=True)
class BlowFuse(OperatorEvent):
    """Test hook: injects the fuse fault into the vehicle supervisor."""


@dataclass(frozen=True)
class HeartbeatsEnable(OperatorEvent):
    """Test hook: silences the speed driver's heartbeat stream."""

    enabled: bool


class Stack:
    def __init__(self, config: Config, telemetry_path: str = None,
                 capture: bool = False):
        self.config = config
        self.dt = config.stack.dt
        self.bus = default_bus()

        speed_host, speed_dev = pipe_pair()
        steer_host, steer_dev = pipe_pair()
        self.capture_lines = []
        if capture:
            speed_host = TapPipe(speed_host, lambda: self.t, self.capture_lines)
            steer_host = TapPipe(steer_host, lambda: self.t, self.capture_lines)
        self.sim = VehicleSim(config.sim, speed_dev, steer_dev)
        self.supervisor = SafetySupervisor(
            config.speed_cal, watchdog_period=config.stack.watchdog_period)
        self.speed_driver = SpeedDriver(
            self.bus, speed_host, config.speed_cal, config.battery,
            hb_period=config.stack.heartbeat_period,
            bv_period=config.stack.bv_poll_period)
        self.steer_driver = SteerDriver(self.bus, steer_host,
                                        config.actuator_cal)
        self.joystick = JoystickConverter(
            self.bus, v_max=config.speed_cal.v_max_speed_forward,
            max_angle=config.actuator_cal.angle_max_left)
        self.navigator = Navigator(config.nav)

        self.mode = StackMode.TELEOP
        self.telemetry = TelemetryWriter(telemetry_path)
        self.telemetry_cb = None     # gateway broadcast hook
        self.event_cb = None         # gateway goal/path notifications

        self._events = deque()
        self.t = 0.0
        self._tick_index = 0

        # Dead-man's-handle freshness: held only while fresh press-state
        # messages keep arriving. auto_dmh simulates a bench operator
        # permanently holding the handle (headless runs only).
        self.dmh_held = False
        self._last_dmh_msg_t = float("-inf")
        self.auto_dmh = False

        self._last_joy_t: Optional[float] = None
        self.joy_ignored_count = 0
        self.goal_rejected: Optional[str] = None
        self._last_goal_status = None
        self._last_path_version = 0

    # Thread-safe entry point for network/scenario events ------------------

    def submit(self, event: OperatorEvent) -> None:
        self._events.append(event)

    # ----------------------------------------------------------------------

    def _set_dmh(self, pressed: bool) -> None:
        if pressed:
            self._last_dmh_msg_t = self.t
            if not self.dmh_held:
                self.dmh_held = True
                self.supervisor.step(DmhPress(self.t))
                self.sim.dmh_press()
        elif self.dmh_held:
            self.dmh_held = False
            self.supervisor.step(DmhRelease(self.t))
            self.sim.dmh_release()

    def _apply(self, ev: OperatorEvent) -> None:
        t = self.t
        if isinstance(ev, DmhState):
            self._set_dmh(ev.pressed)
        elif isinstance(ev, Ignite):
            self.supervisor.step(
                IgnitionRequest(t, self.config.speed_cal.cmd_ignition))
        elif isinstance(ev, ModeSwitch):
            if ev.mode is not self.mode:
                self.mode = ev.mode
                self.navigator.cancel()
                self.bus.publish(SPEED_TOPIC, 0.0, t)
                self.bus.publish(WHEEL_TOPIC, 0.0, t)
        elif isinstance(ev, Joy):
            if self.mode is StackMode.TELEOP:
                self._last_joy_t = t
                self.bus.publish(JOY_TOPIC, JoystickSample(ev.x, ev.y, t), t)
            else:
                self.joy_ignored_count += 1
        elif isinstance(ev, Goto):
            if self.mode is not StackMode.AUTO:
                self.goal_rejected = "goal ignored: switch to auto mode first"
                return
            self.goal_rejected = None
            tol = GoalTolerance(
                position=ev.tol_position or self.config.tolerance.position,
                heading=ev.tol_heading or self.config.tolerance.heading)
            self.navigator.set_goal(Pose2D(ev.x, ev.y, ev.heading), tol, t)
        elif isinstance(ev, CancelGoal):
            self.navigator.cancel()
        elif isinstance(ev, BlowFuse):
            self.sim.blow_fuse()
        elif isinstance(ev, HeartbeatsEnable):
            self.speed_driver.hb_enabled = ev.enabled
        else:
            raise TypeError(f"unknown operator event {ev!r}")

    def vehicle_pose(self) -> Pose2D:
        s = self.sim.state
        return Pose2D(s.x, s.y, s.heading)

    def tick(self) -> None:
        t = self.t

        while self._events:
            self._apply(self._events.popleft())

        if self.auto_dmh:
            self._set_dmh(True)
        elif self.dmh_held and \
                t - self._last_dmh_msg_t > self.config.gateway.dmh_freshness_s:
            self._set_dmh(False)   # silent console means release

        # Stale teleop input decays to zero rather than latching.
        if self.mode is StackMode.TELEOP and self._last_joy_t is not None \
                and t - self._last_joy_t > self.config.stack.joy_timeout:
            self._last_joy_t = None
            self.bus.publish(SPEED_TOPIC, 0.0, t)
            self.bus.publish(WHEEL_TOPIC, 0.0, t)

        if self.mode is StackMode.AUTO:
            # Publish every tick, terminal states included: a finished or
            # cancelled goal must keep zeros flowing, never a stale latch.
            speed, wheel = self.navigator.tick(t, self.vehicle_pose(),
                                               self.sim.state.steer_angle)
            self.bus.publish(SPEED_TOPIC, speed, t)
            self.bus.publish(WHEEL_TOPIC, wheel, t)

        for hb_t in self.speed_driver.tick_aux(t):
            self.supervisor.step(HeartbeatRx(hb_t))
        self.supervisor.step(SupplyReading(t, self.speed_driver.supply_estimate))
        self.supervisor.step(Tick(t))

        try:
            speed_byte = self.speed_driver.byte_for(self.speed_driver.desired_speed)
        except SupplyFaultError as exc:
            self.supervisor.step(SupplyReading(t, exc.volts))
            speed_byte = self.config.speed_cal.cmd_stop
        steer_counts = self.steer_driver.counts_for(self.steer_driver.desired_angle)

        speed_out, steer_out = self.supervisor.gate(speed_byte, steer_counts)
        self.speed_driver.send(speed_out)
        self.steer_driver.send(steer_out)

        self.sim.tick()
        self.t = self.sim.state.t
        self._tick_index += 1

        self._publish_status()
        if self._tick_index % self.config.sim.telemetry_divisor == 0:
            record = self.sim.telemetry_record()
            self.telemetry.emit(record)
            self.bus.publish(TELEMETRY_TOPIC, record, self.t)
        if self.telemetry_cb and \
                self._tick_index % self.config.gateway.telemetry_divisor == 0:
            self.telemetry_cb(self.snapshot())

    def _publish_status(self) -> None:
        status = (self.navigator.status.value, self.navigator.diagnostic)
        if status != self._last_goal_status:
            self._last_goal_status = status
            self.bus.publish(GOAL_STATUS_TOPIC, status, self.t)
            if self.event_cb:
                self.event_cb("goal_status", {"status": status[0],
                                              "diagnostic": status[1]})
        if self.navigator.path_version != self._last_path_version:
            self._last_path_version = self.navigator.path_version
            path = self.navigator.last_path
            self.bus.publish(PATH_TOPIC, path, self.t)
            if self.event_cb and path is not None:
                from .planner import sample_path
                poses = sample_path(path, 0.1)
                self.event_cb("path", {
                    "poses": [[round(p[0], 4), round(p[1], 4), round(p[2], 4)]
                              for p in poses.tolist()]})

    def snapshot(self) -> dict:
        """Gateway-facing state: the telemetry record plus stack internals."""
        s = self.sim.state
        nav = self.navigator
        return {
            "t": round(self.t, 6),
            "x": s.x, "y": s.y, "heading": s.heading, "v": s.v,
            "steer_angle": s.steer_angle, "actuator_ext": s.actuator_ext,
            "v_battery": round(s.v_battery, 4),
            "safety_mode": self.sim.supervisor.state.mode.value,
            "stack_safety_mode": self.supervisor.state.mode.value,
            "mode": self.mode.value,
            "dmh_held": self.dmh_held,
            "steer_clamp_count": self.supervisor.clamp_count,
            "angle_clamp_count": self.steer_driver.angle_clamp_count,
            "joy_ignored_count": self.joy_ignored_count,
            "goal_status": nav.status.value,
            "goal_diagnostic": nav.diagnostic,
            "goal_rejected": self.goal_rejected,
            "watchdog_age": round(
                self.t - self.sim.supervisor.state.last_heartbeat, 4),
        }

    def bench_arm(self, timeout: float = 1.0) -> bool:
        """Headless arming: hold the handle, then ignite once the handle has
        registered. Returns True when both supervisors are armed."""
        self.auto_dmh = True
        self.tick()
        self.submit(Ignite())
        return self.run_until(
            lambda: self.supervisor.state.armed
            and self.sim.supervisor.state.armed, timeout)

    # Drive loops ------------------------------------------------------------

    def run(self, duration: float) -> None:
        """Advance virtual time as fast as possible."""
        n = int(round(duration / self.dt))
        for _ in range(n):
            self.tick()

    def run_until(self, predicate, timeout: float) -> bool:
        """Tick until predicate() or the simulated timeout; True if it hit."""
        deadline = self.t + timeout
        while self.t < deadline:
            self.tick()
            if predicate():
                return True
        return False

    def run_realtime(self, stop_event=None) -> None:
        """Pace ticks against the wall clock until stop_event is set."""
        next_tick = time.monotonic()
        while stop_event is None or not stop_event.is_set():
            self.tick()
            next_tick += self.dt
            delay = next_tick - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_tick = time.monotonic()   # fell behind; don't spiral
