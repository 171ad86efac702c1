"""Fixed-step kinematic simulation of the cart.

Bicycle-model pose integration (explicit Euler), a rate-limited linear
actuator for steering, first-order drive response, and a slow battery
drain. ``VehicleSim`` wraps the physics behind the same two serial
endpoints the real controllers expose, with its own embedded safety
supervisor, so the high-level stack cannot tell it from hardware.
"""

from dataclasses import dataclass, field, replace

from . import kernels
from .drivebywire import (HARDWARE_MAX_SPEED, BatteryModel, SpeedCalibration,
                          command_to_speed, round_half_away)
from .geometry import (MAX_WHEEL_ANGLE, ActuatorCalibration, SteeringGeometry,
                       angle_to_extension, command_to_angle, validate_stroke)
from .protocol import Endpoint, FrameKind, WireFrame, decode, encode
from .safety import (DmhPress, DmhRelease, FuseEvent, HeartbeatRx,
                     IgnitionRequest, SafetyMode, SafetySupervisor,
                     SupplyReading, Tick)
from .telemetry import TelemetryRecord

ACTUATOR_RATE = 8.0      # mm/s at full load
ACTUATOR_STROKE = 250.0  # mm


@dataclass(frozen=True)
class VehicleState:
    """Pose in metres/radians, speed m/s, actuator extension mm."""

    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    v: float = 0.0
    actuator_ext: float = 0.0
    steer_angle: float = 0.0
    v_battery: float = 24.0
    t: float = 0.0


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    wheelbase: float = 1.0          # not a published figure; measure the vehicle
    drive_time_constant: float = 0.5  # tuning placeholder, no measured dynamics
    battery_drain_v_per_h: float = 0.5
    v_battery_init: float = 24.0
    initial_x: float = 0.0
    initial_y: float = 0.0
    initial_heading: float = 0.0
    actuator_rate: float = ACTUATOR_RATE
    stroke: float = ACTUATOR_STROKE
    v_hardware_max: float = HARDWARE_MAX_SPEED
    supply_sag: bool = True
    telemetry_divisor: int = 2      # telemetry every N physics steps
    geometry: SteeringGeometry = field(default_factory=SteeringGeometry)
    actuator_cal: ActuatorCalibration = field(default_factory=ActuatorCalibration)
    speed_cal: SpeedCalibration = field(default_factory=SpeedCalibration)
    battery: BatteryModel = field(default_factory=BatteryModel)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.wheelbase <= 0.0:
            raise ValueError(f"wheelbase must be positive, got {self.wheelbase}")
        validate_stroke(self.geometry, self.actuator_cal)

    def initial_state(self) -> VehicleState:
        ext = angle_to_extension(0.0, self.geometry)
        return VehicleState(x=self.initial_x, y=self.initial_y,
                            heading=self.initial_heading, v=0.0,
                            actuator_ext=ext, steer_angle=0.0,
                            v_battery=self.v_battery_init, t=0.0)


def step(state: VehicleState, speed_cmd: int, steer_cmd: int,
         cfg: SimConfig) -> VehicleState:
    """Advance one fixed step under already-gated commands.

    Drive relaxes first-order toward the speed the byte encodes (dead-zone
    bytes target zero); the actuator slews toward the commanded extension
    at most ``actuator_rate`` mm/s; the pose integrates the kinematic
    bicycle model from the pre-step state.
    """
    v_target = command_to_speed(speed_cmd, cfg.speed_cal, cfg.v_hardware_max)
    theta_target = command_to_angle(steer_cmd, cfg.actuator_cal)
    ext_target = angle_to_extension(theta_target, cfg.geometry)

    x, y, heading, v, ext, steer = kernels.vehicle_step(
        state.x, state.y, state.heading, state.v, state.actuator_ext,
        state.steer_angle, v_target, ext_target, cfg.dt,
        cfg.drive_time_constant, cfg.actuator_rate, 0.0, cfg.stroke,
        cfg.wheelbase, *cfg.geometry.coeffs(),
        -MAX_WHEEL_ANGLE, MAX_WHEEL_ANGLE)

    return replace(state, x=float(x), y=float(y), heading=float(heading),
                   v=float(v), actuator_ext=float(ext),
                   steer_angle=float(steer),
                   v_battery=state.v_battery
                   - cfg.battery_drain_v_per_h / 3600.0 * cfg.dt,
                   t=state.t + cfg.dt)


class VehicleSim:
    """The vehicle end of the two serial links.

    Consumes FA command frames, answers BV with battery centivolts, feeds
    HB frames to its embedded supervisor, and advances the physics once
    per tick. DMH and fuse are physical inputs on the real cart, so they
    arrive through methods here, not over the wire.
    """

    def __init__(self, cfg: SimConfig, speed_link, steer_link,
                 telemetry_cb=None):
        self.cfg = cfg
        self.state = cfg.initial_state()
        self.speed_link = speed_link
        self.steer_link = steer_link
        self.supervisor = SafetySupervisor(cfg.speed_cal)
        self.telemetry_cb = telemetry_cb
        self.malformed_count = 0
        self._last_speed_cmd = cfg.speed_cal.cmd_stop
        self._last_steer_cmd = 1900
        self._last_hb_millis = -1
        self._tick_index = 0

    # Physical inputs ------------------------------------------------------

    def dmh_press(self) -> None:
        self.supervisor.step(DmhPress(self.state.t))

    def dmh_release(self) -> None:
        self.supervisor.step(DmhRelease(self.state.t))

    def blow_fuse(self) -> None:
        self.supervisor.step(FuseEvent(self.state.t))

    # ----------------------------------------------------------------------

    def _handle_speed_line(self, line: bytes, t: float) -> None:
        frame = decode(line, Endpoint.SPEED_CONTROLLER)
        if frame.kind is FrameKind.HEARTBEAT:
            # Heartbeats must be monotone per session; a stale stamp does
            # not count as liveness.
            if frame.value > self._last_hb_millis:
                self._last_hb_millis = frame.value
                self.supervisor.step(HeartbeatRx(t))
        elif frame.kind is FrameKind.BATTERY_QUERY:
            cv = round_half_away(self.state.v_battery * 100.0)
            self.speed_link.send_line(encode(WireFrame.battery_reply(cv)))
        elif frame.kind is FrameKind.SPEED_CMD:
            if self.supervisor.state.mode is SafetyMode.IGNITION_PENDING:
                self.supervisor.step(IgnitionRequest(t, frame.value))
            self._last_speed_cmd = frame.value
        else:
            self.malformed_count += 1

    def _handle_steer_line(self, line: bytes) -> None:
        frame = decode(line, Endpoint.STEERING_CONTROLLER)
        if frame.kind is FrameKind.STEER_CMD:
            self._last_steer_cmd = frame.value
        else:
            self.malformed_count += 1

    def tick(self) -> VehicleState:
        """One fixed step: drain links, run the supervisor, move physics."""
        t = self.state.t
        for line in self.speed_link.poll_lines():
            self._handle_speed_line(line, t)
        for line in self.steer_link.poll_lines():
            self._handle_steer_line(line)

        if self.cfg.supply_sag:
            supply = self.cfg.battery.supply_voltage(self.state.v_battery)
        else:
            supply = 5.0
        self.supervisor.step(SupplyReading(t, supply))
        self.supervisor.step(Tick(t))

        speed_out, steer_out = self.supervisor.gate(self._last_speed_cmd,
                                                    self._last_steer_cmd)
        self.state = step(self.state, speed_out, steer_out, self.cfg)

        self._tick_index += 1
        if self.telemetry_cb and self._tick_index % self.cfg.telemetry_divisor == 0:
            self.telemetry_cb(self.telemetry_record())
        return self.state

    def telemetry_record(self) -> TelemetryRecord:
        s = self.state
        return TelemetryRecord(t=s.t, x=s.x, y=s.y, heading=s.heading, v=s.v,
                               steer_angle=s.steer_angle,
                               actuator_ext=s.actuator_ext,
                               v_battery=s.v_battery,
                               safety_mode=self.supervisor.state.mode.value)

    def run(self, duration: float) -> VehicleState:
        """Advance simulated time by ``duration`` (links drained each step)."""
        n = int(round(duration / self.cfg.dt))
        for _ in range(n):
            self.tick()
        return self.state
