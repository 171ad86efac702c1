"""Configuration loading.

One YAML file configures the whole stack; units are spelled out in the key
names (_mm, _deg, _s, ...) and converted here, so everything downstream is
SI + radians. Every value has a default; a config file only overrides.
``DBWSIM_CONFIG`` points at a file when no path is given explicitly.
"""

import math
import os
from dataclasses import dataclass, field
from importlib import resources

import yaml

from .drivebywire import BatteryModel, SpeedCalibration
from .errors import ConfigError
from .geometry import ActuatorCalibration, SteeringGeometry
from .planner import FollowerConfig, GoalTolerance, NavigatorConfig
from .simulator import SimConfig

ENV_CONFIG = "DBWSIM_CONFIG"


@dataclass(frozen=True)
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8720
    dmh_freshness_s: float = 0.2
    telemetry_divisor: int = 5   # control ticks per telemetry frame


@dataclass(frozen=True)
class StackSettings:
    dt: float = 0.01
    heartbeat_period: float = 0.05
    bv_poll_period: float = 1.0
    joy_timeout: float = 0.5
    watchdog_period: float = 0.1
    baud: int = 112_000


@dataclass(frozen=True)
class Config:
    geometry: SteeringGeometry = field(default_factory=SteeringGeometry)
    actuator_cal: ActuatorCalibration = field(default_factory=ActuatorCalibration)
    speed_cal: SpeedCalibration = field(default_factory=SpeedCalibration)
    battery: BatteryModel = field(default_factory=BatteryModel)
    sim: SimConfig = field(default_factory=SimConfig)
    nav: NavigatorConfig = field(default_factory=NavigatorConfig)
    tolerance: GoalTolerance = field(default_factory=GoalTolerance)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    stack: StackSettings = field(default_factory=StackSettings)


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return sec


def _get(sec: dict, key: str, default):
    val = sec.get(key, default)
    if val is None:
        return default
    return val


def load_config(path: str = None) -> Config:
    """Build a Config from defaults overridden by a YAML file, if any."""
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    doc = {}
    if path:
        try:
            with open(path) as fh:
                doc = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a mapping")
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> Config:
    g = _section(doc, "steering_geometry")
    geometry = SteeringGeometry(
        r1=float(_get(g, "r1_mm", 120.0)),
        x0=float(_get(g, "x0_mm", 320.0)),
        y0=float(_get(g, "y0_mm", -40.0)),
        w=float(_get(g, "w_mm", 500.0)),
        h=float(_get(g, "h_mm", 500.0)),
        install_len=float(_get(g, "install_len_mm", 390.0)),
        ext_init=float(_get(g, "ext_init_mm", 230.0)),
    )

    a = _section(doc, "actuator")
    actuator_cal = ActuatorCalibration(
        cmd_max_right=int(_get(a, "cmd_max_right", 2500)),
        cmd_center=int(_get(a, "cmd_center", 1900)),
        cmd_max_left=int(_get(a, "cmd_max_left", 1000)),
        angle_max_right=math.radians(float(_get(a, "angle_max_right_deg", -45.0))),
        angle_max_left=math.radians(float(_get(a, "angle_max_left_deg", 45.0))),
        stroke_max=float(_get(a, "stroke_max_mm", 250.0)),
    )

    s = _section(doc, "speed")
    mode = str(_get(s, "mode", "low"))
    dial = float(_get(s, "dial_fraction", 1.0))
    overrides = {}
    if s.get("v_max_forward_ms") is not None:
        overrides["v_max_speed_forward"] = float(s["v_max_forward_ms"])
    if s.get("v_max_reverse_ms") is not None:
        overrides["v_max_speed_reverse"] = float(s["v_max_reverse_ms"])
    speed_cal = SpeedCalibration.for_mode(mode, dial, **overrides)

    b = _section(doc, "battery")
    battery = BatteryModel(
        v_battery=float(_get(b, "v_battery", 24.0)),
        divider_r_top=float(_get(b, "divider_r_top_ohm", 100_000.0)),
        divider_r_bottom=float(_get(b, "divider_r_bottom_ohm", 10_000.0)),
    )

    m = _section(doc, "sim")
    sim = SimConfig(
        dt=float(_get(m, "dt_s", 0.01)),
        wheelbase=float(_get(m, "wheelbase_m", 1.0)),
        drive_time_constant=float(_get(m, "drive_time_constant_s", 0.5)),
        battery_drain_v_per_h=float(_get(m, "battery_drain_v_per_hour", 0.5)),
        v_battery_init=float(_get(m, "v_battery_init", 24.0)),
        initial_x=float(_get(m, "initial_x_m", 0.0)),
        initial_y=float(_get(m, "initial_y_m", 0.0)),
        initial_heading=math.radians(float(_get(m, "initial_heading_deg", 0.0))),
        actuator_rate=float(_get(m, "actuator_rate_mm_per_s", 8.0)),
        stroke=float(_get(m, "stroke_mm", 250.0)),
        supply_sag=bool(_get(m, "supply_sag", True)),
        telemetry_divisor=int(_get(m, "telemetry_divisor", 2)),
        geometry=geometry,
        actuator_cal=actuator_cal,
        speed_cal=speed_cal,
        battery=battery,
    )

    p = _section(doc, "planner")
    wheelbase = sim.wheelbase
    default_radius = wheelbase / math.tan(actuator_cal.angle_max_left) * 1.2
    follower = FollowerConfig(
        cruise_speed=float(_get(p, "cruise_ms", 0.2)),
        creep_speed=float(_get(p, "creep_ms", 0.03)),
        approach_gain=float(_get(p, "approach_gain", 0.6)),
        lookahead_min=float(_get(p, "lookahead_min_m", 0.3)),
        lookahead_max=float(_get(p, "lookahead_max_m", 1.5)),
        sample_ds=float(_get(p, "sample_ds_m", 0.05)),
        abort_cross_track=float(_get(p, "abort_cross_track_m", 0.75)),
        wheelbase=wheelbase,
        max_wheel_angle=actuator_cal.angle_max_left,
    )
    nav = NavigatorConfig(
        turn_radius=float(_get(p, "turn_radius_m", default_radius)),
        max_attempts=int(_get(p, "max_attempts", 3)),
        time_budget=float(_get(p, "time_budget_s", 180.0)),
        follower=follower,
    )
    tolerance = GoalTolerance(
        position=float(_get(p, "tol_position_m", 0.150)),
        heading=float(_get(p, "tol_heading_rad", 0.15)),
    )

    gw = _section(doc, "gateway")
    gateway = GatewayConfig(
        host=str(_get(gw, "host", "127.0.0.1")),
        port=int(_get(gw, "port", 8720)),
        dmh_freshness_s=float(_get(gw, "dmh_freshness_s", 0.2)),
        telemetry_divisor=int(_get(gw, "telemetry_divisor", 5)),
    )

    st = _section(doc, "stack")
    stack = StackSettings(
        dt=sim.dt,
        heartbeat_period=float(_get(st, "heartbeat_period_s", 0.05)),
        bv_poll_period=float(_get(st, "bv_poll_period_s", 1.0)),
        joy_timeout=float(_get(st, "joy_timeout_s", 0.5)),
        watchdog_period=float(_get(st, "watchdog_period_s", 0.1)),
        baud=int(_get(st, "baud", 112_000)),
    )

    return Config(geometry=geometry, actuator_cal=actuator_cal,
                  speed_cal=speed_cal, battery=battery, sim=sim, nav=nav,
                  tolerance=tolerance, gateway=gateway, stack=stack)


def default_config_text() -> str:
    """The annotated default config shipped with the package."""
    return resources.files("dbwsim").joinpath("data/default.yaml").read_text()
