"""Wigwag speed-command pipeline: m/s -> command byte -> DAC volts.

The motor controller reads a single analog voltage: a dead band around
1.9 V means no motion, higher is forward, lower is reverse. The byte->volt
DAC is referenced to the logic supply rail, which sags with the battery,
so commands are compensated using the measured supply before transmission.
"""

import math
from dataclasses import dataclass

from .errors import RangeError, SupplyFaultError

# Speed-mode ceilings of the donor drivetrain (4 mph low, 8 mph high).
MPH = 0.44704
LOW_MODE_MAX = 4.0 * MPH
HIGH_MODE_MAX = 8.0 * MPH

# Speed-dial preset used for supervised lab driving.
DIAL_5_SPEED = 0.2

# Plausible logic-supply band; readings outside it are treated as a fault.
SUPPLY_BAND = (3.5, 5.5)

# Hardware top speed regardless of commands (15 km/h).
HARDWARE_MAX_SPEED = 15.0 / 3.6


def round_half_away(x: float) -> int:
    """Round half away from zero -- the one quantization rule for commands."""
    return int(math.floor(x + 0.5)) if x >= 0.0 else int(math.ceil(x - 0.5))


@dataclass(frozen=True)
class SpeedCalibration:
    """Anchor bytes of the wigwag command scale and the speed envelope.

    The byte scale: 0 is hardest reverse, 255 hardest forward, 170 the
    stop/home position. Software stays inside the 80..240 envelope; the
    outer bytes exist on the hardware but are never emitted. The open
    interval (132, 201) is the dead zone -- no motion, and the band the
    ignition interlock requires.
    """

    cmd_stop: int = 170
    cmd_ignition: int = 164
    cmd_slowest_reverse: int = 132
    cmd_slowest_forward: int = 201
    cmd_ros_reverse_limit: int = 80
    cmd_ros_forward_limit: int = 240
    cmd_min: int = 0
    cmd_max: int = 255
    dac_gain: float = 3.0 / 255.0
    v_supply_nominal: float = 5.0
    v_max_speed_forward: float = LOW_MODE_MAX
    # Reverse default scales forward by the command-span ratio 52/39.
    v_max_speed_reverse: float = LOW_MODE_MAX * 52.0 / 39.0

    def __post_init__(self):
        order = (self.cmd_min, self.cmd_ros_reverse_limit,
                 self.cmd_slowest_reverse, self.cmd_ignition, self.cmd_stop,
                 self.cmd_slowest_forward, self.cmd_ros_forward_limit,
                 self.cmd_max)
        if list(order) != sorted(order) or len(set(order[1:-1])) != 6:
            raise ValueError(f"command anchors out of order: {order}")
        if self.v_max_speed_forward <= 0.0 or self.v_max_speed_reverse <= 0.0:
            raise ValueError("speed envelope must be positive")

    @classmethod
    def for_mode(cls, mode: str = "low", dial_fraction: float = 1.0,
                 **overrides) -> "SpeedCalibration":
        """Calibration for a drivetrain mode scaled by the speed dial."""
        if mode not in ("low", "high"):
            raise ValueError(f"mode must be 'low' or 'high', got {mode!r}")
        if not 0.0 < dial_fraction <= 1.0:
            raise ValueError("dial_fraction must be in (0, 1]")
        vmax = (LOW_MODE_MAX if mode == "low" else HIGH_MODE_MAX) * dial_fraction
        overrides.setdefault("v_max_speed_forward", vmax)
        overrides.setdefault("v_max_speed_reverse", vmax * 52.0 / 39.0)
        return cls(**overrides)


@dataclass(frozen=True)
class BatteryModel:
    """24 V battery tapped through a 100k/10k divider into the ADC.

    The ADC reads across the 10k leg, so the divider ratio is 1/11 and a
    full battery lands comfortably under the 5 V ADC ceiling.
    """

    v_battery: float = 24.0
    divider_r_top: float = 100_000.0
    divider_r_bottom: float = 10_000.0
    v_supply_actual: float = 5.0

    @property
    def divider_ratio(self) -> float:
        return self.divider_r_bottom / (self.divider_r_top + self.divider_r_bottom)

    def adc_reading(self, v_battery: float = None) -> float:
        v = self.v_battery if v_battery is None else v_battery
        return v * self.divider_ratio

    def supply_voltage(self, v_battery: float) -> float:
        """Logic rail implied by the battery: sags proportionally below
        nominal, never rises above it."""
        return min(5.0, 5.0 * v_battery / self.v_battery)


def speed_to_command(v: float, cal: SpeedCalibration = SpeedCalibration()) -> int:
    """Desired speed (m/s) -> wigwag byte, clamped to the software envelope."""
    if math.isnan(v):
        raise ValueError("speed command is NaN")
    if v == 0.0:
        return cal.cmd_stop
    if v > 0.0:
        span = cal.cmd_ros_forward_limit - cal.cmd_slowest_forward
        raw = cal.cmd_slowest_forward + span * (v / cal.v_max_speed_forward)
    else:
        span = cal.cmd_slowest_reverse - cal.cmd_ros_reverse_limit
        raw = cal.cmd_slowest_reverse + span * (v / cal.v_max_speed_reverse)
    cmd = round_half_away(raw)
    return max(cal.cmd_ros_reverse_limit, min(cal.cmd_ros_forward_limit, cmd))


def command_to_speed(cmd: int, cal: SpeedCalibration = SpeedCalibration(),
                     hardware_max: float = HARDWARE_MAX_SPEED) -> float:
    """Speed (m/s) the drivetrain settles at for a raw byte.

    Inverse of speed_to_command inside the software envelope; bytes beyond
    the envelope extrapolate the same slopes and clamp at the hardware
    ceiling. The dead zone maps to zero.
    """
    if cmd < cal.cmd_min or cmd > cal.cmd_max:
        raise RangeError(f"speed byte {cmd} outside [0, 255]")
    if cal.cmd_slowest_reverse < cmd < cal.cmd_slowest_forward:
        return 0.0
    if cmd >= cal.cmd_slowest_forward:
        span = cal.cmd_ros_forward_limit - cal.cmd_slowest_forward
        v = cal.v_max_speed_forward * (cmd - cal.cmd_slowest_forward) / span
    else:
        span = cal.cmd_slowest_reverse - cal.cmd_ros_reverse_limit
        v = -cal.v_max_speed_reverse * (cal.cmd_slowest_reverse - cmd) / span
    return max(-hardware_max, min(hardware_max, v))


def command_to_voltage(cmd: int, v_supply: float,
                       cal: SpeedCalibration = SpeedCalibration()) -> float:
    """DAC output voltage for a byte at the given supply rail voltage."""
    if cmd < cal.cmd_min or cmd > cal.cmd_max:
        raise RangeError(f"speed byte {cmd} outside [0, 255]")
    return cmd * cal.dac_gain * (v_supply / cal.v_supply_nominal)


def compensate_for_supply(cmd_nominal: int, v_supply_measured: float,
                          cal: SpeedCalibration = SpeedCalibration()) -> int:
    """Rescale a byte so the DAC holds its nominal-supply output voltage.

    Raises SupplyFaultError outside the plausible supply band. Commands
    that would need more than 255 counts saturate: the DAC physically
    cannot reach the target voltage on a sagging rail.
    """
    if cmd_nominal < cal.cmd_min or cmd_nominal > cal.cmd_max:
        raise RangeError(f"speed byte {cmd_nominal} outside [0, 255]")
    if not SUPPLY_BAND[0] <= v_supply_measured <= SUPPLY_BAND[1]:
        raise SupplyFaultError(v_supply_measured, SUPPLY_BAND)
    cmd = round_half_away(cmd_nominal * cal.v_supply_nominal / v_supply_measured)
    return max(cal.cmd_min, min(cal.cmd_max, cmd))


def battery_voltage_from_adc(adc_reading: float,
                             model: BatteryModel = BatteryModel()) -> float:
    """Undo the potential divider: ADC volts -> battery volts."""
    if adc_reading < 0.0:
        raise RangeError(f"ADC reading {adc_reading!r} V is negative")
    return adc_reading / model.divider_ratio


def in_ignition_dead_zone(cmd: int,
                          cal: SpeedCalibration = SpeedCalibration()) -> bool:
    """True iff the byte sits strictly inside the no-motion band."""
    return cal.cmd_slowest_reverse < cmd < cal.cmd_slowest_forward
