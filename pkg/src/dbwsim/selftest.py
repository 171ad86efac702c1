"""Built-in sanity checks behind the ``selftest`` CLI verb.

Fast spot checks of the calibration tables, the wire protocol, the safety
chain and one short closed-loop drive; the pytest suite is the thorough
version.
"""

import math

from .drivebywire import command_to_voltage, compensate_for_supply, speed_to_command
from .geometry import angle_to_command, angle_to_extension, command_to_angle, extension_to_angle
from .planner import GoalStatus
from .protocol import Endpoint, FrameKind, WireFrame, decode, encode
from .stack import Goto, HeartbeatsEnable, ModeSwitch, Stack, StackMode


def _check(name, fn):
    try:
        fn()
        print(f"PASS  {name}")
        return True
    except AssertionError as exc:
        print(f"FAIL  {name}: {exc}")
        return False


def run_selftest(config) -> int:
    checks = []

    def steering_table():
        assert angle_to_command(0.0, config.actuator_cal) == 1900
        assert angle_to_command(math.radians(-45), config.actuator_cal) == 2500
        assert angle_to_command(math.radians(45), config.actuator_cal) == 1000
        assert abs(command_to_angle(1900, config.actuator_cal)) < 1e-12
    checks.append(("steering command anchors", steering_table))

    def speed_table():
        assert speed_to_command(0.0, config.speed_cal) == 170
        for cmd, volts in ((0, 0.0), (170, 1.9), (255, 3.0)):
            got = command_to_voltage(cmd, 5.0, config.speed_cal)
            assert abs(got - volts) <= 0.15, f"byte {cmd}: {got:.3f} V"
        assert compensate_for_supply(170, 4.9, config.speed_cal) == 173
    checks.append(("speed byte / voltage anchors", speed_table))

    def linkage_roundtrip():
        for theta in (-0.7, -0.3, 0.0, 0.3, 0.7):
            ext = angle_to_extension(theta, config.geometry)
            back = extension_to_angle(ext, config.geometry)
            assert abs(back - theta) < 1e-6, f"{theta} -> {back}"
    checks.append(("linkage round trip", linkage_roundtrip))

    def wire():
        assert encode(WireFrame.speed_cmd(210)) == b"FA:210\n"
        frame = decode(b"FA:1900\n", Endpoint.STEERING_CONTROLLER)
        assert frame.kind is FrameKind.STEER_CMD and frame.value == 1900
        assert decode(b"garbage\n", Endpoint.SPEED_CONTROLLER).kind \
            is FrameKind.MALFORMED
    checks.append(("wire protocol", wire))

    def watchdog():
        stack = Stack(config)
        assert stack.bench_arm(), "arming failed"
        stack.submit(HeartbeatsEnable(False))
        stack.run(0.5)
        assert stack.sim.supervisor.state.mode.value == "Fault"
        assert abs(stack.sim.state.v) < 0.05
    checks.append(("heartbeat watchdog trips", watchdog))

    def short_drive():
        stack = Stack(config)
        stack.submit(ModeSwitch(StackMode.AUTO))
        assert stack.bench_arm(), "arming failed"
        stack.submit(Goto(1.0, 0.0, 0.0))
        ok = stack.run_until(
            lambda: stack.navigator.status is not GoalStatus.RUNNING, 60.0)
        assert ok and stack.navigator.status is GoalStatus.SUCCESS, \
            stack.navigator.diagnostic
        stack.run(3.0)
        err = math.hypot(stack.sim.state.x - 1.0, stack.sim.state.y)
        assert err < 0.150, f"final error {err:.3f} m"
    checks.append(("one-metre closed-loop goal", short_drive))

    results = [_check(name, fn) for name, fn in checks]
    print(f"{sum(results)}/{len(results)} checks passed")
    return 0 if all(results) else 1
