"""Command-line entry points.

    dbwsim sim       run the simulator + control stack (gateway on a port,
                     or a scripted scenario in virtual time)
    dbwsim teleop    drive from this terminal, no browser console
    dbwsim goto      run one navigation goal headless and report the result
    dbwsim replay    feed a wire capture back into a fresh vehicle
    dbwsim selftest  quick built-in end-to-end checks
    dbwsim config    print the annotated default configuration
"""

import argparse
import math
import sys
import threading

from .config import default_config_text, load_config
from .planner import GoalStatus
from .stack import Goto, ModeSwitch, Stack, StackMode


def _add_config_arg(p):
    p.add_argument("--config", metavar="FILE", default=None,
                   help="YAML config (default: $DBWSIM_CONFIG or built-ins)")


def _build_parser():
    parser = argparse.ArgumentParser(prog="dbwsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sim", help="run the simulator and control stack")
    _add_config_arg(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--scenario", metavar="FILE",
                   help="run a scripted scenario in virtual time and exit")
    p.add_argument("--duration", type=float, default=None,
                   help="extra/total simulated seconds for --scenario")
    p.add_argument("--telemetry", metavar="FILE",
                   help="write ground-truth telemetry lines here")
    p.add_argument("--capture", metavar="FILE",
                   help="write the wire capture here on exit")

    p = sub.add_parser("teleop", help="keyboard teleop without the console")
    _add_config_arg(p)

    p = sub.add_parser("goto", help="drive to a pose and report the outcome")
    _add_config_arg(p)
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.add_argument("heading_deg", type=float)
    p.add_argument("tol_pos", type=float, nargs="?", default=None,
                   help="position tolerance m (default 0.150)")
    p.add_argument("tol_heading", type=float, nargs="?", default=None,
                   help="heading tolerance rad (default 0.15)")
    p.add_argument("--telemetry", metavar="FILE")
    p.add_argument("--capture", metavar="FILE")

    p = sub.add_parser("replay", help="feed a capture file to a fresh vehicle")
    _add_config_arg(p)
    p.add_argument("capture", metavar="FILE")
    p.add_argument("--telemetry", metavar="FILE")

    p = sub.add_parser("selftest", help="quick end-to-end sanity checks")
    _add_config_arg(p)

    sub.add_parser("config", help="print the annotated default config")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return {
        "sim": cmd_sim,
        "teleop": cmd_teleop,
        "goto": cmd_goto,
        "replay": cmd_replay,
        "selftest": cmd_selftest,
        "config": cmd_config,
    }[args.command](args)


def _write_capture(stack, path):
    if path:
        with open(path, "w") as fh:
            fh.write("\n".join(stack.capture_lines) + "\n")


def cmd_sim(args) -> int:
    from .gateway import Gateway
    from .scenario import parse_scenario, run_scenario, scenario_duration

    config = load_config(args.config)
    stack = Stack(config, telemetry_path=args.telemetry,
                  capture=bool(args.capture))

    if args.scenario:
        with open(args.scenario) as fh:
            events = parse_scenario(fh.read())
        duration = args.duration or scenario_duration(events)
        run_scenario(stack, events, duration)
        _write_capture(stack, args.capture)
        s = stack.sim.state
        print(f"scenario done at t={stack.t:.2f}s  pose=({s.x:.3f}, {s.y:.3f}, "
              f"{s.heading:.3f})  v={s.v:.3f}  "
              f"safety={stack.sim.supervisor.state.mode.value}")
        stack.telemetry.close()
        return 0

    host = args.host or config.gateway.host
    port = config.gateway.port if args.port is None else args.port
    gw = Gateway(stack, host, port)
    gw.start()
    print(f"gateway listening on ws://{host}:{gw.port}  (Ctrl-C stops)",
          flush=True)
    stop = threading.Event()
    try:
        stack.run_realtime(stop)
    except KeyboardInterrupt:
        pass
    finally:
        gw.stop()
        _write_capture(stack, args.capture)
        stack.telemetry.close()
    return 0


def cmd_goto(args) -> int:
    config = load_config(args.config)
    stack = Stack(config, telemetry_path=args.telemetry,
                  capture=bool(args.capture))
    stack.submit(ModeSwitch(StackMode.AUTO))
    if not stack.bench_arm():
        print("arming failed", file=sys.stderr)
        return 2
    stack.submit(Goto(args.x, args.y, math.radians(args.heading_deg),
                      args.tol_pos, args.tol_heading))
    stack.run_until(lambda: stack.navigator.status is not GoalStatus.RUNNING,
                    config.nav.time_budget + 30.0)
    stack.run(3.0)  # settle to rest
    s = stack.sim.state
    err = math.hypot(s.x - args.x, s.y - args.y)
    herr = abs(math.atan2(math.sin(s.heading - math.radians(args.heading_deg)),
                          math.cos(s.heading - math.radians(args.heading_deg))))
    status = stack.navigator.status.value
    print(f"{status}  t={stack.t:.2f}s  position error {err * 1000:.0f} mm  "
          f"heading error {herr:.4f} rad")
    if stack.navigator.diagnostic:
        print(f"diagnostic: {stack.navigator.diagnostic}")
    _write_capture(stack, args.capture)
    stack.telemetry.close()
    return 0 if status == "success" else 1


def cmd_replay(args) -> int:
    from .protocol import Endpoint, FrameKind, decode, parse_capture_line, pipe_pair
    from .simulator import VehicleSim
    from .telemetry import TelemetryWriter

    config = load_config(args.config)
    speed_host, speed_dev = pipe_pair()
    steer_host, steer_dev = pipe_pair()
    writer = TelemetryWriter(args.telemetry)
    sim = VehicleSim(config.sim, speed_dev, steer_dev,
                     telemetry_cb=writer.emit)
    sim.dmh_press()  # the handle is physical; a capture cannot carry it

    sent = skipped = 0
    with open(args.capture) as fh:
        records = []
        for line in fh:
            if not line.strip():
                continue
            direction, t, body = parse_capture_line(line)
            if direction == ">":
                records.append((t, body.encode("ascii") + b"\n"))
    records.sort(key=lambda r: r[0])
    for t, payload in records:
        while sim.state.t < t:
            sim.tick()
        if decode(payload, Endpoint.SPEED_CONTROLLER).kind is not FrameKind.MALFORMED:
            speed_host.send_line(payload)
        elif decode(payload, Endpoint.STEERING_CONTROLLER).kind is not FrameKind.MALFORMED:
            steer_host.send_line(payload)
        else:
            skipped += 1
            continue
        sent += 1
    sim.run(1.0)
    s = sim.state
    print(f"replayed {sent} frames ({skipped} skipped)  final t={s.t:.2f}s  "
          f"pose=({s.x:.3f}, {s.y:.3f}, {s.heading:.3f})  v={s.v:.3f}  "
          f"safety={sim.supervisor.state.mode.value}")
    writer.close()
    return 0


def cmd_teleop(args) -> int:
    from .teleop import run_teleop

    return run_teleop(load_config(args.config))


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return run_selftest(load_config(args.config))


def cmd_config(args) -> int:
    sys.stdout.write(default_config_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
