"""Terminal teleop fallback.

Terminals deliver no key-up events, so a true held dead-man's handle is
impossible here: instead *any* keypress refreshes a short hold window and
silence releases it. This is a degraded bench convention -- the browser
console implements the real hold semantics. Keys:

    w / s   nudge speed forward / reverse      space   zero speed
    a / d   nudge steering left / right        c       center steering
    q       release and quit
"""

import select
import sys
import termios
import threading
import time
import tty

from .stack import DmhState, Ignite, Joy, Stack

HOLD_WINDOW = 0.5
SPEED_STEP = 0.1   # fraction of the stick axis per press
STEER_STEP = 0.1


def run_teleop(config) -> int:
    if not sys.stdin.isatty():
        print("teleop needs a terminal (no tty on stdin)", file=sys.stderr)
        return 2

    stack = Stack(config)
    stop = threading.Event()
    ticker = threading.Thread(target=stack.run_realtime, args=(stop,),
                              daemon=True)
    ticker.start()

    stick_x = 0.0
    stick_y = 0.0
    last_key = 0.0
    ignited = False

    fd = sys.stdin.fileno()
    old = termios.tcgetattr(fd)
    tty.setcbreak(fd)
    print("hold any key to stay armed; w/s speed, a/d steer, space stop, "
          "q quits\r")
    try:
        while True:
            ready, _, _ = select.select([sys.stdin], [], [], 0.05)
            now = time.monotonic()
            if ready:
                key = sys.stdin.read(1)
                last_key = now
                if key == "q":
                    break
                if key == "w":
                    stick_y = min(1.0, stick_y + SPEED_STEP)
                elif key == "s":
                    stick_y = max(-1.0, stick_y - SPEED_STEP)
                elif key == "a":
                    stick_x = min(1.0, stick_x + STEER_STEP)
                elif key == "d":
                    stick_x = max(-1.0, stick_x - STEER_STEP)
                elif key == " ":
                    stick_y = 0.0
                elif key == "c":
                    stick_x = 0.0
                stack.submit(DmhState(True))
                if not ignited:
                    stack.submit(Ignite())
                    ignited = True
            elif now - last_key > HOLD_WINDOW:
                stack.submit(DmhState(False))
                ignited = False
                stick_x = stick_y = 0.0
            stack.submit(Joy(stick_x, stick_y))
            s = stack.sim.state
            sys.stdout.write(
                f"\r[{stack.sim.supervisor.state.mode.value:^15}] "
                f"v={s.v:+.2f} m/s  wheel={s.steer_angle:+.2f} rad  "
                f"pose=({s.x:+.1f},{s.y:+.1f})   ")
            sys.stdout.flush()
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        termios.tcsetattr(fd, termios.TCSADRAIN, old)
        print()
    return 0
