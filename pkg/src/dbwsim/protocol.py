"""ASCII line protocol spoken to the speed and steering controllers.

Frames are newline-terminated ASCII: ``FA:<n>`` carries a command (speed
byte or steering counts depending on which link it travels), ``BV`` asks
for the battery voltage, ``BV:<centivolts>`` answers it, and ``HB:<millis>``
is the watchdog heartbeat. Decoding is total: any line that is not a
well-formed frame for its endpoint becomes a Malformed value, never an
exception, and malformed lines do not feed the watchdog.
"""

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import EncodeError

LINE_TERMINATOR = b"\n"

# Preserved from the controller firmware docs even though 115200 is the
# common rate; override in config when bridging real hardware.
DEFAULT_BAUD = 112_000

SPEED_CMD_RANGE = (0, 255)
STEER_CMD_RANGE = (1000, 2500)


class FrameKind(Enum):
    SPEED_CMD = "speed_cmd"
    STEER_CMD = "steer_cmd"
    BATTERY_QUERY = "battery_query"
    BATTERY_REPLY = "battery_reply"
    HEARTBEAT = "heartbeat"
    MALFORMED = "malformed"


class Endpoint(Enum):
    SPEED_CONTROLLER = "speed"
    STEERING_CONTROLLER = "steering"


@dataclass(frozen=True)
class LinkConfig:
    baud: int = DEFAULT_BAUD
    line_terminator: bytes = LINE_TERMINATOR
    endpoint: Endpoint = Endpoint.SPEED_CONTROLLER

    def __post_init__(self):
        if self.baud <= 0:
            raise ValueError(f"baud must be positive, got {self.baud}")


@dataclass(frozen=True)
class WireFrame:
    """One parsed line. ``value`` is counts for commands, centivolts for a
    battery reply, milliseconds for a heartbeat; ``raw`` keeps the original
    text for malformed lines and is not part of equality."""

    kind: FrameKind
    value: int = 0
    raw: str = field(default="", compare=False)

    @classmethod
    def speed_cmd(cls, value: int) -> "WireFrame":
        return cls(FrameKind.SPEED_CMD, value)

    @classmethod
    def steer_cmd(cls, value: int) -> "WireFrame":
        return cls(FrameKind.STEER_CMD, value)

    @classmethod
    def battery_query(cls) -> "WireFrame":
        return cls(FrameKind.BATTERY_QUERY)

    @classmethod
    def battery_reply(cls, centivolts: int) -> "WireFrame":
        return cls(FrameKind.BATTERY_REPLY, centivolts)

    @classmethod
    def heartbeat(cls, millis: int) -> "WireFrame":
        return cls(FrameKind.HEARTBEAT, millis)

    @classmethod
    def malformed(cls, raw: str) -> "WireFrame":
        return cls(FrameKind.MALFORMED, 0, raw)


def encode(frame: WireFrame) -> bytes:
    """Frame -> newline-terminated ASCII bytes; raises EncodeError on
    invariant-violating frames (Malformed included)."""
    kind, value = frame.kind, frame.value
    if kind is FrameKind.SPEED_CMD:
        if not SPEED_CMD_RANGE[0] <= value <= SPEED_CMD_RANGE[1]:
            raise EncodeError(f"speed byte {value} outside {SPEED_CMD_RANGE}")
        return b"FA:%d\n" % value
    if kind is FrameKind.STEER_CMD:
        if not STEER_CMD_RANGE[0] <= value <= STEER_CMD_RANGE[1]:
            raise EncodeError(f"steering counts {value} outside {STEER_CMD_RANGE}")
        return b"FA:%d\n" % value
    if kind is FrameKind.BATTERY_QUERY:
        return b"BV\n"
    if kind is FrameKind.BATTERY_REPLY:
        if value < 0:
            raise EncodeError(f"battery centivolts {value} negative")
        return b"BV:%d\n" % value
    if kind is FrameKind.HEARTBEAT:
        if value < 0:
            raise EncodeError(f"heartbeat millis {value} negative")
        return b"HB:%d\n" % value
    raise EncodeError(f"cannot encode {kind}")


_FA_RE = re.compile(r"^FA:(\d{1,7})$")
_BV_RE = re.compile(r"^BV:(\d{1,7})$")
_HB_RE = re.compile(r"^HB:(\d{1,12})$")


def decode(line: bytes, endpoint: Endpoint) -> WireFrame:
    """One terminator-delimited unit -> exactly one WireFrame.

    Total function: undecodable bytes come back as Malformed with the raw
    text preserved. The endpoint decides which FA value range is legal so a
    steering count can never be taken for a speed byte.
    """
    if isinstance(line, str):
        raw_bytes = line.encode("utf-8", "replace")
    else:
        raw_bytes = bytes(line)
    raw_bytes = raw_bytes.rstrip(b"\r\n")
    try:
        text = raw_bytes.decode("ascii")
    except UnicodeDecodeError:
        return WireFrame.malformed(raw_bytes.decode("ascii", "replace"))

    m = _FA_RE.match(text)
    if m:
        value = int(m.group(1))
        if endpoint is Endpoint.SPEED_CONTROLLER:
            if SPEED_CMD_RANGE[0] <= value <= SPEED_CMD_RANGE[1]:
                return WireFrame(FrameKind.SPEED_CMD, value, text)
        else:
            if STEER_CMD_RANGE[0] <= value <= STEER_CMD_RANGE[1]:
                return WireFrame(FrameKind.STEER_CMD, value, text)
        return WireFrame.malformed(text)
    if text == "BV":
        return WireFrame(FrameKind.BATTERY_QUERY, 0, text)
    m = _BV_RE.match(text)
    if m:
        return WireFrame(FrameKind.BATTERY_REPLY, int(m.group(1)), text)
    m = _HB_RE.match(text)
    if m:
        return WireFrame(FrameKind.HEARTBEAT, int(m.group(1)), text)
    return WireFrame.malformed(text)


# ---------------------------------------------------------------------------
# In-process links

class Pipe:
    """One half of an in-process duplex byte channel.

    Line-oriented and single-owner per direction: deque operations are
    atomic under the GIL, so a network thread may feed one end while the
    control tick drains the other.
    """

    def __init__(self, inbox, outbox):
        self._inbox = inbox
        self._outbox = outbox
        self.closed = False

    def send_line(self, data: bytes) -> None:
        if self.closed:
            raise ConnectionError("link closed")
        self._outbox.append(bytes(data))

    def poll_lines(self) -> list:
        """Drain and return all pending inbound lines (possibly empty)."""
        lines = []
        while self._inbox:
            lines.append(self._inbox.popleft())
        return lines

    def close(self) -> None:
        self.closed = True


def pipe_pair() -> tuple:
    """Two connected Pipe ends (a -> b and b -> a)."""
    from collections import deque

    ab, ba = deque(), deque()
    return Pipe(ba, ab), Pipe(ab, ba)


# ---------------------------------------------------------------------------
# Capture / replay

CAPTURE_TX = ">"  # host -> controller
CAPTURE_RX = "<"  # controller -> host

_CAPTURE_RE = re.compile(r"^([<>])\s+(\d+\.\d+)\s+(.*)$")


def capture_line(direction: str, t: float, frame: WireFrame) -> str:
    """Format one capture record: direction, seconds, frame text."""
    if direction not in (CAPTURE_TX, CAPTURE_RX):
        raise ValueError(f"direction must be '>' or '<', got {direction!r}")
    body = encode(frame).decode("ascii").rstrip("\n")
    return f"{direction} {t:.5f} {body}"


def parse_capture_line(line: str) -> tuple:
    """Capture record -> (direction, seconds, frame text); raises ValueError
    on anything that is not a capture record."""
    m = _CAPTURE_RE.match(line.strip())
    if not m:
        raise ValueError(f"not a capture record: {line!r}")
    return m.group(1), float(m.group(2)), m.group(3)


class TapPipe:
    """Wraps a Pipe, recording traffic in capture format.

    Both links share one capture stream; at replay time frames route by
    their value ranges (speed bytes, steering counts and BV/HB are
    disjoint), so no link tag is needed.
    """

    def __init__(self, pipe: Pipe, clock, sink):
        self._pipe = pipe
        self._clock = clock
        self._sink = sink
        self.closed = pipe.closed

    def _record(self, direction: str, data: bytes) -> None:
        text = data.decode("ascii", "replace").rstrip("\n")
        self._sink.append(f"{direction} {self._clock():.5f} {text}")

    def send_line(self, data: bytes) -> None:
        self._record(CAPTURE_TX, data)
        self._pipe.send_line(data)

    def poll_lines(self) -> list:
        lines = self._pipe.poll_lines()
        for line in lines:
            self._record(CAPTURE_RX, line)
        return lines

    def close(self) -> None:
        self._pipe.close()
