"""Ground-truth telemetry records, one JSON object per line.

Field order is fixed and floats serialize via repr, so identical runs
produce byte-identical captures.
"""

import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class TelemetryRecord:
    t: float
    x: float
    y: float
    heading: float
    v: float
    steer_angle: float
    actuator_ext: float
    v_battery: float
    safety_mode: str

    def to_json_line(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


class TelemetryWriter:
    """Collects records and optionally streams them to a file."""

    def __init__(self, path=None):
        self.lines = []
        self._fh = open(path, "w") if path else None

    def emit(self, record: TelemetryRecord) -> None:
        line = record.to_json_line()
        self.lines.append(line)
        if self._fh:
            self._fh.write(line + "\n")

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None
